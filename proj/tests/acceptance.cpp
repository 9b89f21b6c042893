// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "acdl/conformance.hpp"
#include "acdl/diff.hpp"
#include "acdl/format.hpp"
#include "acdl/json_io.hpp"
#include "acdl/parser.hpp"
#include "acdl/pipeline.hpp"
#include "acdl/server.hpp"
#include "generators.hpp"
#include "test_support.hpp"

namespace acdl {
namespace {

using nlohmann::json;

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::optional<ResolvedContext> resolve_text(std::string_view source, std::string_view context = {}) {
  ResolveOutput out = resolve_source(source, context);
  if (has_errors(out.diagnostics)) return std::nullopt;
  return out.resolved;
}

std::string joined(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) out += (out.empty() ? "" : ",") + item;
  return "[" + out + "]";
}

Verdict corpus_parse() {
  Verdict v;
  const auto listings = testing::load_listings();
  const auto start = std::chrono::steady_clock::now();
  int invalid = 0;
  for (const auto& listing : listings) {
    const auto got = testing::error_codes(testing::check_listing(listing));
    if (!listing.expect.empty()) ++invalid;
    if (got != listing.expect) v.fail(listing.file + " gave " + joined(got) + ", expected " + joined(listing.expect));
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (invalid != 1) v.fail("expected exactly one invalid listing, found " + std::to_string(invalid));
  if (seconds >= 1.0) v.fail("took " + std::to_string(seconds) + " s");
  if (v.pass) {
    v.detail = std::to_string(listings.size()) + " listings in " + std::to_string(static_cast<int>(seconds * 1000)) + " ms";
  }
  return v;
}

Verdict scoping_suite() {
  Verdict v;
  const auto manifest = json::parse(testing::read_data("corpus/fixtures/scoping/manifest.json"));
  int passed = 0;
  int total = 0;
  for (const auto& rule : manifest.at("rules")) {
    const std::string code = rule.at("code");
    const auto bad = testing::codes(check(testing::read_data("corpus/fixtures/scoping/" + rule.at("violating").get<std::string>())).diagnostics);
    const auto good = testing::codes(check(testing::read_data("corpus/fixtures/scoping/" + rule.at("compliant").get<std::string>())).diagnostics);
    total += 2;
    if (bad == std::vector<std::string>{code}) {
      ++passed;
    } else {
      v.fail("rule " + rule.at("rule").get<std::string>() + " violating gave " + joined(bad));
    }
    if (good.empty()) {
      ++passed;
    } else {
      v.fail("rule " + rule.at("rule").get<std::string>() + " compliant gave " + joined(good));
    }
  }
  if (total != 20) v.fail("expected 20 fixtures, found " + std::to_string(total));
  if (v.pass) v.detail = std::to_string(passed) + "/" + std::to_string(total) + " fixtures";
  return v;
}

std::vector<std::string> loop_values(std::string_view source) {
  EnvironmentDocument env;
  env.time = {1};
  const ExpandOutput out = expand_source(source, "P", env);
  std::vector<std::string> values;
  if (!out.prompt || has_errors(out.diagnostics)) return {"<error>"};
  for (const Message& message : out.prompt->messages) values.push_back(message.slots.at(0).bindings.at(0).second);
  return values;
}

Verdict range_semantics() {
  Verdict v;
  std::mt19937 rng(314159);
  std::uniform_int_distribution<std::int64_t> bound(-50, 50);
  std::uniform_int_distribution<std::int64_t> stride(1, 12);
  for (int i = 0; i < 1000 && v.pass; ++i) {
    const std::int64_t a = bound(rng);
    const std::int64_t b = bound(rng);
    const std::int64_t step = stride(rng);
    const std::string source = "P[@T]: {\n  ForEach(i: range(" + std::to_string(a) + ", " + std::to_string(b) + ", " +
                               std::to_string(step) + ")) {\n    U: env.q[i]\n  }\n}\n";
    const std::int64_t expected = b <= a ? 0 : (b - a + step - 1) / step;
    const auto values = loop_values(source);
    if (static_cast<std::int64_t>(values.size()) != expected) {
      v.fail("range(" + std::to_string(a) + ", " + std::to_string(b) + ", " + std::to_string(step) + ") emitted " +
             std::to_string(values.size()) + ", expected " + std::to_string(expected));
    }
  }
  const auto exclusive = loop_values("P[@T]: {\n  ForEach(i: range(1, 3)) {\n    U: env.q[i]\n  }\n}\n");
  if (exclusive != std::vector<std::string>{"1", "2"}) v.fail("range(1, 3) emitted " + joined(exclusive));
  if (v.pass) v.detail = "1000 triples; range(1, 3) = {1, 2}";
  return v;
}

ExpandOutput expand_fixture_quiet(const std::string& spec, const std::string& env_file) {
  const auto env = load_environment(testing::read_data("corpus/fixtures/env/" + env_file)).environment;
  return expand_source(testing::read_data("corpus/fixtures/" + spec), "", env);
}

Verdict expansion_oracles() {
  Verdict v;
  const struct {
    const char* spec;
    const char* env;
    const char* roles;
  } role_cases[] = {{"tool_agent.acdl", "tool_agent_t1.json", "SUS"}, {"tool_agent.acdl", "tool_agent_t3.json", "SUUAS"}};
  for (const auto& c : role_cases) {
    const auto out = expand_fixture_quiet(c.spec, c.env);
    const std::string got = out.prompt ? testing::role_letters(*out.prompt) : "<error>";
    if (got != c.roles) v.fail(std::string(c.env) + " gave " + got + ", expected " + c.roles);
  }
  const struct {
    const char* env;
    std::size_t count;
  } count_cases[] = {{"react1_t1.json", 2}, {"react1_t2.json", 4}, {"react1_t3.json", 6}};
  for (const auto& c : count_cases) {
    const auto out = expand_fixture_quiet("react1.acdl", c.env);
    const std::size_t got = out.prompt ? out.prompt->messages.size() : 0;
    if (got != c.count) v.fail(std::string(c.env) + " gave " + std::to_string(got) + " messages");
  }
  int oracle_files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(testing::data_path("corpus/fixtures/expected"))) {
    const auto oracle = json::parse(testing::read_file(entry.path()));
    const auto out = expand_fixture_quiet(oracle.at("spec"), oracle.at("env"));
    ++oracle_files;
    if (!out.prompt) {
      v.fail(entry.path().filename().string() + " did not expand");
      continue;
    }
    if (testing::role_letters(*out.prompt) != oracle.at("roles").get<std::string>()) {
      v.fail(entry.path().filename().string() + " role sequence differs");
    }
    std::vector<std::vector<std::string>> texts;
    for (const Message& message : out.prompt->messages) {
      auto& row = texts.emplace_back();
      for (const Slot& slot : message.slots) row.push_back(slot.text);
    }
    if (texts != oracle.at("messages").get<std::vector<std::vector<std::string>>>()) {
      v.fail(entry.path().filename().string() + " slot texts differ");
    }
  }
  if (v.pass) v.detail = "ToolAgent SUS/SUUAS, React1 2/4/6, " + std::to_string(oracle_files) + " hand-expansion files";
  return v;
}

std::string corpus_outputs() {
  std::string out;
  std::vector<std::filesystem::path> envs;
  for (const auto& entry : std::filesystem::directory_iterator(testing::data_path("corpus/fixtures/env"))) {
    envs.push_back(entry.path());
  }
  std::sort(envs.begin(), envs.end());
  std::vector<std::string> sources;
  for (const auto& path : testing::fixture_files()) sources.push_back(testing::read_file(path));
  for (const auto& listing : testing::load_listings()) {
    if (listing.entry == testing::ListingEntry::Document) sources.push_back(listing.source);
  }
  for (const std::string& source : sources) {
    out += render_source(source, default_theme()).svg;
    for (const auto& env_path : envs) {
      const auto env = load_environment(testing::read_file(env_path)).environment;
      const ExpandOutput expanded = expand_source(source, "", env);
      out += diagnostics_to_json(expanded.diagnostics, source, "x").dump();
      if (!expanded.prompt) continue;
      out += to_json(*expanded.prompt).dump();
      out += render_source(source, default_theme(), &env).svg;
    }
  }
  return out;
}

Verdict determinism() {
  Verdict v;
  const std::string first = corpus_outputs();
  for (int run = 2; run <= 3; ++run) {
    if (corpus_outputs() != first) v.fail("run " + std::to_string(run) + " differs");
  }
  if (v.pass) v.detail = "3 runs, " + std::to_string(first.size()) + " bytes each";
  return v;
}

void check_round_trip(const std::string& source, const std::string& label, Verdict& v) {
  const auto first = parse(source);
  if (has_errors(first.diagnostics)) {
    v.fail(label + " does not parse");
    return;
  }
  const std::string once = format(first.document);
  const auto second = parse(once);
  if (has_errors(second.diagnostics) || !ast_equal(first.document, second.document)) v.fail(label + " changes under format");
  if (format(second.document) != once) v.fail(label + " format is not byte-stable");
}

Verdict format_idempotence() {
  Verdict v;
  int documents = 0;
  for (const auto& path : testing::fixture_files()) {
    check_round_trip(testing::read_file(path), path.filename().string(), v);
    ++documents;
  }
  for (const auto& listing : testing::load_listings()) {
    if (listing.entry != testing::ListingEntry::Document || !listing.expect.empty()) continue;
    check_round_trip(listing.source, listing.file, v);
    ++documents;
  }
  testing::DocumentGenerator generator(20240601);
  for (int i = 0; i < 500; ++i) check_round_trip(generator.document(), "generated #" + std::to_string(i), v);
  if (v.pass) v.detail = std::to_string(documents) + " corpus + 500 generated documents";
  return v;
}

Verdict diff_soundness() {
  Verdict v;
  const auto pairs = json::parse(testing::read_data("corpus/fixtures/diff/pairs.json")).at("pairs");
  if (pairs.size() != 10) v.fail("expected 10 pairs, found " + std::to_string(pairs.size()));
  for (const auto& pair : pairs) {
    const auto a = resolve_text(testing::read_data("corpus/fixtures/" + pair.at("a").get<std::string>()));
    const auto b = resolve_text(testing::read_data("corpus/fixtures/" + pair.at("b").get<std::string>()));
    if (!a || !b) {
      v.fail(pair.dump() + " does not resolve");
      continue;
    }
    ContextDef target = b->context;
    target.body = strip_marks(target.body);
    if (!ast_equal(apply_edits(*a, diff(*a, *b).script), target)) v.fail(pair.dump() + " apply(diff) differs");
  }
  const auto base = resolve_text(testing::read_data("corpus/fixtures/mint_base.acdl"));
  const auto swapped = resolve_text(testing::read_data("corpus/fixtures/mint_tool_role.acdl"));
  if (base && swapped) {
    const auto script = diff(*base, *swapped).script;
    if (script.edits.size() != 1 || script.edits[0].kind != EditKind::ReplaceRole) {
      v.fail("MINT role swap gave " + std::to_string(script.edits.size()) + " edits");
    }
  } else {
    v.fail("MINT fixtures do not resolve");
  }
  if (v.pass) v.detail = "10 pairs sound, MINT swap = 1 ReplaceRole";
  return v;
}

// Learns the slots of a random context, then expands again with a value for each.
std::optional<ExpandedPrompt> valued_expansion(testing::DocumentGenerator& generator, std::mt19937& rng) {
  const auto resolved = resolve_text(generator.document(), "Gen");
  if (!resolved) return std::nullopt;
  EnvironmentDocument env;
  env.time = {std::uniform_int_distribution<std::int64_t>(1, 6)(rng)};
  const auto first = expand(*resolved, env);
  if (has_errors(first.diagnostics)) return std::nullopt;
  for (const Message& message : first.prompt.messages) {
    for (const Slot& slot : message.slots) {
      const std::string value = "value " + std::to_string(rng() % 1000);
      if (slot.kind == SlotKind::Var || slot.kind == SlotKind::Template) env.vars[slot.text] = value;
      if (slot.kind == SlotKind::Function) env.functions[slot.text] = json(value).dump();
    }
  }
  const auto second = expand(*resolved, env);
  if (has_errors(second.diagnostics)) return std::nullopt;
  return second.prompt;
}

Verdict conformance() {
  Verdict v;
  testing::GeneratorOptions options;
  options.expandable = true;
  testing::DocumentGenerator generator(2024, options);
  std::mt19937 rng(99);
  int permutations = 0;
  for (int i = 0; i < 200; ++i) {
    const auto prompt = valued_expansion(generator, rng);
    if (!prompt) {
      v.fail("case " + std::to_string(i) + " did not expand");
      continue;
    }
    const Trace trace = synthesize_trace(*prompt);
    if (!check_trace(*prompt, trace, {ConformanceMode::Content}).pass) v.fail("case " + std::to_string(i) + " fails content mode");
    if (!check_trace(*prompt, trace, {ConformanceMode::RolesOnly}).pass) v.fail("case " + std::to_string(i) + " fails roles-only mode");
    for (std::size_t a = 0; a + 1 < trace.size(); ++a) {
      const auto b = std::find_if(trace.begin() + static_cast<std::ptrdiff_t>(a) + 1, trace.end(),
                                  [&](const TraceMessage& m) { return m.role != trace[a].role; });
      if (b == trace.end()) continue;
      Trace permuted = trace;
      std::swap(permuted[a], permuted[static_cast<std::size_t>(b - trace.begin())]);
      if (check_trace(*prompt, permuted).mismatches.empty()) v.fail("case " + std::to_string(i) + " permutation passes");
      ++permutations;
    }
  }
  if (permutations == 0) v.fail("no role permutations exercised");
  if (v.pass) v.detail = "200 reflexive cases, " + std::to_string(permutations) + " permutations rejected";
  return v;
}

Verdict http_api() {
  Verdict v;
  ServeOptions options;
  options.port = 0;
  HttpServer server(options);
  const int port = server.bind();
  if (port <= 0) {
    v.fail("could not bind");
    return v;
  }
  std::thread listener([&server] { server.listen(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  const json body = {{"source", testing::read_data("corpus/fixtures/tool_agent.acdl")}};
  const auto ok = client.Post("/api/render", body.dump(), "application/json");
  if (!ok || ok->status != 200) {
    v.fail("render returned " + (ok ? std::to_string(ok->status) : std::string("no response")));
  } else {
    const auto reply = json::parse(ok->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("svg") || reply["svg"].get<std::string>().empty()) v.fail("empty svg");
    for (const auto& d : reply.value("diagnostics", json::array())) {
      if (d.value("severity", "") == "error") v.fail("render reported " + d.value("code", "?"));
    }
  }
  const auto bad = client.Post("/api/render", "{not json", "application/json");
  if (!bad || bad->status != 400) v.fail("malformed body did not give 400");
  const auto page = client.Get("/");
  if (!page || page->status != 200) v.fail("status page unavailable without frontend");
  server.stop();
  listener.join();
  if (v.pass) v.detail = "render 200 with svg, malformed 400, no frontend";
  return v;
}

}  // namespace
}  // namespace acdl

int main() {
  const std::vector<std::pair<const char*, std::function<acdl::Verdict()>>> criteria = {
      {"corpus-parse", acdl::corpus_parse},
      {"scoping-suite", acdl::scoping_suite},
      {"range-semantics", acdl::range_semantics},
      {"expansion-oracles", acdl::expansion_oracles},
      {"determinism", acdl::determinism},
      {"format-idempotence", acdl::format_idempotence},
      {"diff-soundness", acdl::diff_soundness},
      {"conformance", acdl::conformance},
      {"http-api", acdl::http_api},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const acdl::Verdict verdict = run();
    std::printf("%s %s: %s\n", verdict.pass ? "PASS" : "FAIL", name, verdict.detail.c_str());
    failures += !verdict.pass;
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
