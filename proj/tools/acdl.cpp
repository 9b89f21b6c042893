#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "acdl/conformance.hpp"
#include "acdl/diff.hpp"
#include "acdl/format.hpp"
#include "acdl/json_io.hpp"
#include "acdl/parser.hpp"
#include "acdl/pipeline.hpp"
#include "acdl/render.hpp"
#include "acdl/server.hpp"

namespace {

using namespace acdl;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError{"cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError{"cannot write " + path};
  out << content;
}

void print_diagnostics(std::ostream& out, const Diagnostics& diagnostics, std::string_view source,
                       const std::string& file) {
  const LineIndex lines(source);
  for (const Diagnostic& d : diagnostics) {
    const auto pos = lines.locate(d.span.begin);
    out << file << ':' << pos.line << ':' << pos.col << ": " << to_string(d.severity) << ' ' << d.code << ": "
        << d.message << '\n';
  }
}

EnvironmentDocument read_environment(const std::string& path) {
  EnvironmentLoadResult loaded = load_environment(read_file(path));
  if (has_errors(loaded.diagnostics)) throw UsageError{path + ": " + loaded.diagnostics.front().message};
  return loaded.environment;
}

Theme resolve_theme(const std::string& flag) {
  std::string path = flag;
  if (path.empty()) {
    if (const char* env = std::getenv("ACDL_THEME"); env && *env) path = env;
  }
  if (path.empty()) return default_theme();
  ThemeLoadResult loaded = load_theme(read_file(path));
  if (has_errors(loaded.diagnostics)) throw UsageError{path + ": " + loaded.diagnostics.front().message};
  return loaded.theme;
}

void emit(const std::string& content, const std::string& output) {
  if (output.empty() || output == "-") {
    std::cout << content;
  } else {
    write_file(output, content);
  }
}

std::string message_line(const Message& message) {
  std::string line(1, role_letter(message.role));
  line += ':';
  for (std::size_t i = 0; i < message.slots.size(); ++i) {
    const Slot& slot = message.slots[i];
    line += i == 0 ? " " : " | ";
    line += slot.value ? *slot.value : slot.text;
  }
  return line;
}

// ---- subcommands -----------------------------------------------------------

struct CheckArgs {
  std::vector<std::string> files;
  bool symbols = false;
  bool strict = false;
  bool json = false;
};

int run_check(const CheckArgs& args) {
  bool errors = false;
  for (const std::string& file : args.files) {
    const std::string source = read_file(file);
    CheckResult checked = check(source, {args.strict});
    errors = errors || has_errors(checked.diagnostics);
    if (args.json) {
      std::cout << diagnostics_to_jsonl(checked.diagnostics, source, file);
    } else {
      print_diagnostics(std::cout, checked.diagnostics, source, file);
    }
    if (args.symbols) std::cout << to_json(build_symbols(checked.document)).dump(2) << '\n';
  }
  return errors ? kFailed : kOk;
}

struct FmtArgs {
  std::vector<std::string> files;
  bool write = false;
  bool check = false;
};

int run_fmt(const FmtArgs& args) {
  int status = kOk;
  for (const std::string& file : args.files) {
    const std::string source = read_file(file);
    ParseResult parsed = parse(source);
    if (has_errors(parsed.diagnostics)) {
      print_diagnostics(std::cerr, parsed.diagnostics, source, file);
      status = kFailed;
      continue;
    }
    const std::string formatted = format(parsed.document);
    if (args.check) {
      if (formatted != source) {
        std::cout << file << ": not formatted\n";
        status = kFailed;
      }
    } else if (args.write) {
      if (formatted != source) write_file(file, formatted);
    } else {
      std::cout << formatted;
    }
  }
  return status;
}

struct RenderArgs {
  std::string file;
  std::string theme;
  std::string expanded;
  std::string context;
  std::string output;
};

int run_render(const RenderArgs& args) {
  const std::string source = read_file(args.file);
  const Theme theme = resolve_theme(args.theme);
  std::optional<EnvironmentDocument> env;
  if (!args.expanded.empty()) env = read_environment(args.expanded);
  RenderOutput rendered = render_source(source, theme, env ? &*env : nullptr, args.context);
  print_diagnostics(std::cerr, rendered.diagnostics, source, args.file);
  emit(rendered.svg, args.output);
  return has_errors(rendered.diagnostics) ? kFailed : kOk;
}

struct ExpandArgs {
  std::string file;
  std::string env;
  std::vector<std::string> series;
  std::string context;
  bool json = false;
};

int run_expand(const ExpandArgs& args) {
  const std::string source = read_file(args.file);
  ResolveOutput resolved = resolve_source(source, args.context);
  print_diagnostics(std::cerr, resolved.diagnostics, source, args.file);
  if (!resolved.resolved) return kFailed;

  std::vector<EnvironmentDocument> envs{read_environment(args.env)};
  for (const std::string& path : args.series) envs.push_back(read_environment(path));
  SeriesResult series = expand_series(*resolved.resolved, envs);
  print_diagnostics(std::cerr, series.diagnostics, source, args.file);

  const bool many = !args.series.empty();
  if (args.json) {
    nlohmann::json out = nlohmann::json::array();
    for (const ExpandedPrompt& prompt : series.prompts) out.push_back(to_json(prompt));
    std::cout << (many ? out.dump(2) : out.empty() ? "null" : out.front().dump(2)) << '\n';
  } else {
    for (const ExpandedPrompt& prompt : series.prompts) {
      if (many) {
        std::cout << "# time";
        for (std::int64_t c : prompt.time) std::cout << ' ' << c;
        std::cout << '\n';
      }
      for (const Message& message : prompt.messages) std::cout << message_line(message) << '\n';
      if (prompt.truncated) std::cout << "# prompt ends here\n";
    }
  }
  return has_errors(series.diagnostics) ? kFailed : kOk;
}

struct DiffArgs {
  std::string a;
  std::string b;
  std::string context;
  std::string theme;
  std::string output;
  bool svg = false;
  bool json = false;
};

int run_diff(const DiffArgs& args) {
  const std::string source_a = read_file(args.a);
  const std::string source_b = read_file(args.b);
  ResolveOutput ra = resolve_source(source_a, args.context);
  ResolveOutput rb = resolve_source(source_b, args.context);
  print_diagnostics(std::cerr, ra.diagnostics, source_a, args.a);
  print_diagnostics(std::cerr, rb.diagnostics, source_b, args.b);
  if (!ra.resolved || !rb.resolved) return kFailed;
  DiffResult result = diff(*ra.resolved, *rb.resolved);
  print_diagnostics(std::cerr, result.diagnostics, source_a, args.a);
  if (args.svg) {
    emit(format_diff_svg(result.script, *rb.resolved, resolve_theme(args.theme)), args.output);
  } else if (args.json) {
    emit(to_json(result.script).dump(2) + "\n", args.output);
  } else {
    emit(format_diff(result.script, source_a, source_b), args.output);
  }
  return kOk;
}

struct ConformArgs {
  std::string spec;
  std::string env;
  std::string trace;
  std::string mode = "roles";
  std::string context;
  bool normalize_ws = false;
  bool jsonl = false;
  bool json = false;
};

int run_conform(const ConformArgs& args) {
  const std::string source = read_file(args.spec);
  ExpandOutput expanded = expand_source(source, args.context, read_environment(args.env));
  print_diagnostics(std::cerr, expanded.diagnostics, source, args.spec);
  if (!expanded.prompt || has_errors(expanded.diagnostics)) return kFailed;
  const std::string trace_text = read_file(args.trace);
  TraceLoadResult trace = args.jsonl ? load_trace_jsonl(trace_text) : load_trace(trace_text);
  if (has_errors(trace.diagnostics)) {
    for (const Diagnostic& d : trace.diagnostics) std::cerr << args.trace << ": error " << d.code << ": " << d.message << '\n';
    return kFailed;
  }
  ConformanceOptions options;
  options.mode = args.mode == "content" ? ConformanceMode::Content : ConformanceMode::RolesOnly;
  options.normalize_whitespace = args.normalize_ws;
  ConformanceReport report = check_trace(*expanded.prompt, trace.trace, options);
  if (args.json) {
    std::cout << to_json(report).dump(2) << '\n';
  } else {
    std::cout << format_report(report);
  }
  return report.pass ? kOk : kFailed;
}

struct ServeArgs {
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string static_dir;
  std::string theme;
};

HttpServer* active_server = nullptr;

extern "C" void handle_signal(int) {
  if (active_server) active_server->stop();
}

int run_serve(const ServeArgs& args) {
  ServeOptions options;
  options.host = args.host;
  options.port = args.port;
  options.static_dir = args.static_dir;
  options.theme = resolve_theme(args.theme);
  HttpServer server(options);
  const int port = server.bind();
  if (port < 0) {
    std::cerr << "cannot listen on " << args.host << ':' << args.port << '\n';
    return kFailed;
  }
  std::cerr << "listening on http://" << args.host << ':' << port << '\n';
  active_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  const bool ok = server.listen();
  active_server = nullptr;
  return ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parse, check, format, expand, render, diff and conformance-check ACDL context descriptions."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "acdl 0.1.0");

  CheckArgs check_args;
  auto* check_cmd = app.add_subcommand("check", "Report syntax and scoping diagnostics");
  check_cmd->add_option("files", check_args.files, "ACDL files")->required()->check(CLI::ExistingFile);
  check_cmd->add_flag("--symbols", check_args.symbols, "Print the symbol table as JSON");
  check_cmd->add_flag("--strict", check_args.strict, "Also warn about templates and functions used with varying arity");
  check_cmd->add_flag("--json", check_args.json, "Print diagnostics as JSON lines");

  FmtArgs fmt_args;
  auto* fmt_cmd = app.add_subcommand("fmt", "Print files in canonical layout");
  fmt_cmd->add_option("files", fmt_args.files, "ACDL files")->required()->check(CLI::ExistingFile);
  auto* write_flag = fmt_cmd->add_flag("--write", fmt_args.write, "Rewrite the files in place");
  fmt_cmd->add_flag("--check", fmt_args.check, "Exit 1 when a file is not formatted")->excludes(write_flag);

  RenderArgs render_args;
  auto* render_cmd = app.add_subcommand("render", "Render a document, or one expansion of it, as SVG");
  render_cmd->add_option("file", render_args.file, "ACDL file")->required()->check(CLI::ExistingFile);
  render_cmd->add_option("--theme", render_args.theme, "Theme JSON file (default: $ACDL_THEME)")->check(CLI::ExistingFile);
  render_cmd->add_option("--expanded", render_args.expanded, "Environment JSON; renders the expanded prompt")
      ->check(CLI::ExistingFile);
  render_cmd->add_option("--context", render_args.context, "Context to expand (default: the first)");
  render_cmd->add_option("-o,--output", render_args.output, "Output file (default: stdout)");

  ExpandArgs expand_args;
  auto* expand_cmd = app.add_subcommand("expand", "Expand a context at a time point");
  expand_cmd->add_option("file", expand_args.file, "ACDL file")->required()->check(CLI::ExistingFile);
  expand_cmd->add_option("--env", expand_args.env, "Environment JSON")->required()->check(CLI::ExistingFile);
  expand_cmd->add_option("--series", expand_args.series, "Further environments, at later time points")
      ->check(CLI::ExistingFile);
  expand_cmd->add_option("--context", expand_args.context, "Context to expand (default: the first)");
  expand_cmd->add_flag("--json", expand_args.json, "Print the expanded prompt as JSON");

  DiffArgs diff_args;
  auto* diff_cmd = app.add_subcommand("diff", "Structural differences between two contexts");
  diff_cmd->add_option("a", diff_args.a, "First ACDL file")->required()->check(CLI::ExistingFile);
  diff_cmd->add_option("b", diff_args.b, "Second ACDL file")->required()->check(CLI::ExistingFile);
  diff_cmd->add_option("--context", diff_args.context, "Context to compare (default: the first)");
  auto* svg_flag = diff_cmd->add_flag("--svg", diff_args.svg, "Render the second context with the changes tagged");
  diff_cmd->add_flag("--json", diff_args.json, "Print the edit script as JSON")->excludes(svg_flag);
  diff_cmd->add_option("--theme", diff_args.theme, "Theme JSON file for --svg")->check(CLI::ExistingFile);
  diff_cmd->add_option("-o,--output", diff_args.output, "Output file (default: stdout)");

  ConformArgs conform_args;
  auto* conform_cmd = app.add_subcommand("conform", "Check a recorded message trace against an expansion");
  conform_cmd->add_option("--spec", conform_args.spec, "ACDL file")->required()->check(CLI::ExistingFile);
  conform_cmd->add_option("--env", conform_args.env, "Environment JSON")->required()->check(CLI::ExistingFile);
  conform_cmd->add_option("--trace", conform_args.trace, "Trace JSON")->required()->check(CLI::ExistingFile);
  conform_cmd->add_option("--mode", conform_args.mode, "roles or content")
      ->check(CLI::IsMember({"roles", "content"}));
  conform_cmd->add_option("--context", conform_args.context, "Context to expand (default: the first)");
  conform_cmd->add_flag("--normalize-ws", conform_args.normalize_ws, "Collapse runs of whitespace before matching");
  conform_cmd->add_flag("--jsonl", conform_args.jsonl, "Trace holds one message object per line");
  conform_cmd->add_flag("--json", conform_args.json, "Print the report as JSON");

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
  serve_cmd->add_option("--port", serve_args.port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", serve_args.host, "Address to bind");
  serve_cmd->add_option("--static", serve_args.static_dir, "Directory with built playground assets");
  serve_cmd->add_option("--theme", serve_args.theme, "Theme JSON file")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n' << app.help();
    return kUsage;
  }

  try {
    if (*check_cmd) return run_check(check_args);
    if (*fmt_cmd) return run_fmt(fmt_args);
    if (*render_cmd) return run_render(render_args);
    if (*expand_cmd) return run_expand(expand_args);
    if (*diff_cmd) return run_diff(diff_args);
    if (*conform_cmd) return run_conform(conform_args);
    if (*serve_cmd) return run_serve(serve_args);
  } catch (const UsageError& e) {
    std::cerr << "acdl: " << e.message << '\n';
    return kUsage;
  }
  return kUsage;
}
