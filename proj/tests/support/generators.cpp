#include "generators.hpp"

namespace acdl::testing {

namespace {

const std::vector<std::string> kTemplates = {"INSTRUCTIONS", "AVAILABLE_TOOLS", "TASK_DESCRIPTION", "QUESTION",
                                             "OUTPUT_FORMAT"};
const std::vector<std::string> kFields = {"user_input", "answer", "tool_call", "observation", "feedback",
                                          "reasoning", "history"};
const std::vector<std::string> kNamespaces = {"env", "sys", "resp"};
const std::vector<std::string> kFunctions = {"summarize", "k_relevant_docs", "compress", "lookup"};
const std::vector<std::string> kLiterals = {"a careful assistant", "be brief", "answer in JSON", "no tools"};
const std::vector<std::string> kComments = {" keep this short", " history", " TODO trim", " optional",
                                            " see tools list"};
const std::vector<std::string> kCompare = {"==", "!=", "<", ">", "<=", ">="};

}  // namespace

DocumentGenerator::DocumentGenerator(std::uint32_t seed, GeneratorOptions options)
    : rng_(seed), options_(options) {}

int DocumentGenerator::pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

bool DocumentGenerator::chance(double p) { return std::bernoulli_distribution(p)(rng_); }

std::string DocumentGenerator::indent(int level) const { return std::string(static_cast<std::size_t>(level) * 2, ' '); }

std::string DocumentGenerator::comment() { return "//" + choose(kComments); }

std::string DocumentGenerator::time_index(const Scope& scope) {
  std::string base = scope.time_binders.empty() || chance(0.3) ? "@T" : "@" + choose(scope.time_binders);
  if (chance(0.2)) base += chance(0.5) ? " - 1" : " + 1";
  return base;
}

std::string DocumentGenerator::index_expr(const Scope& scope) {
  if (!scope.plain_binders.empty() && chance(0.3)) return choose(scope.plain_binders);
  return time_index(scope);
}

std::string DocumentGenerator::context_var(const Scope& scope) {
  std::string out = choose(kNamespaces);
  if (!options_.expandable && out == "sys" && chance(0.15)) out += "[agent]";
  out += "." + choose(kFields);
  if (chance(0.9)) {
    out += "[" + index_expr(scope);
    if (chance(0.15)) out += ", " + index_expr(scope);
    out += "]";
  }
  if (!options_.expandable && chance(0.15)) out += ".tool_response";
  return out;
}

std::string DocumentGenerator::content_expr(const Scope& scope) {
  const int kind = pick(0, options_.expandable ? 5 : 8);
  switch (kind) {
    case 0:
    case 1:
      return choose(kTemplates);
    case 2:
    case 3:
      return context_var(scope);
    case 4:
      return "{{" + choose(kLiterals) + "}}";
    case 5:
      return choose(kFunctions) + "(" + context_var(scope) + ")";
    case 6:
      return choose(kTemplates) + "(" + context_var(scope) + ")";
    case 7:
      return "\"" + choose(kLiterals) + "\"";
    default: {
      for (auto it = scope.names.rbegin(); it != scope.names.rend(); ++it) {
        if (it->empty()) continue;
        std::string ref = "$" + it->back();
        if (!scope.plain_binders.empty() && chance(0.5)) ref += "[" + scope.plain_binders.back() + "].source";
        return ref;
      }
      return choose(kTemplates);
    }
  }
}

std::string DocumentGenerator::condition(const Scope& scope) {
  auto atom = [&]() -> std::string {
    const std::string lhs = time_index(scope);
    if (chance(0.3)) return lhs + " % " + std::to_string(pick(2, 4)) + " == " + std::to_string(pick(0, 1));
    if (!options_.expandable && chance(0.3)) return context_var(scope) + " == " + (chance(0.5) ? "search" : "none");
    return lhs + " " + choose(kCompare) + " " + std::to_string(pick(1, 4));
  };
  std::string out = atom();
  if (chance(0.25)) out += (chance(0.5) ? " & " : " | ") + atom();
  return out;
}

std::string DocumentGenerator::range_call(const Scope& scope, bool time_binder) {
  if (time_binder) {
    const std::string lo = chance(0.7) ? "1" : "2";
    const std::string hi = chance(0.5) ? "@T" : "@T + 1";
    return "range(" + lo + ", " + hi + ")";
  }
  if (!options_.expandable && !scope.names.empty() && !scope.names.back().empty() && chance(0.3)) {
    return "range(1, $" + scope.names.back().back() + ".len)";
  }
  const int lo = pick(0, 3);
  const int hi = lo + pick(0, 4);
  if (chance(0.3)) return "range(" + std::to_string(lo) + ", " + std::to_string(hi) + ", " + std::to_string(pick(1, 3)) + ")";
  return "range(" + std::to_string(lo) + ", " + std::to_string(hi) + ")";
}

std::string DocumentGenerator::fresh_binder(const Scope& scope, bool time_binder) {
  static const std::vector<std::string> kTime = {"t", "u", "v", "w"};
  static const std::vector<std::string> kPlain = {"i", "j", "k", "m"};
  const auto& pool = time_binder ? kTime : kPlain;
  const std::size_t used = scope.time_binders.size() + scope.plain_binders.size();
  return pool[used % pool.size()] + (used >= pool.size() ? std::to_string(used) : "");
}

void DocumentGenerator::body(std::string& out, const Scope& scope, int level, bool prompt_level) {
  out += " {\n";
  if (prompt_level) {
    prompt_block(out, scope, level + 1);
  } else {
    content_block(out, scope, level + 1);
  }
  out += indent(level) + "}";
}

void DocumentGenerator::loop(std::string& out, Scope& scope, int level, bool prompt_level) {
  Scope inner = scope;
  inner.in_loop = true;
  inner.depth = scope.depth + 1;
  inner.names.emplace_back();
  const bool time_binder = chance(0.5);
  const std::string binder = fresh_binder(scope, time_binder);
  std::string iterable;
  if (!options_.expandable && !time_binder && chance(0.25)) {
    iterable = "env.documents";
  } else {
    iterable = range_call(scope, time_binder);
  }
  (time_binder ? inner.time_binders : inner.plain_binders).push_back(binder);
  out += indent(level) + "ForEach(" + (time_binder ? "@" : "") + binder + ": " + iterable + ")";
  body(out, inner, level, prompt_level);
  out += "\n";
}

void DocumentGenerator::branch(std::string& out, Scope& scope, int level, bool prompt_level) {
  Scope inner = scope;
  inner.depth = scope.depth + 1;
  inner.names.emplace_back();
  out += indent(level) + "If " + condition(scope);
  body(out, inner, level, prompt_level);
  out += "\n";
  const int else_ifs = options_.expandable ? pick(0, 1) : pick(0, 2);
  for (int i = 0; i < else_ifs; ++i) {
    out += indent(level) + "ElseIf " + condition(scope);
    body(out, inner, level, prompt_level);
    out += "\n";
  }
  if (chance(0.5)) {
    out += indent(level) + "Else";
    body(out, inner, level, prompt_level);
    out += "\n";
  }
}

void DocumentGenerator::choice(std::string& out, Scope& scope, int level, bool prompt_level) {
  Scope inner = scope;
  inner.depth = scope.depth + 1;
  inner.names.emplace_back();
  const bool numeric = options_.expandable || chance(0.5);
  out += indent(level) + "Switch " + (numeric ? time_index(scope) + " % 3" : context_var(scope)) + " {\n";
  const int cases = pick(1, 3);
  for (int i = 0; i < cases; ++i) {
    const std::string label = numeric ? std::to_string(i) : "\"" + choose(kFields) + std::to_string(i) + "\"";
    out += indent(level + 1) + "Case " + label;
    body(out, inner, level + 1, prompt_level);
    out += "\n";
  }
  if (chance(0.5)) {
    out += indent(level + 1) + "Default";
    body(out, inner, level + 1, prompt_level);
    out += "\n";
  }
  out += indent(level) + "}\n";
}

void DocumentGenerator::role_message(std::string& out, Scope& scope, int level) {
  static const std::vector<std::string> kRoles = {"S", "U", "A", "T"};
  const std::string role = completion_ ? "N" : choose(kRoles);
  if (chance(0.4)) {
    std::string element;
    switch (pick(0, 2)) {
      case 0: element = choose(kTemplates); break;
      case 1: element = context_var(scope); break;
      default: element = choose(kFunctions) + "(" + context_var(scope) + ")"; break;
    }
    out += indent(level) + role + ": " + element;
    if (!options_.expandable && chance(0.15)) out += "  " + comment();
    out += "\n";
    return;
  }
  Scope inner = scope;
  inner.depth = scope.depth + 1;
  inner.names.emplace_back();
  out += indent(level) + role + ":";
  body(out, inner, level, false);
  out += "\n";
}

void DocumentGenerator::prompt_stmt(std::string& out, Scope& scope, int level) {
  const bool can_nest = scope.depth < options_.max_depth;
  const int kind = pick(0, 13);
  if (kind <= 4 || !can_nest) {
    if (kind == 10 && scope.in_loop) {
      out += indent(level) + (chance(0.5) ? "break\n" : "continue\n");
      return;
    }
    if (kind == 11 && !options_.expandable) {
      out += indent(level) + comment() + "\n";
      return;
    }
    role_message(out, scope, level);
    return;
  }
  switch (kind) {
    case 5:
    case 6:
      loop(out, scope, level, true);
      return;
    case 7:
      branch(out, scope, level, true);
      return;
    case 8:
      choice(out, scope, level, true);
      return;
    case 9: {
      Scope inner = scope;
      inner.depth = scope.depth + 1;
      out += indent(level) + "Mark " + std::to_string(next_mark_++);
      body(out, inner, level, true);
      out += "\n";
      return;
    }
    case 10:
      if (scope.in_loop) {
        out += indent(level) + (chance(0.5) ? "break\n" : "continue\n");
      } else {
        out += indent(level) + "PromptEndsHere when (" + condition(scope) + ")\n";
      }
      return;
    case 11:
      if (!roles_fragments_.empty()) {
        out += indent(level) + "Frag " + choose(roles_fragments_) + "[" + time_index(scope) + "]\n";
        return;
      }
      role_message(out, scope, level);
      return;
    case 12:
      if (!options_.expandable) {
        const std::string name = "n" + std::to_string(next_name_++);
        const std::string value = chance(0.5) ? choose(kFunctions) + "(" + context_var(scope) + ")"
                                              : "[sys.summary[@t] for t in range(1, @T)]";
        out += indent(level) + "Name " + name + " := " + value + "\n";
        scope.names.back().push_back(name);
        return;
      }
      role_message(out, scope, level);
      return;
    default:
      role_message(out, scope, level);
      return;
  }
}

void DocumentGenerator::content_stmt(std::string& out, Scope& scope, int level) {
  const bool can_nest = scope.depth < options_.max_depth;
  const int kind = pick(0, 11);
  if (kind <= 5 || !can_nest) {
    out += indent(level) + content_expr(scope);
    if (!options_.expandable && chance(0.1)) out += "  " + comment();
    out += "\n";
    return;
  }
  switch (kind) {
    case 6:
      loop(out, scope, level, false);
      return;
    case 7:
      branch(out, scope, level, false);
      return;
    case 8:
      choice(out, scope, level, false);
      return;
    case 9:
      if (!string_fragments_.empty()) {
        out += indent(level) + "Frag " + choose(string_fragments_) + "[" + time_index(scope) + "]\n";
        return;
      }
      break;
    case 10:
      if (scope.in_loop) {
        out += indent(level) + (chance(0.5) ? "break\n" : "continue\n");
        return;
      }
      break;
    case 11:
      if (!options_.expandable) {
        out += indent(level) + comment() + "\n";
        return;
      }
      break;
    default:
      break;
  }
  out += indent(level) + content_expr(scope) + "\n";
}

void DocumentGenerator::prompt_block(std::string& out, Scope scope, int level) {
  const int count = pick(1, options_.max_statements);
  for (int i = 0; i < count; ++i) prompt_stmt(out, scope, level);
}

void DocumentGenerator::content_block(std::string& out, Scope scope, int level) {
  const int count = pick(1, options_.max_statements);
  for (int i = 0; i < count; ++i) content_stmt(out, scope, level);
}

std::string DocumentGenerator::document() {
  string_fragments_.clear();
  roles_fragments_.clear();
  next_name_ = 0;
  next_mark_ = 1;
  completion_ = false;
  std::string out;
  if (!options_.expandable && chance(0.3)) out += comment() + "\n";

  Scope frag_scope;
  frag_scope.time_binders.push_back("t");
  frag_scope.names.emplace_back();
  frag_scope.depth = 1;
  if (chance(0.4)) {
    const std::string name = "Note" + std::to_string(pick(1, 9));
    out += "StrFrag " + name + "[@t]: {\n";
    content_block(out, frag_scope, 1);
    out += "}\n\n";
    string_fragments_.push_back(name);
  }
  if (chance(0.4)) {
    const std::string name = "Turn" + std::to_string(pick(1, 9));
    out += "RolesFrag " + name + "[@t]: {\n";
    Scope scope = frag_scope;
    scope.depth = 0;
    prompt_block(out, scope, 1);
    out += "}\n\n";
    roles_fragments_.push_back(name);
  }

  Scope scope;
  scope.names.emplace_back();
  const bool agent = !options_.expandable && chance(0.2);
  out += "Gen[@T" + std::string(agent ? ", agent" : "") + "]: {\n";
  if (!options_.expandable && chance(0.15)) {
    completion_ = true;
    out += "  N:";
    Scope inner = scope;
    inner.depth = 1;
    body(out, inner, 1, false);
    out += "\n";
  } else {
    prompt_block(out, scope, 1);
  }
  out += "}\n";
  return out;
}

}  // namespace acdl::testing
