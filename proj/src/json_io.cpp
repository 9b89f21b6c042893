#include "acdl/json_io.hpp"

#include <variant>

namespace acdl {

using nlohmann::json;

namespace {

json span_json(Span span) { return json::array({span.begin, span.end}); }

json params_json(const std::vector<Param>& params, const AstJsonOptions& options) {
  json out = json::array();
  for (const Param& p : params) {
    json j = {{"name", p.name}, {"time", p.time}};
    if (!p.sublevels.empty()) j["sublevels"] = p.sublevels;
    if (p.variadic) j["variadic"] = true;
    if (p.ellipsis) j["ellipsis"] = true;
    if (options.spans) j["span"] = span_json(p.span);
    out.push_back(std::move(j));
  }
  return out;
}

json exprs_json(const std::vector<Expr>& exprs, const AstJsonOptions& options) {
  json out = json::array();
  for (const Expr& e : exprs) out.push_back(to_json(e, options));
  return out;
}

json comments_json(const std::vector<std::string>& comments) { return comments; }

bool is_comment(const Stmt& stmt) { return std::holds_alternative<Comment>(stmt.node); }

}  // namespace

json to_json(const Expr& expr, AstJsonOptions options) {
  json j = {{"kind", to_string(expr.kind)}};
  switch (expr.kind) {
    case ExprKind::Int: j["value"] = expr.number; break;
    default:
      if (!expr.text.empty()) j["text"] = expr.text;
      break;
  }
  if (!expr.args.empty()) j["args"] = exprs_json(expr.args, options);
  if (!expr.path.empty()) {
    json path = json::array();
    for (const PathSegment& seg : expr.path) {
      json s = {{"name", seg.name}};
      if (!seg.indices.empty()) s["indices"] = exprs_json(seg.indices, options);
      path.push_back(std::move(s));
    }
    j["path"] = std::move(path);
  }
  if (expr.flag) j["flag"] = true;
  if (options.spans) {
    j["span"] = span_json(expr.span);
    if (expr.binding.end > 0) j["binding"] = span_json(expr.binding);
  }
  return j;
}

json to_json(const Block& block, AstJsonOptions options) {
  json stmts = json::array();
  for (const Stmt& stmt : block.stmts) {
    if (!options.comments && is_comment(stmt)) continue;
    stmts.push_back(to_json(stmt, options));
  }
  json j = {{"stmts", std::move(stmts)}};
  if (options.comments) {
    if (!block.open_comment.empty()) j["open_comment"] = block.open_comment;
    if (!block.close_comment.empty()) j["close_comment"] = block.close_comment;
  }
  if (options.spans) j["span"] = span_json(block.span);
  return j;
}

json to_json(const Stmt& stmt, AstJsonOptions options) {
  json j = std::visit(
      [&](const auto& node) -> json {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, RoleMessage>) {
          return {{"kind", "role"},
                  {"role", std::string(1, role_letter(node.role))},
                  {"single_line", node.single_line},
                  {"body", to_json(node.body, options)}};
        } else if constexpr (std::is_same_v<T, ForEach>) {
          return {{"kind", "foreach"},
                  {"binder", node.binder},
                  {"time_binder", node.time_binder},
                  {"iterable", to_json(node.iterable, options)},
                  {"body", to_json(node.body, options)}};
        } else if constexpr (std::is_same_v<T, If>) {
          json branches = json::array();
          for (const IfBranch& b : node.branches) {
            json bj = {{"condition", to_json(b.condition, options)}, {"body", to_json(b.body, options)}};
            if (options.comments && !b.leading_comments.empty()) {
              bj["leading_comments"] = comments_json(b.leading_comments);
            }
            branches.push_back(std::move(bj));
          }
          json out = {{"kind", "if"}, {"branches", std::move(branches)}};
          if (node.else_body) out["else"] = to_json(*node.else_body, options);
          if (options.comments && !node.else_leading_comments.empty()) {
            out["else_leading_comments"] = comments_json(node.else_leading_comments);
          }
          return out;
        } else if constexpr (std::is_same_v<T, Switch>) {
          json cases = json::array();
          for (const SwitchCase& c : node.cases) {
            json cj = {{"label", to_json(c.label, options)}, {"body", to_json(c.body, options)}};
            if (options.comments && !c.leading_comments.empty()) {
              cj["leading_comments"] = comments_json(c.leading_comments);
            }
            cases.push_back(std::move(cj));
          }
          json out = {{"kind", "switch"}, {"scrutinee", to_json(node.scrutinee, options)}, {"cases", std::move(cases)}};
          if (node.default_body) out["default"] = to_json(*node.default_body, options);
          if (options.comments) {
            if (!node.default_leading_comments.empty()) {
              out["default_leading_comments"] = comments_json(node.default_leading_comments);
            }
            if (!node.trailing_comments.empty()) out["trailing_comments"] = comments_json(node.trailing_comments);
            if (!node.open_comment.empty()) out["open_comment"] = node.open_comment;
            if (!node.close_comment.empty()) out["close_comment"] = node.close_comment;
          }
          return out;
        } else if constexpr (std::is_same_v<T, Mark>) {
          return {{"kind", "mark"}, {"number", node.number}, {"body", to_json(node.body, options)}};
        } else if constexpr (std::is_same_v<T, PromptEndsHere>) {
          return {{"kind", "prompt_ends_here"}, {"condition", to_json(node.condition, options)}};
        } else if constexpr (std::is_same_v<T, NameDef>) {
          return {{"kind", "name"}, {"name", node.name}, {"value", to_json(node.value, options)}};
        } else if constexpr (std::is_same_v<T, FragInvoke>) {
          return {{"kind", "frag"}, {"name", node.name}, {"args", exprs_json(node.args, options)}};
        } else if constexpr (std::is_same_v<T, Element>) {
          return {{"kind", "element"}, {"expr", to_json(node.expr, options)}};
        } else if constexpr (std::is_same_v<T, LoopControl>) {
          return {{"kind", node.is_break ? "break" : "continue"}};
        } else {
          return {{"kind", "comment"}, {"text", node.text}};
        }
      },
      stmt.node);
  if (options.comments && !stmt.trailing_comment.empty()) j["trailing_comment"] = stmt.trailing_comment;
  if (options.spans) j["span"] = span_json(stmt.span);
  return j;
}

json to_json(const ContextDef& context, AstJsonOptions options) {
  return {{"kind", "context"},
          {"name", context.name},
          {"params", params_json(context.params, options)},
          {"body", to_json(context.body, options)}};
}

json to_json(const Document& document, AstJsonOptions options) {
  json items = json::array();
  for (const Item& item : document.items) {
    json j;
    if (const auto* ctx = std::get_if<ContextDef>(&item.node)) {
      j = to_json(*ctx, options);
    } else if (const auto* frag = std::get_if<FragmentDef>(&item.node)) {
      j = {{"kind", "fragment"},
           {"fragment_kind", frag->kind == FragmentKind::String ? "string" : "roles"},
           {"name", frag->name},
           {"params", params_json(frag->params, options)},
           {"body", to_json(frag->body, options)}};
    } else {
      if (!options.comments) continue;
      j = {{"kind", "comment"}, {"text", std::get<Comment>(item.node).text}};
    }
    if (options.spans) j["span"] = span_json(item.span);
    items.push_back(std::move(j));
  }
  return {{"items", std::move(items)}};
}

bool ast_equal(const Document& a, const Document& b) {
  const AstJsonOptions options{false, false};
  return to_json(a, options) == to_json(b, options);
}

bool ast_equal(const Block& a, const Block& b) {
  const AstJsonOptions options{false, false};
  return to_json(a, options) == to_json(b, options);
}

bool ast_equal(const Expr& a, const Expr& b) {
  const AstJsonOptions options{false, false};
  return to_json(a, options) == to_json(b, options);
}

json to_json(const Diagnostic& diagnostic, const LineIndex& lines, std::string_view file) {
  const LineIndex::Position pos = lines.locate(diagnostic.span.begin);
  return {{"code", diagnostic.code},
          {"severity", to_string(diagnostic.severity)},
          {"message", diagnostic.message},
          {"span", {{"start", diagnostic.span.begin}, {"end", diagnostic.span.end}, {"line", pos.line}, {"col", pos.col}}},
          {"file", file}};
}

std::string diagnostics_to_jsonl(const Diagnostics& diagnostics, std::string_view source, std::string_view file) {
  const LineIndex lines(source);
  std::string out;
  for (const Diagnostic& d : diagnostics) out += to_json(d, lines, file).dump() + '\n';
  return out;
}

json diagnostics_to_json(const Diagnostics& diagnostics, std::string_view source, std::string_view file) {
  const LineIndex lines(source);
  json out = json::array();
  for (const Diagnostic& d : diagnostics) out.push_back(to_json(d, lines, file));
  return out;
}

bool ast_equal(const ContextDef& a, const ContextDef& b) {
  const AstJsonOptions options{false, false};
  return to_json(a, options) == to_json(b, options);
}

json to_json(const ExpandedPrompt& prompt) {
  json messages = json::array();
  for (const Message& message : prompt.messages) {
    json slots = json::array();
    for (const Slot& slot : message.slots) {
      json j = {{"kind", to_string(slot.kind)}, {"text", slot.text}, {"span", {slot.span.begin, slot.span.end}}};
      if (slot.value) j["value"] = *slot.value;
      if (!slot.bindings.empty()) {
        json bindings = json::object();
        for (const auto& [name, value] : slot.bindings) bindings[name] = value;
        j["bindings"] = std::move(bindings);
      }
      slots.push_back(std::move(j));
    }
    messages.push_back({{"role", std::string(1, role_letter(message.role))},
                        {"span", {message.span.begin, message.span.end}},
                        {"slots", std::move(slots)}});
  }
  json marks = json::array();
  for (const MarkAnnotation& mark : prompt.marks) {
    json j = {{"number", mark.number}, {"messages", {mark.first_message, mark.end_message}}};
    if (mark.within_message) j["slots"] = {mark.first_slot, mark.end_slot};
    marks.push_back(std::move(j));
  }
  return {{"context", prompt.context},
          {"time", prompt.time},
          {"truncated", prompt.truncated},
          {"messages", std::move(messages)},
          {"marks", std::move(marks)}};
}

json to_json(const SymbolTable& symbols) {
  json names = json::array();
  for (const NameSymbol& name : symbols.names) {
    names.push_back({{"scope", name.scope}, {"name", name.name}, {"value", name.value},
                     {"span", {name.span.begin, name.span.end}}});
  }
  json fragments = json::object();
  for (const auto& [name, fragment] : symbols.fragments) {
    fragments[name] = {{"kind", fragment.kind == FragmentKind::String ? "string" : "roles"},
                       {"params", fragment.params}};
  }
  return {{"contexts", symbols.contexts},
          {"fragments", std::move(fragments)},
          {"templates", symbols.templates},
          {"functions", symbols.functions},
          {"context_vars", symbols.context_vars},
          {"names", std::move(names)}};
}

json to_json(const EditScript& script) {
  json edits = json::array();
  for (const Edit& edit : script.edits) {
    json j = {{"kind", to_string(edit.kind)}, {"path", edit.path}, {"cost", edit.cost}};
    if (edit.kind == EditKind::Move) j["to"] = edit.to_path;
    if (edit.old_role) j["old_role"] = std::string(1, role_letter(*edit.old_role));
    if (edit.new_role) j["new_role"] = std::string(1, role_letter(*edit.new_role));
    if (!edit.old_text.empty()) j["old"] = edit.old_text;
    if (!edit.new_text.empty()) j["new"] = edit.new_text;
    if (edit.span_a) j["span_a"] = {edit.span_a->begin, edit.span_a->end};
    if (edit.span_b) j["span_b"] = {edit.span_b->begin, edit.span_b->end};
    edits.push_back(std::move(j));
  }
  return {{"edits", std::move(edits)}, {"cost", script.cost}, {"notes", script.notes}};
}

json to_json(const ConformanceReport& report) {
  json mismatches = json::array();
  for (const Mismatch& m : report.mismatches) {
    mismatches.push_back({{"position", m.position}, {"expected", m.expected}, {"observed", m.observed}});
  }
  return {{"verdict", report.pass ? "pass" : "fail"},
          {"mode", to_string(report.mode)},
          {"mismatches", std::move(mismatches)}};
}

}  // namespace acdl
