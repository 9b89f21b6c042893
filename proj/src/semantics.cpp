#include "acdl/semantics.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "acdl/format.hpp"
#include "acdl/parser.hpp"

namespace acdl {
namespace {

std::string item_name(const Item& item) {
  if (const auto* ctx = std::get_if<ContextDef>(&item.node)) return ctx->name;
  if (const auto* frag = std::get_if<FragmentDef>(&item.node)) return frag->name;
  return {};
}

Span head_span(const Item& item) {
  if (std::holds_alternative<ContextDef>(item.node)) {
    return {item.span.begin, item.span.begin + static_cast<std::uint32_t>(item_name(item).size())};
  }
  return {item.span.begin, item.span.begin + 1};
}

std::size_t declared_arity(const std::vector<Param>& params, bool& open_ended) {
  open_ended = std::any_of(params.begin(), params.end(), [](const Param& p) { return p.ellipsis; });
  return params.size();
}

bool is_role(const Stmt& stmt, Role role) {
  const auto* msg = std::get_if<RoleMessage>(&stmt.node);
  return msg && msg->role == role;
}

class Validator {
 public:
  Validator(const Document& document, ValidateOptions options) : doc_(document), options_(options) {
    for (const Item& item : document.items) {
      if (const auto* frag = std::get_if<FragmentDef>(&item.node)) fragments_.emplace(frag->name, frag);
    }
  }

  Diagnostics run() {
    check_duplicates();
    for (const Item& item : doc_.items) {
      if (const auto* ctx = std::get_if<ContextDef>(&item.node)) {
        check_completion(ctx->body);
        Scope scope;
        bind_params(ctx->params, scope);
        walk(ctx->body, State{false, false}, scope);
      } else if (const auto* frag = std::get_if<FragmentDef>(&item.node)) {
        Scope scope;
        bind_params(frag->params, scope);
        walk(frag->body, State{frag->kind == FragmentKind::String, false}, scope);
      }
    }
    check_cycles();
    if (options_.strict) check_arity_variation();
    return std::move(diags_);
  }

 private:
  struct State {
    bool in_role;
    bool in_loop;
  };

  // Names visible at a point, innermost block last. Index variables (loop
  // binders, parameters) are kept under an `@` prefix so that a bare
  // identifier naming one is not mistaken for a template.
  struct Scope {
    std::vector<std::set<std::string>> frames{{}};
    bool visible(const std::string& name) const {
      return std::any_of(frames.begin(), frames.end(), [&](const auto& f) { return f.count(name) > 0; });
    }
  };

  void check_duplicates() {
    std::map<std::string, const Item*> seen;
    for (const Item& item : doc_.items) {
      if (std::holds_alternative<Comment>(item.node)) continue;
      const std::string name = item_name(item);
      auto [it, inserted] = seen.emplace(name, &item);
      if (!inserted) {
        diags_.push_back(make_error("E-DUP-DEF", "'" + name + "' is already defined in this file", head_span(item)));
      }
    }
  }

  void check_completion(const Block& body) {
    std::vector<const Stmt*> roles;
    for_each_stmt(body, [&](const Stmt& stmt) {
      if (std::holds_alternative<RoleMessage>(stmt.node)) roles.push_back(&stmt);
    });
    const auto n_count = std::count_if(roles.begin(), roles.end(), [](const Stmt* s) { return is_role(*s, Role::None); });
    if (n_count == 0) return;
    bool first_n = true;
    for (const Stmt* stmt : roles) {
      if (is_role(*stmt, Role::None)) {
        if (!first_n) {
          diags_.push_back(make_error("E-N-MULTI", "a completion prompt has exactly one N: block", marker_span(*stmt)));
        }
        first_n = false;
      } else {
        diags_.push_back(make_error("E-N-MIXED", "chat roles may not appear alongside an N: block", marker_span(*stmt)));
      }
    }
    for (const Stmt& stmt : body.stmts) {
      const bool allowed = std::holds_alternative<RoleMessage>(stmt.node) ||
                           std::holds_alternative<Comment>(stmt.node) || std::holds_alternative<NameDef>(stmt.node);
      if (!allowed) {
        diags_.push_back(make_error("E-N-TOPLEVEL",
                                    "a completion prompt may contain only its N: block at the top level",
                                    {stmt.span.begin, stmt.span.begin + 1}));
      }
    }
  }

  static Span marker_span(const Stmt& stmt) { return {stmt.span.begin, stmt.span.begin + 2}; }

  static void bind_params(const std::vector<Param>& params, Scope& scope) {
    for (const Param& p : params) {
      std::vector<std::string> names{p.name};
      names.insert(names.end(), p.sublevels.begin(), p.sublevels.end());
      for (const std::string& name : names) {
        scope.frames.back().insert("@" + name);
        std::string lower = name;
        for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        scope.frames.back().insert("@" + lower);
      }
    }
  }

  void walk(const Block& block, State state, Scope& scope, const std::string& binder = {}) {
    scope.frames.emplace_back();
    if (!binder.empty()) scope.frames.back().insert("@" + binder);
    for (const Stmt& stmt : block.stmts) visit(stmt, state, scope);
    scope.frames.pop_back();
  }

  void visit(const Stmt& stmt, State state, Scope& scope) {
    for_each_root_expr(stmt, [&](const Expr& e) { check_expr(e, scope, state); });
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, RoleMessage>) {
            if (state.in_role) {
              diags_.push_back(make_error("E-NESTED-ROLE",
                                          "role messages may not appear inside another role message or a string fragment",
                                          marker_span(stmt)));
            }
            walk(node.body, State{true, state.in_loop}, scope);
          } else if constexpr (std::is_same_v<T, ForEach>) {
            walk(node.body, State{state.in_role, true}, scope, node.binder);
          } else if constexpr (std::is_same_v<T, If>) {
            for (const auto& branch : node.branches) walk(branch.body, state, scope);
            if (node.else_body) walk(*node.else_body, state, scope);
          } else if constexpr (std::is_same_v<T, Switch>) {
            for (const auto& c : node.cases) walk(c.body, state, scope);
            if (node.default_body) walk(*node.default_body, state, scope);
          } else if constexpr (std::is_same_v<T, Mark>) {
            walk(node.body, state, scope);
          } else if constexpr (std::is_same_v<T, NameDef>) {
            if (scope.visible(node.name)) {
              diags_.push_back(make_warning("W-NAME-SHADOW", "'" + node.name + "' shadows an earlier definition",
                                            stmt.span));
            }
            scope.frames.back().insert(node.name);
          } else if constexpr (std::is_same_v<T, FragInvoke>) {
            check_invoke(node, stmt.span, state);
          } else if constexpr (std::is_same_v<T, LoopControl>) {
            if (!state.in_loop) {
              diags_.push_back(make_error("E-LOOPCTL",
                                          std::string("'") + (node.is_break ? "break" : "continue") +
                                              "' is only allowed inside a loop",
                                          stmt.span));
            }
          } else if constexpr (std::is_same_v<T, Element>) {
            if (!state.in_role && node.expr.kind != ExprKind::Placeholder) {
              diags_.push_back(make_error("E-TOPLEVEL-CONTENT",
                                          "content elements belong inside a role message", node.expr.span));
            }
            if (node.expr.kind == ExprKind::Ident && !scope.visible("@" + node.expr.text)) {
              diags_.push_back(make_warning(
                  "W-NAMING", "'" + node.expr.text + "' reads as a template; templates are written in ALL_CAPS",
                  node.expr.span));
            }
          }
        },
        stmt.node);
  }

  void check_invoke(const FragInvoke& invoke, Span span, State state) {
    auto it = fragments_.find(invoke.name);
    if (it == fragments_.end()) {
      diags_.push_back(make_error("E-FRAG-UNKNOWN", "no fragment named '" + invoke.name + "'", span));
      return;
    }
    const FragmentDef& frag = *it->second;
    if (frag.kind == FragmentKind::String && !state.in_role) {
      diags_.push_back(make_error("E-FRAG-POSITION",
                                  "string fragment '" + invoke.name + "' must be invoked inside a role message", span));
    } else if (frag.kind == FragmentKind::Roles && state.in_role) {
      diags_.push_back(make_error("E-FRAG-POSITION",
                                  "roles fragment '" + invoke.name + "' must be invoked outside role messages", span));
    }
    bool open_ended = false;
    const std::size_t arity = declared_arity(frag.params, open_ended);
    if (!open_ended && arity != invoke.args.size()) {
      diags_.push_back(make_error("E-FRAG-ARITY",
                                  "fragment '" + invoke.name + "' takes " + std::to_string(arity) + " argument(s), got " +
                                      std::to_string(invoke.args.size()),
                                  span));
    }
  }

  void check_expr(const Expr& root, Scope& scope, State) {
    for_each_expr(root, [&](const Expr& e) {
      switch (e.kind) {
        case ExprKind::NameRef:
          if (!scope.visible(e.text)) {
            diags_.push_back(make_error("E-NAME-UNBOUND", "'$" + e.text + "' is not defined before this use", e.span));
          }
          break;
        case ExprKind::Call:
          if (!e.text.empty() && e.text[0] >= 'A' && e.text[0] <= 'Z') {
            diags_.push_back(make_warning("W-NAMING",
                                          "function '" + e.text + "' should start with a lowercase letter "
                                          "(ALL_CAPS names are templates)",
                                          {e.span.begin, e.span.begin + static_cast<std::uint32_t>(e.text.size())}));
          }
          break;
        case ExprKind::SubstepZero:
          diags_.push_back(make_info("I-SUBSTEP-ATOM",
                                     "'" + format_expr(e) + "' holds when the current sub-step is 0", e.span));
          break;
        default:
          break;
      }
    });
  }

  void check_cycles() {
    // Depth-first search over the fragment invocation graph.
    std::map<std::string, int> state;  // 0 unvisited, 1 on stack, 2 done
    std::set<std::string> reported;
    std::function<void(const FragmentDef&)> dfs = [&](const FragmentDef& frag) {
      state[frag.name] = 1;
      for_each_stmt(frag.body, [&](const Stmt& stmt) {
        const auto* invoke = std::get_if<FragInvoke>(&stmt.node);
        if (!invoke) return;
        auto it = fragments_.find(invoke->name);
        if (it == fragments_.end()) return;
        const int s = state[invoke->name];
        if (s == 1) {
          if (reported.insert(invoke->name).second) {
            diags_.push_back(make_error("E-FRAG-CYCLE",
                                        "fragment '" + invoke->name + "' invokes itself through '" + frag.name + "'",
                                        stmt.span));
          }
        } else if (s == 0) {
          dfs(*it->second);
        }
      });
      state[frag.name] = 2;
    };
    for (const Item& item : doc_.items) {
      if (const auto* frag = std::get_if<FragmentDef>(&item.node); frag && state[frag->name] == 0) dfs(*frag);
    }
  }

  void check_arity_variation() {
    const SymbolTable table = build_symbols(doc_);
    auto report = [&](const std::map<std::string, std::set<std::size_t>>& entries, std::string_view what) {
      for (const auto& [name, arities] : entries) {
        if (arities.size() > 1) {
          diags_.push_back(make_warning("W-ARITY-VARIES",
                                        std::string(what) + " '" + name + "' is used with differing argument counts",
                                        {0, 0}));
        }
      }
    };
    report(table.templates, "template");
    report(table.functions, "function");
  }

  const Document& doc_;
  ValidateOptions options_;
  std::map<std::string, const FragmentDef*> fragments_;
  Diagnostics diags_;
};

std::string context_var_path(const Expr& e) {
  std::string path = e.text;
  for (const PathSegment& seg : e.path) {
    if (!seg.name.empty()) path += "." + seg.name;
  }
  return path;
}

std::string context_var_signature(const Expr& e) {
  std::string sig = e.args.empty() ? "" : "q;";
  for (std::size_t i = 0; i < e.path.size(); ++i) {
    if (i > 0) sig += ",";
    sig += std::to_string(e.path[i].indices.size());
  }
  return sig;
}

}  // namespace

Diagnostics validate(const Document& document, ValidateOptions options) {
  return Validator(document, options).run();
}

SymbolTable build_symbols(const Document& document) {
  SymbolTable table;
  auto record = [&](const Expr& root) {
    for_each_expr(root, [&](const Expr& e) {
      if (e.kind == ExprKind::Template) {
        table.templates[e.text].insert(e.args.size());
      } else if (e.kind == ExprKind::Call) {
        table.functions[e.text].insert(e.args.size());
      } else if (e.kind == ExprKind::ContextVar) {
        table.context_vars[context_var_path(e)].insert(context_var_signature(e));
      }
    });
  };
  auto walk = [&](const std::string& scope, const Block& body) {
    for_each_stmt(body, [&](const Stmt& stmt) {
      for_each_root_expr(stmt, record);
      if (const auto* def = std::get_if<NameDef>(&stmt.node)) {
        table.names.push_back({scope, def->name, format_expr(def->value), stmt.span});
      }
    });
  };
  for (const Item& item : document.items) {
    if (const auto* ctx = std::get_if<ContextDef>(&item.node)) {
      std::vector<std::string> params;
      for (const Param& p : ctx->params) params.push_back(format_param(p));
      table.contexts[ctx->name] = std::move(params);
      walk(ctx->name, ctx->body);
    } else if (const auto* frag = std::get_if<FragmentDef>(&item.node)) {
      FragmentSymbol sym{frag->kind, {}};
      for (const Param& p : frag->params) sym.params.push_back(format_param(p));
      table.fragments[frag->name] = std::move(sym);
      walk(frag->name, frag->body);
    }
  }
  return table;
}

Document as_document(const ResolvedContext& resolved) {
  Document doc;
  doc.items.push_back(Item{resolved.context, resolved.context.body.span, false});
  return doc;
}

CheckResult check(std::string_view source, ValidateOptions options) {
  ParseResult parsed = parse(source);
  CheckResult result{std::move(parsed.document), std::move(parsed.diagnostics)};
  if (!has_errors(result.diagnostics)) {
    Diagnostics more = validate(result.document, options);
    result.diagnostics.insert(result.diagnostics.end(), more.begin(), more.end());
  }
  result.diagnostics = deduplicate(std::move(result.diagnostics));
  std::stable_sort(result.diagnostics.begin(), result.diagnostics.end(),
                   [](const Diagnostic& a, const Diagnostic& b) { return a.span.begin < b.span.begin; });
  return result;
}

}  // namespace acdl
