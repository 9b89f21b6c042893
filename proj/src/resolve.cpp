#include <map>
#include <set>

#include "acdl/semantics.hpp"

namespace acdl {
namespace {

constexpr std::size_t kMaxFragmentDepth = 64;

using Substitution = std::map<std::string, Expr>;

template <typename Fn>
void for_each_root_expr_mut(Stmt& stmt, Fn&& fn) {
  std::visit(
      [&](auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, ForEach>) {
          fn(node.iterable);
        } else if constexpr (std::is_same_v<T, If>) {
          for (auto& branch : node.branches) fn(branch.condition);
        } else if constexpr (std::is_same_v<T, Switch>) {
          fn(node.scrutinee);
          for (auto& c : node.cases) fn(c.label);
        } else if constexpr (std::is_same_v<T, PromptEndsHere>) {
          fn(node.condition);
        } else if constexpr (std::is_same_v<T, NameDef>) {
          fn(node.value);
        } else if constexpr (std::is_same_v<T, FragInvoke>) {
          for (auto& arg : node.args) fn(arg);
        } else if constexpr (std::is_same_v<T, Element>) {
          fn(node.expr);
        }
      },
      stmt.node);
}

template <typename Fn>
void for_each_child_block(Stmt& stmt, Fn&& fn) {
  std::visit(
      [&](auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, RoleMessage> || std::is_same_v<T, Mark>) {
          fn(node.body);
        } else if constexpr (std::is_same_v<T, ForEach>) {
          fn(node.body);
        } else if constexpr (std::is_same_v<T, If>) {
          for (auto& branch : node.branches) fn(branch.body);
          if (node.else_body) fn(*node.else_body);
        } else if constexpr (std::is_same_v<T, Switch>) {
          for (auto& c : node.cases) fn(c.body);
          if (node.default_body) fn(*node.default_body);
        }
      },
      stmt.node);
}

template <typename Fn>
void for_each_expr_mut(Expr& expr, Fn&& fn) {
  fn(expr);
  for (Expr& arg : expr.args) for_each_expr_mut(arg, fn);
  for (PathSegment& seg : expr.path) {
    for (Expr& index : seg.indices) for_each_expr_mut(index, fn);
  }
}

bool needs_parens(const Expr& e) {
  return e.kind == ExprKind::Binary || e.kind == ExprKind::Compare || e.kind == ExprKind::Logical;
}

Expr wrap(const Expr& e) {
  if (!needs_parens(e)) return e;
  Expr paren;
  paren.kind = ExprKind::Paren;
  paren.span = e.span;
  paren.args.push_back(e);
  return paren;
}

void free_vars(const Expr& root, std::set<std::string>& out) {
  for_each_expr(root, [&](const Expr& e) {
    if (e.kind == ExprKind::Ident || e.kind == ExprKind::TimeVar) out.insert(e.text);
  });
}

class Substituter {
 public:
  explicit Substituter(Diagnostics& diags) : diags_(diags) {}

  void expr(Expr& e, const Substitution& subst) {
    if (subst.empty()) return;
    if (e.kind == ExprKind::Ident) {
      if (auto it = subst.find(e.text); it != subst.end()) {
        e = wrap(it->second);
        return;
      }
    } else if (e.kind == ExprKind::TimeVar) {
      if (auto it = subst.find(e.text); it != subst.end()) {
        replace_time_head(e, it->second);
        return;
      }
    } else if (e.kind == ExprKind::ListComp && e.args.size() == 2) {
      expr(e.args[1], subst);
      Substitution inner = subst;
      inner.erase(e.text);
      expr(e.args[0], inner);
      return;
    }
    for (Expr& arg : e.args) expr(arg, subst);
    for (PathSegment& seg : e.path) {
      for (Expr& index : seg.indices) expr(index, subst);
    }
  }

  void block(Block& b, const Substitution& subst) {
    for (Stmt& s : b.stmts) stmt(s, subst);
  }

  void stmt(Stmt& s, const Substitution& subst) {
    if (subst.empty()) return;
    for_each_root_expr_mut(s, [&](Expr& e) { expr(e, subst); });
    if (auto* loop = std::get_if<ForEach>(&s.node)) {
      Substitution inner = subst;
      inner.erase(loop->binder);
      block(loop->body, inner);
      return;
    }
    for_each_child_block(s, [&](Block& b) { block(b, subst); });
  }

 private:
  // `@p.x` with p bound to an argument: a time variable argument prefixes its
  // own chain, a number or identifier becomes the new head.
  void replace_time_head(Expr& e, const Expr& arg) {
    std::vector<PathSegment> tail = std::move(e.path);
    if (arg.kind == ExprKind::TimeVar) {
      const Span span = e.span;
      e = arg;
      e.span = span;
      e.path.insert(e.path.end(), tail.begin(), tail.end());
      return;
    }
    if (arg.kind == ExprKind::Int && arg.number >= 0) {
      e.text = std::to_string(arg.number);
      e.path = std::move(tail);
      return;
    }
    if (arg.kind == ExprKind::Ident) {
      e.text = arg.text;
      e.path = std::move(tail);
      return;
    }
    if (tail.empty()) {
      e = wrap(arg);
      return;
    }
    diags_.push_back(make_error("E-FRAG-ARG",
                                "a sub-step reference needs a time variable, number or identifier argument",
                                arg.span));
  }

  Diagnostics& diags_;
};

Expr ident(const std::string& name) {
  Expr e;
  e.kind = ExprKind::Ident;
  e.text = name;
  return e;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
  for (int k = 2;; ++k) {
    std::string candidate = base + "_" + std::to_string(k);
    if (!taken.count(candidate)) return candidate;
  }
}

void collect_identifiers(const Block& block, std::set<std::string>& out) {
  for_each_stmt(block, [&](const Stmt& stmt) {
    for_each_root_expr(stmt, [&](const Expr& e) { free_vars(e, out); });
    if (const auto* loop = std::get_if<ForEach>(&stmt.node)) out.insert(loop->binder);
    if (const auto* def = std::get_if<NameDef>(&stmt.node)) out.insert(def->name);
  });
}

class Resolver {
 public:
  explicit Resolver(const Document& document) : doc_(document) {}

  ResolveResult run(std::string_view context_name) {
    ResolveResult result;
    const ContextDef* ctx = context_name.empty() ? first_context(doc_) : find_context(doc_, context_name);
    if (!ctx) {
      diags_.push_back(make_error("E-NO-CONTEXT", "no context named '" + std::string(context_name) + "'", {0, 0}));
      result.diagnostics = std::move(diags_);
      return result;
    }
    ContextDef resolved = *ctx;
    for_each_stmt(resolved.body, [&](const Stmt& stmt) {
      if (const auto* def = std::get_if<NameDef>(&stmt.node)) caller_names_.insert(def->name);
    });
    std::vector<std::string> stack;
    inline_block(resolved.body, stack);
    std::vector<std::map<std::string, Span>> scopes;
    annotate(resolved.body, scopes);
    result.resolved = ResolvedContext{std::move(resolved)};
    result.diagnostics = std::move(diags_);
    return result;
  }

 private:
  void inline_block(Block& block, std::vector<std::string>& stack) {
    std::vector<Stmt> out;
    out.reserve(block.stmts.size());
    for (Stmt& stmt : block.stmts) {
      auto* invoke = std::get_if<FragInvoke>(&stmt.node);
      if (!invoke) {
        for_each_child_block(stmt, [&](Block& child) { inline_block(child, stack); });
        out.push_back(std::move(stmt));
        continue;
      }
      std::optional<Block> body = instantiate(*invoke, stmt.span, stack);
      if (!body) continue;
      bool first = true;
      for (Stmt& inlined : body->stmts) {
        if (first) inlined.blank_before = stmt.blank_before;
        first = false;
        out.push_back(std::move(inlined));
      }
    }
    block.stmts = std::move(out);
  }

  std::optional<Block> instantiate(const FragInvoke& invoke, Span site, std::vector<std::string>& stack) {
    const FragmentDef* frag = find_fragment(doc_, invoke.name);
    if (!frag) {
      diags_.push_back(make_error("E-FRAG-UNKNOWN", "no fragment named '" + invoke.name + "'", site));
      return std::nullopt;
    }
    if (std::find(stack.begin(), stack.end(), invoke.name) != stack.end() || stack.size() >= kMaxFragmentDepth) {
      diags_.push_back(make_error("E-FRAG-CYCLE", "fragment '" + invoke.name + "' is invoked recursively", site));
      return std::nullopt;
    }
    const bool open_ended =
        std::any_of(frag->params.begin(), frag->params.end(), [](const Param& p) { return p.ellipsis; });
    if (!open_ended && frag->params.size() != invoke.args.size()) {
      diags_.push_back(make_error("E-FRAG-ARITY",
                                  "fragment '" + invoke.name + "' takes " + std::to_string(frag->params.size()) +
                                      " argument(s), got " + std::to_string(invoke.args.size()),
                                  site));
      return std::nullopt;
    }

    Block body = frag->body;
    std::set<std::string> arg_vars;
    for (const Expr& arg : invoke.args) free_vars(arg, arg_vars);
    avoid_capture(body, arg_vars);

    Substitution subst;
    for (std::size_t i = 0; i < frag->params.size() && i < invoke.args.size(); ++i) {
      if (frag->params[i].ellipsis) break;
      subst.emplace(frag->params[i].name, invoke.args[i]);
    }
    Substituter(diags_).block(body, subst);

    stack.push_back(invoke.name);
    inline_block(body, stack);
    stack.pop_back();
    return body;
  }

  // Renames fragment-local loop binders that collide with variables of the
  // arguments, and local names that collide with names of the caller.
  void avoid_capture(Block& body, const std::set<std::string>& arg_vars) {
    std::set<std::string> taken = arg_vars;
    collect_identifiers(body, taken);
    taken.insert(caller_names_.begin(), caller_names_.end());
    rename_binders(body, arg_vars, taken);

    std::set<std::string> local_names;
    for_each_stmt(body, [&](const Stmt& stmt) {
      if (const auto* def = std::get_if<NameDef>(&stmt.node)) local_names.insert(def->name);
    });
    for (const std::string& name : local_names) {
      if (!caller_names_.count(name)) continue;
      const std::string renamed = fresh_name(name, taken);
      taken.insert(renamed);
      rename_name(body, name, renamed);
    }
  }

  void rename_binders(Block& block, const std::set<std::string>& arg_vars, std::set<std::string>& taken) {
    for (Stmt& stmt : block.stmts) {
      for_each_root_expr_mut(stmt, [&](Expr& root) { rename_comprehensions(root, arg_vars, taken); });
      if (auto* loop = std::get_if<ForEach>(&stmt.node); loop && arg_vars.count(loop->binder)) {
        const std::string renamed = fresh_name(loop->binder, taken);
        taken.insert(renamed);
        Substituter(diags_).block(loop->body, {{loop->binder, ident(renamed)}});
        loop->binder = renamed;
      }
      for_each_child_block(stmt, [&](Block& child) { rename_binders(child, arg_vars, taken); });
    }
  }

  void rename_comprehensions(Expr& root, const std::set<std::string>& arg_vars, std::set<std::string>& taken) {
    for_each_expr_mut(root, [&](Expr& e) {
      if (e.kind != ExprKind::ListComp || e.args.size() != 2 || !arg_vars.count(e.text)) return;
      const std::string renamed = fresh_name(e.text, taken);
      taken.insert(renamed);
      Substituter(diags_).expr(e.args[0], {{e.text, ident(renamed)}});
      e.text = renamed;
    });
  }

  static void rename_name(Block& block, const std::string& from, const std::string& to) {
    for (Stmt& stmt : block.stmts) {
      if (auto* def = std::get_if<NameDef>(&stmt.node); def && def->name == from) def->name = to;
      for_each_root_expr_mut(stmt, [&](Expr& root) {
        for_each_expr_mut(root, [&](Expr& e) {
          if (e.kind == ExprKind::NameRef && e.text == from) e.text = to;
        });
      });
      for_each_child_block(stmt, [&](Block& child) { rename_name(child, from, to); });
    }
  }

  void annotate(Block& block, std::vector<std::map<std::string, Span>>& scopes) {
    scopes.emplace_back();
    for (Stmt& stmt : block.stmts) {
      for_each_root_expr_mut(stmt, [&](Expr& root) {
        for_each_expr_mut(root, [&](Expr& e) {
          if (e.kind != ExprKind::NameRef) return;
          for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
            if (auto found = it->find(e.text); found != it->end()) {
              e.binding = found->second;
              return;
            }
          }
        });
      });
      if (const auto* def = std::get_if<NameDef>(&stmt.node)) scopes.back()[def->name] = stmt.span;
      for_each_child_block(stmt, [&](Block& child) { annotate(child, scopes); });
    }
    scopes.pop_back();
  }

  const Document& doc_;
  Diagnostics diags_;
  std::set<std::string> caller_names_;
};

}  // namespace

ResolveResult resolve(const Document& document, std::string_view context_name) {
  return Resolver(document).run(context_name);
}

}  // namespace acdl
