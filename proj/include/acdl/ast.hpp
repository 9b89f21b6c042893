#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "acdl/diagnostic.hpp"

namespace acdl {

enum class Role : std::uint8_t { System, User, Assistant, Tool, None };

char role_letter(Role role);
std::optional<Role> role_from_letter(char letter);

// ---------------------------------------------------------------------------
// Expressions

enum class ExprKind : std::uint8_t {
  Int,          // 42
  String,       // "search"
  Inline,       // {{an expert coder}}
  Ident,        // bare identifier: index variable or enum-like literal
  TimeVar,      // @T, @t.i, @1, @t.substeps
  ContextVar,   // env.user_input[@t], sys[agent].goal
  Template,     // INSTRUCTIONS, QUERY(sys.agent_name)
  Call,         // summarize(sys.history[@t])[@t]
  NameRef,      // $docs[i].source
  Binary,       // + - * / %
  Compare,      // == != < > <= >=
  Logical,      // & |
  Neg,          // -x
  Paren,        // (x)
  SubstepZero,  // @T.0 used as a condition atom
  ListComp,     // [sys.summary[@t] for t in range(...)]
  IndexList,    // [sys.agent_name, bomb]
  Placeholder,  // <prompt-blocks> in documentation skeletons
};

std::string_view to_string(ExprKind kind);

struct Expr;

/// One `.name[indices]` step of a path. `name` is empty for an index group
/// written directly after the head, as in `$docs[i]` or `fetch(x)[@t]`.
struct PathSegment {
  std::string name;
  std::vector<Expr> indices;
};

/// Expression node. Field use depends on `kind`:
///   Int          number
///   String       text (unescaped)          Inline       text (between braces)
///   Ident        text                      Placeholder  text (between < >)
///   TimeVar      text = head (`T`, `t`, `1`), path = `.i`, `.0`, `.substeps` chain
///   ContextVar   text = namespace, args = optional agent qualifier, path
///   Template     text = name, args, flag = written with parentheses
///   Call         text = name, args, path = trailing indices / fields
///   NameRef      text = name, path = fields / element index
///   Binary, Compare, Logical   text = operator, args = {lhs, rhs}
///   Neg, Paren, SubstepZero    args = {operand}
///   ListComp     text = binder, args = {element, iterable}, flag = binder has '@'
///   IndexList    args
struct Expr {
  ExprKind kind = ExprKind::Ident;
  Span span;
  std::string text;
  std::int64_t number = 0;
  std::vector<Expr> args;
  std::vector<PathSegment> path;
  bool flag = false;
  Span binding;  // NameRef: span of the defining Name statement, set by resolve()
};

// ---------------------------------------------------------------------------
// Statements (prompt blocks and content elements share one node type; the
// level a statement appears at is determined by its position)

struct Stmt;

struct Block {
  std::vector<Stmt> stmts;
  std::string open_comment;   // comment after `{` on the same line
  std::string close_comment;  // comment after `}` on the same line
  Span span;
};

struct RoleMessage {
  Role role = Role::User;
  bool single_line = false;  // `U: x` form; body then holds exactly one Element
  Block body;
};

struct ForEach {
  std::string binder;
  bool time_binder = false;
  Expr iterable;
  Block body;
};

struct IfBranch {
  Expr condition;
  Block body;
  std::vector<std::string> leading_comments;  // standalone comments before ElseIf
};

struct If {
  std::vector<IfBranch> branches;  // If, then ElseIf...
  std::optional<Block> else_body;
  std::vector<std::string> else_leading_comments;
};

struct SwitchCase {
  Expr label;
  Block body;
  std::vector<std::string> leading_comments;
};

struct Switch {
  Expr scrutinee;
  std::vector<SwitchCase> cases;
  std::optional<Block> default_body;
  std::vector<std::string> default_leading_comments;
  std::vector<std::string> trailing_comments;  // standalone comments before the closing `}`
  std::string open_comment;
  std::string close_comment;
};

struct Mark {
  std::int64_t number = 0;
  Block body;
};

struct PromptEndsHere {
  Expr condition;
};

struct NameDef {
  std::string name;
  Expr value;
};

struct FragInvoke {
  std::string name;
  std::vector<Expr> args;
};

struct Element {
  Expr expr;
};

struct LoopControl {
  bool is_break = true;
};

struct Comment {
  std::string text;  // everything after `//`, trailing whitespace removed
};

using StmtNode = std::variant<RoleMessage, ForEach, If, Switch, Mark, PromptEndsHere, NameDef,
                              FragInvoke, Element, LoopControl, Comment>;

struct Stmt {
  StmtNode node;
  Span span;
  std::string trailing_comment;  // inline comment after a single-line statement
  bool blank_before = false;     // formatting trivia, ignored by equality
};

// ---------------------------------------------------------------------------
// Top level

struct Param {
  std::string name;                    // `T` for `@T.I`, `agent`, or `...`
  bool time = false;
  std::vector<std::string> sublevels;  // `I` in `@T.I`
  bool variadic = false;               // `@T.*`
  bool ellipsis = false;               // `...` in documentation skeletons
  Span span;
};

struct ContextDef {
  std::string name;
  std::vector<Param> params;
  Block body;
};

enum class FragmentKind : std::uint8_t { String, Roles };

struct FragmentDef {
  FragmentKind kind = FragmentKind::String;
  std::string name;
  std::vector<Param> params;
  Block body;
};

struct Item {
  std::variant<ContextDef, FragmentDef, Comment> node;
  Span span;
  bool blank_before = false;
};

struct Document {
  std::vector<Item> items;
};

// ---------------------------------------------------------------------------
// Helpers

const ContextDef* find_context(const Document& document, std::string_view name);
const FragmentDef* find_fragment(const Document& document, std::string_view name);
// First context in source order, if any.
const ContextDef* first_context(const Document& document);

/// Names bound by the time parameters, outermost first: `[@T.I]` gives {T, I}.
std::vector<std::string> time_levels(const std::vector<Param>& params);

// Removes Mark wrappers, splicing their bodies in place.
Block strip_marks(const Block& block);

/// Invokes fn(stmt) for every statement in the block tree, pre-order.
template <typename Fn>
void for_each_stmt(const Block& block, Fn&& fn) {
  for (const Stmt& stmt : block.stmts) {
    fn(stmt);
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, RoleMessage> || std::is_same_v<T, ForEach> ||
                        std::is_same_v<T, Mark>) {
            for_each_stmt(node.body, fn);
          } else if constexpr (std::is_same_v<T, If>) {
            for (const auto& branch : node.branches) for_each_stmt(branch.body, fn);
            if (node.else_body) for_each_stmt(*node.else_body, fn);
          } else if constexpr (std::is_same_v<T, Switch>) {
            for (const auto& c : node.cases) for_each_stmt(c.body, fn);
            if (node.default_body) for_each_stmt(*node.default_body, fn);
          }
        },
        stmt.node);
  }
}

/// Invokes fn(expr) for expr and every sub-expression, pre-order.
template <typename Fn>
void for_each_expr(const Expr& expr, Fn&& fn) {
  fn(expr);
  for (const Expr& arg : expr.args) for_each_expr(arg, fn);
  for (const PathSegment& seg : expr.path) {
    for (const Expr& index : seg.indices) for_each_expr(index, fn);
  }
}

/// Invokes fn(expr) for the root expressions directly owned by a statement.
template <typename Fn>
void for_each_root_expr(const Stmt& stmt, Fn&& fn) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, ForEach>) {
          fn(node.iterable);
        } else if constexpr (std::is_same_v<T, If>) {
          for (const auto& branch : node.branches) fn(branch.condition);
        } else if constexpr (std::is_same_v<T, Switch>) {
          fn(node.scrutinee);
          for (const auto& c : node.cases) fn(c.label);
        } else if constexpr (std::is_same_v<T, PromptEndsHere>) {
          fn(node.condition);
        } else if constexpr (std::is_same_v<T, NameDef>) {
          fn(node.value);
        } else if constexpr (std::is_same_v<T, FragInvoke>) {
          for (const auto& arg : node.args) fn(arg);
        } else if constexpr (std::is_same_v<T, Element>) {
          fn(node.expr);
        }
      },
      stmt.node);
}

}  // namespace acdl
