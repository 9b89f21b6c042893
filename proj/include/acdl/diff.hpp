#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acdl/ast.hpp"
#include "acdl/diagnostic.hpp"
#include "acdl/render.hpp"
#include "acdl/semantics.hpp"

namespace acdl {

enum class DiffKind { Context, Role, ForEach, If, Branch, Else, Switch, Case, Default, Leaf };

/// A context as an ordered labeled tree. Statements keep their own data with
/// child blocks emptied; If and Switch get one child per branch or case.
struct DiffNode {
  DiffKind kind = DiffKind::Leaf;
  std::optional<Stmt> stmt;    // statement nodes, bodies cleared
  std::optional<Expr> expr;    // Branch condition or Case label
  std::string header;          // Context: name and parameters
  std::vector<Param> params;   // Context
  std::vector<DiffNode> children;
  Span span;
};

using NodePath = std::vector<std::size_t>;

enum class EditKind { Insert, Delete, ReplaceRole, Move, ModifyContent };

std::string_view to_string(EditKind kind);

/// One edit. Paths are child indices from the context root and are valid in
/// the tree as it stands when the edit is applied, in script order.
struct Edit {
  EditKind kind = EditKind::Insert;
  NodePath path;                   // Insert: position to insert at; Move: source
  NodePath to_path;                // Move: position after removal from `path`
  std::optional<Role> old_role;    // ReplaceRole
  std::optional<Role> new_role;
  std::string old_text;            // summary of the node before the edit
  std::string new_text;            // summary after the edit
  std::optional<DiffNode> node;    // Insert: subtree; ModifyContent: replacement node without children
  std::optional<Span> span_a;      // source position in the first context
  std::optional<Span> span_b;      // source position in the second context
  std::size_t cost = 0;
};

struct EditScript {
  std::vector<Edit> edits;
  std::size_t cost = 0;
  std::vector<std::string> notes;  // Mark and comment changes, which carry no cost
};

struct DiffResult {
  EditScript script;
  Diagnostics diagnostics;  // W-DIFF-APPROX for large trees
};

DiffNode diff_tree(const ContextDef& context);
ContextDef from_diff_tree(const DiffNode& root);
std::size_t tree_size(const DiffNode& node);

/// Structural diff with Mark wrappers and comments ignored. Costs: role
/// change 1, label change 1, subtree insert or delete = node count, move 2.
DiffResult diff(const ResolvedContext& a, const ResolvedContext& b);

/// Replays a script on `a`. The result is AST-equal to the second input of
/// the diff that produced the script.
ContextDef apply_edits(const ResolvedContext& a, const EditScript& script);

/// Text report: one line per edit with `line:col` positions, or
/// "no structural differences".
std::string format_diff(const EditScript& script, std::string_view source_a, std::string_view source_b);

/// Rendering of `b` with inserted, changed and removed content tagged.
std::string format_diff_svg(const EditScript& script, const ResolvedContext& b, const Theme& theme);

}  // namespace acdl
