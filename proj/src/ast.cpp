#include "acdl/ast.hpp"

namespace acdl {

char role_letter(Role role) {
  switch (role) {
    case Role::System: return 'S';
    case Role::User: return 'U';
    case Role::Assistant: return 'A';
    case Role::Tool: return 'T';
    case Role::None: return 'N';
  }
  return 'N';
}

std::optional<Role> role_from_letter(char letter) {
  switch (letter) {
    case 'S': return Role::System;
    case 'U': return Role::User;
    case 'A': return Role::Assistant;
    case 'T': return Role::Tool;
    case 'N': return Role::None;
    default: return std::nullopt;
  }
}

std::string_view to_string(ExprKind kind) {
  switch (kind) {
    case ExprKind::Int: return "int";
    case ExprKind::String: return "string";
    case ExprKind::Inline: return "inline";
    case ExprKind::Ident: return "ident";
    case ExprKind::TimeVar: return "time-var";
    case ExprKind::ContextVar: return "context-var";
    case ExprKind::Template: return "template";
    case ExprKind::Call: return "call";
    case ExprKind::NameRef: return "name-ref";
    case ExprKind::Binary: return "binary";
    case ExprKind::Compare: return "compare";
    case ExprKind::Logical: return "logical";
    case ExprKind::Neg: return "neg";
    case ExprKind::Paren: return "paren";
    case ExprKind::SubstepZero: return "substep-zero";
    case ExprKind::ListComp: return "list-comp";
    case ExprKind::IndexList: return "index-list";
    case ExprKind::Placeholder: return "placeholder";
  }
  return "ident";
}

const ContextDef* find_context(const Document& document, std::string_view name) {
  for (const Item& item : document.items) {
    if (const auto* ctx = std::get_if<ContextDef>(&item.node); ctx && ctx->name == name) return ctx;
  }
  return nullptr;
}

const FragmentDef* find_fragment(const Document& document, std::string_view name) {
  for (const Item& item : document.items) {
    if (const auto* frag = std::get_if<FragmentDef>(&item.node); frag && frag->name == name) return frag;
  }
  return nullptr;
}

const ContextDef* first_context(const Document& document) {
  for (const Item& item : document.items) {
    if (const auto* ctx = std::get_if<ContextDef>(&item.node)) return ctx;
  }
  return nullptr;
}

std::vector<std::string> time_levels(const std::vector<Param>& params) {
  std::vector<std::string> levels;
  for (const Param& p : params) {
    if (!p.time) continue;
    levels.push_back(p.name);
    levels.insert(levels.end(), p.sublevels.begin(), p.sublevels.end());
    break;
  }
  return levels;
}

namespace {

void strip_into(const Block& block, Block& out);

Block stripped(const Block& block) {
  Block out;
  out.open_comment = block.open_comment;
  out.close_comment = block.close_comment;
  out.span = block.span;
  strip_into(block, out);
  return out;
}

void strip_into(const Block& block, Block& out) {
  for (const Stmt& stmt : block.stmts) {
    if (const auto* mark = std::get_if<Mark>(&stmt.node)) {
      strip_into(mark->body, out);
      continue;
    }
    Stmt copy = stmt;
    std::visit(
        [](auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, RoleMessage> || std::is_same_v<T, ForEach>) {
            node.body = stripped(node.body);
          } else if constexpr (std::is_same_v<T, If>) {
            for (auto& branch : node.branches) branch.body = stripped(branch.body);
            if (node.else_body) node.else_body = stripped(*node.else_body);
          } else if constexpr (std::is_same_v<T, Switch>) {
            for (auto& c : node.cases) c.body = stripped(c.body);
            if (node.default_body) node.default_body = stripped(*node.default_body);
          }
        },
        copy.node);
    out.stmts.push_back(std::move(copy));
  }
}

}  // namespace

Block strip_marks(const Block& block) { return stripped(block); }

}  // namespace acdl
