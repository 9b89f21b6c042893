#include "acdl/format.hpp"

#include <variant>

namespace acdl {
namespace {

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 2, ' '); }

std::string comment_text(const std::string& text) { return "//" + text; }

std::string quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c; break;
    }
  }
  return out + "\"";
}

std::string join(const std::vector<Expr>& exprs) {
  std::string out;
  for (std::size_t i = 0; i < exprs.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_expr(exprs[i]);
  }
  return out;
}

std::string path_text(const std::vector<PathSegment>& path) {
  std::string out;
  for (const PathSegment& seg : path) {
    if (!seg.name.empty()) out += "." + seg.name;
    if (!seg.indices.empty()) out += "[" + join(seg.indices) + "]";
  }
  return out;
}

class Printer {
 public:
  std::string out;

  void block(const Block& body, int indent) {
    out += " {";
    if (!body.open_comment.empty()) out += "  " + comment_text(body.open_comment);
    out += '\n';
    statements(body, indent + 1);
    out += pad(indent) + "}";
    if (!body.close_comment.empty()) out += "  " + comment_text(body.close_comment);
  }

  void statements(const Block& body, int indent) {
    for (const Stmt& stmt : body.stmts) {
      if (stmt.blank_before) out += '\n';
      statement(stmt, indent);
      out += '\n';
    }
  }

  void comments(const std::vector<std::string>& lines, int indent) {
    for (const std::string& line : lines) out += pad(indent) + comment_text(line) + '\n';
  }

  void statement(const Stmt& stmt, int indent) {
    out += pad(indent);
    std::visit([&](const auto& node) { emit(node, indent); }, stmt.node);
    if (!stmt.trailing_comment.empty()) out += "  " + comment_text(stmt.trailing_comment);
  }

  void emit(const RoleMessage& msg, int indent) {
    out += role_letter(msg.role);
    out += ':';
    if (msg.single_line && msg.body.stmts.size() == 1) {
      out += ' ';
      Printer inner;
      std::visit([&](const auto& node) { inner.emit(node, indent); }, msg.body.stmts.front().node);
      out += inner.out;
      return;
    }
    block(msg.body, indent);
  }

  void emit(const ForEach& loop, int indent) {
    out += "ForEach(" + std::string(loop.time_binder ? "@" : "") + loop.binder + ": " +
           format_expr(loop.iterable) + ")";
    block(loop.body, indent);
  }

  void emit(const If& node, int indent) {
    for (std::size_t i = 0; i < node.branches.size(); ++i) {
      const IfBranch& branch = node.branches[i];
      if (i > 0) {
        out += '\n';
        comments(branch.leading_comments, indent);
        out += pad(indent) + "ElseIf ";
      } else {
        out += "If ";
      }
      out += format_expr(branch.condition);
      block(branch.body, indent);
    }
    if (node.else_body) {
      out += '\n';
      comments(node.else_leading_comments, indent);
      out += pad(indent) + "Else";
      block(*node.else_body, indent);
    }
  }

  void emit(const Switch& node, int indent) {
    out += "Switch " + format_expr(node.scrutinee) + " {";
    if (!node.open_comment.empty()) out += "  " + comment_text(node.open_comment);
    out += '\n';
    for (const SwitchCase& c : node.cases) {
      comments(c.leading_comments, indent + 1);
      out += pad(indent + 1) + "Case " + format_expr(c.label);
      block(c.body, indent + 1);
      out += '\n';
    }
    if (node.default_body) {
      comments(node.default_leading_comments, indent + 1);
      out += pad(indent + 1) + "Default";
      block(*node.default_body, indent + 1);
      out += '\n';
    }
    comments(node.trailing_comments, indent + 1);
    out += pad(indent) + "}";
    if (!node.close_comment.empty()) out += "  " + comment_text(node.close_comment);
  }

  void emit(const Mark& mark, int indent) {
    out += "Mark " + std::to_string(mark.number);
    block(mark.body, indent);
  }

  void emit(const PromptEndsHere& node, int) { out += "PromptEndsHere when " + format_expr(node.condition); }
  void emit(const NameDef& def, int) { out += "Name " + def.name + " := " + format_expr(def.value); }
  void emit(const FragInvoke& invoke, int) { out += "Frag " + invoke.name + "[" + join(invoke.args) + "]"; }
  void emit(const Element& element, int) { out += format_expr(element.expr); }
  void emit(const LoopControl& ctl, int) { out += ctl.is_break ? "break" : "continue"; }
  void emit(const Comment& comment, int) { out += comment_text(comment.text); }
};

}  // namespace

std::string format_expr(const Expr& expr) {
  switch (expr.kind) {
    case ExprKind::Int: return std::to_string(expr.number);
    case ExprKind::String: return quote(expr.text);
    case ExprKind::Inline: return "{{" + expr.text + "}}";
    case ExprKind::Ident: return expr.text;
    case ExprKind::Placeholder: return "<" + expr.text + ">";
    case ExprKind::TimeVar: return "@" + expr.text + path_text(expr.path);
    case ExprKind::ContextVar: {
      std::string out = expr.text;
      if (!expr.args.empty()) out += "[" + join(expr.args) + "]";
      return out + path_text(expr.path);
    }
    case ExprKind::Template: return expr.flag ? expr.text + "(" + join(expr.args) + ")" : expr.text;
    case ExprKind::Call: return expr.text + "(" + join(expr.args) + ")" + path_text(expr.path);
    case ExprKind::NameRef: return "$" + expr.text + path_text(expr.path);
    case ExprKind::Binary: {
      const bool compact = expr.text == "+" || expr.text == "-";
      const std::string sep = compact ? "" : " ";
      return format_expr(expr.args[0]) + sep + expr.text + sep + format_expr(expr.args[1]);
    }
    case ExprKind::Compare:
    case ExprKind::Logical:
      return format_expr(expr.args[0]) + " " + expr.text + " " + format_expr(expr.args[1]);
    case ExprKind::Neg: return "-" + format_expr(expr.args[0]);
    case ExprKind::Paren: return "(" + format_expr(expr.args[0]) + ")";
    case ExprKind::SubstepZero: return format_expr(expr.args[0]) + ".0";
    case ExprKind::ListComp:
      return "[" + format_expr(expr.args[0]) + " for " + (expr.flag ? "@" : "") + expr.text + " in " +
             format_expr(expr.args[1]) + "]";
    case ExprKind::IndexList: return "[" + join(expr.args) + "]";
  }
  return expr.text;
}

std::string format_param(const Param& param) {
  if (param.ellipsis) return "...";
  if (!param.time) return param.name;
  std::string out = "@" + param.name;
  for (const std::string& level : param.sublevels) out += "." + level;
  if (param.variadic) out += ".*";
  return out;
}

std::string format_params(const std::vector<Param>& params) {
  std::string out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_param(params[i]);
  }
  return out;
}

std::string format(const Document& document) {
  Printer printer;
  bool previous_def = false;
  for (std::size_t i = 0; i < document.items.size(); ++i) {
    const Item& item = document.items[i];
    const bool is_def = !std::holds_alternative<Comment>(item.node);
    if (i > 0 && (item.blank_before || (is_def && previous_def))) printer.out += '\n';
    previous_def = is_def;
    if (const auto* comment = std::get_if<Comment>(&item.node)) {
      printer.out += comment_text(comment->text) + '\n';
      continue;
    }
    const std::vector<Param>* params = nullptr;
    const Block* body = nullptr;
    if (const auto* ctx = std::get_if<ContextDef>(&item.node)) {
      printer.out += ctx->name;
      params = &ctx->params;
      body = &ctx->body;
    } else {
      const auto& frag = std::get<FragmentDef>(item.node);
      printer.out += (frag.kind == FragmentKind::String ? "StrFrag " : "RolesFrag ") + frag.name;
      params = &frag.params;
      body = &frag.body;
    }
    if (!params->empty()) printer.out += "[" + format_params(*params) + "]";
    printer.out += ':';
    printer.block(*body, 0);
    printer.out += '\n';
  }
  return printer.out;
}

std::string format_statements(const Block& block, int indent) {
  Printer printer;
  printer.statements(block, indent);
  return printer.out;
}

std::string format_statement(const Stmt& stmt, int indent) {
  Printer printer;
  printer.statement(stmt, indent);
  return printer.out;
}

std::string format_header(const Stmt& stmt) {
  return std::visit(
      [&](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, RoleMessage>) {
          if (node.single_line) return format_statement(Stmt{node, {}, {}, false});
          return std::string(1, role_letter(node.role)) + ":";
        } else if constexpr (std::is_same_v<T, ForEach>) {
          return "ForEach(" + std::string(node.time_binder ? "@" : "") + node.binder + ": " +
                 format_expr(node.iterable) + ")";
        } else if constexpr (std::is_same_v<T, If>) {
          return "If " + format_expr(node.branches.front().condition);
        } else if constexpr (std::is_same_v<T, Switch>) {
          return "Switch " + format_expr(node.scrutinee);
        } else if constexpr (std::is_same_v<T, Mark>) {
          return "Mark " + std::to_string(node.number);
        } else {
          Stmt bare{node, {}, {}, false};
          return format_statement(bare);
        }
      },
      stmt.node);
}

}  // namespace acdl
