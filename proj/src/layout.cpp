#include <algorithm>

#include "acdl/format.hpp"
#include "acdl/render.hpp"

namespace acdl {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Root: return "root";
    case NodeKind::Frame: return "frame";
    case NodeKind::Section: return "section";
    case NodeKind::RoleBox: return "role";
    case NodeKind::Text: return "text";
    case NodeKind::Bracket: return "bracket";
  }
  return "text";
}

namespace {

std::vector<std::string> code_points(std::string_view text) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size();) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = lead < 0x80 ? 1 : (lead >> 5) == 0x6 ? 2 : (lead >> 4) == 0xE ? 3 : (lead >> 3) == 0x1E ? 4 : 1;
    len = std::min(len, text.size() - i);
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

}  // namespace

std::size_t display_width(std::string_view text) {
  std::size_t count = 0;
  for (char c : text) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++count;
  }
  return count;
}

std::vector<std::string> wrap_text(std::string_view text, int columns) {
  const auto points = code_points(text);
  const auto cols = static_cast<std::size_t>(std::max(columns, 2));
  if (points.size() <= cols) return {std::string(text)};
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (points.size() - pos > cols) {
    std::size_t take = cols - 1;
    // Prefer breaking after a space in the second half of the line.
    for (std::size_t k = take; k > take / 2; --k) {
      if (points[pos + k - 1] == " ") {
        take = k;
        break;
      }
    }
    std::string line;
    for (std::size_t k = pos; k < pos + take; ++k) line += points[k];
    lines.push_back(line + "↩");
    pos += take;
  }
  std::string rest;
  for (std::size_t k = pos; k < points.size(); ++k) rest += points[k];
  lines.push_back(rest);
  return lines;
}

namespace {

struct MarkRange {
  std::int64_t number = 0;
  std::size_t first = 0;
  std::size_t end = 0;
  int depth = 0;
};

// Intermediate tree with natural sizes; placed into LayoutNodes afterwards.
struct Box {
  NodeKind kind = NodeKind::Text;
  std::string label;
  std::vector<std::string> lines;
  std::optional<Role> role;
  bool dashed = false;
  bool muted = false;
  Highlight highlight = Highlight::None;
  Span span;
  std::vector<Box> children;
  std::vector<MarkRange> marks;
  int width = 0;
  int height = 0;
};

class Layouter {
 public:
  Layouter(const Theme& theme, const LayoutAnnotations* annotations) : theme_(theme), annotations_(annotations) {}

  Box text(const std::string& content, Span span, bool muted) {
    Box box;
    box.kind = NodeKind::Text;
    box.lines = wrap_text(content, theme_.wrap_col);
    box.muted = muted;
    box.span = span;
    box.highlight = highlight_for(span);
    return box;
  }

  Highlight highlight_for(Span span) const {
    if (!annotations_) return Highlight::None;
    auto it = annotations_->highlights.find(span);
    return it == annotations_->highlights.end() ? Highlight::None : it->second;
  }

  Box container(NodeKind kind, std::string label, Span span) {
    Box box;
    box.kind = kind;
    box.label = std::move(label);
    box.span = span;
    box.highlight = highlight_for(span);
    return box;
  }

  void comment(Box& into, const std::string& text, Span span) {
    if (!text.empty()) into.children.push_back(this->text("//" + text, span, true));
  }

  void emit_block(const Block& block, Box& into, int mark_depth) {
    comment(into, block.open_comment, block.span);
    for (const Stmt& stmt : block.stmts) emit(stmt, into, mark_depth);
  }

  void emit(const Stmt& stmt, Box& into, int mark_depth) {
    std::visit([&](const auto& node) { emit_node(node, stmt, into, mark_depth); }, stmt.node);
    comment(into, stmt.trailing_comment, stmt.span);
  }

  void emit_node(const RoleMessage& node, const Stmt& stmt, Box& into, int) {
    Box box = container(NodeKind::RoleBox, std::string(1, role_letter(node.role)), stmt.span);
    box.role = node.role;
    emit_block(node.body, box, 0);
    comment(box, node.body.close_comment, node.body.span);
    into.children.push_back(std::move(box));
  }

  void emit_node(const ForEach& node, const Stmt& stmt, Box& into, int) {
    Box frame = container(NodeKind::Frame, format_header(stmt), stmt.span);
    frame.dashed = true;
    emit_block(node.body, frame, 0);
    comment(frame, node.body.close_comment, node.body.span);
    into.children.push_back(std::move(frame));
  }

  void add_section(Box& frame, std::string label, const std::vector<std::string>& leading, const Block& body) {
    Box section = container(NodeKind::Section, std::move(label), body.span);
    section.dashed = !frame.children.empty();
    for (const std::string& c : leading) comment(section, c, body.span);
    emit_block(body, section, 0);
    comment(section, body.close_comment, body.span);
    frame.children.push_back(std::move(section));
  }

  void emit_node(const If& node, const Stmt& stmt, Box& into, int) {
    Box frame = container(NodeKind::Frame, format_header(stmt), stmt.span);
    frame.dashed = true;
    for (std::size_t i = 0; i < node.branches.size(); ++i) {
      const IfBranch& branch = node.branches[i];
      add_section(frame, i == 0 ? "" : "ElseIf " + format_expr(branch.condition), branch.leading_comments,
                  branch.body);
    }
    if (node.else_body) add_section(frame, "Else", node.else_leading_comments, *node.else_body);
    into.children.push_back(std::move(frame));
  }

  void emit_node(const Switch& node, const Stmt& stmt, Box& into, int) {
    Box frame = container(NodeKind::Frame, format_header(stmt), stmt.span);
    frame.dashed = true;
    comment(frame, node.open_comment, stmt.span);
    for (const SwitchCase& c : node.cases) {
      add_section(frame, "Case " + format_expr(c.label), c.leading_comments, c.body);
    }
    if (node.default_body) add_section(frame, "Default", node.default_leading_comments, *node.default_body);
    for (const std::string& c : node.trailing_comments) comment(frame, c, stmt.span);
    comment(frame, node.close_comment, stmt.span);
    into.children.push_back(std::move(frame));
  }

  void emit_node(const Mark& node, const Stmt&, Box& into, int mark_depth) {
    const std::size_t first = into.children.size();
    const std::size_t index = into.marks.size();
    into.marks.push_back({node.number, first, first, mark_depth});
    emit_block(node.body, into, mark_depth + 1);
    into.marks[index].end = into.children.size();
  }

  void emit_node(const Comment& node, const Stmt& stmt, Box& into, int) {
    into.children.push_back(text("//" + node.text, stmt.span, true));
  }

  template <typename Leaf>
  void emit_node(const Leaf&, const Stmt& stmt, Box& into, int) {
    into.children.push_back(text(format_header(stmt), stmt.span, false));
  }

  // ---- measurement -------------------------------------------------------

  int bracket_step() const { return theme_.char_width * 3 + 4; }

  int reserve(const Box& box) const {
    int depth = -1;
    for (const MarkRange& m : box.marks) {
      if (m.end > m.first) depth = std::max(depth, m.depth);
    }
    return (depth + 1) * bracket_step();
  }

  int text_width(const std::string& s) const { return static_cast<int>(display_width(s)) * theme_.char_width; }

  // Natural width and height of the children stacked vertically.
  std::pair<int, int> measure_stack(Box& box) {
    int width = 0;
    int height = 0;
    for (std::size_t i = 0; i < box.children.size(); ++i) {
      measure(box.children[i]);
      width = std::max(width, box.children[i].width);
      height += box.children[i].height + (i > 0 ? theme_.gap : 0);
    }
    return {width + reserve(box), height};
  }

  int role_inset() const { return theme_.padding * 2 + theme_.char_width * 2; }

  void measure(Box& box) {
    const int pad = theme_.padding;
    const int lh = theme_.line_height;
    switch (box.kind) {
      case NodeKind::Text: {
        int width = 0;
        for (const std::string& line : box.lines) width = std::max(width, text_width(line));
        box.width = width;
        box.height = static_cast<int>(box.lines.size()) * lh;
        return;
      }
      case NodeKind::RoleBox: {
        auto [w, h] = measure_stack(box);
        box.width = role_inset() + w + pad;
        box.height = std::max(lh, h) + 2 * pad;
        return;
      }
      case NodeKind::Frame: {
        auto [w, h] = measure_stack(box);
        box.width = std::max(text_width(box.label), w) + 2 * pad;
        box.height = pad + lh + (box.children.empty() ? 0 : theme_.gap + h) + pad;
        return;
      }
      case NodeKind::Section: {
        auto [w, h] = measure_stack(box);
        const int label = box.label.empty() ? 0 : lh + (box.children.empty() ? 0 : theme_.gap);
        box.width = std::max(text_width(box.label), w + pad);
        box.height = std::max(label + h, box.label.empty() && box.children.empty() ? lh : 0);
        return;
      }
      case NodeKind::Root: {
        auto [w, h] = measure_stack(box);
        box.width = w + 2 * pad;
        box.height = h + 2 * pad;
        return;
      }
      case NodeKind::Bracket: return;
    }
  }

  // ---- placement ---------------------------------------------------------

  void place_stack(const Box& box, LayoutNode& node, int x, int y, int width) {
    const int content = width - reserve(box);
    int cursor = y;
    for (const Box& child : box.children) {
      const bool block = child.kind != NodeKind::Text;
      node.children.push_back(place(child, x, cursor, block ? content : child.width));
      cursor += child.height + theme_.gap;
    }
    for (const MarkRange& mark : box.marks) {
      if (mark.end <= mark.first) continue;
      const LayoutNode& top = node.children[mark.first];
      const LayoutNode& bottom = node.children[mark.end - 1];
      LayoutNode bracket;
      bracket.kind = NodeKind::Bracket;
      bracket.label = std::to_string(mark.number);
      bracket.x = x + content + mark.depth * bracket_step() + 2;
      bracket.y = top.y;
      bracket.width = bracket_step() - 4;
      bracket.height = bottom.y + bottom.height - top.y;
      node.children.push_back(std::move(bracket));
    }
  }

  LayoutNode place(const Box& box, int x, int y, int width) {
    LayoutNode node;
    node.kind = box.kind;
    node.x = x;
    node.y = y;
    node.width = width;
    node.height = box.height;
    node.label = box.label;
    node.lines = box.lines;
    node.role = box.role;
    node.dashed = box.dashed;
    node.muted = box.muted;
    node.highlight = box.highlight;
    node.span = box.span;
    const int pad = theme_.padding;
    const int lh = theme_.line_height;
    switch (box.kind) {
      case NodeKind::RoleBox: place_stack(box, node, x + role_inset(), y + pad, width - role_inset() - pad); break;
      case NodeKind::Frame: place_stack(box, node, x + pad, y + pad + lh + theme_.gap, width - 2 * pad); break;
      case NodeKind::Section: {
        const int top = box.label.empty() ? 0 : lh + theme_.gap;
        place_stack(box, node, x + pad, y + top, width - pad);
        break;
      }
      case NodeKind::Root: place_stack(box, node, x + pad, y + pad, width - 2 * pad); break;
      default: break;
    }
    return node;
  }

  LayoutTree finish(Box root) {
    measure(root);
    return {place(root, 0, 0, root.width)};
  }

 private:
  const Theme& theme_;
  const LayoutAnnotations* annotations_;
};

std::string definition_header(const std::string& keyword, const std::string& name, const std::vector<Param>& params) {
  std::string header = keyword.empty() ? name : keyword + " " + name;
  if (!params.empty()) header += "[" + format_params(params) + "]";
  return header + ":";
}

}  // namespace

LayoutTree layout(const Document& document, const Theme& theme, const LayoutAnnotations& annotations) {
  Layouter layouter(theme, &annotations);
  Box root;
  root.kind = NodeKind::Root;
  for (const Item& item : document.items) {
    if (const auto* ctx = std::get_if<ContextDef>(&item.node)) {
      Box frame = layouter.container(NodeKind::Frame, definition_header("", ctx->name, ctx->params), item.span);
      layouter.emit_block(ctx->body, frame, 0);
      layouter.comment(frame, ctx->body.close_comment, ctx->body.span);
      root.children.push_back(std::move(frame));
    } else if (const auto* frag = std::get_if<FragmentDef>(&item.node)) {
      const std::string keyword = frag->kind == FragmentKind::String ? "StrFrag" : "RolesFrag";
      Box frame = layouter.container(NodeKind::Frame, definition_header(keyword, frag->name, frag->params), item.span);
      layouter.emit_block(frag->body, frame, 0);
      layouter.comment(frame, frag->body.close_comment, frag->body.span);
      root.children.push_back(std::move(frame));
    } else {
      root.children.push_back(layouter.text("//" + std::get<Comment>(item.node).text, item.span, true));
    }
  }
  if (!annotations.removed.empty()) {
    Box removed = layouter.container(NodeKind::Section, "Removed", {});
    for (const std::string& line : annotations.removed) {
      Box entry = layouter.text(line, {}, false);
      entry.highlight = Highlight::Deleted;
      removed.children.push_back(std::move(entry));
    }
    root.children.push_back(std::move(removed));
  }
  return layouter.finish(std::move(root));
}

LayoutTree layout(const ExpandedPrompt& prompt, const Theme& theme) {
  Layouter layouter(theme, nullptr);
  Box root;
  root.kind = NodeKind::Root;
  std::string title = prompt.context;
  if (!prompt.time.empty()) {
    title += " @ ";
    for (std::size_t i = 0; i < prompt.time.size(); ++i) title += (i > 0 ? "." : "") + std::to_string(prompt.time[i]);
  }
  Box frame = layouter.container(NodeKind::Frame, title, {});
  for (const Message& message : prompt.messages) {
    Box box = layouter.container(NodeKind::RoleBox, std::string(1, role_letter(message.role)), message.span);
    box.role = message.role;
    for (const Slot& slot : message.slots) {
      box.children.push_back(layouter.text(slot.value ? *slot.value : slot.text, slot.span,
                                           slot.kind == SlotKind::Unresolved));
    }
    frame.children.push_back(std::move(box));
  }
  // Nested marks sit further right; depth counts the enclosing marks.
  auto depth_of = [&](const MarkAnnotation& mark) {
    int depth = 0;
    for (const MarkAnnotation& other : prompt.marks) {
      if (&other == &mark || other.within_message != mark.within_message) continue;
      const bool encloses = mark.within_message
                                ? other.first_message == mark.first_message && other.first_slot <= mark.first_slot &&
                                      other.end_slot >= mark.end_slot &&
                                      (other.first_slot < mark.first_slot || other.end_slot > mark.end_slot ||
                                       &other < &mark)
                                : other.first_message <= mark.first_message && other.end_message >= mark.end_message &&
                                      (other.first_message < mark.first_message ||
                                       other.end_message > mark.end_message || &other < &mark);
      if (encloses) ++depth;
    }
    return depth;
  };
  for (const MarkAnnotation& mark : prompt.marks) {
    if (!mark.within_message) {
      frame.marks.push_back({mark.number, mark.first_message, mark.end_message, depth_of(mark)});
    } else if (mark.first_message < frame.children.size()) {
      frame.children[mark.first_message].marks.push_back(
          {mark.number, mark.first_slot, mark.end_slot, depth_of(mark)});
    }
  }
  if (prompt.truncated) frame.children.push_back(layouter.text("// prompt ends here", {}, true));
  root.children.push_back(std::move(frame));
  return layouter.finish(std::move(root));
}

}  // namespace acdl
