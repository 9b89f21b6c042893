#include <sstream>

#include "acdl/render.hpp"

namespace acdl {
namespace {

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

class SvgWriter {
 public:
  explicit SvgWriter(const Theme& theme) : theme_(theme) {}

  std::string write(const LayoutTree& tree) {
    const LayoutNode& root = tree.root;
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << root.width << "\" height=\""
         << root.height << "\" viewBox=\"0 0 " << root.width << ' ' << root.height
         << "\" font-family=\"monospace\" font-size=\"" << theme_.font_size << "\">\n";
    out_ << "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" << root.width << "\" height=\"" << root.height
         << "\" fill=\"" << theme_.background << "\"/>\n";
    for (const LayoutNode& child : root.children) node(child, 0);
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  void indent(int depth) {
    for (int i = 0; i < depth; ++i) out_ << "  ";
  }

  const char* highlight_class(Highlight h) const {
    switch (h) {
      case Highlight::Inserted: return " inserted";
      case Highlight::Deleted: return " deleted";
      case Highlight::Changed: return " changed";
      case Highlight::None: break;
    }
    return "";
  }

  const std::string* highlight_color(Highlight h) const {
    switch (h) {
      case Highlight::Inserted: return &theme_.inserted;
      case Highlight::Deleted: return &theme_.deleted;
      case Highlight::Changed: return &theme_.changed;
      case Highlight::None: break;
    }
    return nullptr;
  }

  int baseline(int top, std::size_t line) const {
    return top + static_cast<int>(line) * theme_.line_height + (theme_.line_height + theme_.font_size) / 2 - 2;
  }

  void text_line(int depth, int x, int y, std::string_view content, const std::string& fill, const char* extra = "") {
    indent(depth);
    out_ << "<text x=\"" << x << "\" y=\"" << y << "\" fill=\"" << fill << '"' << extra << '>' << escape(content)
         << "</text>\n";
  }

  void node(const LayoutNode& n, int depth) {
    switch (n.kind) {
      case NodeKind::Frame: frame(n, depth); break;
      case NodeKind::Section: section(n, depth); break;
      case NodeKind::RoleBox: role_box(n, depth); break;
      case NodeKind::Text: text(n, depth); break;
      case NodeKind::Bracket: bracket(n, depth); break;
      case NodeKind::Root:
        for (const LayoutNode& child : n.children) node(child, depth);
        break;
    }
  }

  void frame(const LayoutNode& n, int depth) {
    indent(depth);
    out_ << "<g class=\"frame" << (n.dashed ? " control" : " definition") << highlight_class(n.highlight) << "\">\n";
    const std::string* color = highlight_color(n.highlight);
    indent(depth + 1);
    out_ << "<rect x=\"" << n.x << "\" y=\"" << n.y << "\" width=\"" << n.width << "\" height=\"" << n.height
         << "\" rx=\"6\" fill=\"none\" stroke=\"" << (color ? *color : theme_.frame_stroke) << '"';
    if (n.dashed) out_ << " stroke-dasharray=\"" << theme_.frame_dash << '"';
    if (color) out_ << " stroke-width=\"2\"";
    out_ << "/>\n";
    text_line(depth + 1, n.x + theme_.padding, baseline(n.y + theme_.padding, 0), n.label, theme_.frame_stroke,
              " font-weight=\"bold\"");
    for (const LayoutNode& child : n.children) node(child, depth + 1);
    indent(depth);
    out_ << "</g>\n";
  }

  void section(const LayoutNode& n, int depth) {
    indent(depth);
    out_ << "<g class=\"section" << highlight_class(n.highlight) << "\">\n";
    if (n.dashed) {
      const int y = n.y - theme_.gap / 2;
      indent(depth + 1);
      out_ << "<line x1=\"" << n.x << "\" y1=\"" << y << "\" x2=\"" << n.x + n.width << "\" y2=\"" << y
           << "\" stroke=\"" << theme_.frame_stroke << "\" stroke-dasharray=\"" << theme_.frame_dash << "\"/>\n";
    }
    if (!n.label.empty()) {
      const std::string* color = highlight_color(n.highlight);
      text_line(depth + 1, n.x, baseline(n.y, 0), n.label, color ? *color : theme_.frame_stroke,
                " font-weight=\"bold\"");
    }
    for (const LayoutNode& child : n.children) node(child, depth + 1);
    indent(depth);
    out_ << "</g>\n";
  }

  void role_box(const LayoutNode& n, int depth) {
    const Role role = n.role.value_or(Role::None);
    const RoleStyle& style = theme_.style(role);
    const char letter = role_letter(role);
    const std::string* color = highlight_color(n.highlight);
    indent(depth);
    out_ << "<g class=\"role role-" << letter << highlight_class(n.highlight) << "\">\n";
    indent(depth + 1);
    out_ << "<rect x=\"" << n.x << "\" y=\"" << n.y << "\" width=\"" << n.width << "\" height=\"" << n.height
         << "\" rx=\"4\" fill=\"" << style.fill << "\" stroke=\"" << (color ? *color : style.stroke) << '"'
         << (color ? " stroke-width=\"3\"" : "") << "/>\n";
    text_line(depth + 1, n.x + theme_.padding, baseline(n.y + theme_.padding, 0), std::string(1, letter),
              style.stroke, " font-weight=\"bold\"");
    for (const LayoutNode& child : n.children) node(child, depth + 1);
    indent(depth);
    out_ << "</g>\n";
  }

  void text(const LayoutNode& n, int depth) {
    const std::string* color = highlight_color(n.highlight);
    const std::string& fill = color ? *color : n.muted ? theme_.muted_color : theme_.text_color;
    indent(depth);
    out_ << "<text class=\"" << (n.muted ? "muted" : "content") << highlight_class(n.highlight) << "\" x=\"" << n.x
         << "\" y=\"" << baseline(n.y, 0) << "\" fill=\"" << fill << '"';
    if (n.muted) out_ << " font-style=\"italic\"";
    if (n.highlight == Highlight::Deleted) out_ << " text-decoration=\"line-through\"";
    out_ << '>';
    for (std::size_t i = 0; i < n.lines.size(); ++i) {
      out_ << "<tspan x=\"" << n.x << "\" y=\"" << baseline(n.y, i) << "\">" << escape(n.lines[i]) << "</tspan>";
    }
    out_ << "</text>\n";
  }

  void bracket(const LayoutNode& n, int depth) {
    const int arm = std::max(2, n.width / 3);
    const int bottom = n.y + n.height;
    indent(depth);
    out_ << "<g class=\"mark\">\n";
    indent(depth + 1);
    out_ << "<path d=\"M " << n.x << ' ' << n.y << " h " << arm << " V " << bottom << " h " << -arm
         << "\" fill=\"none\" stroke=\"" << theme_.text_color << "\" stroke-width=\"1.5\"/>\n";
    text_line(depth + 1, n.x + arm + 2, n.y + n.height / 2 + theme_.font_size / 2 - 1, n.label, theme_.text_color,
              " font-weight=\"bold\"");
    indent(depth);
    out_ << "</g>\n";
  }

  const Theme& theme_;
  std::ostringstream out_;
};

}  // namespace

std::string render_svg(const LayoutTree& tree, const Theme& theme) { return SvgWriter(theme).write(tree); }

}  // namespace acdl
