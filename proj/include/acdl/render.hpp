#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acdl/ast.hpp"
#include "acdl/diagnostic.hpp"
#include "acdl/expansion.hpp"

namespace acdl {

struct RoleStyle {
  std::string fill;
  std::string stroke;
};

struct Theme {
  std::array<RoleStyle, 5> roles;  // indexed by Role
  int font_size = 12;
  int char_width = 7;  // fixed advance per character
  int line_height = 18;
  int padding = 6;
  int gap = 6;
  int wrap_col = 48;
  std::string frame_dash = "4 3";
  std::string text_color = "#111827";
  std::string muted_color = "#6B7280";
  std::string frame_stroke = "#6B7280";
  std::string background = "#FFFFFF";
  std::string inserted = "#16A34A";
  std::string deleted = "#DC2626";
  std::string changed = "#EA580C";

  const RoleStyle& style(Role role) const { return roles[static_cast<std::size_t>(role)]; }
};

Theme default_theme();

struct ThemeLoadResult {
  Theme theme;
  Diagnostics diagnostics;  // E-THEME on malformed input
};

/// Applies a JSON theme file on top of the defaults:
/// `{"roles":{"S":{"fill":"#...","stroke":"#..."}},"font_size":12,"wrap_col":48}`.
ThemeLoadResult load_theme(std::string_view json_text);

enum class NodeKind { Root, Frame, Section, RoleBox, Text, Bracket };
enum class Highlight { None, Inserted, Deleted, Changed };

std::string_view to_string(NodeKind kind);

/// One laid-out element. Coordinates are absolute, in abstract units.
struct LayoutNode {
  NodeKind kind = NodeKind::Text;
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  std::string label;               // frame header, section label, or mark numeral
  std::vector<std::string> lines;  // Text: wrapped lines
  std::optional<Role> role;        // RoleBox
  bool dashed = false;             // Frame: loop and conditional regions
  bool muted = false;              // Text: comments and unresolved slots
  Highlight highlight = Highlight::None;
  Span span;
  std::vector<LayoutNode> children;
};

struct LayoutTree {
  LayoutNode root;
};

/// Statement spans of the laid-out document to tag, plus removed content
/// listed in a trailing section. Used by the annotated diff view.
struct LayoutAnnotations {
  std::map<Span, Highlight> highlights;
  std::vector<std::string> removed;
};

LayoutTree layout(const Document& document, const Theme& theme, const LayoutAnnotations& annotations = {});
LayoutTree layout(const ExpandedPrompt& prompt, const Theme& theme);

std::string render_svg(const LayoutTree& tree, const Theme& theme);

/// Breaks text into lines of at most `columns` characters; every broken
/// line ends with a wrap marker.
std::vector<std::string> wrap_text(std::string_view text, int columns);

/// Number of code points, used for width measurement.
std::size_t display_width(std::string_view text);

}  // namespace acdl
