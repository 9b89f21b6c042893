#include <regex>

#include <json.hpp>

#include "acdl/render.hpp"

namespace acdl {

using nlohmann::json;

Theme default_theme() {
  Theme theme;
  theme.roles[static_cast<std::size_t>(Role::System)] = {"#FDE68A", "#B45309"};
  theme.roles[static_cast<std::size_t>(Role::User)] = {"#BFDBFE", "#1D4ED8"};
  theme.roles[static_cast<std::size_t>(Role::Assistant)] = {"#BBF7D0", "#15803D"};
  theme.roles[static_cast<std::size_t>(Role::Tool)] = {"#DDD6FE", "#6D28D9"};
  theme.roles[static_cast<std::size_t>(Role::None)] = {"#E5E7EB", "#4B5563"};
  return theme;
}

namespace {

bool is_color(const json& value) {
  static const std::regex pattern("#[0-9A-Fa-f]{3}([0-9A-Fa-f]{3})?");
  return value.is_string() && std::regex_match(value.get<std::string>(), pattern);
}

}  // namespace

ThemeLoadResult load_theme(std::string_view json_text) {
  ThemeLoadResult result;
  result.theme = default_theme();
  auto fail = [&](const std::string& message) {
    result.theme = default_theme();
    result.diagnostics.push_back(make_error("E-THEME", message, {0, 0}));
    return result;
  };
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return fail("theme must be a JSON object");
  Theme& theme = result.theme;

  if (doc.contains("roles")) {
    if (!doc["roles"].is_object()) return fail("'roles' must be an object");
    for (const auto& [letter, style] : doc["roles"].items()) {
      auto role = letter.size() == 1 ? role_from_letter(letter[0]) : std::nullopt;
      if (!role) return fail("unknown role '" + letter + "' in theme");
      if (!style.is_object()) return fail("style for role " + letter + " must be an object");
      RoleStyle& target = theme.roles[static_cast<std::size_t>(*role)];
      for (const char* key : {"fill", "stroke"}) {
        if (!style.contains(key)) continue;
        if (!is_color(style[key])) return fail(std::string("role ") + letter + " " + key + " must be a #rgb or #rrggbb color");
        (std::string(key) == "fill" ? target.fill : target.stroke) = style[key].get<std::string>();
      }
    }
  }
  const std::pair<const char*, int*> sizes[] = {
      {"font_size", &theme.font_size}, {"char_width", &theme.char_width}, {"line_height", &theme.line_height},
      {"padding", &theme.padding},     {"gap", &theme.gap},               {"wrap_col", &theme.wrap_col},
  };
  for (const auto& [key, target] : sizes) {
    if (!doc.contains(key)) continue;
    const json& value = doc[key];
    if (!value.is_number_integer() || value.get<int>() < 1 || value.get<int>() > 1000) {
      return fail(std::string("'") + key + "' must be an integer between 1 and 1000");
    }
    *target = value.get<int>();
  }
  const std::pair<const char*, std::string*> colors[] = {
      {"text_color", &theme.text_color}, {"muted_color", &theme.muted_color}, {"frame_stroke", &theme.frame_stroke},
      {"background", &theme.background}, {"inserted", &theme.inserted},       {"deleted", &theme.deleted},
      {"changed", &theme.changed},
  };
  for (const auto& [key, target] : colors) {
    if (!doc.contains(key)) continue;
    if (!is_color(doc[key])) return fail(std::string("'") + key + "' must be a #rgb or #rrggbb color");
    *target = doc[key].get<std::string>();
  }
  if (doc.contains("frame_dash")) {
    static const std::regex dash("[0-9]+( [0-9]+)*");
    const json& value = doc["frame_dash"];
    if (!value.is_string() || !std::regex_match(value.get<std::string>(), dash)) {
      return fail("'frame_dash' must be a list of space-separated integers");
    }
    theme.frame_dash = value.get<std::string>();
  }
  return result;
}

}  // namespace acdl
