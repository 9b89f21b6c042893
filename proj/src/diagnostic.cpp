#include "acdl/diagnostic.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace acdl {

std::string_view to_string(Severity severity) {
  switch (severity) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Info: return "info";
  }
  return "error";
}

bool has_errors(const Diagnostics& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::size_t count_code(const Diagnostics& diagnostics, std::string_view code) {
  return static_cast<std::size_t>(std::count_if(
      diagnostics.begin(), diagnostics.end(), [&](const Diagnostic& d) { return d.code == code; }));
}

Diagnostics deduplicate(Diagnostics diagnostics) {
  std::set<std::pair<std::string, Span>> seen;
  Diagnostics out;
  out.reserve(diagnostics.size());
  for (auto& d : diagnostics) {
    if (seen.emplace(d.code, d.span).second) out.push_back(std::move(d));
  }
  return out;
}

LineIndex::LineIndex(std::string_view source) {
  line_starts_.push_back(0);
  for (std::uint32_t i = 0; i < source.size(); ++i) {
    if (source[i] == '\n') line_starts_.push_back(i + 1);
  }
}

LineIndex::Position LineIndex::locate(std::uint32_t offset) const {
  auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
  auto line = static_cast<std::uint32_t>(it - line_starts_.begin());
  return {line, offset - line_starts_[line - 1] + 1};
}

}  // namespace acdl
