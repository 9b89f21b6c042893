#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace acdl {

/// Half-open byte range [begin, end) into the source text.
struct Span {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

enum class Severity { Error, Warning, Info };

std::string_view to_string(Severity severity);

struct Diagnostic {
  std::string code;  // stable identifier, e.g. "E-NESTED-ROLE"
  Severity severity = Severity::Error;
  std::string message;
  Span span;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& diagnostics);
std::size_t count_code(const Diagnostics& diagnostics, std::string_view code);

// Drops exact duplicates (same code and span), keeping first occurrences.
Diagnostics deduplicate(Diagnostics diagnostics);

inline Diagnostic make_error(std::string code, std::string message, Span span) {
  return {std::move(code), Severity::Error, std::move(message), span};
}
inline Diagnostic make_warning(std::string code, std::string message, Span span) {
  return {std::move(code), Severity::Warning, std::move(message), span};
}
inline Diagnostic make_info(std::string code, std::string message, Span span) {
  return {std::move(code), Severity::Info, std::move(message), span};
}

/// Maps byte offsets to 1-based line and column numbers.
class LineIndex {
 public:
  struct Position {
    std::uint32_t line = 1;
    std::uint32_t col = 1;
  };

  explicit LineIndex(std::string_view source);

  Position locate(std::uint32_t offset) const;

 private:
  std::vector<std::uint32_t> line_starts_;
};

}  // namespace acdl
