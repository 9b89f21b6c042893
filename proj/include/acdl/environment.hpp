#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "acdl/diagnostic.hpp"

namespace acdl {

/// A hierarchical time coordinate such as turn 3, sub-step 2.
struct TimeCoord {
  std::vector<std::int64_t> coords;
  auto operator<=>(const TimeCoord&) const = default;
};

/// The value of an index expression: a number, a time coordinate with more
/// than one level, or a key such as an agent or collection element.
using IndexValue = std::variant<std::int64_t, TimeCoord, std::string>;

/// `3`, `3.2`, or the key text unquoted.
std::string to_display(const IndexValue& value);
/// As written inside a flattened variable key: numbers and coordinates
/// verbatim, keys as JSON string literals.
std::string to_key_text(const IndexValue& value);

/// External valuation used to expand a context at one time point.
struct EnvironmentDocument {
  std::vector<std::int64_t> time;
  std::map<std::string, IndexValue> vars;  // flattened key -> scalar value
  std::map<std::string, std::vector<IndexValue>> collections;
  std::map<std::string, std::int64_t> substeps;  // "[2]" or "[2.1]" -> count
  std::map<std::string, bool> conditions;
  std::map<std::string, std::string> functions;  // call fingerprint -> JSON text of the value
};

struct EnvironmentLoadResult {
  EnvironmentDocument environment;
  Diagnostics diagnostics;  // E-ENV on malformed input
};

EnvironmentLoadResult load_environment(std::string_view json_text);

std::string environment_to_json(const EnvironmentDocument& environment);

/// Key used in the `substeps` map for a turn coordinate.
std::string substeps_key(const IndexValue& turn);

}  // namespace acdl
