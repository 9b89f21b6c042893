#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "acdl/ast.hpp"
#include "acdl/diagnostic.hpp"
#include "acdl/expansion.hpp"

namespace acdl {

struct TraceMessage {
  Role role = Role::User;
  std::string content;
};

using Trace = std::vector<TraceMessage>;

struct TraceLoadResult {
  Trace trace;
  Diagnostics diagnostics;  // C-BAD-TRACE
};

/// Chat-API role name: system, user, assistant, tool, completion.
std::string_view role_name(Role role);

/// A JSON array of `{"role", "content"}` objects. Content may be a string,
/// null, or a list of `{"text"}` parts. Roles are chat-API names or letters.
TraceLoadResult load_trace(std::string_view json_text);
/// The same objects, one per line.
TraceLoadResult load_trace_jsonl(std::string_view text);

enum class ConformanceMode { RolesOnly, Content };

std::string_view to_string(ConformanceMode mode);

struct ConformanceOptions {
  ConformanceMode mode = ConformanceMode::RolesOnly;
  bool normalize_whitespace = false;
};

struct Mismatch {
  std::size_t position = 0;  // 1-based message index
  std::string expected;
  std::string observed;
};

struct ConformanceReport {
  bool pass = true;
  ConformanceMode mode = ConformanceMode::RolesOnly;
  std::vector<Mismatch> mismatches;
};

/// Slot values a conforming message must contain: variables, functions and
/// templates that the environment supplied.
std::vector<std::string> checkable_values(const Message& message);

ConformanceReport check_trace(const ExpandedPrompt& expected, const Trace& trace, ConformanceOptions options = {});

/// The trace a system following `prompt` exactly would send: each message's
/// checkable values joined by newlines.
Trace synthesize_trace(const ExpandedPrompt& prompt);

std::string format_report(const ConformanceReport& report);

}  // namespace acdl
