#include "acdl/conformance.hpp"

#include <cctype>
#include <sstream>

#include <json.hpp>

namespace acdl {

using nlohmann::json;

std::string_view role_name(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
    case Role::Tool: return "tool";
    case Role::None: return "completion";
  }
  return "user";
}

std::string_view to_string(ConformanceMode mode) {
  return mode == ConformanceMode::RolesOnly ? "roles-only" : "content";
}

namespace {

std::optional<Role> parse_role(const std::string& name) {
  for (Role role : {Role::System, Role::User, Role::Assistant, Role::Tool, Role::None}) {
    if (name == role_name(role)) return role;
  }
  if (name.size() == 1) return role_from_letter(name[0]);
  return std::nullopt;
}

// Returns an error message, or empty on success.
std::string read_message(const json& item, TraceMessage& out) {
  if (!item.is_object()) return "is not an object";
  if (!item.contains("role") || !item["role"].is_string()) return "has no string 'role'";
  const std::string name = item["role"].get<std::string>();
  auto role = parse_role(name);
  if (!role) return "has unknown role '" + name + "'";
  out.role = *role;
  if (!item.contains("content") || item["content"].is_null()) return {};
  const json& content = item["content"];
  if (content.is_string()) {
    out.content = content.get<std::string>();
    return {};
  }
  if (content.is_array()) {
    for (const json& part : content) {
      if (part.is_object() && part.contains("text") && part["text"].is_string()) {
        out.content += part["text"].get<std::string>();
      } else if (!part.is_object()) {
        return "has a content part that is not an object";
      }
    }
    return {};
  }
  return "has content that is neither a string nor a list of parts";
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  bool in_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!in_space) out += ' ';
      in_space = true;
    } else {
      out += c;
      in_space = false;
    }
  }
  return out;
}

std::string excerpt(std::string_view text) {
  constexpr std::size_t kLimit = 60;
  if (text.size() <= kLimit) return std::string(text);
  std::size_t cut = kLimit;
  while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
  return std::string(text.substr(0, cut)) + "...";
}

std::string role_summary(const Message& message) {
  return std::string(role_name(message.role)) + " (" + std::to_string(message.slots.size()) + " slots)";
}

}  // namespace

TraceLoadResult load_trace(std::string_view json_text) {
  TraceLoadResult result;
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    result.diagnostics.push_back(make_error("C-BAD-TRACE", "trace must be a JSON array of messages", {0, 0}));
    return result;
  }
  for (std::size_t i = 0; i < doc.size(); ++i) {
    TraceMessage message;
    const std::string error = read_message(doc[i], message);
    if (!error.empty()) {
      result.diagnostics.push_back(make_error("C-BAD-TRACE", "message " + std::to_string(i) + " " + error, {0, 0}));
      result.trace.clear();
      return result;
    }
    result.trace.push_back(std::move(message));
  }
  return result;
}

TraceLoadResult load_trace_jsonl(std::string_view text) {
  TraceLoadResult result;
  std::istringstream lines{std::string(text)};
  std::string line;
  std::size_t index = 0;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json item = json::parse(line, nullptr, false);
    TraceMessage message;
    const std::string error = item.is_discarded() ? "is not valid JSON" : read_message(item, message);
    if (!error.empty()) {
      result.diagnostics.push_back(
          make_error("C-BAD-TRACE", "message " + std::to_string(index) + " " + error, {0, 0}));
      result.trace.clear();
      return result;
    }
    result.trace.push_back(std::move(message));
    ++index;
  }
  return result;
}

std::vector<std::string> checkable_values(const Message& message) {
  std::vector<std::string> values;
  for (const Slot& slot : message.slots) {
    const bool bound = slot.kind == SlotKind::Var || slot.kind == SlotKind::Function || slot.kind == SlotKind::Template;
    if (bound && slot.value) values.push_back(*slot.value);
  }
  return values;
}

ConformanceReport check_trace(const ExpandedPrompt& expected, const Trace& trace, ConformanceOptions options) {
  ConformanceReport report;
  report.mode = options.mode;
  const std::size_t common = std::min(expected.messages.size(), trace.size());
  for (std::size_t i = 0; i < common; ++i) {
    const Message& want = expected.messages[i];
    const TraceMessage& got = trace[i];
    if (want.role != got.role) {
      report.mismatches.push_back({i + 1, role_summary(want), std::string(role_name(got.role)) + ": " + excerpt(got.content)});
      continue;
    }
    if (options.mode != ConformanceMode::Content) continue;
    const std::string content = options.normalize_whitespace ? collapse_whitespace(got.content) : got.content;
    std::size_t from = 0;
    for (const std::string& raw : checkable_values(want)) {
      const std::string value = options.normalize_whitespace ? collapse_whitespace(raw) : raw;
      if (value.empty()) continue;
      const std::size_t at = content.find(value, from);
      if (at == std::string::npos) {
        report.mismatches.push_back({i + 1, std::string(role_name(want.role)) + " containing \"" + excerpt(value) + "\"",
                                     std::string(role_name(got.role)) + ": " + excerpt(got.content.substr(std::min(from, got.content.size())))});
        break;
      }
      from = at + 1;
    }
  }
  for (std::size_t i = common; i < expected.messages.size(); ++i) {
    report.mismatches.push_back({i + 1, role_summary(expected.messages[i]), "missing"});
  }
  for (std::size_t i = common; i < trace.size(); ++i) {
    report.mismatches.push_back({i + 1, "end of prompt", std::string(role_name(trace[i].role)) + ": " + excerpt(trace[i].content)});
  }
  report.pass = report.mismatches.empty();
  return report;
}

Trace synthesize_trace(const ExpandedPrompt& prompt) {
  Trace trace;
  for (const Message& message : prompt.messages) {
    TraceMessage out;
    out.role = message.role;
    const auto values = checkable_values(message);
    for (std::size_t i = 0; i < values.size(); ++i) out.content += (i > 0 ? "\n" : "") + values[i];
    trace.push_back(std::move(out));
  }
  return trace;
}

std::string format_report(const ConformanceReport& report) {
  std::string out = std::string(report.pass ? "pass" : "fail") + " (" + std::string(to_string(report.mode)) + ")";
  if (!report.pass) out += ": " + std::to_string(report.mismatches.size()) + " mismatch(es)";
  out += "\n";
  for (const Mismatch& m : report.mismatches) {
    out += "  message " + std::to_string(m.position) + ": expected " + m.expected + ", observed " + m.observed + "\n";
  }
  return out;
}

}  // namespace acdl
