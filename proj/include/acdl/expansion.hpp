#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "acdl/ast.hpp"
#include "acdl/diagnostic.hpp"
#include "acdl/environment.hpp"
#include "acdl/semantics.hpp"

namespace acdl {

using Bindings = std::map<std::string, IndexValue>;

/// A `Name x := expr` binding: the expression with the loop bindings that
/// were active where it was defined.
struct NameValue {
  const Expr* expr = nullptr;
  Bindings bindings;
};

/// Everything an expression needs to be evaluated at one point of an expansion.
struct EvalContext {
  const EnvironmentDocument* env = nullptr;
  std::vector<std::string> time_levels;  // declared time parameter names, outermost first
  Bindings bindings;                     // loop variables
  std::map<std::string, NameValue> names;
};

template <typename T>
struct Outcome {
  std::optional<T> value;
  Diagnostics diagnostics;
};

Outcome<IndexValue> eval_index(const Expr& expr, const EvalContext& context);
Outcome<bool> eval_condition(const Expr& condition, const EvalContext& context);

/// Key under which a condition atom is looked up in the environment's
/// `conditions` map: its canonical text, then ` | ` and the sorted
/// `name=value` pairs of the bound variables it mentions.
std::string condition_key(const Expr& atom, const EvalContext& context);

/// The expression with variables replaced by their values and context
/// variables by their flattened keys, e.g. `summarize(sys.history[3])`.
std::string ground_text(const Expr& expr, const EvalContext& context);

enum class SlotKind { Template, Var, Function, Literal, Unresolved };

std::string_view to_string(SlotKind kind);

struct Slot {
  SlotKind kind = SlotKind::Unresolved;
  std::string text;                  // symbolic or grounded form
  std::optional<std::string> value;  // concrete value, when the environment provides one
  Span span;                         // source element that produced the slot
  std::vector<std::pair<std::string, std::string>> bindings;  // loop variables at production time
};

struct Message {
  Role role = Role::User;
  std::vector<Slot> slots;
  Span span;
};

/// Region produced by a Mark block: whole messages, or a slot range inside
/// one message when the mark sits inside a role message.
struct MarkAnnotation {
  std::int64_t number = 0;
  std::size_t first_message = 0;
  std::size_t end_message = 0;  // exclusive
  bool within_message = false;
  std::size_t first_slot = 0;
  std::size_t end_slot = 0;  // exclusive
  Span span;
};

struct ExpandedPrompt {
  std::string context;
  std::vector<std::int64_t> time;
  std::vector<Message> messages;
  std::vector<MarkAnnotation> marks;
  bool truncated = false;  // a PromptEndsHere condition held
};

struct ExpandResult {
  ExpandedPrompt prompt;
  Diagnostics diagnostics;
};

ExpandResult expand(const ResolvedContext& context, const EnvironmentDocument& environment);

struct SeriesResult {
  std::vector<ExpandedPrompt> prompts;
  Diagnostics diagnostics;
};

/// Expands at each time point in turn. Time points must strictly increase.
SeriesResult expand_series(const ResolvedContext& context, const std::vector<EnvironmentDocument>& environments);

}  // namespace acdl
