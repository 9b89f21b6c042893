#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "acdl/expansion.hpp"

namespace acdl::detail {

/// Evaluates expressions against a live EvalContext. The context is held by
/// reference so an expander can rebind loop variables between calls.
class Evaluator {
 public:
  Evaluator(const EvalContext& context, Diagnostics& diagnostics) : ctx_(context), diags_(diagnostics) {}

  std::optional<IndexValue> index(const Expr& expr);
  bool condition(const Expr& expr);
  std::string ground(const Expr& expr);
  std::string condition_key(const Expr& atom);
  std::optional<std::vector<IndexValue>> iterate(const Expr& iterable);
  Slot slot(const Expr& element);

 private:
  enum class Mode { Index, Operand };
  struct Result {
    std::optional<IndexValue> value;
    bool gap = false;  // the environment has no value; only in Operand mode
  };

  Result eval(const Expr& expr, Mode mode);
  Result eval_ident(const Expr& expr, Mode mode);
  Result eval_time(const Expr& expr);
  Result eval_binary(const Expr& expr, Mode mode);
  Result eval_lookup(const Expr& expr, Mode mode);
  std::optional<IndexValue> level_value(const std::string& name) const;
  std::optional<std::string> flat_key(const Expr& context_var);
  std::optional<nlohmann::json> value_json(const Expr& expr, bool& gap);
  std::optional<nlohmann::json> name_json(const Expr& name_ref, bool& gap);
  std::optional<nlohmann::json> navigate(nlohmann::json value, const std::vector<PathSegment>& path, bool& gap);
  std::optional<bool> lookup_condition(const Expr& atom);
  bool undecided(const Expr& atom);
  std::optional<IndexValue> silent(const Expr& expr);
  std::string ground_path(const std::vector<PathSegment>& path);
  std::vector<std::pair<std::string, std::string>> binding_pairs() const;

  void report(const char* code, std::string message, Span span);

  const EvalContext& ctx_;
  Diagnostics& diags_;
};

}  // namespace acdl::detail
