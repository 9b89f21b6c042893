#include <algorithm>
#include <cctype>
#include <limits>
#include <set>

#include "acdl/format.hpp"
#include "evaluator.hpp"

namespace acdl {

using nlohmann::json;

namespace detail {
namespace {

constexpr std::int64_t kMaxIterations = 1'000'000;

bool all_digits(const std::string& text) {
  return !text.empty() && std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string lower(std::string text) {
  for (char& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return text;
}

std::optional<IndexValue> scalar_of(const json& j) {
  if (j.is_number_integer()) return IndexValue{j.get<std::int64_t>()};
  if (j.is_string()) return IndexValue{j.get<std::string>()};
  if (j.is_boolean()) return IndexValue{std::string(j.get<bool>() ? "true" : "false")};
  return std::nullopt;
}

json json_of(const IndexValue& v) {
  if (const auto* n = std::get_if<std::int64_t>(&v)) return *n;
  return to_display(v);
}

std::string display_json(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

std::vector<std::int64_t> coords_of(const IndexValue& v) {
  if (const auto* n = std::get_if<std::int64_t>(&v)) return {*n};
  return std::get<TimeCoord>(v).coords;
}

IndexValue from_coords(std::vector<std::int64_t> coords) {
  if (coords.size() == 1) return coords.front();
  return TimeCoord{std::move(coords)};
}

std::optional<std::int64_t> arithmetic(const std::string& op, std::int64_t a, std::int64_t b, const char*& error) {
  std::int64_t out = 0;
  if (op == "+") {
    if (__builtin_add_overflow(a, b, &out)) error = "X-BAD-INDEX";
  } else if (op == "-") {
    if (__builtin_sub_overflow(a, b, &out)) error = "X-BAD-INDEX";
  } else if (op == "*") {
    if (__builtin_mul_overflow(a, b, &out)) error = "X-BAD-INDEX";
  } else if (b == 0) {
    error = "X-DIV-ZERO";
  } else if (a == std::numeric_limits<std::int64_t>::min() && b == -1) {
    error = "X-BAD-INDEX";
  } else {
    // C++ division truncates toward zero and `%` follows it.
    out = op == "/" ? a / b : a % b;
  }
  if (error) return std::nullopt;
  return out;
}

}  // namespace

void Evaluator::report(const char* code, std::string message, Span span) {
  diags_.push_back(make_error(code, std::move(message), span));
}

std::optional<IndexValue> Evaluator::level_value(const std::string& name) const {
  const auto& levels = ctx_.time_levels;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if ((levels[k] == name || lower(levels[k]) == name) && k < ctx_.env->time.size()) {
      return IndexValue{ctx_.env->time[k]};
    }
  }
  return std::nullopt;
}

std::optional<IndexValue> Evaluator::silent(const Expr& expr) {
  Diagnostics scratch;
  Evaluator quiet(ctx_, scratch);
  Result r = quiet.eval(expr, Mode::Index);
  if (has_errors(scratch)) return std::nullopt;
  return r.value;
}

Evaluator::Result Evaluator::eval_ident(const Expr& e, Mode mode) {
  if (auto it = ctx_.bindings.find(e.text); it != ctx_.bindings.end()) return {it->second};
  if (auto level = level_value(e.text)) return {*level};
  if (auto it = ctx_.env->vars.find(e.text); it != ctx_.env->vars.end()) return {it->second};
  if (mode == Mode::Operand) return {IndexValue{e.text}};  // enum-like literal such as `search`
  report("X-UNBOUND-IDX", "index variable '" + e.text + "' is not bound", e.span);
  return {};
}

Evaluator::Result Evaluator::eval_time(const Expr& e) {
  std::vector<std::int64_t> coords;
  auto component = [&](const std::string& name) -> bool {
    if (all_digits(name)) {
      coords.push_back(std::stoll(name));
      return true;
    }
    if (auto it = ctx_.bindings.find(name); it != ctx_.bindings.end()) {
      if (std::holds_alternative<std::string>(it->second)) {
        report("X-BAD-INDEX", "'" + name + "' is bound to a key, not a time step", e.span);
        return false;
      }
      const auto more = coords_of(it->second);
      coords.insert(coords.end(), more.begin(), more.end());
      return true;
    }
    if (auto level = level_value(name)) {
      coords.push_back(std::get<std::int64_t>(*level));
      return true;
    }
    report("X-UNBOUND-IDX", "time variable '" + name + "' is not bound", e.span);
    return false;
  };
  if (!component(e.text)) return {};
  for (std::size_t i = 0; i < e.path.size(); ++i) {
    const std::string& name = e.path[i].name;
    if (name == "substeps") {
      const std::string key = substeps_key(from_coords(coords));
      auto it = ctx_.env->substeps.find(key);
      if (it == ctx_.env->substeps.end()) {
        report("X-UNBOUND-IDX", "no sub-step count for turn " + key, e.span);
        return {};
      }
      if (i + 1 != e.path.size()) {
        report("X-BAD-INDEX", "'substeps' must end a time reference", e.span);
        return {};
      }
      return {IndexValue{it->second}};
    }
    if (!component(name)) return {};
  }
  return {from_coords(std::move(coords))};
}

Evaluator::Result Evaluator::eval_binary(const Expr& e, Mode mode) {
  Result lhs = eval(e.args[0], mode);
  Result rhs = eval(e.args[1], mode);
  if (!lhs.value || !rhs.value) return {std::nullopt, lhs.gap || rhs.gap};
  if (std::holds_alternative<std::string>(*lhs.value) || std::holds_alternative<std::string>(*rhs.value)) {
    report("X-BAD-INDEX", "arithmetic needs numbers: '" + format_expr(e) + "'", e.span);
    return {};
  }
  if (std::holds_alternative<TimeCoord>(*lhs.value) && std::holds_alternative<TimeCoord>(*rhs.value)) {
    report("X-BAD-INDEX", "arithmetic between two sub-step coordinates: '" + format_expr(e) + "'", e.span);
    return {};
  }
  // Arithmetic on a coordinate applies to its innermost level.
  std::vector<std::int64_t> base = std::holds_alternative<TimeCoord>(*rhs.value) ? coords_of(*rhs.value)
                                                                                : coords_of(*lhs.value);
  const std::int64_t a = std::holds_alternative<TimeCoord>(*lhs.value) ? base.back() : std::get<std::int64_t>(*lhs.value);
  const std::int64_t b = std::holds_alternative<TimeCoord>(*rhs.value) ? base.back() : std::get<std::int64_t>(*rhs.value);
  const char* error = nullptr;
  auto out = arithmetic(e.text, a, b, error);
  if (!out) {
    report(error, std::string(error) == "X-DIV-ZERO" ? "division by zero in '" + format_expr(e) + "'"
                                                      : "integer overflow in '" + format_expr(e) + "'",
           e.span);
    return {};
  }
  base.back() = *out;
  return {from_coords(std::move(base))};
}

Evaluator::Result Evaluator::eval_lookup(const Expr& e, Mode mode) {
  bool gap = false;
  auto value = value_json(e, gap);
  if (!value) {
    if (!gap) return {};
    if (mode == Mode::Operand) return {std::nullopt, true};
    report("X-UNBOUND-IDX", "the environment has no value for '" + ground(e) + "'", e.span);
    return {};
  }
  if (auto scalar = scalar_of(*value)) return {*scalar};
  report("X-BAD-INDEX", "'" + ground(e) + "' is not a scalar value", e.span);
  return {};
}

Evaluator::Result Evaluator::eval(const Expr& e, Mode mode) {
  switch (e.kind) {
    case ExprKind::Int: return {IndexValue{e.number}};
    case ExprKind::String:
    case ExprKind::Inline: return {IndexValue{e.text}};
    case ExprKind::Ident: return eval_ident(e, mode);
    case ExprKind::TimeVar: return eval_time(e);
    case ExprKind::ContextVar:
    case ExprKind::Call:
    case ExprKind::NameRef: return eval_lookup(e, mode);
    case ExprKind::Binary: return eval_binary(e, mode);
    case ExprKind::Paren: return eval(e.args[0], mode);
    case ExprKind::Neg: {
      Result inner = eval(e.args[0], mode);
      if (!inner.value) return inner;
      if (const auto* n = std::get_if<std::int64_t>(&*inner.value); n && *n != std::numeric_limits<std::int64_t>::min()) {
        return {IndexValue{-*n}};
      }
      report("X-BAD-INDEX", "cannot negate '" + format_expr(e.args[0]) + "'", e.span);
      return {};
    }
    default:
      report("X-BAD-INDEX", "'" + format_expr(e) + "' is not an index value", e.span);
      return {};
  }
}

std::optional<IndexValue> Evaluator::index(const Expr& expr) { return eval(expr, Mode::Index).value; }

std::optional<std::string> Evaluator::flat_key(const Expr& e) {
  std::string key = e.text;
  if (!e.args.empty()) {
    auto agent = index(e.args[0]);
    if (!agent) return std::nullopt;
    key += "[" + to_key_text(*agent) + "]";
  }
  for (const PathSegment& seg : e.path) {
    if (!seg.name.empty()) key += "." + seg.name;
    if (seg.indices.empty()) continue;
    key += "[";
    for (std::size_t i = 0; i < seg.indices.size(); ++i) {
      auto v = index(seg.indices[i]);
      if (!v) return std::nullopt;
      if (i > 0) key += ",";
      key += to_key_text(*v);
    }
    key += "]";
  }
  return key;
}

std::optional<json> Evaluator::navigate(json value, const std::vector<PathSegment>& path, bool& gap) {
  for (const PathSegment& seg : path) {
    if (!seg.name.empty()) {
      if (seg.name == "len" && value.is_array()) {
        value = static_cast<std::int64_t>(value.size());
      } else if (value.is_object() && value.contains(seg.name)) {
        value = json(value[seg.name]);
      } else {
        gap = true;
        return std::nullopt;
      }
    }
    for (const Expr& idx : seg.indices) {
      auto v = index(idx);
      if (!v) return std::nullopt;
      if (const auto* n = std::get_if<std::int64_t>(&*v); n && value.is_array()) {
        // Element positions count from 1, like time steps.
        if (*n < 1 || static_cast<std::size_t>(*n) > value.size()) {
          gap = true;
          return std::nullopt;
        }
        value = json(value[static_cast<std::size_t>(*n - 1)]);
      } else if (value.is_object() && value.contains(to_display(*v))) {
        value = json(value[to_display(*v)]);
      } else {
        gap = true;
        return std::nullopt;
      }
    }
  }
  return value;
}

std::optional<json> Evaluator::name_json(const Expr& ref, bool& gap) {
  auto it = ctx_.names.find(ref.text);
  if (it == ctx_.names.end() || !it->second.expr) {
    report("X-UNBOUND-IDX", "'$" + ref.text + "' is not defined", ref.span);
    return std::nullopt;
  }
  EvalContext inner = ctx_;
  inner.bindings = it->second.bindings;
  Evaluator sub(inner, diags_);
  const Expr& bound = *it->second.expr;
  std::optional<json> base;
  if (bound.kind == ExprKind::ListComp) {
    auto values = sub.iterate(bound.args[1]);
    if (!values) return std::nullopt;
    json list = json::array();
    for (const IndexValue& v : *values) {
      inner.bindings[bound.text] = v;
      bool element_gap = false;
      Diagnostics scratch;
      Evaluator element_eval(inner, scratch);
      auto element = element_eval.value_json(bound.args[0], element_gap);
      list.push_back(element ? *element : json(element_eval.ground(bound.args[0])));
    }
    base = std::move(list);
  } else if (bound.kind == ExprKind::ContextVar || bound.kind == ExprKind::Call || bound.kind == ExprKind::NameRef) {
    base = sub.value_json(bound, gap);
  } else {
    Result r = sub.eval(bound, Mode::Operand);
    if (!r.value) {
      gap = r.gap;
      return std::nullopt;
    }
    base = json_of(*r.value);
  }
  if (!base) return std::nullopt;
  return navigate(std::move(*base), ref.path, gap);
}

std::optional<json> Evaluator::value_json(const Expr& e, bool& gap) {
  if (e.kind == ExprKind::NameRef) return name_json(e, gap);
  if (e.kind == ExprKind::ContextVar) {
    auto key = flat_key(e);
    if (!key) return std::nullopt;
    auto it = ctx_.env->vars.find(*key);
    if (it == ctx_.env->vars.end()) {
      gap = true;
      return std::nullopt;
    }
    return json_of(it->second);
  }
  if (e.kind == ExprKind::Call) {
    const std::string full = ground(e);
    if (auto it = ctx_.env->functions.find(full); it != ctx_.env->functions.end()) {
      return json::parse(it->second, nullptr, false);
    }
    Expr base = e;
    base.path.clear();
    auto it = ctx_.env->functions.find(ground(base));
    if (it == ctx_.env->functions.end()) {
      gap = true;
      return std::nullopt;
    }
    return navigate(json::parse(it->second, nullptr, false), e.path, gap);
  }
  Result r = eval(e, Mode::Operand);
  if (!r.value) {
    gap = r.gap;
    return std::nullopt;
  }
  return json_of(*r.value);
}

std::string Evaluator::ground_path(const std::vector<PathSegment>& path) {
  std::string out;
  for (const PathSegment& seg : path) {
    if (!seg.name.empty()) out += "." + seg.name;
    if (seg.indices.empty()) continue;
    out += "[";
    for (std::size_t i = 0; i < seg.indices.size(); ++i) {
      if (i > 0) out += ",";
      auto v = silent(seg.indices[i]);
      out += v ? to_key_text(*v) : format_expr(seg.indices[i]);
    }
    out += "]";
  }
  return out;
}

std::string Evaluator::ground(const Expr& e) {
  auto join = [&](const std::vector<Expr>& exprs) {
    std::string out;
    for (std::size_t i = 0; i < exprs.size(); ++i) {
      if (i > 0) out += ", ";
      out += ground(exprs[i]);
    }
    return out;
  };
  switch (e.kind) {
    case ExprKind::Ident:
    case ExprKind::TimeVar:
    case ExprKind::Binary:
    case ExprKind::Neg: {
      if (e.kind == ExprKind::Ident && !ctx_.bindings.count(e.text) && !level_value(e.text)) return e.text;
      auto v = silent(e);
      return v ? to_display(*v) : format_expr(e);
    }
    case ExprKind::ContextVar: {
      Diagnostics scratch;
      Evaluator quiet(ctx_, scratch);
      auto key = quiet.flat_key(e);
      return key ? *key : format_expr(e);
    }
    case ExprKind::Call: return e.text + "(" + join(e.args) + ")" + ground_path(e.path);
    case ExprKind::NameRef: {
      auto it = ctx_.names.find(e.text);
      if (e.path.empty() && it != ctx_.names.end() && it->second.expr) {
        EvalContext inner = ctx_;
        inner.bindings = it->second.bindings;
        Diagnostics scratch;
        return Evaluator(inner, scratch).ground(*it->second.expr);
      }
      return "$" + e.text + ground_path(e.path);
    }
    case ExprKind::Compare:
    case ExprKind::Logical: return ground(e.args[0]) + " " + e.text + " " + ground(e.args[1]);
    case ExprKind::Paren: return "(" + ground(e.args[0]) + ")";
    case ExprKind::SubstepZero: return ground(e.args[0]) + ".0";
    case ExprKind::Template: return e.flag ? e.text + "(" + join(e.args) + ")" : e.text;
    case ExprKind::IndexList: return "[" + join(e.args) + "]";
    case ExprKind::ListComp: {
      Diagnostics scratch;
      Evaluator quiet(ctx_, scratch);
      auto values = quiet.iterate(e.args[1]);
      if (!values) return format_expr(e);
      EvalContext inner = ctx_;
      std::string out = "[";
      for (std::size_t i = 0; i < values->size(); ++i) {
        inner.bindings[e.text] = (*values)[i];
        if (i > 0) out += ", ";
        out += Evaluator(inner, scratch).ground(e.args[0]);
      }
      return out + "]";
    }
    default: return format_expr(e);
  }
}

std::string Evaluator::condition_key(const Expr& atom) {
  std::map<std::string, std::string> mentioned;
  auto consider = [&](const std::string& name) {
    if (name.empty() || all_digits(name) || name == "substeps") return;
    if (auto it = ctx_.bindings.find(name); it != ctx_.bindings.end()) {
      mentioned[name] = to_display(it->second);
    } else if (auto level = level_value(name)) {
      mentioned[name] = to_display(*level);
    }
  };
  for_each_expr(atom, [&](const Expr& e) {
    if (e.kind == ExprKind::Ident) consider(e.text);
    if (e.kind == ExprKind::TimeVar) {
      consider(e.text);
      for (const PathSegment& seg : e.path) consider(seg.name);
    }
  });
  std::string key = format_expr(atom);
  if (mentioned.empty()) return key;
  key += " | ";
  bool first = true;
  for (const auto& [name, value] : mentioned) {
    if (!first) key += ", ";
    first = false;
    key += name + "=" + value;
  }
  return key;
}

std::optional<bool> Evaluator::lookup_condition(const Expr& atom) {
  const auto& conditions = ctx_.env->conditions;
  if (auto it = conditions.find(condition_key(atom)); it != conditions.end()) return it->second;
  if (auto it = conditions.find(ground(atom)); it != conditions.end()) return it->second;
  return std::nullopt;
}

bool Evaluator::undecided(const Expr& atom) {
  if (auto known = lookup_condition(atom)) return *known;
  std::string bindings;
  for (const auto& [name, value] : binding_pairs()) {
    bindings += (bindings.empty() ? "" : ", ") + name + "=" + value;
  }
  report("X-UNDECIDED-COND",
         "cannot decide '" + format_expr(atom) + "'" + (bindings.empty() ? "" : " with " + bindings) +
             "; add \"" + condition_key(atom) + "\" to the environment's conditions",
         atom.span);
  return false;
}

bool Evaluator::condition(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Paren: return condition(e.args[0]);
    case ExprKind::Logical:
      if (e.text == "&") return condition(e.args[0]) && condition(e.args[1]);
      return condition(e.args[0]) || condition(e.args[1]);
    case ExprKind::SubstepZero: return !ctx_.env->time.empty() && ctx_.env->time.back() == 0;
    case ExprKind::Compare: {
      Diagnostics scratch;
      Evaluator probe(ctx_, scratch);
      Result lhs = probe.eval(e.args[0], Mode::Operand);
      Result rhs = probe.eval(e.args[1], Mode::Operand);
      if (has_errors(scratch)) {
        diags_.insert(diags_.end(), scratch.begin(), scratch.end());
        return false;
      }
      if (!lhs.value || !rhs.value) return undecided(e);
      const IndexValue& a = *lhs.value;
      const IndexValue& b = *rhs.value;
      int order = 0;
      const bool numeric = std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b);
      const bool coords = !std::holds_alternative<std::string>(a) && !std::holds_alternative<std::string>(b);
      if (numeric || coords) {
        const auto ca = coords_of(a);
        const auto cb = coords_of(b);
        order = ca < cb ? -1 : (cb < ca ? 1 : 0);
      } else {
        const std::string sa = to_display(a);
        const std::string sb = to_display(b);
        order = sa < sb ? -1 : (sb < sa ? 1 : 0);
      }
      if (e.text == "==") return order == 0;
      if (e.text == "!=") return order != 0;
      if (e.text == "<") return order < 0;
      if (e.text == ">") return order > 0;
      if (e.text == "<=") return order <= 0;
      return order >= 0;
    }
    default: {
      Diagnostics scratch;
      Evaluator probe(ctx_, scratch);
      Result r = probe.eval(e, Mode::Operand);
      if (has_errors(scratch)) {
        diags_.insert(diags_.end(), scratch.begin(), scratch.end());
        return false;
      }
      if (!r.value || (e.kind == ExprKind::Ident && !ctx_.bindings.count(e.text) && !level_value(e.text))) {
        return undecided(e);
      }
      if (const auto* n = std::get_if<std::int64_t>(&*r.value)) return *n != 0;
      if (std::holds_alternative<TimeCoord>(*r.value)) return true;
      const std::string& text = std::get<std::string>(*r.value);
      if (text == "true") return true;
      if (text == "false" || text.empty()) return false;
      return undecided(e);
    }
  }
}

std::optional<std::vector<IndexValue>> Evaluator::iterate(const Expr& iterable) {
  const Expr* it = &iterable;
  while (it->kind == ExprKind::Paren) it = &it->args[0];
  if (it->kind == ExprKind::Call && it->text == "range" && it->path.empty()) {
    if (it->args.size() < 2 || it->args.size() > 3) {
      report("X-BAD-INDEX", "range takes 2 or 3 arguments", it->span);
      return std::nullopt;
    }
    std::vector<std::int64_t> bounds;
    for (const Expr& arg : it->args) {
      auto v = index(arg);
      if (!v) return std::nullopt;
      const auto* n = std::get_if<std::int64_t>(&*v);
      if (!n) {
        report("X-BAD-INDEX", "range bounds must be integers: '" + format_expr(arg) + "'", arg.span);
        return std::nullopt;
      }
      bounds.push_back(*n);
    }
    const std::int64_t start = bounds[0];
    const std::int64_t stop = bounds[1];
    const std::int64_t step = bounds.size() == 3 ? bounds[2] : 1;
    if (step <= 0) {
      report("X-BAD-STEP", "range step must be positive, got " + std::to_string(step), it->span);
      return std::nullopt;
    }
    std::vector<IndexValue> values;
    if (start >= stop) return values;
    const auto span = static_cast<unsigned __int128>(static_cast<__int128>(stop) - start);
    const auto count = (span + static_cast<unsigned __int128>(step) - 1) / static_cast<unsigned __int128>(step);
    if (count > static_cast<unsigned __int128>(kMaxIterations)) {
      report("X-LIMIT", "range yields more than " + std::to_string(kMaxIterations) + " values", it->span);
      return std::nullopt;
    }
    values.reserve(static_cast<std::size_t>(count));
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(count); ++k) values.emplace_back(start + k * step);
    return values;
  }
  if (it->kind == ExprKind::ContextVar) {
    auto key = flat_key(*it);
    if (!key) return std::nullopt;
    auto found = ctx_.env->collections.find(*key);
    if (found == ctx_.env->collections.end()) {
      report("X-NO-COLLECTION", "the environment lists no elements for collection '" + *key + "'", it->span);
      return std::nullopt;
    }
    return found->second;
  }
  if (it->kind == ExprKind::NameRef || it->kind == ExprKind::Call) {
    bool gap = false;
    auto value = value_json(*it, gap);
    if (value && value->is_array()) {
      std::vector<IndexValue> values;
      for (const json& element : *value) {
        auto scalar = scalar_of(element);
        values.push_back(scalar ? *scalar : IndexValue{element.dump()});
      }
      return values;
    }
    if (value || gap) {
      report("X-NO-COLLECTION", "'" + ground(*it) + "' does not provide a list", it->span);
    }
    return std::nullopt;
  }
  if (it->kind == ExprKind::IndexList) {
    std::vector<IndexValue> values;
    for (const Expr& element : it->args) {
      auto v = index(element);
      if (!v) return std::nullopt;
      values.push_back(*v);
    }
    return values;
  }
  report("X-NO-COLLECTION", "cannot iterate over '" + format_expr(*it) + "'", it->span);
  return std::nullopt;
}

std::vector<std::pair<std::string, std::string>> Evaluator::binding_pairs() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, value] : ctx_.bindings) out.emplace_back(name, to_display(value));
  return out;
}

Slot Evaluator::slot(const Expr& e) {
  Slot s;
  s.span = e.span;
  s.bindings = binding_pairs();
  switch (e.kind) {
    case ExprKind::Template: {
      s.kind = SlotKind::Template;
      s.text = format_expr(e);
      if (auto it = ctx_.env->vars.find(s.text); it != ctx_.env->vars.end()) s.value = to_display(it->second);
      return s;
    }
    case ExprKind::ContextVar:
    case ExprKind::Call:
    case ExprKind::NameRef: {
      s.text = e.kind == ExprKind::NameRef ? "$" + e.text + ground_path(e.path) : ground(e);
      bool gap = false;
      auto value = value_json(e, gap);
      if (value) {
        s.kind = e.kind == ExprKind::ContextVar ? SlotKind::Var : SlotKind::Function;
        if (e.kind == ExprKind::NameRef) {
          const auto it = ctx_.names.find(e.text);
          const bool var_based = it != ctx_.names.end() && it->second.expr &&
                                 it->second.expr->kind == ExprKind::ContextVar;
          s.kind = var_based ? SlotKind::Var : SlotKind::Function;
        }
        s.value = display_json(*value);
      } else {
        s.kind = SlotKind::Unresolved;
      }
      return s;
    }
    case ExprKind::Int:
    case ExprKind::String:
    case ExprKind::Inline:
      s.kind = SlotKind::Literal;
      s.text = format_expr(e);
      s.value = e.kind == ExprKind::Int ? std::to_string(e.number) : e.text;
      return s;
    case ExprKind::Ident:
      if (!ctx_.bindings.count(e.text) && !level_value(e.text)) {
        s.kind = SlotKind::Unresolved;
        s.text = e.text;
        return s;
      }
      [[fallthrough]];
    case ExprKind::TimeVar:
    case ExprKind::Binary:
    case ExprKind::Neg:
    case ExprKind::Paren: {
      auto v = index(e);
      s.text = format_expr(e);
      if (v) {
        s.kind = SlotKind::Literal;
        s.value = to_display(*v);
      } else {
        s.kind = SlotKind::Unresolved;
      }
      return s;
    }
    default:
      s.kind = SlotKind::Unresolved;
      s.text = ground(e);
      return s;
  }
}

}  // namespace detail

Outcome<IndexValue> eval_index(const Expr& expr, const EvalContext& context) {
  Outcome<IndexValue> out;
  out.value = detail::Evaluator(context, out.diagnostics).index(expr);
  return out;
}

Outcome<bool> eval_condition(const Expr& condition, const EvalContext& context) {
  Outcome<bool> out;
  out.value = detail::Evaluator(context, out.diagnostics).condition(condition);
  return out;
}

std::string condition_key(const Expr& atom, const EvalContext& context) {
  Diagnostics scratch;
  return detail::Evaluator(context, scratch).condition_key(atom);
}

std::string ground_text(const Expr& expr, const EvalContext& context) {
  Diagnostics scratch;
  return detail::Evaluator(context, scratch).ground(expr);
}

std::string_view to_string(SlotKind kind) {
  switch (kind) {
    case SlotKind::Template: return "template";
    case SlotKind::Var: return "var";
    case SlotKind::Function: return "function";
    case SlotKind::Literal: return "literal";
    case SlotKind::Unresolved: return "unresolved";
  }
  return "unresolved";
}

}  // namespace acdl
