#include <algorithm>

#include "acdl/expansion.hpp"
#include "evaluator.hpp"

namespace acdl {
namespace {

enum class Signal { Normal, Break, Continue, Stop };

class Expander {
 public:
  Expander(const ResolvedContext& resolved, const EnvironmentDocument& env) : resolved_(resolved) {
    ctx_.env = &env;
    ctx_.time_levels = time_levels(resolved.context.params);
    if (ctx_.time_levels.empty()) ctx_.time_levels = {"T"};
    prompt_.context = resolved.context.name;
    prompt_.time = env.time;
  }

  ExpandResult run() {
    if (check_time()) run_block(resolved_.context.body);
    return {std::move(prompt_), deduplicate(std::move(diags_))};
  }

 private:
  bool check_time() {
    const auto& params = resolved_.context.params;
    const bool declared = std::any_of(params.begin(), params.end(), [](const Param& p) { return p.time; });
    const std::size_t depth = declared ? time_levels(params).size() : 0;
    if (ctx_.env->time.size() < depth) {
      diags_.push_back(make_error("X-TIME-DEPTH",
                                  "context '" + resolved_.context.name + "' needs a time point with " +
                                      std::to_string(depth) + " coordinate(s), the environment gives " +
                                      std::to_string(ctx_.env->time.size()),
                                  resolved_.context.body.span));
      return false;
    }
    return true;
  }

  Signal run_block(const Block& block) {
    const auto saved_names = ctx_.names;
    Signal signal = Signal::Normal;
    for (const Stmt& stmt : block.stmts) {
      signal = run_stmt(stmt);
      if (signal != Signal::Normal) break;
    }
    ctx_.names = saved_names;
    return signal;
  }

  Signal run_stmt(const Stmt& stmt) {
    return std::visit([&](const auto& node) { return run(node, stmt); }, stmt.node);
  }

  Signal run(const RoleMessage& role, const Stmt& stmt) {
    if (current_) {
      // Nested roles are rejected by validation; flatten them into the outer message.
      return run_block(role.body);
    }
    current_ = Message{role.role, {}, stmt.span};
    Signal signal = run_block(role.body);
    prompt_.messages.push_back(std::move(*current_));
    current_.reset();
    return signal;
  }

  Signal run(const ForEach& loop, const Stmt&) {
    auto values = detail::Evaluator(ctx_, diags_).iterate(loop.iterable);
    if (!values) return Signal::Normal;
    const Bindings saved = ctx_.bindings;
    Signal result = Signal::Normal;
    for (const IndexValue& value : *values) {
      ctx_.bindings[loop.binder] = value;
      Signal signal = run_block(loop.body);
      if (signal == Signal::Break) break;
      if (signal == Signal::Stop) {
        result = Signal::Stop;
        break;
      }
    }
    ctx_.bindings = saved;
    return result;
  }

  Signal run(const If& node, const Stmt&) {
    for (const IfBranch& branch : node.branches) {
      if (detail::Evaluator(ctx_, diags_).condition(branch.condition)) return run_block(branch.body);
    }
    if (node.else_body) return run_block(*node.else_body);
    return Signal::Normal;
  }

  Signal run(const Switch& node, const Stmt&) {
    for (const SwitchCase& c : node.cases) {
      Expr test;
      test.kind = ExprKind::Compare;
      test.text = "==";
      test.span = c.label.span;
      test.args = {node.scrutinee, c.label};
      if (detail::Evaluator(ctx_, diags_).condition(test)) return run_block(c.body);
    }
    if (node.default_body) return run_block(*node.default_body);
    return Signal::Normal;
  }

  Signal run(const Mark& mark, const Stmt& stmt) {
    MarkAnnotation note;
    note.number = mark.number;
    note.span = stmt.span;
    note.first_message = prompt_.messages.size();
    if (current_) {
      note.within_message = true;
      note.first_message = prompt_.messages.size();
      note.first_slot = current_->slots.size();
    }
    const std::size_t index = prompt_.marks.size();
    prompt_.marks.push_back(note);
    Signal signal = run_block(mark.body);
    MarkAnnotation& done = prompt_.marks[index];
    if (done.within_message) {
      done.end_message = done.first_message + 1;
      done.end_slot = current_ ? current_->slots.size() : done.first_slot;
    } else {
      done.end_message = prompt_.messages.size();
    }
    return signal;
  }

  Signal run(const PromptEndsHere& node, const Stmt&) {
    if (detail::Evaluator(ctx_, diags_).condition(node.condition)) {
      prompt_.truncated = true;
      return Signal::Stop;
    }
    return Signal::Normal;
  }

  Signal run(const NameDef& def, const Stmt&) {
    ctx_.names[def.name] = NameValue{&def.value, ctx_.bindings};
    return Signal::Normal;
  }

  Signal run(const Element& element, const Stmt&) {
    if (current_) current_->slots.push_back(detail::Evaluator(ctx_, diags_).slot(element.expr));
    return Signal::Normal;
  }

  Signal run(const LoopControl& control, const Stmt&) {
    return control.is_break ? Signal::Break : Signal::Continue;
  }

  Signal run(const FragInvoke&, const Stmt&) { return Signal::Normal; }
  Signal run(const Comment&, const Stmt&) { return Signal::Normal; }

  const ResolvedContext& resolved_;
  EvalContext ctx_;
  Diagnostics diags_;
  ExpandedPrompt prompt_;
  std::optional<Message> current_;
};

}  // namespace

ExpandResult expand(const ResolvedContext& context, const EnvironmentDocument& environment) {
  return Expander(context, environment).run();
}

SeriesResult expand_series(const ResolvedContext& context, const std::vector<EnvironmentDocument>& environments) {
  SeriesResult series;
  if (environments.empty()) {
    series.diagnostics.push_back(make_error("X-EMPTY-SERIES", "a series needs at least one environment", {0, 0}));
    return series;
  }
  for (std::size_t i = 1; i < environments.size(); ++i) {
    if (!(environments[i - 1].time < environments[i].time)) {
      series.diagnostics.push_back(make_error(
          "X-SERIES-ORDER", "time points must strictly increase (environment " + std::to_string(i + 1) + ")", {0, 0}));
      return series;
    }
  }
  for (const EnvironmentDocument& env : environments) {
    ExpandResult one = expand(context, env);
    series.prompts.push_back(std::move(one.prompt));
    series.diagnostics.insert(series.diagnostics.end(), one.diagnostics.begin(), one.diagnostics.end());
  }
  return series;
}

}  // namespace acdl
