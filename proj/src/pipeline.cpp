#include "acdl/pipeline.hpp"

namespace acdl {

ResolveOutput resolve_source(std::string_view source, std::string_view context) {
  ResolveOutput out;
  CheckResult checked = check(source);
  out.diagnostics = std::move(checked.diagnostics);
  if (has_errors(out.diagnostics)) return out;
  ResolveResult resolved = resolve(checked.document, context);
  out.diagnostics.insert(out.diagnostics.end(), resolved.diagnostics.begin(), resolved.diagnostics.end());
  if (!has_errors(resolved.diagnostics)) out.resolved = std::move(resolved.resolved);
  return out;
}

ExpandOutput expand_source(std::string_view source, std::string_view context, const EnvironmentDocument& env) {
  ExpandOutput out;
  ResolveOutput resolved = resolve_source(source, context);
  out.diagnostics = std::move(resolved.diagnostics);
  if (!resolved.resolved) return out;
  ExpandResult expanded = expand(*resolved.resolved, env);
  out.diagnostics.insert(out.diagnostics.end(), expanded.diagnostics.begin(), expanded.diagnostics.end());
  out.prompt = std::move(expanded.prompt);
  return out;
}

RenderOutput render_source(std::string_view source, const Theme& theme, const EnvironmentDocument* env,
                           std::string_view context) {
  RenderOutput out;
  if (env) {
    ExpandOutput expanded = expand_source(source, context, *env);
    out.diagnostics = std::move(expanded.diagnostics);
    if (expanded.prompt) {
      out.svg = render_svg(layout(*expanded.prompt, theme), theme);
      return out;
    }
    // Fall back to the structural view so the caller still has a picture.
    CheckResult checked = check(source);
    out.svg = render_svg(layout(checked.document, theme), theme);
    return out;
  }
  CheckResult checked = check(source);
  out.diagnostics = std::move(checked.diagnostics);
  out.svg = render_svg(layout(checked.document, theme), theme);
  return out;
}

}  // namespace acdl
