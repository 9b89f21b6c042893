#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "acdl/diagnostic.hpp"
#include "acdl/environment.hpp"
#include "acdl/expansion.hpp"
#include "acdl/render.hpp"
#include "acdl/semantics.hpp"

namespace acdl {

struct ExpandOutput {
  std::optional<ExpandedPrompt> prompt;
  Diagnostics diagnostics;
};

/// check, resolve and expand. Stops before expansion when the source has errors.
ExpandOutput expand_source(std::string_view source, std::string_view context, const EnvironmentDocument& env);

struct ResolveOutput {
  std::optional<ResolvedContext> resolved;
  Diagnostics diagnostics;
};

ResolveOutput resolve_source(std::string_view source, std::string_view context);

struct RenderOutput {
  std::string svg;
  Diagnostics diagnostics;
};

/// Structural view of the whole document, or the instance view of one
/// context when an environment is given.
RenderOutput render_source(std::string_view source, const Theme& theme, const EnvironmentDocument* env = nullptr,
                           std::string_view context = {});

}  // namespace acdl
