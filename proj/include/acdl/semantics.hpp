#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "acdl/ast.hpp"
#include "acdl/diagnostic.hpp"

namespace acdl {

struct ValidateOptions {
  bool strict = false;  // also report templates/functions used with varying arity
};

/// Scoping, role and naming rules. Never aborts; one diagnostic per violation.
Diagnostics validate(const Document& document, ValidateOptions options = {});

struct NameSymbol {
  std::string scope;  // enclosing context or fragment
  std::string name;
  std::string value;  // canonical text of the bound expression
  Span span;
};

struct FragmentSymbol {
  FragmentKind kind = FragmentKind::String;
  std::vector<std::string> params;
};

struct SymbolTable {
  std::map<std::string, std::set<std::size_t>> templates;  // name -> arities seen
  std::map<std::string, std::set<std::size_t>> functions;
  // Dotted path -> index signatures seen. A signature lists the number of
  // indices on each path segment, e.g. "1,0" for `sys.tool[@t].tool_response`,
  // prefixed with "q;" when agent-qualified.
  std::map<std::string, std::set<std::string>> context_vars;
  std::vector<NameSymbol> names;
  std::map<std::string, FragmentSymbol> fragments;
  std::map<std::string, std::vector<std::string>> contexts;  // name -> formatted params
};

SymbolTable build_symbols(const Document& document);

/// A context with every fragment invocation replaced by the instantiated
/// fragment body and every `$name` annotated with its definition's span.
struct ResolvedContext {
  ContextDef context;
};

struct ResolveResult {
  std::optional<ResolvedContext> resolved;
  Diagnostics diagnostics;
};

// An empty name selects the first context.
ResolveResult resolve(const Document& document, std::string_view context_name);

/// Wraps a resolved context as a single-item document, for re-validation or
/// formatting.
Document as_document(const ResolvedContext& resolved);

struct CheckResult {
  Document document;
  Diagnostics diagnostics;
};

/// Parses, then validates when parsing produced no errors. Diagnostics are
/// deduplicated and ordered by position.
CheckResult check(std::string_view source, ValidateOptions options = {});

}  // namespace acdl
