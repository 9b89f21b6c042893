#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "acdl/ast.hpp"
#include "acdl/conformance.hpp"
#include "acdl/diagnostic.hpp"
#include "acdl/diff.hpp"
#include "acdl/expansion.hpp"
#include "acdl/semantics.hpp"

namespace acdl {

struct AstJsonOptions {
  bool spans = true;
  bool comments = true;  // comment statements, trailing/open/close comments
};

nlohmann::json to_json(const Document& document, AstJsonOptions options = {});
nlohmann::json to_json(const Block& block, AstJsonOptions options = {});
nlohmann::json to_json(const Stmt& stmt, AstJsonOptions options = {});
nlohmann::json to_json(const Expr& expr, AstJsonOptions options = {});
nlohmann::json to_json(const ContextDef& context, AstJsonOptions options = {});

/// Structural equality that ignores spans and comments.
bool ast_equal(const Document& a, const Document& b);
bool ast_equal(const Block& a, const Block& b);
bool ast_equal(const Expr& a, const Expr& b);
bool ast_equal(const ContextDef& a, const ContextDef& b);

/// One diagnostic as an object with `code`, `severity`, `message`,
/// `span: {start, end, line, col}` and `file`.
nlohmann::json to_json(const Diagnostic& diagnostic, const LineIndex& lines, std::string_view file);

/// Newline-terminated JSON lines, one per diagnostic.
std::string diagnostics_to_jsonl(const Diagnostics& diagnostics, std::string_view source,
                                 std::string_view file);

nlohmann::json diagnostics_to_json(const Diagnostics& diagnostics, std::string_view source,
                                   std::string_view file);

/// `{"context", "time", "truncated", "messages": [{"role": "S", "slots": [{"kind",
/// "text", "value"?, "span": [begin, end], "bindings": {...}}]}], "marks": [...]}`.
nlohmann::json to_json(const ExpandedPrompt& prompt);
nlohmann::json to_json(const SymbolTable& symbols);
nlohmann::json to_json(const EditScript& script);
nlohmann::json to_json(const ConformanceReport& report);

}  // namespace acdl
