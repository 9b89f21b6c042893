#pragma once

#include <string_view>

#include "acdl/ast.hpp"
#include "acdl/diagnostic.hpp"

namespace acdl {

struct ParseResult {
  Document document;
  Diagnostics diagnostics;
};

/// Parses a whole .acdl file. Never fails: syntax errors become diagnostics
/// and the parser resynchronizes at line and block boundaries.
ParseResult parse(std::string_view source);

/// Which statements a block may hold. Prompt is a context body (role
/// messages, control flow); Content is the inside of a role message or a
/// string fragment. Snippet accepts both levels plus bare expressions, for
/// documentation listings that show a piece of a specification.
enum class BlockLevel { Prompt, Content, Snippet };

struct BlockParseResult {
  Block block;
  Diagnostics diagnostics;
};

BlockParseResult parse_statements(std::string_view source, BlockLevel level);

/// Which grammar an isolated expression is parsed with. Content treats a bare
/// ALL_CAPS word as a template; Index treats it as a variable; Condition also
/// reads a bare `@T.0` as the sub-step-zero atom.
enum class ExprRule { Index, Content, Condition };

struct ExprParseResult {
  Expr expr;
  Diagnostics diagnostics;
};

ExprParseResult parse_expression(std::string_view source, ExprRule rule = ExprRule::Index);

}  // namespace acdl
