#pragma once

#include <string>

#include "acdl/ast.hpp"

namespace acdl {

/// Canonical source text: 2-space indent, one statement per line, `\n` line
/// endings, comments kept where they were written.
std::string format(const Document& document);

std::string format_expr(const Expr& expr);
std::string format_param(const Param& param);
std::string format_params(const std::vector<Param>& params);

/// Statements of a block without the surrounding braces, each line prefixed
/// with `indent` levels of indentation.
std::string format_statements(const Block& block, int indent = 0);

/// One statement with its trailing comment, no trailing newline.
std::string format_statement(const Stmt& stmt, int indent = 0);

/// The opening line of a statement without its body: `ForEach(@t: range(1, @T))`,
/// `If @T > 1`, `U:`, `Mark 2`. Leaf statements give their full text.
std::string format_header(const Stmt& stmt);

}  // namespace acdl
