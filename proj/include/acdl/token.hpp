#pragma once

#include <string_view>
#include <vector>

#include "acdl/diagnostic.hpp"

namespace acdl {

enum class TokenKind {
  Keyword,            // ForEach, If, Mark, ...
  RoleMarker,         // S: U: A: T: N:
  Identifier,         // user_input, range, t
  AllCapsIdentifier,  // INSTRUCTIONS, T, I
  Number,             // 42
  String,             // "search"
  Operator,           // + - * / % == != < > <= >= & | && || :=
  Punctuation,        // ( ) [ ] { } , : . ...
  TimeRef,            // @T, @t, @1
  NameRef,            // $docs
  InlineLiteral,      // {{an expert coder}}
  Comment,            // // to end of line
  Newline,
  Invalid,            // bytes that start no token
};

std::string_view to_string(TokenKind kind);

/// A lexeme views the source passed to tokenize(); the source must outlive it.
struct Token {
  TokenKind kind = TokenKind::Invalid;
  std::string_view lexeme;
  Span span;
};

struct TokenizeResult {
  std::vector<Token> tokens;
  Diagnostics diagnostics;
};

// Newlines inside ( ) or [ ] are treated as whitespace so argument lists can
// span lines; a brace resets that nesting to keep errors local.
TokenizeResult tokenize(std::string_view source);

bool is_keyword(std::string_view word);
bool is_all_caps(std::string_view word);

}  // namespace acdl
