#include <algorithm>
#include <array>
#include <string>

#include "acdl/token.hpp"

namespace acdl {
namespace {

constexpr std::array<std::string_view, 19> kKeywords = {
    "ForEach", "If", "ElseIf", "Else", "Switch", "Case", "Default",
    "Mark", "Name", "Frag", "StrFrag", "RolesFrag", "RoleFrag", "PromptEndsHere",
    "when", "break", "continue", "for", "in"};

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view source) : src_(source) {}

  TokenizeResult run() {
    while (pos_ < src_.size()) step();
    return std::move(result_);
  }

 private:
  void emit(TokenKind kind, std::size_t begin) {
    result_.tokens.push_back(
        {kind, src_.substr(begin, pos_ - begin),
         Span{static_cast<std::uint32_t>(begin), static_cast<std::uint32_t>(pos_)}});
  }

  void error(std::string code, std::string message, std::size_t begin) {
    result_.diagnostics.push_back(make_error(
        std::move(code), std::move(message),
        Span{static_cast<std::uint32_t>(begin), static_cast<std::uint32_t>(pos_)}));
  }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void step() {
    const std::size_t begin = pos_;
    const char c = src_[pos_];

    if (c == ' ' || c == '\t' || c == '\f' || c == '\v') {
      ++pos_;
      return;
    }
    if (c == '\r') {
      ++pos_;
      if (peek() == '\n') {
        ++pos_;
        newline(begin);
      }
      return;
    }
    if (c == '\n') {
      ++pos_;
      newline(begin);
      return;
    }
    if (c == '/' && peek(1) == '/') {
      while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r') ++pos_;
      emit(TokenKind::Comment, begin);
      return;
    }
    if (ident_start(c)) {
      lex_word(begin);
      return;
    }
    if (digit(c)) {
      while (digit(peek())) ++pos_;
      emit(TokenKind::Number, begin);
      return;
    }
    if (c == '@' || c == '$') {
      ++pos_;
      if (c == '@' && digit(peek())) {
        while (digit(peek())) ++pos_;
      } else if (ident_start(peek())) {
        while (ident_char(peek())) ++pos_;
      } else {
        emit(TokenKind::Invalid, begin);
        error("E-ILLEGAL-CHAR",
              std::string("'") + c + "' must be followed by " +
                  (c == '@' ? "a time variable or step number" : "a name"),
              begin);
        return;
      }
      emit(c == '@' ? TokenKind::TimeRef : TokenKind::NameRef, begin);
      return;
    }
    if (c == '"') {
      lex_string(begin);
      return;
    }
    if (c == '{' && peek(1) == '{') {
      lex_inline(begin);
      return;
    }
    lex_symbol(begin);
  }

  void newline(std::size_t begin) {
    if (nesting_ > 0) return;  // continuation inside ( ) or [ ]
    emit(TokenKind::Newline, begin);
  }

  void lex_word(std::size_t begin) {
    while (ident_char(peek())) ++pos_;
    std::string_view word = src_.substr(begin, pos_ - begin);
    if (word.size() == 1 && std::string_view("SUATN").find(word[0]) != std::string_view::npos &&
        peek() == ':' && peek(1) != '=') {
      ++pos_;
      emit(TokenKind::RoleMarker, begin);
      return;
    }
    if (is_keyword(word)) {
      emit(TokenKind::Keyword, begin);
    } else if (is_all_caps(word)) {
      emit(TokenKind::AllCapsIdentifier, begin);
    } else {
      emit(TokenKind::Identifier, begin);
    }
  }

  void lex_string(std::size_t begin) {
    ++pos_;
    while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') {
      if (src_[pos_] == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] != '\n') ++pos_;
      ++pos_;
    }
    if (peek() == '"') {
      ++pos_;
    } else {
      error("E-UNTERMINATED", "unterminated string literal", begin);
    }
    emit(TokenKind::String, begin);
  }

  void lex_inline(std::size_t begin) {
    pos_ += 2;
    while (pos_ < src_.size() && !(src_[pos_] == '}' && peek(1) == '}') && src_[pos_] != '\n') {
      ++pos_;
    }
    if (peek() == '}') {
      pos_ += 2;
    } else {
      error("E-UNTERMINATED", "unterminated inline literal; expected '}}'", begin);
    }
    emit(TokenKind::InlineLiteral, begin);
  }

  void lex_symbol(std::size_t begin) {
    const char c = src_[pos_];
    const char n = peek(1);
    auto two = [&](TokenKind kind) {
      pos_ += 2;
      emit(kind, begin);
    };
    auto one = [&](TokenKind kind) {
      pos_ += 1;
      emit(kind, begin);
    };
    switch (c) {
      case ':':
        if (n == '=') return two(TokenKind::Operator);
        return one(TokenKind::Punctuation);
      case '=':
        if (n == '=') return two(TokenKind::Operator);
        break;
      case '!':
        if (n == '=') return two(TokenKind::Operator);
        break;
      case '<':
      case '>':
        if (n == '=') return two(TokenKind::Operator);
        return one(TokenKind::Operator);
      case '&':
        if (n == '&') return two(TokenKind::Operator);
        return one(TokenKind::Operator);
      case '|':
        if (n == '|') return two(TokenKind::Operator);
        return one(TokenKind::Operator);
      case '+':
      case '-':
      case '*':
      case '/':
      case '%':
        return one(TokenKind::Operator);
      case '.':
        if (n == '.' && peek(2) == '.') {
          pos_ += 3;
          emit(TokenKind::Punctuation, begin);
          return;
        }
        return one(TokenKind::Punctuation);
      case '(':
      case '[':
        ++nesting_;
        return one(TokenKind::Punctuation);
      case ')':
      case ']':
        if (nesting_ > 0) --nesting_;
        return one(TokenKind::Punctuation);
      case '{':
      case '}':
        nesting_ = 0;
        return one(TokenKind::Punctuation);
      case ',':
        return one(TokenKind::Punctuation);
      default:
        break;
    }
    // Consume a whole UTF-8 sequence so one bad code point yields one diagnostic.
    ++pos_;
    if (static_cast<unsigned char>(c) >= 0xC0) {
      while (pos_ < src_.size() && (static_cast<unsigned char>(src_[pos_]) & 0xC0) == 0x80) ++pos_;
    }
    emit(TokenKind::Invalid, begin);
    error("E-ILLEGAL-CHAR", "illegal character '" + std::string(src_.substr(begin, pos_ - begin)) + "'",
          begin);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int nesting_ = 0;
  TokenizeResult result_;
};

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Keyword: return "keyword";
    case TokenKind::RoleMarker: return "role-marker";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::AllCapsIdentifier: return "all-caps-identifier";
    case TokenKind::Number: return "number";
    case TokenKind::String: return "string";
    case TokenKind::Operator: return "operator";
    case TokenKind::Punctuation: return "punctuation";
    case TokenKind::TimeRef: return "time-ref";
    case TokenKind::NameRef: return "name-ref";
    case TokenKind::InlineLiteral: return "inline-literal";
    case TokenKind::Comment: return "comment";
    case TokenKind::Newline: return "newline";
    case TokenKind::Invalid: return "invalid";
  }
  return "invalid";
}

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

bool is_all_caps(std::string_view word) {
  if (word.empty() || word[0] < 'A' || word[0] > 'Z') return false;
  return std::all_of(word.begin(), word.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

TokenizeResult tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace acdl
