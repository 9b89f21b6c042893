#include "acdl/parser.hpp"

#include <set>
#include <string>
#include <utility>

#include "acdl/token.hpp"

namespace acdl {
namespace {

constexpr int kMaxDepth = 256;

bool is_context_namespace(std::string_view word) {
  return word == "env" || word == "sys" || word == "resp";
}

bool mentions_time_var(const Expr& expr) {
  bool found = false;
  for_each_expr(expr, [&](const Expr& e) {
    if (e.kind == ExprKind::TimeVar) found = true;
  });
  return found;
}

std::string unescape(std::string_view quoted) {
  std::string out;
  std::string_view body = quoted.substr(1);
  if (!body.empty() && body.back() == '"') body.remove_suffix(1);
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '\\' && i + 1 < body.size()) {
      ++i;
      switch (body[i]) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default: out += body[i]; break;
      }
    } else {
      out += body[i];
    }
  }
  return out;
}

std::string trim_comment(std::string_view lexeme) {
  std::string_view text = lexeme.substr(2);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  return std::string(text);
}

// Rewrites a bare `@T.0` operand of a condition into the sub-step-zero atom.
void mark_substep_atoms(Expr& expr) {
  if (expr.kind == ExprKind::Logical || expr.kind == ExprKind::Paren) {
    for (Expr& arg : expr.args) mark_substep_atoms(arg);
    return;
  }
  if (expr.kind == ExprKind::TimeVar && !expr.path.empty() && expr.path.back().name == "0") {
    Expr inner = expr;
    inner.path.pop_back();
    Expr atom;
    atom.kind = ExprKind::SubstepZero;
    atom.span = expr.span;
    atom.args.push_back(std::move(inner));
    expr = std::move(atom);
  }
}

class Parser {
 public:
  explicit Parser(std::string_view source) : src_(source) {
    TokenizeResult lexed = tokenize(source);
    tokens_ = std::move(lexed.tokens);
    diags_ = std::move(lexed.diagnostics);
    // Invalid tokens are already reported by the lexer; dropping them lets
    // parsing continue around a stray character.
    std::erase_if(tokens_, [](const Token& t) { return t.kind == TokenKind::Invalid; });
  }

  ParseResult parse_document() {
    ParseResult result;
    while (true) {
      const bool blank = skip_newlines();
      if (at_end()) break;
      marks_seen_.clear();
      std::optional<Item> item = parse_item();
      if (item) {
        item->blank_before = blank && !result.document.items.empty();
        result.document.items.push_back(std::move(*item));
      } else {
        sync_item();
      }
    }
    result.diagnostics = std::move(diags_);
    return result;
  }

  BlockParseResult parse_snippet(BlockLevel level) {
    BlockParseResult result;
    const bool in_role = level == BlockLevel::Content;
    while (true) {
      const bool blank = skip_newlines();
      if (at_end()) break;
      if (is_punct("}")) {
        error("E-UNBALANCED", "unmatched '}'", peek().span);
        advance();
        continue;
      }
      parse_block_entry(result.block, in_role, blank);
    }
    if (!result.block.stmts.empty()) {
      result.block.span = {result.block.stmts.front().span.begin, result.block.stmts.back().span.end};
    }
    result.diagnostics = std::move(diags_);
    return result;
  }

  ExprParseResult parse_lone_expression(ExprRule rule) {
    ExprParseResult result;
    skip_newlines();
    if (at_end()) {
      error("E-SYNTAX", "expected an expression", end_span());
    } else {
      result.expr = parse_expr(rule);
      if (rule == ExprRule::Condition) mark_substep_atoms(result.expr);
      skip_newlines();
      if (!at_end()) error("E-SYNTAX", "unexpected input after expression", peek().span);
    }
    result.diagnostics = std::move(diags_);
    return result;
  }

 private:
  // ---- token access -------------------------------------------------------

  bool at_end() const { return pos_ >= tokens_.size(); }

  const Token& peek(std::size_t ahead = 0) const {
    static const Token kEof{TokenKind::Newline, {}, {}};
    return pos_ + ahead < tokens_.size() ? tokens_[pos_ + ahead] : kEof;
  }

  const Token& advance() {
    const Token& t = tokens_[pos_++];
    last_end_ = t.span.end;
    return t;
  }

  bool is(TokenKind kind, std::size_t ahead = 0) const {
    return pos_ + ahead < tokens_.size() && tokens_[pos_ + ahead].kind == kind;
  }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    return is(TokenKind::Punctuation, ahead) && tokens_[pos_ + ahead].lexeme == p;
  }
  bool is_op(std::string_view op) const { return is(TokenKind::Operator) && peek().lexeme == op; }
  bool is_keyword(std::string_view kw, std::size_t ahead = 0) const {
    return is(TokenKind::Keyword, ahead) && tokens_[pos_ + ahead].lexeme == kw;
  }
  bool is_word(std::size_t ahead = 0) const {
    return is(TokenKind::Identifier, ahead) || is(TokenKind::AllCapsIdentifier, ahead);
  }
  bool at_line_end() const { return at_end() || is(TokenKind::Newline) || is(TokenKind::Comment); }

  Span end_span() const {
    const auto n = static_cast<std::uint32_t>(src_.size());
    return {n, n};
  }

  Span here() const { return at_end() ? end_span() : peek().span; }

  // Returns true when at least one empty line was skipped.
  bool skip_newlines() {
    int count = 0;
    while (is(TokenKind::Newline)) {
      advance();
      ++count;
    }
    return count >= 2;
  }

  void error(std::string code, std::string message, Span span) {
    diags_.push_back(make_error(std::move(code), std::move(message), span));
  }

  bool expect_punct(std::string_view p, std::string_view context) {
    if (is_punct(p)) {
      advance();
      return true;
    }
    error("E-SYNTAX", "expected '" + std::string(p) + "' " + std::string(context), here());
    return false;
  }

  std::string describe_here() const {
    if (at_end()) return "end of input";
    if (is(TokenKind::Newline)) return "end of line";
    return "'" + std::string(peek().lexeme) + "'";
  }

  // ---- recovery -----------------------------------------------------------

  // Skips the rest of the current statement. Braced groups are skipped whole;
  // stops before a `}` that closes the enclosing block.
  void sync_statement() {
    int depth = 0;
    while (!at_end()) {
      if (is_punct("{")) {
        ++depth;
      } else if (is_punct("}")) {
        if (depth == 0) return;
        --depth;
      } else if (is(TokenKind::Newline) && depth == 0) {
        return;
      }
      advance();
    }
  }

  static bool starts_item(const Token& t) {
    if (t.kind == TokenKind::Keyword) {
      return t.lexeme == "StrFrag" || t.lexeme == "RolesFrag" || t.lexeme == "RoleFrag";
    }
    return t.kind == TokenKind::Identifier || t.kind == TokenKind::AllCapsIdentifier ||
           t.kind == TokenKind::Comment;
  }

  // Skips to the next line that starts a top-level item outside any braces.
  void sync_item() {
    int depth = 0;
    bool line_start = false;
    while (!at_end()) {
      if (line_start && depth == 0 && starts_item(peek())) return;
      line_start = false;
      if (is_punct("{")) {
        ++depth;
      } else if (is_punct("}")) {
        if (depth > 0) --depth;
      } else if (is(TokenKind::Newline)) {
        line_start = true;
      }
      advance();
    }
  }

  // ---- top level ----------------------------------------------------------

  std::optional<Item> parse_item() {
    const Token& first = peek();
    if (first.kind == TokenKind::Comment) {
      advance();
      Item item{Comment{trim_comment(first.lexeme)}, first.span, false};
      expect_line_end();
      return item;
    }
    if (first.kind == TokenKind::Keyword &&
        (first.lexeme == "StrFrag" || first.lexeme == "RolesFrag" || first.lexeme == "RoleFrag")) {
      advance();
      FragmentDef frag;
      frag.kind = first.lexeme == "StrFrag" ? FragmentKind::String : FragmentKind::Roles;
      if (!is_word()) {
        error("E-SYNTAX", "expected a fragment name after '" + std::string(first.lexeme) + "'",
              here());
        return std::nullopt;
      }
      frag.name = std::string(advance().lexeme);
      if (!parse_def_header(frag.params)) return std::nullopt;
      auto body = parse_block(frag.kind == FragmentKind::String);
      if (!body) return std::nullopt;
      frag.body = std::move(*body);
      return Item{std::move(frag), {first.span.begin, last_end_}, false};
    }
    if (is_word()) {
      ContextDef ctx;
      ctx.name = std::string(advance().lexeme);
      if (!parse_def_header(ctx.params)) return std::nullopt;
      auto body = parse_block(false);
      if (!body) return std::nullopt;
      ctx.body = std::move(*body);
      return Item{std::move(ctx), {first.span.begin, last_end_}, false};
    }
    if (is_punct("}")) {
      error("E-UNBALANCED", "unmatched '}'", first.span);
      advance();
      return std::nullopt;
    }
    error("E-SYNTAX", "expected a context or fragment definition, found " + describe_here(),
          first.span);
    return std::nullopt;
  }

  // `[params]:` before a definition body. The parameter list may be omitted.
  bool parse_def_header(std::vector<Param>& params) {
    if (is_punct("[")) {
      advance();
      while (!is_punct("]")) {
        if (!params.empty() && !expect_punct(",", "between parameters")) return false;
        auto param = parse_param();
        if (!param) return false;
        params.push_back(std::move(*param));
      }
      advance();
    }
    return expect_punct(":", "after definition header");
  }

  std::optional<Param> parse_param() {
    Param param;
    const Token& t = peek();
    param.span = t.span;
    if (is_punct("...")) {
      advance();
      param.name = "...";
      param.ellipsis = true;
      return param;
    }
    if (is(TokenKind::TimeRef)) {
      advance();
      param.time = true;
      param.name = std::string(t.lexeme.substr(1));
      while (is_punct(".")) {
        advance();
        if (is_op("*")) {
          advance();
          param.variadic = true;
          break;
        }
        if (!is_word()) {
          error("E-SYNTAX", "expected a sub-step name after '.'", here());
          return std::nullopt;
        }
        param.sublevels.emplace_back(advance().lexeme);
      }
      param.span.end = last_end_;
      return param;
    }
    if (is_word()) {
      param.name = std::string(advance().lexeme);
      return param;
    }
    error("E-SYNTAX", "expected a parameter, found " + describe_here(), here());
    return std::nullopt;
  }

  // ---- blocks -------------------------------------------------------------

  // Parses `{ statements }`. `in_role` marks content level, where role
  // messages are not allowed.
  std::optional<Block> parse_block(bool in_role) {
    Block block;
    if (!is_punct("{")) {
      error("E-SYNTAX", "expected '{', found " + describe_here(), here());
      return std::nullopt;
    }
    block.span.begin = advance().span.begin;
    if (++depth_ > kMaxDepth) {
      error("E-SYNTAX", "blocks nested too deeply", block.span);
      --depth_;
      skip_to_end();
      return std::nullopt;
    }
    if (is(TokenKind::Comment)) block.open_comment = trim_comment(advance().lexeme);
    bool first = true;
    while (true) {
      bool blank = skip_newlines();
      if (at_end()) {
        error("E-UNBALANCED", "missing '}' before end of input", {block.span.begin, block.span.begin + 1});
        --depth_;
        block.span.end = last_end_;
        return block;
      }
      if (is_punct("}")) break;
      parse_block_entry(block, in_role, blank && !first);
      first = false;
    }
    block.span.end = advance().span.end;
    if (is(TokenKind::Comment)) block.close_comment = trim_comment(advance().lexeme);
    --depth_;
    return block;
  }

  void skip_to_end() { pos_ = tokens_.size(); }

  void parse_block_entry(Block& block, bool in_role, bool blank) {
    if (is(TokenKind::Comment)) {
      const Token& t = advance();
      Stmt stmt{Comment{trim_comment(t.lexeme)}, t.span, {}, blank};
      block.stmts.push_back(std::move(stmt));
      return;
    }
    const std::size_t before = diags_.size();
    std::optional<Stmt> stmt = parse_statement(in_role);
    if (!stmt) {
      sync_statement();
      return;
    }
    stmt->blank_before = blank;
    if (is(TokenKind::Comment)) {
      const Token& t = advance();
      stmt->trailing_comment = trim_comment(t.lexeme);
      stmt->span.end = t.span.end;
    }
    if (!at_end() && !is(TokenKind::Newline) && !is_punct("}")) {
      if (diags_.size() == before) {
        error("E-SYNTAX", "expected end of line, found " + describe_here(), peek().span);
      }
      sync_statement();
    }
    block.stmts.push_back(std::move(*stmt));
  }

  void expect_line_end() {
    if (at_end() || is(TokenKind::Newline)) return;
    error("E-SYNTAX", "expected end of line, found " + describe_here(), peek().span);
    sync_statement();
  }

  // ---- statements ---------------------------------------------------------

  std::optional<Stmt> parse_statement(bool in_role) {
    const Token& first = peek();
    const std::uint32_t begin = first.span.begin;
    auto finish = [&](StmtNode node) -> std::optional<Stmt> {
      return Stmt{std::move(node), {begin, last_end_}, {}, false};
    };

    if (first.kind == TokenKind::RoleMarker) {
      if (in_role) {
        error("E-NESTED-ROLE", "role messages may not appear inside another role message or a string fragment",
              first.span);
      }
      auto msg = parse_role_message();
      if (!msg) return std::nullopt;
      return finish(std::move(*msg));
    }
    if (first.kind == TokenKind::Keyword) {
      const std::string_view kw = first.lexeme;
      if (kw == "ForEach") {
        auto loop = parse_foreach(in_role);
        if (!loop) return std::nullopt;
        return finish(std::move(*loop));
      }
      if (kw == "If") {
        auto cond = parse_if(in_role);
        if (!cond) return std::nullopt;
        return finish(std::move(*cond));
      }
      if (kw == "Switch") {
        auto sw = parse_switch(in_role);
        if (!sw) return std::nullopt;
        return finish(std::move(*sw));
      }
      if (kw == "Mark") {
        advance();
        if (!is(TokenKind::Number)) {
          error("E-SYNTAX", "expected a mark number after 'Mark'", here());
          return std::nullopt;
        }
        const Token& num = advance();
        Mark mark;
        mark.number = parse_int(num);
        if (!marks_seen_.insert(mark.number).second) {
          diags_.push_back(make_warning("W-DUP-MARK",
                                        "mark number " + std::to_string(mark.number) + " is used more than once",
                                        num.span));
        }
        auto body = parse_block(in_role);
        if (!body) return std::nullopt;
        mark.body = std::move(*body);
        return finish(std::move(mark));
      }
      if (kw == "PromptEndsHere") {
        advance();
        if (!is_keyword("when")) {
          error("E-SYNTAX", "expected 'when' after 'PromptEndsHere'", here());
          return std::nullopt;
        }
        advance();
        auto cond = parse_condition();
        if (!cond) return std::nullopt;
        return finish(PromptEndsHere{std::move(*cond)});
      }
      if (kw == "Name") {
        advance();
        if (!is_word()) {
          error("E-SYNTAX", "expected a name after 'Name'", here());
          return std::nullopt;
        }
        NameDef def;
        def.name = std::string(advance().lexeme);
        if (!is_op(":=")) {
          error("E-SYNTAX", "expected ':=' in name definition", here());
          return std::nullopt;
        }
        advance();
        skip_newlines();
        auto value = parse_checked_expr(ExprRule::Content);
        if (!value) return std::nullopt;
        def.value = std::move(*value);
        return finish(std::move(def));
      }
      if (kw == "Frag") {
        advance();
        if (!is_word()) {
          error("E-SYNTAX", "expected a fragment name after 'Frag'", here());
          return std::nullopt;
        }
        FragInvoke invoke;
        invoke.name = std::string(advance().lexeme);
        if (is_punct("[")) {
          advance();
          if (!parse_list("]", ExprRule::Index, invoke.args)) return std::nullopt;
        }
        return finish(std::move(invoke));
      }
      if (kw == "break" || kw == "continue") {
        advance();
        return finish(LoopControl{kw == "break"});
      }
      error("E-SYNTAX", "unexpected '" + std::string(kw) + "'", first.span);
      return std::nullopt;
    }
    auto expr = parse_checked_expr(ExprRule::Content);
    if (!expr) return std::nullopt;
    return finish(Element{std::move(*expr)});
  }

  std::optional<RoleMessage> parse_role_message() {
    const Token& marker = advance();
    RoleMessage msg;
    msg.role = role_from_letter(marker.lexeme[0]).value_or(Role::User);
    if (is_punct("{")) {
      auto body = parse_block(true);
      if (!body) return std::nullopt;
      msg.body = std::move(*body);
      return msg;
    }
    msg.single_line = true;
    if (at_line_end()) {
      error("E-SYNTAX", "expected a content element after '" + std::string(marker.lexeme) + "'", here());
      return std::nullopt;
    }
    const std::uint32_t begin = peek().span.begin;
    if (is(TokenKind::Keyword)) {
      const std::string_view kw = peek().lexeme;
      const bool control = kw == "ForEach" || kw == "If" || kw == "Switch";
      error(control ? "E-SINGLELINE-CTRL" : "E-SINGLELINE-ELEM",
            control ? "control flow requires the braced form of a role message"
                    : "a single-line role message holds exactly one context variable, template or function call",
            peek().span);
      auto inner = parse_statement(true);
      if (!inner) return std::nullopt;
      msg.body.stmts.push_back(std::move(*inner));
    } else if (is(TokenKind::RoleMarker)) {
      error("E-NESTED-ROLE", "role messages may not appear inside another role message", peek().span);
      auto inner = parse_statement(true);
      if (!inner) return std::nullopt;
      msg.body.stmts.push_back(std::move(*inner));
    } else {
      auto expr = parse_checked_expr(ExprRule::Content);
      if (!expr) return std::nullopt;
      if (expr->kind != ExprKind::ContextVar && expr->kind != ExprKind::Template &&
          expr->kind != ExprKind::Call) {
        error("E-SINGLELINE-ELEM",
              "a single-line role message holds exactly one context variable, template or function call",
              expr->span);
      }
      Stmt stmt{Element{std::move(*expr)}, {begin, last_end_}, {}, false};
      msg.body.stmts.push_back(std::move(stmt));
    }
    msg.body.span = {begin, last_end_};
    return msg;
  }

  std::optional<ForEach> parse_foreach(bool in_role) {
    advance();
    ForEach loop;
    if (!expect_punct("(", "after 'ForEach'")) return std::nullopt;
    bool has_colon = false;
    if (is(TokenKind::TimeRef)) {
      loop.binder = std::string(advance().lexeme.substr(1));
      loop.time_binder = true;
    } else if (is_word()) {
      loop.binder = std::string(advance().lexeme);
    } else if (is(TokenKind::RoleMarker)) {
      // `ForEach(T: ...)` lexes the binder and colon as a role marker.
      loop.binder = std::string(advance().lexeme.substr(0, 1));
      has_colon = true;
    } else {
      error("E-SYNTAX", "expected a loop variable, found " + describe_here(), here());
      return std::nullopt;
    }
    if (!has_colon && !expect_punct(":", "after loop variable")) return std::nullopt;
    auto iterable = parse_checked_expr(ExprRule::Index);
    if (!iterable) return std::nullopt;
    loop.iterable = std::move(*iterable);
    if (mentions_time_var(loop.iterable)) loop.time_binder = true;
    if (!expect_punct(")", "to close 'ForEach('")) return std::nullopt;
    auto body = parse_block(in_role);
    if (!body) return std::nullopt;
    loop.body = std::move(*body);
    return loop;
  }

  std::optional<Expr> parse_condition() {
    auto cond = parse_checked_expr(ExprRule::Condition);
    if (cond) mark_substep_atoms(*cond);
    return cond;
  }

  // Collects standalone comments and newlines ahead, then reports whether the
  // next token continues the current construct. Rewinds when it does not.
  bool lookahead_continuation(std::vector<std::string>& comments,
                              std::initializer_list<std::string_view> keywords) {
    const std::size_t save = pos_;
    const std::uint32_t save_end = last_end_;
    std::vector<std::string> seen;
    while (is(TokenKind::Newline) || is(TokenKind::Comment)) {
      if (is(TokenKind::Comment)) seen.push_back(trim_comment(peek().lexeme));
      advance();
    }
    for (std::string_view kw : keywords) {
      if (is_keyword(kw)) {
        comments = std::move(seen);
        return true;
      }
    }
    pos_ = save;
    last_end_ = save_end;
    return false;
  }

  std::optional<If> parse_if(bool in_role) {
    advance();
    If node;
    {
      auto cond = parse_condition();
      if (!cond) return std::nullopt;
      auto body = parse_block(in_role);
      if (!body) return std::nullopt;
      node.branches.push_back({std::move(*cond), std::move(*body), {}});
    }
    while (true) {
      std::vector<std::string> comments;
      if (!lookahead_continuation(comments, {"ElseIf", "Else"})) break;
      if (is_keyword("ElseIf")) {
        advance();
        auto cond = parse_condition();
        if (!cond) return std::nullopt;
        auto body = parse_block(in_role);
        if (!body) return std::nullopt;
        node.branches.push_back({std::move(*cond), std::move(*body), std::move(comments)});
        continue;
      }
      advance();
      auto body = parse_block(in_role);
      if (!body) return std::nullopt;
      node.else_body = std::move(*body);
      node.else_leading_comments = std::move(comments);
      break;
    }
    return node;
  }

  std::optional<Switch> parse_switch(bool in_role) {
    advance();
    Switch node;
    auto scrutinee = parse_checked_expr(ExprRule::Index);
    if (!scrutinee) return std::nullopt;
    node.scrutinee = std::move(*scrutinee);
    if (!is_punct("{")) {
      error("E-SYNTAX", "expected '{' after Switch expression, found " + describe_here(), here());
      return std::nullopt;
    }
    const Span open = advance().span;
    if (is(TokenKind::Comment)) node.open_comment = trim_comment(advance().lexeme);
    std::vector<std::string> pending;
    while (true) {
      skip_newlines();
      if (at_end()) {
        error("E-UNBALANCED", "missing '}' before end of input", open);
        return node;
      }
      if (is_punct("}")) break;
      if (is(TokenKind::Comment)) {
        pending.push_back(trim_comment(advance().lexeme));
        continue;
      }
      if (is_keyword("Case")) {
        advance();
        auto label = parse_checked_expr(ExprRule::Index);
        if (!label) {
          sync_statement();
          continue;
        }
        auto body = parse_block(in_role);
        if (!body) {
          sync_statement();
          continue;
        }
        node.cases.push_back({std::move(*label), std::move(*body), std::move(pending)});
        pending.clear();
        continue;
      }
      if (is_keyword("Default")) {
        advance();
        auto body = parse_block(in_role);
        if (!body) {
          sync_statement();
          continue;
        }
        node.default_body = std::move(*body);
        node.default_leading_comments = std::move(pending);
        pending.clear();
        continue;
      }
      error("E-SYNTAX", "expected 'Case' or 'Default' in Switch, found " + describe_here(), peek().span);
      sync_statement();
    }
    node.trailing_comments = std::move(pending);
    advance();
    if (is(TokenKind::Comment)) node.close_comment = trim_comment(advance().lexeme);
    return node;
  }

  // ---- expressions --------------------------------------------------------

  std::optional<Expr> parse_checked_expr(ExprRule rule) {
    const std::size_t before = diags_.size();
    Expr expr = parse_expr(rule);
    for (std::size_t i = before; i < diags_.size(); ++i) {
      if (diags_[i].severity == Severity::Error) return std::nullopt;
    }
    return expr;
  }

  static std::int64_t parse_int(const Token& t) {
    std::int64_t value = 0;
    for (char c : t.lexeme) {
      if (value > (INT64_MAX - 9) / 10) return INT64_MAX;
      value = value * 10 + (c - '0');
    }
    return value;
  }

  Expr make_binary(ExprKind kind, std::string op, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = kind;
    e.text = std::move(op);
    e.span = {lhs.span.begin, rhs.span.end};
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
  }

  Expr parse_expr(ExprRule rule) {
    if (++depth_ > kMaxDepth) {
      error("E-SYNTAX", "expression nested too deeply", here());
      --depth_;
      skip_to_end();
      return {};
    }
    Expr lhs = parse_and(rule);
    while (is_op("|") || is_op("||")) {
      advance();
      Expr rhs = parse_and(rule);
      lhs = make_binary(ExprKind::Logical, "|", std::move(lhs), std::move(rhs));
    }
    --depth_;
    return lhs;
  }

  Expr parse_and(ExprRule rule) {
    Expr lhs = parse_compare(rule);
    while (is_op("&") || is_op("&&")) {
      advance();
      Expr rhs = parse_compare(rule);
      lhs = make_binary(ExprKind::Logical, "&", std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr parse_compare(ExprRule rule) {
    Expr lhs = parse_additive(rule);
    if (is(TokenKind::Operator)) {
      const std::string_view op = peek().lexeme;
      if (op == "==" || op == "!=" || op == "<" || op == ">" || op == "<=" || op == ">=") {
        const Span op_span = advance().span;
        if (op == "<=" || op == ">=") {
          diags_.push_back(make_info("I-ORDER-OP", "'" + std::string(op) + "' is an extension of the comparison operators",
                                     op_span));
        }
        Expr rhs = parse_additive(rule);
        lhs = make_binary(ExprKind::Compare, std::string(op), std::move(lhs), std::move(rhs));
        if (is(TokenKind::Operator)) {
          const std::string_view next = peek().lexeme;
          if (next == "==" || next == "!=" || next == "<" || next == ">" || next == "<=" || next == ">=") {
            error("E-SYNTAX", "comparisons do not chain; add parentheses", peek().span);
          }
        }
      }
    }
    return lhs;
  }

  Expr parse_additive(ExprRule rule) {
    Expr lhs = parse_multiplicative(rule);
    while (is_op("+") || is_op("-")) {
      std::string op(advance().lexeme);
      Expr rhs = parse_multiplicative(rule);
      lhs = make_binary(ExprKind::Binary, std::move(op), std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr parse_multiplicative(ExprRule rule) {
    Expr lhs = parse_unary(rule);
    while (is_op("*") || is_op("/") || is_op("%")) {
      std::string op(advance().lexeme);
      Expr rhs = parse_unary(rule);
      lhs = make_binary(ExprKind::Binary, std::move(op), std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr parse_unary(ExprRule rule) {
    if (is_op("-")) {
      const std::uint32_t begin = advance().span.begin;
      if (++depth_ > kMaxDepth) {
        error("E-SYNTAX", "expression nested too deeply", here());
        --depth_;
        skip_to_end();
        return {};
      }
      Expr operand = parse_unary(rule);
      --depth_;
      Expr e;
      e.kind = ExprKind::Neg;
      e.span = {begin, operand.span.end};
      e.args.push_back(std::move(operand));
      return e;
    }
    return parse_primary(rule);
  }

  // Parses comma-separated expressions up to `close`, consuming it.
  bool parse_list(std::string_view close, ExprRule rule, std::vector<Expr>& out) {
    const std::size_t before = diags_.size();
    while (!is_punct(close)) {
      if (!out.empty() && !expect_punct(",", "between arguments")) return false;
      if (at_end() || is(TokenKind::Newline) || is_punct("{") || is_punct("}")) {
        error("E-SYNTAX", "expected '" + std::string(close) + "', found " + describe_here(), here());
        return false;
      }
      out.push_back(parse_expr(rule));
      if (diags_.size() > before && has_errors(Diagnostics(diags_.begin() + before, diags_.end()))) {
        return false;
      }
    }
    advance();
    return true;
  }

  // `.name` and `[indices]` suffixes. An index group directly after the head
  // or after another index group gets a segment with an empty name.
  void parse_path(Expr& e, bool allow_head_index) {
    while (true) {
      if (is_punct(".") && (is_word(1) || is(TokenKind::Keyword, 1))) {
        advance();
        e.path.push_back({std::string(advance().lexeme), {}});
      } else if (is_punct("[") && (allow_head_index || !e.path.empty())) {
        advance();
        std::vector<Expr> indices;
        if (!parse_list("]", ExprRule::Index, indices)) return;
        if (e.path.empty() || !e.path.back().indices.empty()) {
          e.path.push_back({std::string(), std::move(indices)});
        } else {
          e.path.back().indices = std::move(indices);
        }
      } else {
        break;
      }
    }
    e.span.end = last_end_;
  }

  Expr parse_primary(ExprRule rule) {
    Expr e;
    const Token& t = peek();
    e.span = t.span;
    if (at_end() || t.kind == TokenKind::Newline) {
      error("E-SYNTAX", "expected an expression, found " + describe_here(), here());
      return e;
    }
    switch (t.kind) {
      case TokenKind::Number:
        advance();
        e.kind = ExprKind::Int;
        e.number = parse_int(t);
        e.text = std::string(t.lexeme);
        return e;
      case TokenKind::String:
        advance();
        e.kind = ExprKind::String;
        e.text = unescape(t.lexeme);
        return e;
      case TokenKind::InlineLiteral: {
        advance();
        e.kind = ExprKind::Inline;
        std::string_view body = t.lexeme.substr(2);
        if (body.size() >= 2 && body.substr(body.size() - 2) == "}}") body.remove_suffix(2);
        e.text = std::string(body);
        return e;
      }
      case TokenKind::TimeRef:
        advance();
        e.kind = ExprKind::TimeVar;
        e.text = std::string(t.lexeme.substr(1));
        while (is_punct(".") && (is_word(1) || is(TokenKind::Number, 1))) {
          advance();
          e.path.push_back({std::string(advance().lexeme), {}});
        }
        e.span.end = last_end_;
        return e;
      case TokenKind::NameRef:
        advance();
        e.kind = ExprKind::NameRef;
        e.text = std::string(t.lexeme.substr(1));
        parse_path(e, true);
        return e;
      case TokenKind::Identifier:
      case TokenKind::AllCapsIdentifier:
        return parse_word(rule);
      case TokenKind::Punctuation:
        if (t.lexeme == "(") {
          advance();
          e.kind = ExprKind::Paren;
          e.args.push_back(parse_expr(rule));
          if (!expect_punct(")", "to close '('")) return e;
          e.span.end = last_end_;
          return e;
        }
        if (t.lexeme == "[") return parse_bracket_list(rule);
        break;
      case TokenKind::Operator:
        if (t.lexeme == "<" && is_word(1)) return parse_placeholder();
        break;
      default:
        break;
    }
    error("E-SYNTAX", "expected an expression, found " + describe_here(), t.span);
    return e;
  }

  Expr parse_word(ExprRule rule) {
    const Token& t = advance();
    Expr e;
    e.span = t.span;
    e.text = std::string(t.lexeme);
    if (is_context_namespace(t.lexeme) && (is_punct(".") || is_punct("["))) {
      e.kind = ExprKind::ContextVar;
      if (is_punct("[")) {
        advance();
        if (!parse_list("]", ExprRule::Index, e.args)) return e;
        if (e.args.size() != 1) {
          error("E-SYNTAX", "an agent qualifier takes exactly one expression", {t.span.begin, last_end_});
          return e;
        }
      }
      if (!is_punct(".")) {
        error("E-SYNTAX", "expected '.' and a field after '" + e.text + "'", here());
        return e;
      }
      parse_path(e, false);
      if (e.path.empty()) error("E-SYNTAX", "expected a field name after '" + e.text + ".'", here());
      return e;
    }
    if (is_punct("(")) {
      advance();
      const bool caps = t.kind == TokenKind::AllCapsIdentifier;
      e.kind = caps ? ExprKind::Template : ExprKind::Call;
      e.flag = caps;
      if (!parse_list(")", caps ? ExprRule::Content : ExprRule::Index, e.args)) return e;
      e.span.end = last_end_;
      if (!caps) parse_path(e, true);
      return e;
    }
    if (t.kind == TokenKind::AllCapsIdentifier && rule == ExprRule::Content) {
      e.kind = ExprKind::Template;
      return e;
    }
    e.kind = ExprKind::Ident;
    return e;
  }

  Expr parse_bracket_list(ExprRule rule) {
    const std::uint32_t begin = advance().span.begin;
    Expr e;
    e.span.begin = begin;
    if (is_punct("]")) {
      advance();
      e.kind = ExprKind::IndexList;
      e.span.end = last_end_;
      return e;
    }
    Expr first = parse_expr(rule);
    if (is_keyword("for")) {
      advance();
      e.kind = ExprKind::ListComp;
      if (is(TokenKind::TimeRef)) {
        e.text = std::string(advance().lexeme.substr(1));
        e.flag = true;
      } else if (is_word()) {
        e.text = std::string(advance().lexeme);
      } else {
        error("E-SYNTAX", "expected a variable after 'for'", here());
        return e;
      }
      if (!is_keyword("in")) {
        error("E-SYNTAX", "expected 'in' in list comprehension", here());
        return e;
      }
      advance();
      Expr iterable = parse_expr(ExprRule::Index);
      e.args.push_back(std::move(first));
      e.args.push_back(std::move(iterable));
      expect_punct("]", "to close list comprehension");
      e.span.end = last_end_;
      return e;
    }
    e.kind = ExprKind::IndexList;
    e.args.push_back(std::move(first));
    while (is_punct(",")) {
      advance();
      e.args.push_back(parse_expr(rule));
    }
    expect_punct("]", "to close '['");
    e.span.end = last_end_;
    return e;
  }

  Expr parse_placeholder() {
    const std::uint32_t begin = advance().span.begin;
    Expr e;
    e.kind = ExprKind::Placeholder;
    e.text = std::string(advance().lexeme);
    while (is_op("-") && is_word(1)) {
      advance();
      e.text += '-';
      e.text += advance().lexeme;
    }
    if (!is_op(">")) {
      error("E-SYNTAX", "expected '>' to close placeholder", here());
    } else {
      advance();
    }
    e.span = {begin, last_end_};
    return e;
  }

  std::string_view src_;
  std::vector<Token> tokens_;
  Diagnostics diags_;
  std::size_t pos_ = 0;
  std::uint32_t last_end_ = 0;
  int depth_ = 0;
  std::set<std::int64_t> marks_seen_;
};

}  // namespace

ParseResult parse(std::string_view source) { return Parser(source).parse_document(); }

BlockParseResult parse_statements(std::string_view source, BlockLevel level) {
  return Parser(source).parse_snippet(level);
}

ExprParseResult parse_expression(std::string_view source, ExprRule rule) {
  return Parser(source).parse_lone_expression(rule);
}

}  // namespace acdl
