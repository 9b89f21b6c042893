#include <gtest/gtest.h>

#include <chrono>

#include "acdl/format.hpp"
#include "acdl/json_io.hpp"
#include "acdl/parser.hpp"
#include "test_support.hpp"

namespace acdl {
namespace {

using testing::codes;
using testing::error_codes;

TEST(Corpus, EveryListingParsesAsExpected) {
  const auto start = std::chrono::steady_clock::now();
  const auto listings = testing::load_listings();
  ASSERT_EQ(listings.size(), 30u);
  for (const auto& listing : listings) {
    EXPECT_EQ(error_codes(testing::check_listing(listing)), listing.expect) << listing.file;
  }
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(1));
}

TEST(Corpus, NestedRoleListingIsTheOnlyInvalidOne) {
  int invalid = 0;
  for (const auto& listing : testing::load_listings()) {
    const auto errors = error_codes(testing::check_listing(listing));
    if (errors.empty()) continue;
    ++invalid;
    EXPECT_EQ(errors, std::vector<std::string>{"E-NESTED-ROLE"}) << listing.file;
  }
  EXPECT_EQ(invalid, 1);
}

TEST(Corpus, FixturesParseClean) {
  for (const auto& path : testing::fixture_files()) {
    EXPECT_TRUE(error_codes(check(testing::read_file(path)).diagnostics).empty()) << path;
  }
}

TEST(Parser, ContextHeader) {
  const auto result = parse("React2[@T.I, agent]: {\n  S: INSTRUCTIONS\n}\n");
  ASSERT_TRUE(result.diagnostics.empty());
  const ContextDef* ctx = find_context(result.document, "React2");
  ASSERT_NE(ctx, nullptr);
  ASSERT_EQ(ctx->params.size(), 2u);
  EXPECT_TRUE(ctx->params[0].time);
  EXPECT_EQ(ctx->params[0].name, "T");
  EXPECT_EQ(ctx->params[0].sublevels, std::vector<std::string>{"I"});
  EXPECT_EQ(ctx->params[1].name, "agent");
  EXPECT_EQ(time_levels(ctx->params), (std::vector<std::string>{"T", "I"}));
}

TEST(Parser, SingleLineRoleHoldsOneElement) {
  const auto result = parse("P[@T]: {\n  U: env.user_input[@T]\n}\n");
  ASSERT_TRUE(result.diagnostics.empty());
  const auto& stmt = find_context(result.document, "P")->body.stmts.at(0);
  const auto& role = std::get<RoleMessage>(stmt.node);
  EXPECT_TRUE(role.single_line);
  EXPECT_EQ(role.role, Role::User);
  ASSERT_EQ(role.body.stmts.size(), 1u);
  EXPECT_EQ(std::get<Element>(role.body.stmts[0].node).expr.kind, ExprKind::ContextVar);
}

TEST(Parser, SingleLineRoleRejectsOtherElements) {
  EXPECT_EQ(error_codes(parse("P[@T]: {\n  U: {{literal}}\n}\n").diagnostics),
            std::vector<std::string>{"E-SINGLELINE-ELEM"});
  EXPECT_EQ(error_codes(parse("P[@T]: {\n  U: ForEach(i: range(1, 2)) {\n    X\n  }\n}\n").diagnostics).front(),
            "E-SINGLELINE-CTRL");
}

TEST(Parser, SingleLineRolesAcceptThreeKinds) {
  for (const char* element : {"INSTRUCTIONS", "env.user_input[@T]", "summarize(sys.history[@T])"}) {
    const auto result = parse(std::string("P[@T]: {\n  A: ") + element + "\n}\n");
    EXPECT_TRUE(result.diagnostics.empty()) << element;
  }
}

TEST(Parser, NestedRoleIsReported) {
  const auto result = parse_statements("U: {\n  S: INSTRUCTIONS\n}\n", BlockLevel::Snippet);
  EXPECT_EQ(error_codes(result.diagnostics), std::vector<std::string>{"E-NESTED-ROLE"});
}

TEST(Parser, ExpressionPrecedence) {
  const auto result = parse_expression("@t - 1 * 2 == 3 & x | y", ExprRule::Condition);
  ASSERT_TRUE(result.diagnostics.empty());
  EXPECT_EQ(result.expr.kind, ExprKind::Logical);
  EXPECT_EQ(result.expr.text, "|");
  const Expr& lhs = result.expr.args.at(0);
  EXPECT_EQ(lhs.kind, ExprKind::Logical);
  EXPECT_EQ(lhs.text, "&");
  const Expr& compare = lhs.args.at(0);
  EXPECT_EQ(compare.kind, ExprKind::Compare);
  EXPECT_EQ(compare.args.at(0).text, "-");
  EXPECT_EQ(compare.args.at(0).args.at(1).text, "*");
}

TEST(Parser, AllCapsReadsByRule) {
  EXPECT_EQ(parse_expression("INSTRUCTIONS", ExprRule::Content).expr.kind, ExprKind::Template);
  EXPECT_EQ(parse_expression("T", ExprRule::Index).expr.kind, ExprKind::Ident);
  EXPECT_EQ(parse_expression("@T.0", ExprRule::Condition).expr.kind, ExprKind::SubstepZero);
}

TEST(Parser, ContextVariablePath) {
  const auto result = parse_expression("sys[agent].tool[@t].tool_response");
  ASSERT_TRUE(result.diagnostics.empty());
  const Expr& e = result.expr;
  EXPECT_EQ(e.kind, ExprKind::ContextVar);
  EXPECT_EQ(e.text, "sys");
  ASSERT_EQ(e.args.size(), 1u);
  EXPECT_EQ(e.args[0].text, "agent");
  ASSERT_EQ(e.path.size(), 2u);
  EXPECT_EQ(e.path[0].name, "tool");
  EXPECT_EQ(e.path[0].indices.size(), 1u);
  EXPECT_EQ(e.path[1].name, "tool_response");
}

TEST(Parser, ListComprehension) {
  const auto result = parse_expression("[sys.summary[@t] for t in range(@T, @T-900, 100)]", ExprRule::Content);
  ASSERT_TRUE(result.diagnostics.empty());
  EXPECT_EQ(result.expr.kind, ExprKind::ListComp);
  EXPECT_EQ(result.expr.text, "t");
  EXPECT_EQ(result.expr.args.at(1).kind, ExprKind::Call);
}

TEST(Parser, OrderingOperatorIsNoted) {
  const auto result = parse_expression("@t <= 3", ExprRule::Condition);
  EXPECT_EQ(codes(result.diagnostics), std::vector<std::string>{"I-ORDER-OP"});
  EXPECT_FALSE(has_errors(result.diagnostics));
}

TEST(Parser, DuplicateMarkNumberWarns) {
  const auto result = parse("P[@T]: {\n  Mark 1 {\n    U: Q\n  }\n  Mark 1 {\n    A: R\n  }\n}\n");
  EXPECT_EQ(codes(result.diagnostics), std::vector<std::string>{"W-DUP-MARK"});
}

TEST(ErrorRecovery, IndependentErrorsAreAllReported) {
  const std::string source =
      "P[@T]: {\n"
      "  U: {\n"
      "    env.a[@t] ) \n"
      "  }\n"
      "  A: {\n"
      "    X Y Z ]\n"
      "  }\n"
      "  S: INSTRUCTIONS\n"
      "}\n";
  const auto result = parse(source);
  EXPECT_GE(error_codes(result.diagnostics).size(), 2u);
  const ContextDef* ctx = find_context(result.document, "P");
  ASSERT_NE(ctx, nullptr);
  EXPECT_EQ(ctx->body.stmts.size(), 3u);
}

TEST(ErrorRecovery, ErrorsInSeparateContexts) {
  const std::string source = "A[@T]: {\n  U: {{oops}}\n}\n\nB[@T]: {\n  S: {\n    QUESTION ~\n  }\n}\n";
  const auto result = parse(source);
  EXPECT_GE(error_codes(result.diagnostics).size(), 2u);
  EXPECT_NE(find_context(result.document, "A"), nullptr);
  EXPECT_NE(find_context(result.document, "B"), nullptr);
}

TEST(ErrorRecovery, MissingCloseBrace) {
  const auto result = parse("P[@T]: {\n  U: {\n    QUESTION\n");
  EXPECT_EQ(count_code(result.diagnostics, "E-UNBALANCED") >= 1, true);
}

TEST(ErrorRecovery, StrayCloseBrace) {
  const auto result = parse("P[@T]: {\n  U: QUESTION\n}\n}\n");
  EXPECT_EQ(error_codes(result.diagnostics), std::vector<std::string>{"E-UNBALANCED"});
}

// Span soundness: the slice at a statement's span re-parses to an equal statement.
void expect_spans_reparse(const Block& block, std::string_view source, const std::string& where) {
  for (const Stmt& stmt : block.stmts) {
    if (std::holds_alternative<Comment>(stmt.node)) continue;
    ASSERT_LE(stmt.span.end, source.size()) << where;
    const std::string_view slice = source.substr(stmt.span.begin, stmt.span.end - stmt.span.begin);
    const auto reparsed = parse_statements(slice, BlockLevel::Snippet);
    EXPECT_FALSE(has_errors(reparsed.diagnostics)) << where << ": " << slice;
    Block original;
    original.stmts.push_back(stmt);
    EXPECT_TRUE(ast_equal(original, reparsed.block)) << where << ": " << slice;
    for_each_root_expr(stmt, [&](const Expr& expr) {
      if (expr.kind == ExprKind::Placeholder) return;
      const std::string_view text = source.substr(expr.span.begin, expr.span.end - expr.span.begin);
      const bool content = std::holds_alternative<Element>(stmt.node) || std::holds_alternative<NameDef>(stmt.node) ||
                           std::holds_alternative<FragInvoke>(stmt.node);
      const bool condition = std::holds_alternative<If>(stmt.node) || std::holds_alternative<PromptEndsHere>(stmt.node);
      const auto rule = content ? ExprRule::Content : condition ? ExprRule::Condition : ExprRule::Index;
      const auto expr_result = parse_expression(text, rule);
      EXPECT_TRUE(ast_equal(expr, expr_result.expr)) << where << ": " << text;
    });
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, RoleMessage> || std::is_same_v<T, ForEach> || std::is_same_v<T, Mark>) {
            expect_spans_reparse(node.body, source, where);
          } else if constexpr (std::is_same_v<T, If>) {
            for (const auto& branch : node.branches) expect_spans_reparse(branch.body, source, where);
            if (node.else_body) expect_spans_reparse(*node.else_body, source, where);
          } else if constexpr (std::is_same_v<T, Switch>) {
            for (const auto& c : node.cases) expect_spans_reparse(c.body, source, where);
            if (node.default_body) expect_spans_reparse(*node.default_body, source, where);
          }
        },
        stmt.node);
  }
}

TEST(SpanSoundness, CorpusStatementsReparse) {
  for (const auto& listing : testing::load_listings()) {
    if (!listing.expect.empty()) continue;
    if (listing.entry == testing::ListingEntry::Statements) {
      expect_spans_reparse(parse_statements(listing.source, BlockLevel::Snippet).block, listing.source, listing.file);
      continue;
    }
    for (const Item& item : parse(listing.source).document.items) {
      if (const auto* ctx = std::get_if<ContextDef>(&item.node)) expect_spans_reparse(ctx->body, listing.source, listing.file);
      if (const auto* frag = std::get_if<FragmentDef>(&item.node)) expect_spans_reparse(frag->body, listing.source, listing.file);
    }
  }
}

TEST(SpanSoundness, FixtureStatementsReparse) {
  for (const auto& path : testing::fixture_files()) {
    const std::string source = testing::read_file(path);
    for (const Item& item : parse(source).document.items) {
      if (const auto* ctx = std::get_if<ContextDef>(&item.node)) expect_spans_reparse(ctx->body, source, path.string());
      if (const auto* frag = std::get_if<FragmentDef>(&item.node)) expect_spans_reparse(frag->body, source, path.string());
    }
  }
}

}  // namespace
}  // namespace acdl
