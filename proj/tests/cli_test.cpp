#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "test_support.hpp"

namespace acdl {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string quote(const std::string& arg) { return "'" + arg + "'"; }

std::string data(std::string_view relative) { return quote(testing::data_path(relative).string()); }

RunResult run(const std::string& args) {
  const std::string command = quote(ACDL_BINARY) + " " + args + " 2>&1";
  RunResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return result;
  std::array<char, 4096> buffer{};
  std::size_t n = 0;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) result.out.append(buffer.data(), n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("acdl-cli-" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  fs::path file(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

TEST(Cli, CheckCleanFileIsQuiet) {
  const auto result = run("check " + data("corpus/fixtures/tool_agent.acdl"));
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_EQ(result.out, "");
}

TEST(Cli, CheckReportsNestedRole) {
  const auto result = run("check " + data("corpus/cli/bad_nested_role.acdl"));
  EXPECT_EQ(result.exit_code, 1);
  EXPECT_NE(result.out.find("bad_nested_role.acdl:3:5: error E-NESTED-ROLE:"), std::string::npos) << result.out;
}

TEST(Cli, CheckJsonLines) {
  const auto result = run("check --json " + data("corpus/cli/bad_nested_role.acdl"));
  EXPECT_EQ(result.exit_code, 1);
  const auto line = nlohmann::json::parse(result.out.substr(0, result.out.find('\n')));
  EXPECT_EQ(line.at("code"), "E-NESTED-ROLE");
  EXPECT_EQ(line.at("span").at("line"), 3);
}

TEST(Cli, WarningsFailOnlyWhenStrictAsked) {
  const std::string file = data("corpus/fixtures/scoping/j_naming.acdl");
  EXPECT_EQ(run("check " + file).exit_code, 0);
}

TEST(Cli, CheckSymbols) {
  const auto result = run("check --symbols " + data("corpus/fixtures/tool_agent.acdl"));
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_NE(result.out.find("REACT_INSTRUCTIONS"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").exit_code, 2);
  EXPECT_EQ(run("check /nonexistent/file.acdl").exit_code, 2);
  EXPECT_EQ(run("frobnicate").exit_code, 2);
  EXPECT_EQ(run("expand " + data("corpus/fixtures/react1.acdl")).exit_code, 2);
  EXPECT_EQ(run("fmt --write --check " + data("corpus/fixtures/react1.acdl")).exit_code, 2);
}

TEST(Cli, FmtCheckAndWrite) {
  TempDir dir;
  const fs::path target = dir.file("unformatted.acdl");
  fs::copy_file(testing::data_path("corpus/cli/unformatted.acdl"), target);
  EXPECT_EQ(run("fmt --check " + quote(target.string())).exit_code, 1);
  EXPECT_EQ(run("fmt --write " + quote(target.string())).exit_code, 0);
  const std::string once = testing::read_file(target);
  EXPECT_EQ(run("fmt --check " + quote(target.string())).exit_code, 0);
  EXPECT_EQ(run("fmt --write " + quote(target.string())).exit_code, 0);
  EXPECT_EQ(testing::read_file(target), once);
  EXPECT_EQ(run("fmt " + quote(target.string())).out, once);
}

TEST(Cli, FmtLeavesInputUntouchedWithoutWrite) {
  const std::string before = testing::read_data("corpus/cli/unformatted.acdl");
  EXPECT_EQ(run("fmt " + data("corpus/cli/unformatted.acdl")).exit_code, 0);
  EXPECT_EQ(testing::read_data("corpus/cli/unformatted.acdl"), before);
}

TEST(Cli, RenderMatchesGolden) {
  TempDir dir;
  const fs::path out = dir.file("tool_agent.svg");
  EXPECT_EQ(run("render " + data("corpus/fixtures/tool_agent.acdl") + " -o " + quote(out.string())).exit_code, 0);
  EXPECT_EQ(testing::read_file(out), testing::read_data("golden/tool_agent.svg"));
}

TEST(Cli, RenderExpandedMatchesGolden) {
  const auto result = run("render " + data("corpus/fixtures/tool_agent.acdl") + " --expanded " +
                          data("corpus/fixtures/env/tool_agent_t3.json"));
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_EQ(result.out, testing::read_data("golden/tool_agent_t3.svg"));
}

TEST(Cli, RenderRejectsBadTheme) {
  TempDir dir;
  const fs::path theme = dir.file("theme.json");
  std::ofstream(theme) << R"({"font_size": "big"})";
  EXPECT_EQ(run("render " + data("corpus/fixtures/tool_agent.acdl") + " --theme " + quote(theme.string())).exit_code, 2);
}

TEST(Cli, ExpandText) {
  const auto result =
      run("expand " + data("corpus/fixtures/tool_agent.acdl") + " --env " + data("corpus/fixtures/env/tool_agent_t3.json"));
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_EQ(result.out,
            "S: INSTRUCTIONS | AVAILABLE_TOOLS\n"
            "U: env.user_input[1] | env.user_document[1]\n"
            "U: env.user_input[1]\n"
            "A: sys.tool[2].tool_response\n"
            "S: REACT_INSTRUCTIONS\n");
}

TEST(Cli, ExpandJsonAndSeries) {
  const auto single = run("expand --json " + data("corpus/fixtures/react1.acdl") + " --env " +
                          data("corpus/fixtures/env/react1_t2.json"));
  EXPECT_EQ(single.exit_code, 0);
  EXPECT_EQ(nlohmann::json::parse(single.out).at("messages").size(), 4u);
  const auto series = run("expand " + data("corpus/fixtures/react1.acdl") + " --env " +
                          data("corpus/fixtures/env/react1_t1.json") + " --series " + data("corpus/fixtures/env/react1_t3.json"));
  EXPECT_EQ(series.exit_code, 0) << series.out;
  const auto backwards = run("expand " + data("corpus/fixtures/react1.acdl") + " --env " +
                             data("corpus/fixtures/env/react1_t3.json") + " --series " + data("corpus/fixtures/env/react1_t1.json"));
  EXPECT_EQ(backwards.exit_code, 1);
  EXPECT_NE(backwards.out.find("X-SERIES-ORDER"), std::string::npos);
}

TEST(Cli, Diff) {
  const auto result = run("diff " + data("corpus/fixtures/mint_base.acdl") + " " + data("corpus/fixtures/mint_tool_role.acdl"));
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_EQ(result.out.rfind("~ role U -> T: ", 0), 0u) << result.out;
  const auto json = run("diff --json " + data("corpus/fixtures/mint_base.acdl") + " " +
                        data("corpus/fixtures/mint_tool_role.acdl"));
  EXPECT_EQ(nlohmann::json::parse(json.out).at("edits").at(0).at("kind"), "replace-role");
  const auto same = run("diff " + data("corpus/fixtures/react1.acdl") + " " + data("corpus/fixtures/react1.acdl"));
  EXPECT_EQ(same.out, "no structural differences\n");
}

TEST(Cli, Conform) {
  const std::string base = "conform --spec " + data("corpus/fixtures/react1.acdl") + " --env " +
                           data("corpus/fixtures/env/react1_t3_full.json") + " --trace ";
  const auto pass = run(base + data("corpus/fixtures/trace/react1_t3.json") + " --mode content");
  EXPECT_EQ(pass.exit_code, 0);
  EXPECT_EQ(pass.out, "pass (content)\n");
  const auto fail = run(base + data("corpus/fixtures/trace/react1_t3_swapped.json"));
  EXPECT_EQ(fail.exit_code, 1);
  EXPECT_NE(fail.out.find("2 mismatch(es)"), std::string::npos);
  const auto bad = run(base + data("corpus/fixtures/trace/bad_role.json"));
  EXPECT_EQ(bad.exit_code, 1);
  EXPECT_NE(bad.out.find("C-BAD-TRACE"), std::string::npos);
  const auto jsonl = run("conform --jsonl --spec " + data("corpus/fixtures/tool_agent.acdl") + " --env " +
                         data("corpus/fixtures/env/tool_agent_t3.json") + " --trace " +
                         data("corpus/fixtures/trace/tool_agent_t3.jsonl"));
  EXPECT_EQ(jsonl.exit_code, 0) << jsonl.out;
}

}  // namespace
}  // namespace acdl
