#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace acdl::testing {

struct GeneratorOptions {
  // Restricts output to constructs whose expansion is decided by the time
  // point alone: range loops, time arithmetic conditions, no names.
  bool expandable = false;
  int max_depth = 3;
  int max_statements = 4;
};

/// Random source text of valid documents (zero error diagnostics).
class DocumentGenerator {
 public:
  explicit DocumentGenerator(std::uint32_t seed, GeneratorOptions options = {});

  std::string document();

 private:
  struct Scope {
    std::vector<std::string> time_binders;  // innermost last
    std::vector<std::string> plain_binders;
    std::vector<std::vector<std::string>> names;
    bool in_loop = false;
    int depth = 0;
  };

  int pick(int lo, int hi);
  bool chance(double p);
  template <typename T>
  const T& choose(const std::vector<T>& items) {
    return items[static_cast<std::size_t>(pick(0, static_cast<int>(items.size()) - 1))];
  }

  std::string indent(int level) const;
  std::string comment();
  std::string time_index(const Scope& scope);
  std::string index_expr(const Scope& scope);
  std::string context_var(const Scope& scope);
  std::string content_expr(const Scope& scope);
  std::string condition(const Scope& scope);
  std::string range_call(const Scope& scope, bool time_binder);

  void prompt_block(std::string& out, Scope scope, int level);
  void content_block(std::string& out, Scope scope, int level);
  void prompt_stmt(std::string& out, Scope& scope, int level);
  void content_stmt(std::string& out, Scope& scope, int level);
  void role_message(std::string& out, Scope& scope, int level);
  void loop(std::string& out, Scope& scope, int level, bool prompt_level);
  void branch(std::string& out, Scope& scope, int level, bool prompt_level);
  void choice(std::string& out, Scope& scope, int level, bool prompt_level);
  void body(std::string& out, const Scope& scope, int level, bool prompt_level);
  std::string fresh_binder(const Scope& scope, bool time_binder);

  std::mt19937 rng_;
  GeneratorOptions options_;
  std::vector<std::string> string_fragments_;  // names taking one time argument
  std::vector<std::string> roles_fragments_;
  bool completion_ = false;
  int next_name_ = 0;
  int next_mark_ = 1;
};

}  // namespace acdl::testing
