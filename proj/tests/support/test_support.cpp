#include "test_support.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "acdl/parser.hpp"

namespace acdl::testing {

namespace fs = std::filesystem;

fs::path data_path(std::string_view relative) { return fs::path(ACDL_TEST_DATA) / relative; }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string read_data(std::string_view relative) { return read_file(data_path(relative)); }

std::vector<Listing> load_listings() {
  const auto manifest = nlohmann::json::parse(read_data("corpus/listings/manifest.json"));
  std::vector<Listing> listings;
  for (const auto& item : manifest.at("listings")) {
    Listing listing;
    listing.file = item.at("file").get<std::string>();
    listing.entry = item.at("entry") == "statements" ? ListingEntry::Statements : ListingEntry::Document;
    listing.expect = item.at("expect").get<std::vector<std::string>>();
    listing.source = read_data("corpus/listings/" + listing.file);
    listings.push_back(std::move(listing));
  }
  return listings;
}

Diagnostics check_listing(const Listing& listing) {
  if (listing.entry == ListingEntry::Document) return parse(listing.source).diagnostics;
  return parse_statements(listing.source, BlockLevel::Snippet).diagnostics;
}

std::vector<std::string> codes(const Diagnostics& diagnostics) {
  std::vector<std::string> out;
  for (const Diagnostic& d : diagnostics) out.push_back(d.code);
  return out;
}

std::vector<std::string> error_codes(const Diagnostics& diagnostics) {
  std::vector<std::string> out;
  for (const Diagnostic& d : diagnostics) {
    if (d.severity == Severity::Error) out.push_back(d.code);
  }
  return out;
}

std::vector<fs::path> fixture_files() {
  std::vector<fs::path> files;
  const fs::path root = data_path("corpus/fixtures");
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.path().extension() != ".acdl") continue;
    if (entry.path().parent_path().filename() == "scoping") continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

ResolvedContext resolve_fixture(std::string_view relative, std::string_view context) {
  const std::string source = read_data("corpus/fixtures/" + std::string(relative));
  CheckResult checked = check(source);
  EXPECT_FALSE(has_errors(checked.diagnostics)) << relative;
  ResolveResult resolved = resolve(checked.document, context);
  EXPECT_TRUE(resolved.resolved.has_value()) << relative;
  if (!resolved.resolved) return {};
  return *resolved.resolved;
}

EnvironmentDocument load_env_fixture(std::string_view relative) {
  EnvironmentLoadResult loaded = load_environment(read_data("corpus/fixtures/env/" + std::string(relative)));
  EXPECT_FALSE(has_errors(loaded.diagnostics)) << relative;
  return loaded.environment;
}

ExpandResult expand_fixture(std::string_view spec, std::string_view env, std::string_view context) {
  return expand(resolve_fixture(spec, context), load_env_fixture(env));
}

std::string role_letters(const ExpandedPrompt& prompt) {
  std::string out;
  for (const Message& message : prompt.messages) out += role_letter(message.role);
  return out;
}

}  // namespace acdl::testing
