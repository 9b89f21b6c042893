#include "acdl/server.hpp"

#include <filesystem>

#include <httplib.h>
#include <json.hpp>

#include "acdl/diff.hpp"
#include "acdl/json_io.hpp"
#include "acdl/pipeline.hpp"

namespace acdl {

using nlohmann::json;

namespace {

ApiResponse error(int status, const std::string& message) { return {status, json{{"error", message}}.dump()}; }

// Reads a required string field; returns false when absent or not a string.
bool string_field(const json& body, const char* key, std::string& out) {
  if (!body.contains(key) || !body[key].is_string()) return false;
  out = body[key].get<std::string>();
  return true;
}

std::optional<std::string> optional_string(const json& body, const char* key, bool& ok) {
  if (!body.contains(key) || body[key].is_null()) return std::nullopt;
  if (!body[key].is_string()) {
    ok = false;
    return std::nullopt;
  }
  return body[key].get<std::string>();
}

ApiResponse parse_route(const json& body) {
  std::string source;
  if (!string_field(body, "source", source)) return error(400, "'source' must be a string");
  CheckResult checked = check(source);
  json out = {{"diagnostics", diagnostics_to_json(checked.diagnostics, source, "<input>")}};
  const bool syntax_errors = std::any_of(checked.diagnostics.begin(), checked.diagnostics.end(), [](const Diagnostic& d) {
    return d.severity == Severity::Error && (d.code == "E-SYNTAX" || d.code == "E-UNBALANCED");
  });
  if (!syntax_errors) out["ast"] = to_json(checked.document);
  return {200, out.dump()};
}

ApiResponse render_route(const json& body, const Theme& base_theme) {
  std::string source;
  if (!string_field(body, "source", source)) return error(400, "'source' must be a string");
  Theme theme = base_theme;
  if (body.contains("theme") && !body["theme"].is_null()) {
    if (!body["theme"].is_object()) return error(400, "'theme' must be an object");
    ThemeLoadResult loaded = load_theme(body["theme"].dump());
    if (has_errors(loaded.diagnostics)) return error(400, loaded.diagnostics.front().message);
    theme = loaded.theme;
  }
  bool ok = true;
  const std::string context = optional_string(body, "context", ok).value_or("");
  if (!ok) return error(400, "'context' must be a string");
  std::optional<EnvironmentDocument> env;
  if (body.contains("env") && !body["env"].is_null()) {
    EnvironmentLoadResult loaded = load_environment(body["env"].dump());
    if (has_errors(loaded.diagnostics)) return error(400, loaded.diagnostics.front().message);
    env = std::move(loaded.environment);
  }
  RenderOutput rendered = render_source(source, theme, env ? &*env : nullptr, context);
  json out = {{"svg", rendered.svg}, {"diagnostics", diagnostics_to_json(rendered.diagnostics, source, "<input>")}};
  return {200, out.dump()};
}

ApiResponse expand_route(const json& body) {
  std::string source;
  if (!string_field(body, "source", source)) return error(400, "'source' must be a string");
  bool ok = true;
  const std::string context = optional_string(body, "context", ok).value_or("");
  if (!ok) return error(400, "'context' must be a string");
  if (!body.contains("env") || !body["env"].is_object()) return error(400, "'env' must be an object");
  EnvironmentLoadResult loaded = load_environment(body["env"].dump());
  if (has_errors(loaded.diagnostics)) return error(400, loaded.diagnostics.front().message);
  ExpandOutput expanded = expand_source(source, context, loaded.environment);
  json out = {{"expanded", expanded.prompt ? to_json(*expanded.prompt) : json(nullptr)},
              {"diagnostics", diagnostics_to_json(expanded.diagnostics, source, "<input>")}};
  return {200, out.dump()};
}

ApiResponse diff_route(const json& body, const Theme& theme) {
  std::string a;
  std::string b;
  if (!string_field(body, "a", a) || !string_field(body, "b", b)) return error(400, "'a' and 'b' must be strings");
  bool ok = true;
  const std::string context = optional_string(body, "context", ok).value_or("");
  if (!ok) return error(400, "'context' must be a string");
  if (body.contains("svg") && !body["svg"].is_boolean()) return error(400, "'svg' must be a boolean");
  const bool want_svg = body.value("svg", false);
  ResolveOutput ra = resolve_source(a, context);
  ResolveOutput rb = resolve_source(b, context);
  json out = {{"diagnostics", {{"a", diagnostics_to_json(ra.diagnostics, a, "a")},
                               {"b", diagnostics_to_json(rb.diagnostics, b, "b")}}}};
  if (!ra.resolved || !rb.resolved) {
    out["edits"] = nullptr;
    return {200, out.dump()};
  }
  DiffResult result = diff(*ra.resolved, *rb.resolved);
  json script = to_json(result.script);
  out["edits"] = script["edits"];
  out["cost"] = script["cost"];
  out["notes"] = script["notes"];
  out["text"] = format_diff(result.script, a, b);
  if (want_svg) out["svg"] = format_diff_svg(result.script, *rb.resolved, theme);
  return {200, out.dump()};
}

constexpr const char* kStatusPage =
    "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>acdl</title></head>\n"
    "<body><h1>acdl server</h1><p>The playground is not built. API endpoints: "
    "POST /api/parse, /api/render, /api/expand, /api/diff.</p></body></html>\n";

}  // namespace

ApiResponse handle_api(std::string_view route, std::string_view body_text, const Theme& theme) {
  json body = json::parse(body_text, nullptr, false);
  if (body.is_discarded()) return error(400, "request body is not valid JSON");
  if (!body.is_object()) return error(400, "request body must be a JSON object");
  if (route == "/api/parse") return parse_route(body);
  if (route == "/api/render") return render_route(body, theme);
  if (route == "/api/expand") return expand_route(body);
  if (route == "/api/diff") return diff_route(body, theme);
  return error(404, "unknown endpoint " + std::string(route));
}

HttpServer::HttpServer(ServeOptions options) : options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  const Theme theme = options_.theme;
  for (const char* route : {"/api/parse", "/api/render", "/api/expand", "/api/diff"}) {
    server_->Post(route, [theme, route](const httplib::Request& req, httplib::Response& res) {
      ApiResponse response = handle_api(route, req.body, theme);
      res.status = response.status;
      res.set_content(response.body, "application/json");
    });
  }
  const bool has_assets = !options_.static_dir.empty() &&
                          std::filesystem::exists(std::filesystem::path(options_.static_dir) / "index.html");
  if (has_assets) {
    server_->set_mount_point("/", options_.static_dir);
  } else {
    server_->Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kStatusPage, "text/html; charset=utf-8");
    });
  }
  server_->set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server_->Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  if (options_.port == 0) return server_->bind_to_any_port(options_.host);
  return server_->bind_to_port(options_.host, options_.port) ? options_.port : -1;
}

bool HttpServer::listen() { return server_->listen_after_bind(); }

void HttpServer::wait_until_ready() const { server_->wait_until_ready(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

}  // namespace acdl
