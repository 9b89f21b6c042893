#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "acdl/render.hpp"

namespace httplib {
class Server;
}

namespace acdl {

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON
};

/// Handles one `POST /api/...` request body. Unknown routes give 404,
/// malformed bodies 400 with `{"error": ...}`; diagnostics are always 200.
ApiResponse handle_api(std::string_view route, std::string_view body, const Theme& theme);

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;          // 0 picks a free port
  std::string static_dir;   // built playground assets, served at `/` when present
  Theme theme = default_theme();
};

class HttpServer {
 public:
  explicit HttpServer(ServeOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the listening socket; returns the port, or -1 on failure.
  int bind();
  /// Serves until stop() is called. Requires a successful bind().
  bool listen();
  /// Blocks until listen() is accepting connections.
  void wait_until_ready() const;
  void stop();

 private:
  ServeOptions options_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace acdl
