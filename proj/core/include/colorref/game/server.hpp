#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "colorref/game/session.hpp"

namespace colorref::game {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

/// Routes one API request: POST /api/session, GET /api/session/{id},
/// POST /api/session/{id}/message, POST /api/session/{id}/click. Bodies are
/// {ok: true, session} or {ok: false, error: {code, detail}}.
ApiResponse dispatch(SessionManager& manager, const std::string& method, const std::string& path,
                     const std::string& body);

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string static_dir;  // served under / when non-empty
};

/// HTTP front end: the API routes plus static files.
class GameServer {
 public:
  GameServer(SessionManager& manager, const ServerOptions& opts);
  ~GameServer();
  GameServer(const GameServer&) = delete;
  GameServer& operator=(const GameServer&) = delete;

  /// Binds the socket and returns the bound port. Throws Error on failure.
  int bind();
  /// Serves until stop(); call bind() first.
  void listen();
  /// Blocks until listen() is accepting connections.
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  ServerOptions opts_;
};

/// bind() + listen(). Blocks until the server stops.
void run_server(SessionManager& manager, const ServerOptions& opts);

}  // namespace colorref::game
