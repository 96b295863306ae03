#include "colorref/game/server.hpp"

#include <regex>

#include <httplib.h>

namespace colorref::game {

namespace {

int status_of(const std::string& code) {
  if (code == "not_found") return 404;
  if (code == "state_error") return 409;
  if (code == "no_checkpoint") return 503;
  return 400;
}

ApiResponse error_response(const std::string& code, const std::string& detail) {
  return {status_of(code), {{"ok", false}, {"error", {{"code", code}, {"detail", detail}}}}};
}

nlohmann::json parse_body(const std::string& body) {
  if (body.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw GameError("bad_request", std::string("request body is not valid JSON: ") + e.what());
  }
}

}  // namespace

ApiResponse dispatch(SessionManager& manager, const std::string& method, const std::string& path,
                     const std::string& body) {
  static const std::regex session_re(R"(^/api/session/([A-Za-z0-9_-]+)(/(message|click))?$)");
  try {
    if (path == "/api/session") {
      if (method != "POST") return error_response("bad_request", "use POST to create a session");
      return {200, {{"ok", true}, {"session", manager.create(parse_body(body))}}};
    }
    std::smatch m;
    if (!std::regex_match(path, m, session_re)) return error_response("not_found", "no route for " + path);
    const std::string id = m[1];
    const std::string action = m[3];
    if (action.empty()) {
      if (method != "GET") return error_response("bad_request", "use GET to read a session");
      return {200, {{"ok", true}, {"session", manager.get(id)}}};
    }
    if (method != "POST") return error_response("bad_request", "use POST for " + action);
    const auto req = parse_body(body);
    if (!req.is_object()) throw GameError("bad_request", "request body must be a JSON object");
    if (action == "message") {
      if (!req.contains("text") || !req.at("text").is_string()) {
        throw GameError("validation_error", "field 'text' must be a string");
      }
      return {200, {{"ok", true}, {"session", manager.post_message(id, req.at("text").get<std::string>())}}};
    }
    if (!req.contains("index") || !req.at("index").is_number_integer()) {
      throw GameError("validation_error", "field 'index' must be an integer");
    }
    return {200, {{"ok", true}, {"session", manager.click(id, req.at("index").get<int>())}}};
  } catch (const GameError& e) {
    return error_response(e.code(), e.what());
  } catch (const DataError& e) {
    return error_response("validation_error", e.what());
  } catch (const std::exception& e) {
    return {500, {{"ok", false}, {"error", {{"code", "internal"}, {"detail", e.what()}}}}};
  }
}

struct GameServer::Impl {
  httplib::Server server;
};

GameServer::GameServer(SessionManager& manager, const ServerOptions& opts)
    : impl_(std::make_unique<Impl>()), opts_(opts) {
  auto& server = impl_->server;
  auto handle = [&manager](const httplib::Request& req, httplib::Response& res) {
    const auto r = dispatch(manager, req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json; charset=utf-8");
  };
  server.Post("/api/session", handle);
  server.Get(R"(/api/session/[A-Za-z0-9_-]+)", handle);
  server.Post(R"(/api/session/[A-Za-z0-9_-]+/(message|click))", handle);
  if (!opts.static_dir.empty() && !server.set_mount_point("/", opts.static_dir)) {
    throw Error("static directory '" + opts.static_dir + "' does not exist");
  }
}

GameServer::~GameServer() = default;

int GameServer::bind() {
  auto& server = impl_->server;
  const int port = opts_.port == 0 ? server.bind_to_any_port(opts_.host) : server.bind_to_port(opts_.host, opts_.port)
                                                                              ? opts_.port
                                                                              : -1;
  if (port < 0) throw Error("cannot listen on " + opts_.host + ":" + std::to_string(opts_.port));
  return port;
}

void GameServer::listen() {
  if (!impl_->server.listen_after_bind()) throw Error("server stopped unexpectedly");
}

void GameServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void GameServer::stop() { impl_->server.stop(); }

void run_server(SessionManager& manager, const ServerOptions& opts) {
  GameServer server(manager, opts);
  server.bind();
  server.listen();
}

}  // namespace colorref::game
