#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <thread>

#include <nlohmann/json.hpp>

#include "pas/api/config.hpp"
#include "pas/audit/orchestrator.hpp"
#include "pas/audit/registry.hpp"
#include "pas/error.hpp"
#include "pas/persona/engine.hpp"
#include "pas/persona/store.hpp"

namespace httplib {
class Server;
}

namespace pas::api {

// Everything that lives under one data directory:
//   <data>/personas/{bases,sets}/<id>.json
//   <data>/sessions/<id>/...
struct Workspace {
  ServiceConfig config;
  std::shared_ptr<llm::Gateway> gateway;
  std::shared_ptr<persona::PersonaEngine> engine;
  std::shared_ptr<persona::PersonaStore> personas;
  std::shared_ptr<audit::SessionStore> sessions;
  std::shared_ptr<audit::Orchestrator> orchestrator;

  // Creates the data directory and checks it is writable (kIo otherwise).
  // A null gateway is built from config.gateway.
  static std::shared_ptr<Workspace> open(const ServiceConfig& config,
                                         std::shared_ptr<llm::Gateway> gateway = nullptr);
};

enum class ApiErrorCode { kBadRequest, kNotFound, kGatewayFailure, kTargetUnreachable, kConflict, kInternal };

std::string_view to_string(ApiErrorCode c);
ApiErrorCode api_error_code(ErrorCode code);
int status_of(ApiErrorCode c);
// {"code", "message", "detail"}; detail keeps the library error code as
// "cause" next to whatever the error carried.
nlohmann::json api_error_body(ApiErrorCode code, const std::string& message,
                              const nlohmann::json& detail = nullptr);
nlohmann::json api_error_body(const Error& e);

// JSON API over a workspace. Audits run on registry workers; handlers only
// enqueue them.
class Service {
 public:
  explicit Service(std::shared_ptr<Workspace> workspace);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds config.bind_address:config.port (0 = any free port) and serves on
  // a background thread. Returns the bound port. kIo on bind failure.
  int start();
  // Stops accepting requests, then lets running sessions stop after their
  // current cell; their state stays on disk as Pending.
  void stop();

  int port() const { return port_; }
  audit::SessionRegistry& registry() { return *registry_; }
  const Workspace& workspace() const { return *ws_; }

  // Starts (or resumes) a persisted session on a worker.
  void launch(const std::string& session_id);

 private:
  void install_routes();

  std::shared_ptr<Workspace> ws_;
  std::unique_ptr<audit::SessionRegistry> registry_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace pas::api
