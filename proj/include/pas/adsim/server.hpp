#pragma once

#include <memory>
#include <string>
#include <thread>

#include "pas/adsim/simulator.hpp"

namespace httplib {
class Server;
}

namespace pas::adsim {

// HTTP front for a Simulator.
//   GET  /site/{site_id}?round=N   profile in X-Sandbox-Profile (base64)
//   POST /site/{site_id}?round=N   profile document as the body
//   GET  /truth/{creative_id}
//   GET  /healthz
// Responses to /site carry X-Sandbox-Profile-Hash (echo) and
// X-Sandbox-Creatives (served ids, slot order).
class SimServer {
 public:
  explicit SimServer(std::shared_ptr<const Simulator> sim);
  ~SimServer();
  SimServer(const SimServer&) = delete;
  SimServer& operator=(const SimServer&) = delete;

  // Binds and serves on a background thread. Port 0 picks a free port.
  // Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Blocks serving on the calling thread.
  void listen(const std::string& host, int port);
  void stop();

  int port() const { return port_; }

 private:
  void install_routes();

  std::shared_ptr<const Simulator> sim_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace pas::adsim
