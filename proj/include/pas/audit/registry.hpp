#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "pas/audit/types.hpp"

namespace pas::audit {

struct StatusSnapshot {
  std::string id;
  SessionStatus status = SessionStatus::kPending;
  double progress = 0.0;
  std::string failure_reason;
  std::size_t cells_done = 0;
  std::size_t cells_total = 0;
  std::size_t captures = 0;
  std::size_t gaps = 0;
  bool worker_alive = false;

  static StatusSnapshot of(const AuditSession& s);
};

nlohmann::json to_json(const StatusSnapshot& s);

// Status of sessions that have been run in this process, plus their worker
// threads. Readers get copies; the worker publishes after every cell.
class SessionRegistry {
 public:
  using Work = std::function<void(const std::atomic<bool>& stop)>;

  SessionRegistry() = default;
  ~SessionRegistry();
  SessionRegistry(const SessionRegistry&) = delete;
  SessionRegistry& operator=(const SessionRegistry&) = delete;

  void publish(const StatusSnapshot& snapshot);
  std::optional<StatusSnapshot> snapshot(const std::string& id) const;

  // Runs `work` on a dedicated thread. kConflict when a worker for the
  // session is still alive or the registry is shutting down.
  void launch(const std::string& id, Work work);
  bool running(const std::string& id) const;
  // Blocks until the session's worker has finished.
  void wait(const std::string& id);
  // Asks every worker to stop after its current cell and joins them.
  void shutdown();

 private:
  struct Worker {
    std::thread thread;
    std::atomic<bool> done{false};
  };

  void reap_locked();

  mutable std::mutex mu_;
  std::map<std::string, StatusSnapshot> status_;
  std::map<std::string, std::unique_ptr<Worker>> workers_;
  std::atomic<bool> stop_{false};
};

}  // namespace pas::audit
