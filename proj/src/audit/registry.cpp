#include "pas/audit/registry.hpp"

#include "pas/error.hpp"

namespace pas::audit {

StatusSnapshot StatusSnapshot::of(const AuditSession& s) {
  StatusSnapshot out;
  out.id = s.id;
  out.status = s.status;
  out.progress = s.progress;
  out.failure_reason = s.failure_reason;
  out.cells_done = s.cells.size();
  out.cells_total = s.total_cells();
  out.captures = s.captures.size();
  out.gaps = s.gap_count();
  return out;
}

nlohmann::json to_json(const StatusSnapshot& s) {
  nlohmann::json j = {{"id", s.id},
                      {"status", std::string(to_string(s.status))},
                      {"progress", s.progress},
                      {"cells_done", s.cells_done},
                      {"cells_total", s.cells_total},
                      {"captures", s.captures},
                      {"gaps", s.gaps}};
  if (s.status == SessionStatus::kFailed) j["failure_reason"] = s.failure_reason;
  return j;
}

SessionRegistry::~SessionRegistry() { shutdown(); }

void SessionRegistry::publish(const StatusSnapshot& snapshot) {
  std::lock_guard lock(mu_);
  status_[snapshot.id] = snapshot;
}

std::optional<StatusSnapshot> SessionRegistry::snapshot(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = status_.find(id);
  if (it == status_.end()) return std::nullopt;
  auto out = it->second;
  auto w = workers_.find(id);
  out.worker_alive = w != workers_.end() && !w->second->done;
  return out;
}

void SessionRegistry::reap_locked() {
  for (auto it = workers_.begin(); it != workers_.end();) {
    if (it->second->done) {
      if (it->second->thread.joinable()) it->second->thread.join();
      it = workers_.erase(it);
    } else {
      ++it;
    }
  }
}

void SessionRegistry::launch(const std::string& id, Work work) {
  std::lock_guard lock(mu_);
  if (stop_) throw Error(ErrorCode::kConflict, "service is shutting down");
  reap_locked();
  if (workers_.count(id)) {
    throw Error(ErrorCode::kConflict, "session '" + id + "' is already running");
  }
  auto worker = std::make_unique<Worker>();
  Worker* raw = worker.get();
  raw->thread = std::thread([this, raw, work = std::move(work)] {
    try {
      work(stop_);
    } catch (...) {
      // Workers record their own failures in the session; nothing may
      // escape the thread.
    }
    raw->done = true;
  });
  workers_.emplace(id, std::move(worker));
}

bool SessionRegistry::running(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = workers_.find(id);
  return it != workers_.end() && !it->second->done;
}

void SessionRegistry::wait(const std::string& id) {
  std::unique_ptr<Worker> w;
  {
    std::lock_guard lock(mu_);
    auto it = workers_.find(id);
    if (it == workers_.end()) return;
    w = std::move(it->second);
    workers_.erase(it);
  }
  if (w->thread.joinable()) w->thread.join();
}

void SessionRegistry::shutdown() {
  std::map<std::string, std::unique_ptr<Worker>> workers;
  {
    std::lock_guard lock(mu_);
    stop_ = true;
    workers.swap(workers_);
  }
  for (auto& [id, w] : workers) {
    if (w->thread.joinable()) w->thread.join();
  }
}

}  // namespace pas::audit
