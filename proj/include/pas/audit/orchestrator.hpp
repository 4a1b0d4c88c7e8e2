#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "pas/adid/identifier.hpp"
#include "pas/adsim/catalog.hpp"
#include "pas/audit/store.hpp"
#include "pas/audit/types.hpp"
#include "pas/llm/gateway.hpp"
#include "pas/persona/store.hpp"
#include "pas/profile/target.hpp"

namespace pas::audit {

using TargetFactory =
    std::function<std::unique_ptr<profile::TargetAdapter>(const AuditConfig& config)>;

struct OrchestratorOptions {
  // In-process simulator catalog; the bundled one when null.
  std::shared_ptr<const adsim::Catalog> catalog;
  // Replaces the built-in simulator / simulator-http targets, e.g. to plug in
  // a browser driven through profile::DevToolsAdapter.
  TargetFactory target_factory;
  adid::IdentifyOptions identify;
  std::function<void(double seconds)> sleep;
};

struct RunOptions {
  std::function<void(const AuditSession&)> on_progress;
  // Checked between cells; a stopped session is left Pending and resumable.
  const std::atomic<bool>* stop = nullptr;
  // Forget recorded gaps so their cells are visited again.
  bool retry_gaps = false;
};

// One session at a time per call; several sessions may run concurrently on
// one orchestrator as long as their targets are independent.
class Orchestrator {
 public:
  Orchestrator(std::shared_ptr<llm::Gateway> gateway, persona::PersonaStore personas,
               SessionStore sessions, OrchestratorOptions options = {});

  // Plans the visits and persists a Pending session. kNotFound for a missing
  // persona set, kInvalidArgument for a set of another attribute.
  AuditSession create_session(const AuditConfig& config,
                              std::optional<std::string> session_id = std::nullopt) const;

  // Visits every cell that has no record yet, scoring as it goes, then
  // builds the report. Returns the terminal (or stopped) session.
  AuditSession run_session(const std::string& session_id, const RunOptions& run = {}) const;

  AuditSession run_audit(const AuditConfig& config, const RunOptions& run = {}) const;

  std::unique_ptr<profile::TargetAdapter> make_target(const AuditConfig& config) const;

  const SessionStore& sessions() const { return sessions_; }
  const persona::PersonaStore& personas() const { return personas_; }

 private:
  std::shared_ptr<llm::Gateway> gateway_;
  persona::PersonaStore personas_;
  SessionStore sessions_;
  OrchestratorOptions options_;
};

std::string new_session_id(const AuditConfig& config);

}  // namespace pas::audit
