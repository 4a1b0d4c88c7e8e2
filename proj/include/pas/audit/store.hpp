#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pas/audit/types.hpp"

namespace pas::audit {

// Session directory:
//   session.json        config, status, plan, cell records
//   captures/NNN.json   one capture (payload kept in NNN.html)
//   samples.json        alignment samples
//   report.json         distribution report, once Done
void persist_session(const AuditSession& session, const std::string& dir);
// Throws kSchemaVersion for documents written by another schema version and
// kNotFound when there is no session.json.
AuditSession load_session(const std::string& dir);

// Incremental writers used while a session runs.
void write_session_state(const AuditSession& session, const std::string& dir);
void write_capture(const AdCapture& capture, const std::string& dir);
void write_samples(const AuditSession& session, const std::string& dir);
void write_report(const DistributionReport& report, const std::string& dir);
void remove_capture(const std::string& capture_id, const std::string& dir);

// Sessions under <root>/sessions/<id>.
class SessionStore {
 public:
  explicit SessionStore(std::string root);

  std::string directory(const std::string& session_id) const;
  bool exists(const std::string& session_id) const;
  void save(const AuditSession& session) const;
  AuditSession load(const std::string& session_id) const;
  std::vector<std::string> ids() const;

  const std::string& root() const { return root_; }

 private:
  std::string root_;
};

void check_session_id(const std::string& id);

// Capture file stem: "cap-012" -> "012".
std::string capture_stem(const std::string& capture_id);
std::string capture_id(std::size_t index);

std::int64_t now_epoch_ms();

}  // namespace pas::audit
