#include "pas/audit/store.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <regex>

#include "pas/error.hpp"
#include "pas/persona/store.hpp"
#include "pas/util/text.hpp"

namespace pas::audit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_doc(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    throw Error(ErrorCode::kNotFound, "missing '" + path.string() + "'");
  }
  auto doc = json::parse(util::read_file(path.string()), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::kIo, "corrupt JSON document '" + path.string() + "'");
  }
  return doc;
}

void check_version(const json& doc, const fs::path& path) {
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
    throw Error(ErrorCode::kSchemaVersion, "'" + path.string() + "' has no schema_version",
                {{"file", path.string()}, {"supported", kSessionSchemaVersion}});
  }
  const int v = doc["schema_version"].get<int>();
  if (v != kSessionSchemaVersion) {
    throw Error(ErrorCode::kSchemaVersion,
                "'" + path.string() + "' uses schema version " + std::to_string(v) +
                    "; this build reads version " + std::to_string(kSessionSchemaVersion) +
                    " and has no migration for it",
                {{"file", path.string()}, {"found", v}, {"supported", kSessionSchemaVersion}});
  }
}

json session_doc(const AuditSession& s) {
  return {{"schema_version", kSessionSchemaVersion},
          {"id", s.id},
          {"config", to_json(s.config)},
          {"status", std::string(to_string(s.status))},
          {"progress", s.progress},
          {"failure_reason", s.failure_reason},
          {"variants", s.variants},
          {"cells", s.cells},
          {"capture_count", s.captures.size()},
          {"created_ms", s.created_ms},
          {"updated_ms", s.updated_ms}};
}

bool parse_stem(const std::string& name, std::size_t* index) {
  static const std::regex kName(R"(^([0-9]{3,})\.json$)");
  std::smatch m;
  if (!std::regex_match(name, m, kName)) return false;
  *index = std::stoull(m[1]);
  return true;
}

}  // namespace

std::int64_t now_epoch_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::string capture_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "cap-%03zu", index);
  return buf;
}

std::string capture_stem(const std::string& id) {
  static const std::regex kId(R"(^cap-([0-9]{3,})$)");
  std::smatch m;
  if (!std::regex_match(id, m, kId)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid capture id '" + id + "'");
  }
  return m[1];
}

void check_session_id(const std::string& id) {
  static const std::regex kId(R"(^[A-Za-z0-9_-]{1,64}$)");
  if (!std::regex_match(id, kId)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid session id '" + id + "'");
  }
}

void write_session_state(const AuditSession& s, const std::string& dir) {
  persona::write_json_atomic((fs::path(dir) / "session.json").string(), session_doc(s));
}

void write_capture(const AdCapture& c, const std::string& dir) {
  const auto stem = capture_stem(c.id);
  const fs::path base = fs::path(dir) / "captures";
  std::error_code ec;
  fs::create_directories(base, ec);
  util::write_file((base / (stem + ".html")).string(), c.payload);
  json doc = c;
  doc.erase("payload");
  doc["payload_file"] = stem + ".html";
  doc["schema_version"] = kSessionSchemaVersion;
  persona::write_json_atomic((base / (stem + ".json")).string(), doc);
}

void remove_capture(const std::string& id, const std::string& dir) {
  const auto stem = capture_stem(id);
  std::error_code ec;
  fs::remove(fs::path(dir) / "captures" / (stem + ".json"), ec);
  fs::remove(fs::path(dir) / "captures" / (stem + ".html"), ec);
}

void write_samples(const AuditSession& s, const std::string& dir) {
  persona::write_json_atomic((fs::path(dir) / "samples.json").string(),
                             {{"schema_version", kSessionSchemaVersion}, {"samples", s.samples}});
}

void write_report(const DistributionReport& r, const std::string& dir) {
  persona::write_json_atomic((fs::path(dir) / "report.json").string(),
                             {{"schema_version", kSessionSchemaVersion}, {"report", r}});
}

void persist_session(const AuditSession& s, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "captures", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create '" + dir + "': " + ec.message());
  for (const auto& c : s.captures) write_capture(c, dir);
  write_samples(s, dir);
  if (s.report) {
    write_report(*s.report, dir);
  } else {
    fs::remove(fs::path(dir) / "report.json", ec);
  }
  write_session_state(s, dir);
}

AuditSession load_session(const std::string& dir) {
  const fs::path root(dir);
  const auto doc = read_doc(root / "session.json");
  check_version(doc, root / "session.json");

  AuditSession s;
  try {
    s.id = doc.at("id").get<std::string>();
    s.config = parse_audit_config(doc.at("config"));
    s.status = parse_session_status(doc.at("status").get<std::string>());
    s.progress = doc.at("progress").get<double>();
    s.failure_reason = doc.value("failure_reason", std::string());
    s.variants = doc.at("variants").get<std::vector<PlannedVariant>>();
    s.cells = doc.at("cells").get<std::vector<CellRecord>>();
    s.created_ms = doc.value("created_ms", std::int64_t{0});
    s.updated_ms = doc.value("updated_ms", std::int64_t{0});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, "malformed session.json: " + std::string(e.what()),
                {{"dir", dir}});
  }

  std::vector<std::pair<std::size_t, fs::path>> files;
  std::error_code ec;
  if (fs::is_directory(root / "captures", ec)) {
    for (const auto& entry : fs::directory_iterator(root / "captures")) {
      std::size_t index = 0;
      if (entry.is_regular_file() && parse_stem(entry.path().filename().string(), &index)) {
        files.emplace_back(index, entry.path());
      }
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& [index, path] : files) {
    auto cdoc = read_doc(path);
    check_version(cdoc, path);
    const auto payload_path = path.parent_path() / cdoc.value("payload_file", std::string());
    cdoc["payload"] = cdoc.contains("payload") ? cdoc["payload"]
                                               : json(util::read_file(payload_path.string()));
    try {
      s.captures.push_back(cdoc.get<AdCapture>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kIo, "malformed capture '" + path.string() + "': " + e.what());
    }
  }

  if (fs::exists(root / "samples.json", ec)) {
    const auto sdoc = read_doc(root / "samples.json");
    check_version(sdoc, root / "samples.json");
    s.samples = sdoc.at("samples").get<std::vector<scorer::AlignmentSample>>();
  }
  if (fs::exists(root / "report.json", ec)) {
    const auto rdoc = read_doc(root / "report.json");
    check_version(rdoc, root / "report.json");
    s.report = rdoc.at("report").get<DistributionReport>();
  }
  return s;
}

SessionStore::SessionStore(std::string root) : root_(std::move(root)) {}

std::string SessionStore::directory(const std::string& id) const {
  check_session_id(id);
  return (fs::path(root_) / "sessions" / id).string();
}

bool SessionStore::exists(const std::string& id) const {
  std::error_code ec;
  return fs::exists(fs::path(directory(id)) / "session.json", ec);
}

void SessionStore::save(const AuditSession& s) const { persist_session(s, directory(s.id)); }

AuditSession SessionStore::load(const std::string& id) const {
  if (!exists(id)) throw Error(ErrorCode::kNotFound, "no audit session '" + id + "'");
  return load_session(directory(id));
}

std::vector<std::string> SessionStore::ids() const {
  std::vector<std::string> out;
  std::error_code ec;
  const auto dir = fs::path(root_) / "sessions";
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory() && fs::exists(e.path() / "session.json", ec)) {
      out.push_back(e.path().filename().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace pas::audit
