#include "pas/profile/history_store.hpp"

#include <cstdio>
#include <map>

#include <sqlite3.h>

#include "pas/error.hpp"

namespace pas::profile {

namespace {

class Db {
 public:
  Db(const std::string& path, int flags) {
    if (sqlite3_open_v2(path.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
      std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
      sqlite3_close(db_);
      throw Error(ErrorCode::kIo, "history store: cannot open '" + path + "': " + msg);
    }
  }
  ~Db() { sqlite3_close(db_); }
  Db(const Db&) = delete;
  Db& operator=(const Db&) = delete;

  void exec(const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
      std::string msg = err ? err : "unknown error";
      sqlite3_free(err);
      throw Error(ErrorCode::kIo, "history store: " + msg);
    }
  }
  sqlite3* get() { return db_; }
  [[noreturn]] void fail(const std::string& what) {
    throw Error(ErrorCode::kIo, "history store: " + what + ": " + sqlite3_errmsg(db_));
  }

 private:
  sqlite3* db_ = nullptr;
};

class Stmt {
 public:
  Stmt(Db& db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db.get(), sql, -1, &stmt_, nullptr) != SQLITE_OK) db.fail("prepare");
  }
  ~Stmt() { sqlite3_finalize(stmt_); }
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;

  sqlite3_stmt* get() { return stmt_; }
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    db_.fail("step");
  }
  void reset() {
    sqlite3_reset(stmt_);
    sqlite3_clear_bindings(stmt_);
  }

 private:
  Db& db_;
  sqlite3_stmt* stmt_ = nullptr;
};

std::string column_text(sqlite3_stmt* s, int col) {
  const auto* p = sqlite3_column_text(s, col);
  return p ? std::string(reinterpret_cast<const char*>(p)) : std::string();
}

}  // namespace

HistoryStoreCounts write_history_store(const std::vector<HistoryRecord>& history,
                                       const std::string& path) {
  std::remove(path.c_str());
  Db db(path, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);
  db.exec("PRAGMA foreign_keys = ON;");
  db.exec("PRAGMA user_version = 1;");
  db.exec(
      "CREATE TABLE urls (id INTEGER PRIMARY KEY, url TEXT NOT NULL, title TEXT NOT NULL);"
      "CREATE TABLE visits (id INTEGER PRIMARY KEY, "
      "url_id INTEGER NOT NULL REFERENCES urls(id), visit_time INTEGER NOT NULL);"
      "CREATE INDEX visits_url_id ON visits(url_id);");
  db.exec("BEGIN;");
  Stmt add_url(db, "INSERT INTO urls (id, url, title) VALUES (?, ?, ?);");
  Stmt add_visit(db, "INSERT INTO visits (url_id, visit_time) VALUES (?, ?);");
  HistoryStoreCounts counts;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& r = history[i];
    const auto id = static_cast<sqlite3_int64>(i + 1);
    sqlite3_bind_int64(add_url.get(), 1, id);
    sqlite3_bind_text(add_url.get(), 2, r.url.c_str(), -1, SQLITE_TRANSIENT);
    sqlite3_bind_text(add_url.get(), 3, r.title.c_str(), -1, SQLITE_TRANSIENT);
    add_url.step();
    add_url.reset();
    ++counts.url_rows;
    for (auto ts : r.visit_timestamps) {
      sqlite3_bind_int64(add_visit.get(), 1, id);
      sqlite3_bind_int64(add_visit.get(), 2, ts);
      add_visit.step();
      add_visit.reset();
      ++counts.visit_rows;
    }
  }
  db.exec("COMMIT;");
  return counts;
}

std::vector<HistoryRecord> read_history_store(const std::string& path) {
  Db db(path, SQLITE_OPEN_READONLY);
  {
    Stmt v(db, "PRAGMA user_version;");
    if (v.step() && sqlite3_column_int(v.get(), 0) != kHistoryStoreVersion) {
      throw Error(ErrorCode::kSchemaVersion, "history store: unsupported user_version",
                  {{"found", sqlite3_column_int(v.get(), 0)},
                   {"expected", kHistoryStoreVersion}});
    }
  }
  std::vector<HistoryRecord> out;
  std::map<sqlite3_int64, std::size_t> index;
  Stmt urls(db, "SELECT id, url, title FROM urls ORDER BY id;");
  while (urls.step()) {
    index[sqlite3_column_int64(urls.get(), 0)] = out.size();
    out.push_back({column_text(urls.get(), 1), column_text(urls.get(), 2), {}});
  }
  Stmt visits(db, "SELECT url_id, visit_time FROM visits ORDER BY url_id, visit_time, id;");
  while (visits.step()) {
    auto it = index.find(sqlite3_column_int64(visits.get(), 0));
    if (it == index.end()) {
      throw Error(ErrorCode::kConsistency, "history store: visit references missing url");
    }
    out[it->second].visit_timestamps.push_back(sqlite3_column_int64(visits.get(), 1));
  }
  return out;
}

HistoryStoreCounts count_history_store(const std::string& path) {
  Db db(path, SQLITE_OPEN_READONLY);
  HistoryStoreCounts c;
  Stmt u(db, "SELECT COUNT(*) FROM urls;");
  if (u.step()) c.url_rows = static_cast<std::size_t>(sqlite3_column_int64(u.get(), 0));
  Stmt v(db, "SELECT COUNT(*) FROM visits;");
  if (v.step()) c.visit_rows = static_cast<std::size_t>(sqlite3_column_int64(v.get(), 0));
  return c;
}

}  // namespace pas::profile
