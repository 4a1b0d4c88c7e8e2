#pragma once

#include <string>
#include <vector>

#include "pas/profile/browser_profile.hpp"

namespace pas::profile {

inline constexpr int kHistoryStoreVersion = 1;

struct HistoryStoreCounts {
  std::size_t url_rows = 0;
  std::size_t visit_rows = 0;
};

// Writes an SQLite file with tables urls(id,url,title) and
// visits(id,url_id,visit_time). An existing file at `path` is replaced.
HistoryStoreCounts write_history_store(const std::vector<HistoryRecord>& history,
                                       const std::string& path);

// Records ordered by urls.id, visits ascending by visit_time.
std::vector<HistoryRecord> read_history_store(const std::string& path);

HistoryStoreCounts count_history_store(const std::string& path);

}  // namespace pas::profile
