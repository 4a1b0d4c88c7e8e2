#include "pas/persona/store.hpp"

#include <algorithm>
#include <filesystem>
#include <regex>

#include "pas/error.hpp"
#include "pas/util/text.hpp"

namespace pas::persona {

namespace fs = std::filesystem;

namespace {

void check_id(const std::string& id) {
  static const std::regex kId(R"(^[A-Za-z0-9_-]{1,64}$)");
  if (!std::regex_match(id, kId)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid identifier '" + id + "'");
  }
}

template <typename T>
std::optional<T> load_doc(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  const auto doc = nlohmann::json::parse(util::read_file(path.string()), nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::kIo, "corrupt JSON document '" + path.string() + "'");
  }
  return doc.get<T>();
}

}  // namespace

void write_json_atomic(const std::string& path, const nlohmann::json& doc) {
  const fs::path target(path);
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  const auto tmp = target.string() + ".tmp";
  util::write_file(tmp, doc.dump(2) + "\n");
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot replace '" + path + "': " + ec.message());
}

PersonaStore::PersonaStore(std::string root) : root_(std::move(root)) {}

void PersonaStore::save(const BasePersona& base) const {
  check_id(base.id);
  write_json_atomic((fs::path(root_) / "bases" / (base.id + ".json")).string(), base);
}

void PersonaStore::save(const PersonaSet& set) const {
  check_id(set.id);
  write_json_atomic((fs::path(root_) / "sets" / (set.id + ".json")).string(), set);
}

std::optional<BasePersona> PersonaStore::load_base(const std::string& id) const {
  check_id(id);
  return load_doc<BasePersona>(fs::path(root_) / "bases" / (id + ".json"));
}

std::optional<PersonaSet> PersonaStore::load_set(const std::string& id) const {
  check_id(id);
  return load_doc<PersonaSet>(fs::path(root_) / "sets" / (id + ".json"));
}

std::vector<std::string> PersonaStore::set_ids() const {
  std::vector<std::string> ids;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(fs::path(root_) / "sets", ec)) {
    if (e.path().extension() == ".json") ids.push_back(e.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace pas::persona
