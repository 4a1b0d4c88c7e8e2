#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pas/persona/persona.hpp"

namespace pas::persona {

// One JSON document per base persona and per persona set:
//   <root>/bases/<id>.json, <root>/sets/<id>.json
class PersonaStore {
 public:
  explicit PersonaStore(std::string root);

  void save(const BasePersona& base) const;
  void save(const PersonaSet& set) const;

  std::optional<BasePersona> load_base(const std::string& id) const;
  std::optional<PersonaSet> load_set(const std::string& id) const;
  std::vector<std::string> set_ids() const;

  const std::string& root() const { return root_; }

 private:
  std::string root_;
};

// Writes via a temporary file and rename so readers never see a torn file.
void write_json_atomic(const std::string& path, const nlohmann::json& doc);

}  // namespace pas::persona
