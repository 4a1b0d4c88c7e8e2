#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pas/attributes.hpp"

namespace pas::llm {

struct UrlEntry {
  std::string url;
  std::string title;
};

// One career path: titles and incomes by seniority (junior, mid, senior).
struct Sector {
  std::string name;
  std::vector<std::string> keywords;
  std::array<std::string, 3> titles;
  std::array<double, 3> incomes{};
};

struct Town {
  std::string city;
  std::string state;
  std::string zip;
  std::vector<std::string> streets;

  std::string locality() const { return city + ", " + state; }
};

struct Metro {
  std::string name;
  // Indexed by LocationUrbanization level: urban, suburb, countryside.
  std::array<Town, 3> towns;
};

struct DeviceProfile {
  std::string device_class;
  std::string user_agent;
};

// Versioned keyword tables backing the deterministic stub provider. The
// same file also feeds the persona generator's name/sector/metro pools.
struct Lexicon {
  int version = 0;
  std::map<AttributeKind, std::array<std::vector<std::string>, 3>>
      rating_keywords;
  // Keys: "<attribute>:<level>", "interest:<name>", "general".
  std::map<std::string, std::vector<UrlEntry>> url_lexicons;
  std::map<std::string, std::vector<std::string>> first_names;  // by gender level
  std::vector<std::string> surnames;
  std::vector<std::string> ethnicities;
  std::vector<std::string> interests;
  std::vector<Sector> sectors;
  std::vector<Metro> metros;
  std::array<std::string, 3> education_labels;  // by education level
  std::map<std::string, DeviceProfile> devices;  // by age level

  static Lexicon load(const std::string& path);
  static std::shared_ptr<const Lexicon> load_default();

  const std::vector<UrlEntry>& urls(const std::string& key) const;

  // Metro/town whose locality ("City, ST") occurs in `address`.
  struct TownMatch {
    const Metro* metro = nullptr;
    std::size_t level = 0;
  };
  std::optional<TownMatch> find_town(std::string_view address) const;
};

inline constexpr int kLexiconVersion = 1;

}  // namespace pas::llm
