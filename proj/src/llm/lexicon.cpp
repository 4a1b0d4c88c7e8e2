#include "pas/llm/lexicon.hpp"

#include <nlohmann/json.hpp>

#include "pas/error.hpp"
#include "pas/util/config_paths.hpp"
#include "pas/util/text.hpp"

namespace pas::llm {

namespace {

template <typename T>
std::array<T, 3> triple(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("lexicon: '") + what + "' needs exactly 3 entries");
  }
  return {j[0].get<T>(), j[1].get<T>(), j[2].get<T>()};
}

}  // namespace

Lexicon Lexicon::load(const std::string& path) {
  const auto doc = nlohmann::json::parse(util::read_file(path), nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::kInvalidArgument, "lexicon: malformed JSON in " + path);
  }
  Lexicon lex;
  lex.version = doc.at("version").get<int>();
  if (lex.version != kLexiconVersion) {
    throw Error(ErrorCode::kSchemaVersion,
                "lexicon version " + std::to_string(lex.version) +
                    " is not supported",
                {{"expected", kLexiconVersion}, {"found", lex.version}});
  }

  for (const auto& [attr_key, levels] : doc.at("rating_keywords").items()) {
    const auto kind = parse_attribute_or_throw(attr_key);
    const auto& attr = attribute(kind);
    std::array<std::vector<std::string>, 3> table;
    for (std::size_t i = 0; i < 3; ++i) {
      table[i] = levels.at(std::string(attr.levels[i])).get<std::vector<std::string>>();
    }
    lex.rating_keywords[kind] = std::move(table);
  }

  for (const auto& [k, entries] : doc.at("url_lexicons").items()) {
    auto& list = lex.url_lexicons[k];
    for (const auto& e : entries) {
      list.push_back({e.at("url").get<std::string>(), e.at("title").get<std::string>()});
    }
  }

  lex.first_names = doc.at("first_names").get<std::map<std::string, std::vector<std::string>>>();
  lex.surnames = doc.at("surnames").get<std::vector<std::string>>();
  lex.ethnicities = doc.at("ethnicities").get<std::vector<std::string>>();
  lex.interests = doc.at("interests").get<std::vector<std::string>>();

  for (const auto& s : doc.at("sectors")) {
    Sector sector;
    sector.name = s.at("name").get<std::string>();
    sector.keywords = s.at("keywords").get<std::vector<std::string>>();
    sector.titles = triple<std::string>(s.at("titles"), "titles");
    sector.incomes = triple<double>(s.at("incomes"), "incomes");
    lex.sectors.push_back(std::move(sector));
  }

  const auto& urbanization = attribute(AttributeKind::kLocationUrbanization);
  for (const auto& m : doc.at("metros")) {
    Metro metro;
    metro.name = m.at("name").get<std::string>();
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& t = m.at("towns").at(std::string(urbanization.levels[i]));
      metro.towns[i] = {t.at("city").get<std::string>(), t.at("state").get<std::string>(),
                        t.at("zip").get<std::string>(),
                        t.at("streets").get<std::vector<std::string>>()};
    }
    lex.metros.push_back(std::move(metro));
  }

  lex.education_labels = triple<std::string>(doc.at("education_labels"), "education_labels");
  for (const auto& [level, d] : doc.at("devices").items()) {
    lex.devices[level] = {d.at("device_class").get<std::string>(),
                          d.at("user_agent").get<std::string>()};
  }

  if (lex.metros.empty() || lex.sectors.empty() || lex.surnames.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "lexicon: metros, sectors and surnames must be non-empty");
  }
  return lex;
}

std::shared_ptr<const Lexicon> Lexicon::load_default() {
  return std::make_shared<const Lexicon>(
      load(util::join_path(util::default_config_dir(), "lexicons.json")));
}

const std::vector<UrlEntry>& Lexicon::urls(const std::string& k) const {
  static const std::vector<UrlEntry> kEmpty;
  auto it = url_lexicons.find(k);
  return it == url_lexicons.end() ? kEmpty : it->second;
}

std::optional<Lexicon::TownMatch> Lexicon::find_town(
    std::string_view address) const {
  const std::string addr = util::to_lower(address);
  std::optional<TownMatch> best;
  std::size_t best_len = 0;
  for (const auto& metro : metros) {
    for (std::size_t i = 0; i < 3; ++i) {
      const std::string loc = util::to_lower(metro.towns[i].locality());
      if (loc.size() > best_len && util::contains_phrase(addr, loc)) {
        best = TownMatch{&metro, i};
        best_len = loc.size();
      }
    }
  }
  return best;
}

}  // namespace pas::llm
