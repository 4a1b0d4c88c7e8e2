#include "pas/llm/stub.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <regex>
#include <set>

#include "pas/error.hpp"
#include "pas/html/parser.hpp"
#include "pas/llm/task_schemas.hpp"
#include "pas/util/hash.hpp"
#include "pas/util/text.hpp"

namespace pas::llm {

namespace {

using nlohmann::json;

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  if (v.empty()) throw Error(ErrorCode::kInternal, "stub: empty lexicon pool");
  return v[rng() % v.size()];
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

bool mentions_any(std::string_view text, std::initializer_list<std::string_view> phrases) {
  for (auto p : phrases) {
    if (util::contains_phrase(text, p)) return true;
  }
  return false;
}

std::string format_money(double amount) {
  auto whole = static_cast<long long>(std::llround(amount));
  std::string digits = std::to_string(whole);
  std::string out;
  int count = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    if (count > 0 && count % 3 == 0) out += ',';
    out += *it;
    ++count;
  }
  std::reverse(out.begin(), out.end());
  return "$" + out;
}

std::string with_article(const std::string& phrase) {
  if (phrase.empty()) return phrase;
  if (phrase.rfind("some ", 0) == 0) return phrase;
  const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(phrase[0])));
  const bool vowel = c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
  return (vowel ? "an " : "a ") + phrase;
}

const Sector* sector_for_title(const Lexicon& lex, std::string_view occupation) {
  const std::string occ = util::to_lower(occupation);
  for (const auto& s : lex.sectors) {
    for (const auto& t : s.titles) {
      if (occ.find(util::to_lower(t)) != std::string::npos) return &s;
    }
  }
  for (const auto& s : lex.sectors) {
    for (const auto& k : s.keywords) {
      if (util::contains_phrase(occ, k)) return &s;
    }
  }
  return nullptr;
}

std::string street_address(const Town& town, std::mt19937_64& rng) {
  return std::to_string(uniform_int(rng, 100, 2999)) + " " + pick(town.streets, rng) +
         ", " + town.locality() + " " + town.zip;
}

std::uint64_t task_seed(std::string_view text, std::optional<std::uint64_t> seed) {
  return util::mix_seed(util::fnv1a64(text), seed.value_or(0));
}

}  // namespace

std::string describe_persona(const json& f) {
  const std::string gender = f.value("gender", std::string());
  const auto level = gender_level(gender);
  std::string noun = "person";
  std::string subject = "They";
  bool plural = true;
  if (level == "male") {
    noun = "man";
    subject = "He";
    plural = false;
  } else if (level == "female") {
    noun = "woman";
    subject = "She";
    plural = false;
  } else if (level == "non-binary") {
    noun = "non-binary person";
  }
  auto verb = [&](std::string_view v) {
    return plural ? std::string(v) : std::string(v) + "s";
  };

  std::string out = f.value("name", std::string("This person")) + " is a " +
                    std::to_string(f.value("age", 0)) + "-year-old ";
  const std::string ethnicity = f.value("ethnicity", std::string());
  if (!ethnicity.empty()) out += ethnicity + " ";
  const std::string marital = f.value("marital_status", std::string());
  if (marital == "married") out += "married ";
  out += noun + " living in " + f.value("address", std::string()) + ". ";
  out += subject + " " + (plural ? "have " : "has ") +
         with_article(f.value("education", std::string("no degree"))) + " and " +
         verb("work") + " as " + with_article(f.value("occupation", std::string("employee"))) +
         " with an annual income of " + format_money(f.value("annual_income", 0.0)) + ".";
  if (f.contains("interests") && f["interests"].is_array() && !f["interests"].empty()) {
    const auto interests = f["interests"].get<std::vector<std::string>>();
    std::string list;
    for (std::size_t i = 0; i < interests.size(); ++i) {
      if (i > 0) list += (i + 1 == interests.size()) ? " and " : ", ";
      list += interests[i];
    }
    out += " " + subject + " " + verb("enjoy") + " " + list + ".";
  }
  return out;
}

StubGateway::StubGateway(const ProviderConfig& cfg, std::shared_ptr<const Lexicon> lexicon)
    : Gateway(cfg.max_concurrency),
      lexicon_(std::move(lexicon)),
      noise_sigma_(cfg.stub_noise_sigma) {
  if (!lexicon_) throw Error(ErrorCode::kInvalidArgument, "stub gateway needs a lexicon");
}

std::string StubGateway::do_complete(const CompletionRequest& req) {
  const auto blocks = util::quoted_blocks(req.prompt);
  const std::string task = req.response_schema ? req.response_schema->name : std::string();
  const std::uint64_t seed = req.seed.value_or(0);

  if (task == kBasePersonaTask) {
    const std::string_view guidance = blocks.empty() ? std::string_view(req.prompt) : blocks[0];
    return base_persona(guidance, seed).dump();
  }
  if (task == kPersonaVariantTask || task == kLongitudinalTask) {
    if (blocks.empty()) {
      throw Error(ErrorCode::kStructuredOutput, "stub: prompt carries no persona block",
                  {{"raw", req.prompt}});
    }
    const auto persona = json::parse(blocks[0], nullptr, false);
    if (!persona.is_object()) {
      throw Error(ErrorCode::kStructuredOutput, "stub: persona block is not JSON",
                  {{"raw", std::string(blocks[0])}});
    }
    if (task == kLongitudinalTask) return longitudinal(persona, seed).dump();

    // Level phrase that dominates the instruction text.
    std::string rest = req.prompt;
    const auto at = rest.find(blocks[0]);
    if (at != std::string::npos) rest.erase(at, blocks[0].size());
    std::size_t best = 0;
    std::optional<std::pair<AttributeKind, std::size_t>> target;
    for (auto kind : kAllAttributes) {
      const auto& attr = attribute(kind);
      for (std::size_t i = 0; i < attr.levels.size(); ++i) {
        const auto n = util::count_phrase(rest, level_phrase(kind, attr.levels[i]));
        if (n > best) {
          best = n;
          target = {kind, i};
        }
      }
    }
    if (!target) {
      throw Error(ErrorCode::kStructuredOutput,
                  "stub: no privacy attribute level named in prompt", {{"raw", req.prompt}});
    }
    return variant(persona, target->first, target->second, seed).dump();
  }
  if (task == kAlignmentTask) {
    if (blocks.size() < 2) {
      throw Error(ErrorCode::kStructuredOutput,
                  "stub: rating prompt needs attribute and description blocks",
                  {{"raw", req.prompt}});
    }
    return rating(req.prompt, blocks.front(), blocks.back(), seed).dump();
  }

  // Untyped completion: echo the first sentence deterministically.
  const auto text = util::trim(req.prompt);
  const auto stop = text.find_first_of(".\n");
  return "Stub response: " + std::string(text.substr(0, std::min<std::size_t>(stop, 160)));
}

std::string StubGateway::do_describe(const ImagePayload& payload,
                                     std::optional<std::uint64_t> /*seed*/) {
  if (payload.kind != ImagePayload::Kind::kMarkup) {
    throw Error(ErrorCode::kUnsupported,
                "stub provider only describes markup payloads",
                {{"mime_type", payload.mime_type}});
  }
  const auto doc = html::parse(payload.bytes);
  std::vector<std::string> parts;
  std::set<std::string> seen;
  auto add = [&](std::string s) {
    s = std::string(util::trim(s));
    if (s.empty() || !seen.insert(util::to_lower(s)).second) return;
    parts.push_back(std::move(s));
  };
  std::string caption;
  html::for_each_element(*doc.root, [&](const html::Node& n) {
    if (caption.empty()) {
      if (const auto* c = n.attribute("data-caption")) caption = *c;
    }
  });
  add(caption);
  html::for_each_element(*doc.root, [&](const html::Node& n) {
    if (n.tag() == "img") {
      if (const auto* alt = n.attribute("alt")) add(*alt);
    }
    if (const auto* d = n.attribute("aria-description")) add(*d);
  });
  add(doc.root->text_content());
  if (parts.empty()) {
    throw Error(ErrorCode::kUnsupported, "markup payload has no describable content");
  }
  std::string out = "An advertisement";
  out += caption.empty() ? std::string(" showing ") + parts.front() : ": " + caption;
  out += ".";
  for (std::size_t i = 1; i < parts.size(); ++i) {
    out += " " + parts[i];
    if (!parts[i].empty() && parts[i].back() != '.' && parts[i].back() != '!' &&
        parts[i].back() != '?') {
      out += ".";
    }
  }
  return out;
}

json StubGateway::base_persona(std::string_view guidance, std::uint64_t seed) const {
  const Lexicon& lex = *lexicon_;
  std::mt19937_64 rng(task_seed(guidance, seed));
  const std::string g(guidance);
  json p;

  // Age: explicit numbers win over bracket words.
  std::optional<int> age;
  static const std::regex kAgePatterns[] = {
      std::regex(R"((\d{1,3})[- ]years?[- ]old)", std::regex::icase),
      std::regex(R"(\baged?\s+(\d{1,3})\b)", std::regex::icase),
      std::regex(R"(\b(\d{1,3})\s*(?:yo|y/o)\b)", std::regex::icase)};
  for (const auto& re : kAgePatterns) {
    std::smatch m;
    if (std::regex_search(g, m, re)) {
      age = std::stoi(m[1].str());
      break;
    }
  }
  if (!age || *age <= 0) {
    if (mentions_any(g, {"middle-aged", "middle aged", "mid-aged", "midlife"})) {
      age = uniform_int(rng, 40, 52);
    } else if (mentions_any(g, {"young", "college student", "student", "teen", "twenties"})) {
      age = uniform_int(rng, 20, 28);
    } else if (mentions_any(g, {"old", "elderly", "senior", "retired", "retiree"})) {
      age = uniform_int(rng, 65, 75);
    } else {
      age = uniform_int(rng, 25, 58);
    }
  }
  p["age"] = *age;

  std::string gender;
  if (mentions_any(g, {"non-binary", "nonbinary", "enby", "genderqueer"})) {
    gender = "non-binary";
  } else if (mentions_any(g, {"woman", "female", "she", "her", "mother", "wife", "girl", "lady"})) {
    gender = "female";
  } else if (mentions_any(g, {"man", "male", "he", "his", "father", "husband", "guy", "boy"})) {
    gender = "male";
  } else {
    gender = (rng() % 2 == 0) ? "female" : "male";
  }
  p["gender"] = gender;

  if (mentions_any(g, {"married", "wife", "husband"})) {
    p["marital_status"] = "married";
  } else if (mentions_any(g, {"single", "unmarried"})) {
    p["marital_status"] = "single";
  } else if (mentions_any(g, {"divorced"})) {
    p["marital_status"] = "divorced";
  } else if (mentions_any(g, {"widowed", "widow", "widower"})) {
    p["marital_status"] = "widowed";
  } else {
    p["marital_status"] = (rng() % 2 == 0) ? "married" : "single";
  }

  const Sector* sector = nullptr;
  for (const auto& s : lex.sectors) {
    for (const auto& k : s.keywords) {
      if (util::contains_phrase(g, k)) {
        sector = &s;
        break;
      }
    }
    if (sector) break;
  }
  if (!sector) sector = &pick(lex.sectors, rng);

  std::optional<std::size_t> income_idx;
  if (mentions_any(g, {"low income", "low-income", "poor", "minimum wage", "struggling financially"})) {
    income_idx = 0;
  } else if (mentions_any(g, {"middle income", "middle-income", "medium income", "medium-income",
                              "moderate income", "middle class"})) {
    income_idx = 1;
  } else if (mentions_any(g, {"high income", "high-income", "wealthy", "rich", "affluent"})) {
    income_idx = 2;
  }
  std::optional<double> explicit_income;
  {
    static const std::regex kMoney(R"(\$\s?(\d{1,3}(?:,\d{3})+|\d+)(k|K)?)");
    std::smatch m;
    if (std::regex_search(g, m, kMoney)) {
      std::string digits = m[1].str();
      digits.erase(std::remove(digits.begin(), digits.end(), ','), digits.end());
      double v = std::stod(digits);
      if (m[2].matched) v *= 1000.0;
      explicit_income = v;
    }
  }
  if (!income_idx) {
    if (explicit_income) {
      income_idx = *attribute(AttributeKind::kIncomeLevel).level_index(income_level(*explicit_income));
    } else {
      const auto al = age_level(*age);
      income_idx = al == "young" ? 0 : (al == "mid-aged" ? 1 : 1);
    }
  }
  p["occupation"] = sector->titles[*income_idx];
  p["annual_income"] = explicit_income.value_or(sector->incomes[*income_idx]);

  const Town* town = nullptr;
  for (const auto& metro : lex.metros) {
    for (const auto& t : metro.towns) {
      if (util::contains_phrase(g, t.city)) {
        town = &t;
        break;
      }
    }
    if (town) break;
  }
  if (!town) town = &pick(lex.metros, rng).towns[0];
  p["address"] = street_address(*town, rng);

  std::string education;
  if (mentions_any(g, {"phd", "ph.d", "doctorate", "doctoral"})) {
    education = "Ph.D.";
  } else if (mentions_any(g, {"master's", "masters", "mba", "graduate degree"})) {
    education = "master's degree";
  } else if (mentions_any(g, {"bachelor's", "bachelor", "college degree", "college-educated"})) {
    education = "bachelor's degree";
  } else if (mentions_any(g, {"high school", "no degree", "ged"})) {
    education = "high school diploma";
  } else {
    education = *income_idx == 0 ? lex.education_labels[0]
                                 : (*income_idx == 1 ? lex.education_labels[1] : "master's degree");
  }
  p["education"] = education;

  std::string ethnicity;
  if (mentions_any(g, {"black", "african american", "african-american"})) {
    ethnicity = "Black";
  } else if (mentions_any(g, {"hispanic", "latina", "latino", "latinx"})) {
    ethnicity = "Hispanic";
  } else if (mentions_any(g, {"asian", "asian american"})) {
    ethnicity = "Asian";
  } else if (mentions_any(g, {"white", "caucasian"})) {
    ethnicity = "White";
  } else {
    ethnicity = pick(lex.ethnicities, rng);
  }
  p["ethnicity"] = ethnicity;

  std::vector<std::string> interests;
  {
    static const std::regex kLikes(
        R"((?:enjoys|likes|loves|interested in|interests include|hobbies include)\s+([^.;\n]+))",
        std::regex::icase);
    std::smatch m;
    if (std::regex_search(g, m, kLikes)) {
      std::string list = m[1].str();
      for (const auto* sep : {" and ", ", "}) {
        std::size_t pos;
        while ((pos = list.find(sep)) != std::string::npos) list.replace(pos, std::string(sep).size(), "|");
      }
      for (const auto& item : util::split(list, '|')) {
        auto t = std::string(util::trim(item));
        if (!t.empty()) interests.push_back(t);
      }
    }
  }
  if (interests.empty()) {
    std::vector<std::string> pool = lex.interests;
    std::shuffle(pool.begin(), pool.end(), rng);
    interests.assign(pool.begin(), pool.begin() + std::min<std::size_t>(3, pool.size()));
  }
  p["interests"] = interests;

  const auto names_it = lex.first_names.find(gender);
  const auto& first_pool =
      names_it != lex.first_names.end() ? names_it->second : lex.first_names.begin()->second;
  p["name"] = pick(first_pool, rng) + " " + pick(lex.surnames, rng);
  p["guidance"] = g;
  p["description"] = describe_persona(p);
  return p;
}

json StubGateway::variant(const json& base, AttributeKind kind, std::size_t level,
                          std::uint64_t seed) const {
  const Lexicon& lex = *lexicon_;
  const auto& attr = attribute(kind);
  std::mt19937_64 rng(util::mix_seed(util::fnv1a64(base.dump()), seed,
                                     static_cast<std::uint64_t>(kind), level));
  json v = base;
  v.erase("description");
  v.erase("guidance");
  const int age = base.value("age", 30);
  const double income = base.value("annual_income", 0.0);
  const std::string occupation = base.value("occupation", std::string());
  const Sector* sector = sector_for_title(lex, occupation);

  switch (kind) {
    case AttributeKind::kAge: {
      if (age_level(age) == attr.levels[level]) break;
      static constexpr int kAges[] = {22, 48, 68};
      v["age"] = kAges[level];
      if (sector) {
        if (level == 0) {
          v["occupation"] = sector->titles[0];
          v["annual_income"] = sector->incomes[0];
        } else if (level == 1) {
          v["occupation"] = sector->titles[1];
          v["annual_income"] = sector->incomes[1];
        } else {
          v["occupation"] = "part-time " + sector->titles[0];
          v["annual_income"] = std::round(sector->incomes[0] * 0.7 / 1000.0) * 1000.0;
        }
      } else {
        static constexpr double kScale[] = {0.5, 1.0, 0.6};
        v["annual_income"] = std::round(income * kScale[level] / 1000.0) * 1000.0;
      }
      if (level == 0) {
        const auto edu = education_level(base.value("education", std::string()));
        if (edu && *edu != "low") v["education"] = "some college coursework";
      }
      break;
    }
    case AttributeKind::kGender:
      v["gender"] = std::string(attr.levels[level]);
      break;
    case AttributeKind::kLocationUrbanization: {
      const auto address = base.value("address", std::string());
      const auto match = lex.find_town(address);
      if (match && match->level == level) break;
      const Metro& metro = match ? *match->metro : lex.metros.front();
      v["address"] = street_address(metro.towns[level], rng);
      break;
    }
    case AttributeKind::kIncomeLevel: {
      if (income_level(income) == attr.levels[level]) break;
      if (sector) {
        v["occupation"] = sector->titles[level];
        v["annual_income"] = sector->incomes[level];
      } else {
        static constexpr double kIncome[] = {28000.0, 70000.0, 160000.0};
        v["annual_income"] = kIncome[level];
      }
      break;
    }
    case AttributeKind::kEducationLevel: {
      const auto edu = education_level(base.value("education", std::string()));
      if (edu && *edu == attr.levels[level]) break;
      v["education"] = lex.education_labels[level];
      break;
    }
  }
  v["description"] = describe_persona(v);
  return v;
}

json StubGateway::longitudinal(const json& persona, std::uint64_t seed) const {
  const Lexicon& lex = *lexicon_;
  std::mt19937_64 rng(util::mix_seed(util::fnv1a64(persona.dump()), seed, 0x4c4f4e47ULL));

  const std::string age_lvl(age_level(persona.value("age", 30)));
  const std::string gender_lvl(
      gender_level(persona.value("gender", std::string())).value_or("non-binary"));
  const auto town = lex.find_town(persona.value("address", std::string()));
  const std::string location_lvl(
      attribute(AttributeKind::kLocationUrbanization).levels[town ? town->level : 0]);
  const std::string income_lvl(income_level(persona.value("annual_income", 0.0)));
  const std::string education_lvl(
      education_level(persona.value("education", std::string())).value_or("medium"));

  std::vector<UrlEntry> chosen;
  std::set<std::string> seen;
  auto take = [&](const std::string& key, std::size_t n) {
    std::vector<UrlEntry> pool = lex.urls(key);
    std::shuffle(pool.begin(), pool.end(), rng);
    for (const auto& e : pool) {
      if (n == 0) break;
      if (seen.insert(e.url).second) {
        chosen.push_back(e);
        --n;
      }
    }
  };
  take("income:" + income_lvl, 6);
  take("age:" + age_lvl, 4);
  take("location:" + location_lvl, 3);
  take("education:" + education_lvl, 3);
  take("gender:" + gender_lvl, 2);
  if (persona.contains("interests") && persona["interests"].is_array()) {
    for (const auto& interest : persona["interests"]) {
      take("interest:" + util::to_lower(interest.get<std::string>()), 2);
    }
  }
  take("general", 24 > chosen.size() ? 24 - chosen.size() : 0);

  json history = json::array();
  for (const auto& e : chosen) {
    const int visits = uniform_int(rng, 1, 3);
    std::vector<int> minutes_ago;
    for (int i = 0; i < visits; ++i) minutes_ago.push_back(uniform_int(rng, 5, 89 * 1440));
    history.push_back({{"url", e.url}, {"title", e.title}, {"minutes_ago", minutes_ago}});
  }

  auto device_it = lex.devices.find(age_lvl);
  const DeviceProfile device =
      device_it != lex.devices.end() ? device_it->second : lex.devices.begin()->second;

  const bool student = util::to_lower(persona.value("occupation", std::string())).find("student") !=
                           std::string::npos ||
                       age_lvl == "young";
  const bool retired = age_lvl == "old";
  json schedule = json::array();
  for (int day = 0; day < 7; ++day) {
    const bool weekend = day >= 5;
    if (weekend) {
      schedule.push_back({{"weekday", day}, {"start", "09:00"}, {"end", "12:00"}, {"place", "home"}});
      schedule.push_back({{"weekday", day}, {"start", "13:00"}, {"end", "17:00"},
                          {"place", retired ? "community center" : "park"}});
    } else {
      const std::string work = retired ? "community center" : (student ? "campus" : "work");
      schedule.push_back({{"weekday", day}, {"start", "09:00"}, {"end", "17:00"}, {"place", work}});
      schedule.push_back({{"weekday", day}, {"start", "18:00"}, {"end", "23:00"}, {"place", "home"}});
    }
  }

  return {{"user_agent", device.user_agent},
          {"device_class", device.device_class},
          {"history", history},
          {"schedule", schedule}};
}

double StubGateway::base_score(AttributeKind kind, std::string_view description) const {
  auto it = lexicon_->rating_keywords.find(kind);
  if (it == lexicon_->rating_keywords.end()) return 50.0;
  double hits = 0.0;
  double weighted = 0.0;
  for (std::size_t level = 0; level < 3; ++level) {
    for (const auto& phrase : it->second[level]) {
      const auto n = static_cast<double>(util::count_phrase(description, phrase));
      hits += n;
      weighted += n * kLevelAnchors[level];
    }
  }
  return hits > 0.0 ? weighted / hits : 50.0;
}

json StubGateway::rating(std::string_view prompt, std::string_view attribute_text,
                         std::string_view description, std::uint64_t seed) const {
  const auto kind = parse_attribute(attribute_text);
  if (!kind) {
    throw Error(ErrorCode::kStructuredOutput, "stub: unknown attribute in rating prompt",
                {{"raw", std::string(prompt)}});
  }
  double score = base_score(*kind, description);
  if (noise_sigma_ > 0.0) {
    std::mt19937_64 rng(util::mix_seed(util::fnv1a64(prompt), seed, 0x4e4f495345ULL));
    std::normal_distribution<double> noise(0.0, noise_sigma_);
    score = std::clamp(score + noise(rng), 0.0, 100.0);
  }
  return {{"score", score},
          {"rationale", "keyword anchors for " + std::string(display_name(*kind))}};
}

ResponseSchema base_persona_schema() {
  return {std::string(kBasePersonaTask),
          {{"name", FieldType::kString},
           {"age", FieldType::kInteger},
           {"gender", FieldType::kString},
           {"ethnicity", FieldType::kString},
           {"address", FieldType::kString},
           {"occupation", FieldType::kString},
           {"annual_income", FieldType::kNumber},
           {"education", FieldType::kString},
           {"interests", FieldType::kArray},
           {"marital_status", FieldType::kString, false},
           {"description", FieldType::kString, false}}};
}

ResponseSchema persona_variant_schema() {
  auto s = base_persona_schema();
  s.name = std::string(kPersonaVariantTask);
  for (auto& f : s.fields) {
    if (f.name == "description") f.required = true;
  }
  return s;
}

ResponseSchema longitudinal_schema() {
  return {std::string(kLongitudinalTask),
          {{"user_agent", FieldType::kString},
           {"device_class", FieldType::kString},
           {"history", FieldType::kArray},
           {"schedule", FieldType::kArray}}};
}

ResponseSchema alignment_schema() {
  return {std::string(kAlignmentTask),
          {{"score", FieldType::kNumber}, {"rationale", FieldType::kString, false}}};
}

}  // namespace pas::llm
