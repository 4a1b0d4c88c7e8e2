#include "pas/audit/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pas/error.hpp"

namespace pas::audit {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& message) {
  throw Error(ErrorCode::kInvalidArgument, field + ": " + message, {{"field", field}});
}

bool known_target(std::string_view t) {
  return t == kTargetSimulator || t == kTargetSimulatorHttp || t == kTargetLive;
}

template <typename T>
T take(const json& j, const std::string& name, const char* expected,
       bool (json::*is)() const noexcept) {
  const auto& v = j.at(name);
  if (!(v.*is)()) field_error("/" + name, std::string("expected ") + expected);
  return v.get<T>();
}

std::vector<std::string> string_list(const json& j, const std::string& name) {
  const auto& v = j.at(name);
  if (!v.is_array()) field_error("/" + name, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) field_error("/" + name + "/" + std::to_string(i), "expected a string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

}  // namespace

double AuditConfig::effective_delay_s() const {
  if (request_delay_s) return *request_delay_s;
  return target == kTargetLive ? 2.0 : 0.0;
}

void AuditConfig::validate() const {
  if (persona_sets.empty()) field_error("/persona_sets", "at least one persona set is required");
  if (sites.empty()) field_error("/sites", "at least one site is required");
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i].empty()) field_error("/sites/" + std::to_string(i), "empty site id");
  }
  if (rounds < 1) field_error("/rounds", "must be >= 1");
  if (repetitions_per_ad < 1) field_error("/repetitions_per_ad", "must be >= 1");
  if (fetch_retries < 0) field_error("/fetch_retries", "must be >= 0");
  if (request_delay_s && (!(*request_delay_s >= 0.0) || !std::isfinite(*request_delay_s))) {
    field_error("/request_delay_s", "must be >= 0");
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!pas::attribute(attribute).has_level(levels[i])) {
      field_error("/levels/" + std::to_string(i),
                  "'" + levels[i] + "' is not a level of " + std::string(key(attribute)));
    }
  }
  if (!known_target(target)) field_error("/target", "unknown target '" + target + "'");
  if (target != kTargetSimulator && target_url.empty()) {
    field_error("/target_url", "required for target '" + target + "'");
  }
  try {
    sim.validate();
  } catch (const Error& e) {
    field_error("/sim", e.what());
  }
}

bool AuditConfig::operator==(const AuditConfig& o) const {
  return to_json(*this) == to_json(o);
}

AuditConfig parse_audit_config(const json& j) {
  if (!j.is_object()) field_error("/", "expected an object");
  static const std::set<std::string> known = {
      "persona_sets", "persona_set", "levels",  "sites",         "rounds",
      "attribute",    "target",      "target_url", "repetitions_per_ad", "seed",
      "sim",          "fetch_retries", "request_delay_s", "correction"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) field_error("/" + k, "unknown field");
  }
  AuditConfig c;
  if (j.contains("persona_sets")) {
    c.persona_sets = string_list(j, "persona_sets");
  } else if (j.contains("persona_set")) {
    c.persona_sets = {take<std::string>(j, "persona_set", "a string", &json::is_string)};
  } else {
    field_error("/persona_sets", "required");
  }
  if (!j.contains("sites")) field_error("/sites", "required");
  c.sites = string_list(j, "sites");
  if (!j.contains("attribute")) field_error("/attribute", "required");
  {
    const auto text = take<std::string>(j, "attribute", "a string", &json::is_string);
    auto kind = parse_attribute(text);
    if (!kind) field_error("/attribute", "unknown attribute '" + text + "'");
    c.attribute = *kind;
  }
  {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < c.persona_sets.size(); ++i) {
      if (!seen.insert(c.persona_sets[i]).second) {
        field_error("/persona_sets/" + std::to_string(i), "duplicate persona set");
      }
    }
  }
  if (j.contains("levels")) c.levels = string_list(j, "levels");
  if (j.contains("rounds")) c.rounds = take<int>(j, "rounds", "an integer", &json::is_number_integer);
  if (j.contains("target")) c.target = take<std::string>(j, "target", "a string", &json::is_string);
  if (j.contains("target_url")) {
    c.target_url = take<std::string>(j, "target_url", "a string", &json::is_string);
  }
  if (j.contains("repetitions_per_ad")) {
    c.repetitions_per_ad =
        take<int>(j, "repetitions_per_ad", "an integer", &json::is_number_integer);
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0)) {
      field_error("/seed", "expected a non-negative integer");
    }
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("fetch_retries")) {
    c.fetch_retries = take<int>(j, "fetch_retries", "an integer", &json::is_number_integer);
  }
  if (j.contains("request_delay_s") && !j["request_delay_s"].is_null()) {
    c.request_delay_s = take<double>(j, "request_delay_s", "a number", &json::is_number);
  }
  if (j.contains("correction")) {
    try {
      c.correction =
          stats::parse_correction(take<std::string>(j, "correction", "a string", &json::is_string));
    } catch (const Error& e) {
      field_error("/correction", e.what());
    }
  }
  if (j.contains("sim")) {
    const auto& s = j["sim"];
    if (!s.is_object()) field_error("/sim", "expected an object");
    for (const auto& [k, v] : s.items()) {
      if (k == "bias_strength") {
        if (!v.is_number()) field_error("/sim/bias_strength", "expected a number");
        c.sim.bias_strength = v.get<double>();
      } else if (k == "slots_per_page") {
        if (!v.is_number_integer()) field_error("/sim/slots_per_page", "expected an integer");
        c.sim.slots_per_page = v.get<int>();
      } else if (k == "rng_seed") {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
          if (!v.is_number_unsigned()) field_error("/sim/rng_seed", "expected a non-negative integer");
        }
        c.sim.rng_seed = v.get<std::uint64_t>();
      } else {
        field_error("/sim/" + k, "unknown field");
      }
    }
  }
  c.validate();
  return c;
}

json to_json(const AuditConfig& c) {
  json j = {{"persona_sets", c.persona_sets},
            {"levels", c.levels},
            {"sites", c.sites},
            {"rounds", c.rounds},
            {"attribute", std::string(key(c.attribute))},
            {"target", c.target},
            {"target_url", c.target_url},
            {"repetitions_per_ad", c.repetitions_per_ad},
            {"seed", c.seed},
            {"sim", c.sim},
            {"fetch_retries", c.fetch_retries},
            {"correction", std::string(stats::to_string(c.correction))}};
  j["request_delay_s"] = c.request_delay_s ? json(*c.request_delay_s) : json(nullptr);
  return j;
}

std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::kPending: return "Pending";
    case SessionStatus::kRunning: return "Running";
    case SessionStatus::kDone: return "Done";
    case SessionStatus::kFailed: return "Failed";
  }
  return "Pending";
}

SessionStatus parse_session_status(std::string_view text) {
  for (auto s : {SessionStatus::kPending, SessionStatus::kRunning, SessionStatus::kDone,
                 SessionStatus::kFailed}) {
    if (text == to_string(s)) return s;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown session status '" + std::string(text) + "'");
}

std::size_t AuditSession::gap_count() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const CellRecord& c) { return !c.ok; }));
}

const AdCapture* AuditSession::capture(std::string_view cid) const {
  for (const auto& c : captures) {
    if (c.id == cid) return &c;
  }
  return nullptr;
}

std::vector<CellKey> plan_cells(const AuditSession& session) {
  std::vector<CellKey> out;
  out.reserve(session.total_cells());
  for (const auto& v : session.variants) {
    for (const auto& site : session.config.sites) {
      for (int r = 1; r <= session.config.rounds; ++r) out.push_back({v.variant_id, site, r});
    }
  }
  return out;
}

void to_json(json& j, const CellKey& k) {
  j = {{"variant_id", k.variant_id}, {"site", k.site}, {"round", k.round}};
}

void from_json(const json& j, CellKey& k) {
  k.variant_id = j.at("variant_id").get<std::string>();
  k.site = j.at("site").get<std::string>();
  k.round = j.at("round").get<int>();
}

void to_json(json& j, const PlannedVariant& v) {
  j = {{"variant_id", v.variant_id},
       {"persona_set", v.persona_set},
       {"level", v.level},
       {"label", v.label}};
}

void from_json(const json& j, PlannedVariant& v) {
  v.variant_id = j.at("variant_id").get<std::string>();
  v.persona_set = j.at("persona_set").get<std::string>();
  v.level = j.at("level").get<std::string>();
  v.label = j.at("label").get<std::string>();
}

void to_json(json& j, const CellRecord& c) {
  j = {{"cell", c.key},           {"ok", c.ok},
       {"attempts", c.attempts},  {"error", c.error},
       {"page_url", c.page_url},  {"context_id", c.context_id},
       {"capture_ids", c.capture_ids}, {"warnings", c.warnings}};
}

void from_json(const json& j, CellRecord& c) {
  c.key = j.at("cell").get<CellKey>();
  c.ok = j.at("ok").get<bool>();
  c.attempts = j.at("attempts").get<int>();
  c.error = j.value("error", std::string());
  c.page_url = j.value("page_url", std::string());
  c.context_id = j.value("context_id", std::string());
  c.capture_ids = j.value("capture_ids", std::vector<std::string>{});
  c.warnings = j.value("warnings", std::vector<std::string>{});
}

void to_json(json& j, const AdCapture& c) {
  j = {{"id", c.id},
       {"variant_id", c.variant_id},
       {"persona_set", c.persona_set},
       {"level", c.level},
       {"site", c.site},
       {"round", c.round},
       {"page_url", c.page_url},
       {"slot_key", c.slot_key},
       {"element_path", c.element_path},
       {"context_id", c.context_id},
       {"payload", c.payload},
       {"description", c.description},
       {"error", c.error}};
}

void from_json(const json& j, AdCapture& c) {
  c.id = j.at("id").get<std::string>();
  c.variant_id = j.at("variant_id").get<std::string>();
  c.persona_set = j.at("persona_set").get<std::string>();
  c.level = j.at("level").get<std::string>();
  c.site = j.at("site").get<std::string>();
  c.round = j.at("round").get<int>();
  c.page_url = j.at("page_url").get<std::string>();
  c.slot_key = j.at("slot_key").get<std::string>();
  c.element_path = j.at("element_path").get<std::string>();
  c.context_id = j.value("context_id", std::string());
  c.payload = j.at("payload").get<std::string>();
  c.description = j.value("description", std::string());
  c.error = j.value("error", std::string());
}

namespace {

json kw_json(const std::optional<stats::KWResult>& kw) { return kw ? json(*kw) : json(nullptr); }

std::optional<stats::KWResult> kw_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<stats::KWResult>();
}

}  // namespace

void to_json(json& j, const DistributionReport& r) {
  json variants = json::array();
  for (const auto& v : r.per_variant) {
    json points = json::array();
    for (const auto& p : v.points) {
      points.push_back({{"capture_id", p.capture_id},
                        {"score", p.score},
                        {"repetition_index", p.repetition_index}});
    }
    variants.push_back({{"label", v.label},
                        {"variant_id", v.variant_id},
                        {"persona_set", v.persona_set},
                        {"level", v.level},
                        {"points", points},
                        {"scores", v.scores},
                        {"capture_means", v.capture_means},
                        {"fit", {{"mean", v.fit.mean}, {"std", v.fit.std}}},
                        {"sufficient", v.sufficient}});
  }
  json marks = json::array();
  for (const auto& m : r.significance_marks) {
    marks.push_back({{"label_a", m.label_a},
                     {"label_b", m.label_b},
                     {"adjusted_p", m.adjusted_p},
                     {"mark", m.mark}});
  }
  json similar = json::array();
  for (const auto& s : r.similar_persona) {
    similar.push_back({{"level", s.level},
                       {"labels", s.labels},
                       {"kw", kw_json(s.kw)},
                       {"consistent", s.consistent}});
  }
  json gaps = json::array();
  for (const auto& g : r.gaps) gaps.push_back({{"cell", g.cell}, {"error", g.error}});
  j = {{"attribute", std::string(key(r.attribute))},
       {"per_variant", variants},
       {"kw", kw_json(r.kw)},
       {"posthoc", r.posthoc ? json(*r.posthoc) : json(nullptr)},
       {"significance_marks", marks},
       {"similar_persona", similar},
       {"gaps", gaps},
       {"flags", r.flags},
       {"partial", r.partial}};
}

void from_json(const json& j, DistributionReport& r) {
  r = {};
  r.attribute = parse_attribute_or_throw(j.at("attribute").get<std::string>());
  for (const auto& v : j.at("per_variant")) {
    VariantScores s;
    s.label = v.at("label").get<std::string>();
    s.variant_id = v.at("variant_id").get<std::string>();
    s.persona_set = v.at("persona_set").get<std::string>();
    s.level = v.at("level").get<std::string>();
    for (const auto& p : v.at("points")) {
      s.points.push_back({p.at("capture_id").get<std::string>(), p.at("score").get<double>(),
                          p.at("repetition_index").get<int>()});
    }
    s.scores = v.at("scores").get<std::vector<double>>();
    s.capture_means = v.at("capture_means").get<std::vector<double>>();
    s.fit.mean = v.at("fit").at("mean").get<double>();
    s.fit.std = v.at("fit").at("std").get<double>();
    s.sufficient = v.at("sufficient").get<bool>();
    r.per_variant.push_back(std::move(s));
  }
  r.kw = kw_from(j.at("kw"));
  if (!j.at("posthoc").is_null()) r.posthoc = j.at("posthoc").get<stats::PosthocResult>();
  for (const auto& m : j.at("significance_marks")) {
    r.significance_marks.push_back({m.at("label_a").get<std::string>(),
                                    m.at("label_b").get<std::string>(),
                                    m.at("adjusted_p").get<double>(),
                                    m.at("mark").get<std::string>()});
  }
  for (const auto& s : j.at("similar_persona")) {
    r.similar_persona.push_back({s.at("level").get<std::string>(),
                                 s.at("labels").get<std::vector<std::string>>(),
                                 kw_from(s.at("kw")), s.at("consistent").get<bool>()});
  }
  for (const auto& g : j.at("gaps")) {
    r.gaps.push_back({g.at("cell").get<CellKey>(), g.at("error").get<std::string>()});
  }
  r.flags = j.at("flags").get<std::vector<std::string>>();
  r.partial = j.at("partial").get<bool>();
}

}  // namespace pas::audit
