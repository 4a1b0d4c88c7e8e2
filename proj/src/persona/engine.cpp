#include "pas/persona/engine.hpp"

#include <chrono>

#include "pas/error.hpp"
#include "pas/llm/stub.hpp"
#include "pas/llm/task_schemas.hpp"
#include "pas/util/hash.hpp"
#include "pas/util/text.hpp"

namespace pas::persona {

using nlohmann::json;

namespace {

constexpr std::int64_t kMinuteMs = 60'000;
constexpr std::int64_t kWindowMinutes = 90LL * 24 * 60;

json parse_object(const std::string& text) {
  auto j = json::parse(text, nullptr, false);
  if (!j.is_object()) {
    throw Error(ErrorCode::kStructuredOutput, "gateway output is not a JSON object",
                {{"raw", text}});
  }
  return j;
}

}  // namespace

std::int64_t utc_day_start(std::int64_t epoch_ms) {
  constexpr std::int64_t kDayMs = 86'400'000;
  return epoch_ms - ((epoch_ms % kDayMs) + kDayMs) % kDayMs;
}

EngineOptions EngineOptions::defaults() {
  EngineOptions o;
  o.prompts = llm::PromptTemplates::defaults();
  o.geocoder = std::make_shared<const profile::Geocoder>(profile::Geocoder::load_default());
  o.regions = std::make_shared<const profile::RegionTable>(profile::RegionTable::load_default());
  const auto now = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  o.anchor_time_ms = utc_day_start(now);
  return o;
}

PersonaEngine::PersonaEngine(std::shared_ptr<llm::Gateway> gateway, EngineOptions options)
    : gateway_(std::move(gateway)), options_(std::move(options)) {
  if (!gateway_) throw Error(ErrorCode::kInvalidArgument, "persona engine needs a gateway");
  if (!options_.geocoder || !options_.regions) {
    throw Error(ErrorCode::kInvalidArgument, "persona engine needs geocoder and region tables");
  }
}

BasePersona PersonaEngine::generate_base_persona(std::string_view guidance,
                                                 std::optional<std::uint64_t> seed) const {
  if (util::trim(guidance).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "guidance must be non-empty");
  }
  llm::CompletionRequest req;
  req.prompt = util::render_template(options_.prompts.base_persona,
                                     {{"guidance", std::string(guidance)}});
  req.temperature = options_.temperature;
  req.seed = seed;
  req.response_schema = llm::base_persona_schema();
  const auto fields = parse_object(gateway_->complete_text(req));

  BasePersona p = BasePersona::from_fields(fields);
  p.guidance = std::string(guidance);
  if (p.description.empty()) p.description = llm::describe_persona(p.fields());
  p.validate();
  p.id = p.compute_id();
  return p;
}

PersonaSet PersonaEngine::generate_variants(const BasePersona& base, AttributeKind attribute,
                                            std::uint64_t seed) const {
  base.validate();
  const auto& attr = pas::attribute(attribute);
  PersonaSet set;
  set.attribute = attribute;
  set.seed = seed;
  set.base = base;
  if (set.base.id.empty()) set.base.id = set.base.compute_id();
  set.id = persona_set_id(set.base, attribute, seed);

  json base_doc = base.fields();
  base_doc["description"] = base.description;
  const auto guard = guardrails();

  for (std::size_t i = 0; i < attr.levels.size(); ++i) {
    const std::string level(attr.levels[i]);
    llm::CompletionRequest req;
    req.prompt = util::render_template(
        options_.prompts.persona_variant,
        {{"base persona", base_doc.dump()}, {"privacy attribute", level_phrase(attribute, level)}});
    req.temperature = options_.temperature;
    req.seed = util::mix_seed(seed, i);
    req.response_schema = llm::persona_variant_schema();
    const auto out = parse_object(gateway_->complete_text(req));

    PersonaVariant v;
    v.id = set.id + "-" + level;
    v.base_ref = set.base.id;
    v.attribute = attribute;
    v.level = level;
    v.description = out.value("description", std::string());
    for (auto field : kDemographicFields) {
      const std::string k(field);
      if (out.contains(k)) v.derived_fields[k] = out[k];
    }
    const auto report = validate_variant_consistency(set.base, v, attribute, guard);
    if (!report.pass) {
      throw Error(ErrorCode::kConsistency,
                  "variant '" + level + "' breaks the persona invariants",
                  {{"level", level}, {"report", to_json(report)}});
    }
    if (options_.with_profiles) v.profile = synthesize_longitudinal_data(v, seed);
    set.variants.push_back(std::move(v));
  }
  set.validate();
  return set;
}

profile::BrowserProfile PersonaEngine::synthesize_longitudinal_data(const PersonaVariant& variant,
                                                                    std::uint64_t seed) const {
  json persona_doc = variant.derived_fields;
  persona_doc["description"] = variant.description;
  llm::CompletionRequest req;
  req.prompt = util::render_template(options_.prompts.longitudinal,
                                     {{"persona", persona_doc.dump()}});
  req.temperature = options_.temperature;
  req.seed = util::mix_seed(seed, util::fnv1a64("longitudinal"));
  req.response_schema = llm::longitudinal_schema();
  const auto raw = gateway_->complete_text(req);
  const auto out = parse_object(raw);

  profile::LongitudinalData data;
  data.user_agent = out.value("user_agent", std::string());
  data.device_class = out.value("device_class", std::string());
  for (const auto& h : out["history"]) {
    if (!h.is_object()) continue;
    profile::HistoryRecord r;
    r.url = h.value("url", std::string());
    r.title = h.value("title", std::string());
    if (!profile::valid_url(r.url)) continue;
    if (h.contains("minutes_ago") && h["minutes_ago"].is_array()) {
      for (const auto& m : h["minutes_ago"]) {
        if (!m.is_number()) continue;
        const auto minutes = m.get<std::int64_t>();
        if (minutes < 0 || minutes >= kWindowMinutes) continue;
        r.visit_timestamps.push_back(options_.anchor_time_ms - minutes * kMinuteMs);
      }
    }
    data.history.push_back(std::move(r));
  }
  data.history = profile::normalize_history(std::move(data.history));
  if (data.history.size() < options_.min_history_records) {
    throw Error(ErrorCode::kStructuredOutput,
                "generator returned " + std::to_string(data.history.size()) +
                    " usable history records, need " +
                    std::to_string(options_.min_history_records),
                {{"raw", raw}});
  }
  for (const auto& s : out["schedule"]) {
    if (!s.is_object()) continue;
    profile::ScheduleEntry e;
    e.weekday = s.value("weekday", -1);
    e.start = s.value("start", std::string());
    e.end = s.value("end", std::string());
    e.place = s.value("place", std::string());
    if (e.weekday >= 0 && e.weekday <= 6) data.schedule.push_back(std::move(e));
  }
  return profile::build_browser_profile(variant.derived_fields, data, *options_.geocoder,
                                        *options_.regions, options_.build);
}

}  // namespace pas::persona
