#include "pas/scorer/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "pas/error.hpp"
#include "pas/llm/prompts.hpp"
#include "pas/llm/task_schemas.hpp"
#include "pas/util/hash.hpp"
#include "pas/util/text.hpp"

namespace pas::scorer {

using nlohmann::json;

std::string build_rating_prompt(const std::string& tmpl, const AdDescription& ad,
                                AttributeKind attribute) {
  const auto& attr = pas::attribute(attribute);
  const auto& t = tmpl.empty() ? llm::PromptTemplates::defaults().alignment_rating : tmpl;
  return util::render_template(
      t, {{"attribute", std::string(display_name(attribute))},
          {"low-end label", level_phrase(attribute, attr.low_end())},
          {"high-end label", level_phrase(attribute, attr.high_end())},
          {"ad description", ad.text}});
}

std::uint64_t rater_seed(std::uint64_t base_seed, std::string_view text, int repetition) {
  return util::mix_seed(base_seed, util::fnv1a64(text), static_cast<std::uint64_t>(repetition));
}

std::vector<AlignmentSample> score_ad(const AdDescription& ad, AttributeKind attribute,
                                      llm::Gateway& gateway, const ScoreOptions& options) {
  if (options.repetitions < 1) {
    throw Error(ErrorCode::kInvalidArgument, "repetitions must be >= 1");
  }
  if (util::trim(ad.text).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "ad description is empty", {{"ad_ref", ad.ad_ref}});
  }
  const auto prompt = build_rating_prompt(options.prompt_template, ad, attribute);
  std::vector<AlignmentSample> out;
  std::optional<Error> last_error;
  for (int rep = 0; rep < options.repetitions; ++rep) {
    AlignmentSample s;
    s.ad_ref = ad.ad_ref;
    s.attribute = attribute;
    s.repetition_index = rep;
    s.rater_seed = rater_seed(options.seed, ad.text, rep);
    llm::CompletionRequest req;
    req.prompt = prompt;
    req.temperature = options.temperature;
    req.max_tokens = 256;
    req.seed = s.rater_seed;
    req.response_schema = llm::alignment_schema();
    try {
      const auto reply = json::parse(gateway.complete_text(req));
      const double score = reply.at("score").get<double>();
      if (!std::isfinite(score) || score < 0.0 || score > 100.0) {
        s.failed = true;
        s.failure = "rating anomaly: score " + reply.at("score").dump() + " outside [0, 100]";
      } else {
        s.score = score;
      }
    } catch (const Error& e) {
      s.failed = true;
      s.failure = std::string(to_string(e.code())) + ": " + e.what();
      last_error = e;
    }
    out.push_back(std::move(s));
  }
  const bool all_failed =
      std::all_of(out.begin(), out.end(), [](const AlignmentSample& s) { return s.failed; });
  if (all_failed) {
    if (last_error) throw *last_error;
    throw Error(ErrorCode::kStructuredOutput, "every rating was out of range",
                {{"ad_ref", ad.ad_ref}, {"failure", out.back().failure}});
  }
  return out;
}

std::vector<AlignmentSample> score_ads(const std::vector<AdDescription>& ads,
                                       AttributeKind attribute, llm::Gateway& gateway,
                                       const ScoreOptions& options) {
  std::vector<std::future<std::vector<AlignmentSample>>> jobs;
  jobs.reserve(ads.size());
  for (const auto& ad : ads) {
    jobs.push_back(std::async(std::launch::async, [&gateway, &options, attribute, ad] {
      return score_ad(ad, attribute, gateway, options);
    }));
  }
  std::vector<AlignmentSample> out;
  for (auto& j : jobs) {
    auto part = j.get();
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

AdDescription describe_ad(std::string ad_ref, const llm::ImagePayload& payload,
                          llm::Gateway& gateway, std::optional<std::uint64_t> seed) {
  AdDescription d{std::move(ad_ref), gateway.describe_image(payload, seed)};
  if (util::trim(d.text).empty()) {
    throw Error(ErrorCode::kStructuredOutput, "empty ad description", {{"ad_ref", d.ad_ref}});
  }
  return d;
}

void to_json(json& j, const AdDescription& d) { j = {{"ad_ref", d.ad_ref}, {"text", d.text}}; }

void from_json(const json& j, AdDescription& d) {
  d.ad_ref = j.at("ad_ref").get<std::string>();
  d.text = j.at("text").get<std::string>();
}

void to_json(json& j, const AlignmentSample& s) {
  j = {{"ad_ref", s.ad_ref},
       {"attribute", s.attribute},
       {"score", s.failed ? json(nullptr) : json(s.score)},
       {"repetition_index", s.repetition_index},
       {"rater_seed", s.rater_seed},
       {"failed", s.failed}};
  if (s.failed) j["failure"] = s.failure;
}

void from_json(const json& j, AlignmentSample& s) {
  s.ad_ref = j.at("ad_ref").get<std::string>();
  s.attribute = j.at("attribute").get<AttributeKind>();
  s.failed = j.value("failed", false);
  s.score = j.at("score").is_null() ? 0.0 : j.at("score").get<double>();
  s.repetition_index = j.value("repetition_index", 0);
  s.rater_seed = j.value("rater_seed", std::uint64_t{0});
  s.failure = j.value("failure", std::string());
}

}  // namespace pas::scorer
