#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pas/adsim/simulator.hpp"
#include "pas/attributes.hpp"
#include "pas/scorer/alignment.hpp"
#include "pas/stats.hpp"

namespace pas::audit {

inline constexpr int kSessionSchemaVersion = 1;

// Target selectors understood by the default target factory.
inline constexpr std::string_view kTargetSimulator = "simulator";
inline constexpr std::string_view kTargetSimulatorHttp = "simulator-http";
inline constexpr std::string_view kTargetLive = "live";

struct AuditConfig {
  // One or more persona sets. Several sets at the same level make up the
  // similar-persona groups.
  std::vector<std::string> persona_sets;
  // Only these levels of every set are visited; empty means all three.
  std::vector<std::string> levels;
  std::vector<std::string> sites;
  int rounds = 3;
  AttributeKind attribute = AttributeKind::kAge;
  std::string target = std::string(kTargetSimulator);
  std::string target_url;  // simulator-http and live targets
  int repetitions_per_ad = 5;
  std::uint64_t seed = 0;  // rater and describer seeds
  adsim::SimPolicy sim;
  int fetch_retries = 2;
  // Between visits. Live targets default to 2 s when unset.
  std::optional<double> request_delay_s;
  stats::Correction correction = stats::Correction::kHolm;

  double effective_delay_s() const;
  // Throws kInvalidArgument with {"field": "/<name>"} in the detail.
  void validate() const;
  bool operator==(const AuditConfig&) const;
};

// Strict reader used at the API boundary: unknown keys and wrong types are
// rejected with the offending field path.
AuditConfig parse_audit_config(const nlohmann::json& j);
nlohmann::json to_json(const AuditConfig& c);

enum class SessionStatus { kPending, kRunning, kDone, kFailed };
std::string_view to_string(SessionStatus s);
SessionStatus parse_session_status(std::string_view text);

// One visited persona variant, in visit order.
struct PlannedVariant {
  std::string variant_id;
  std::string persona_set;
  std::string level;
  std::string label;

  bool operator==(const PlannedVariant&) const = default;
};

struct CellKey {
  std::string variant_id;
  std::string site;
  int round = 0;

  auto operator<=>(const CellKey&) const = default;
};

// Outcome of one (variant, site, round) visit. A failed visit is a gap.
struct CellRecord {
  CellKey key;
  bool ok = false;
  int attempts = 0;
  std::string error;
  std::string page_url;
  std::string context_id;
  std::vector<std::string> capture_ids;
  std::vector<std::string> warnings;

  bool operator==(const CellRecord&) const = default;
};

struct AdCapture {
  std::string id;  // "cap-001", unique within the session
  std::string variant_id;
  std::string persona_set;
  std::string level;
  std::string site;
  int round = 0;
  std::string page_url;
  std::string slot_key;
  std::string element_path;
  std::string context_id;
  std::string payload;  // ad markup
  std::string description;
  // Set when describing or rating failed for every repetition.
  std::string error;

  bool operator==(const AdCapture&) const = default;
};

struct ScorePoint {
  std::string capture_id;
  double score = 0.0;
  int repetition_index = 0;

  bool operator==(const ScorePoint&) const = default;
};

struct VariantScores {
  std::string label;
  std::string variant_id;
  std::string persona_set;
  std::string level;
  std::vector<ScorePoint> points;
  std::vector<double> scores;         // every non-failed sample
  std::vector<double> capture_means;  // one per scored capture; KW input
  stats::NormalFit fit;
  bool sufficient = false;

  bool operator==(const VariantScores&) const = default;
};

struct PairMark {
  std::string label_a;
  std::string label_b;
  double adjusted_p = 1.0;
  std::string mark;  // "**", "*" or ""

  bool operator==(const PairMark&) const = default;
};

// Kruskal-Wallis across variants of different sets sharing one level.
struct SimilarCheck {
  std::string level;
  std::vector<std::string> labels;
  std::optional<stats::KWResult> kw;
  bool consistent = false;  // p > 0.1

  bool operator==(const SimilarCheck&) const = default;
};

struct Gap {
  CellKey cell;
  std::string error;

  bool operator==(const Gap&) const = default;
};

struct DistributionReport {
  AttributeKind attribute = AttributeKind::kAge;
  std::vector<VariantScores> per_variant;
  std::optional<stats::KWResult> kw;
  std::optional<stats::PosthocResult> posthoc;
  std::vector<PairMark> significance_marks;
  std::vector<SimilarCheck> similar_persona;
  std::vector<Gap> gaps;
  std::vector<std::string> flags;
  bool partial = false;

  bool operator==(const DistributionReport&) const = default;
};

struct AuditSession {
  std::string id;
  AuditConfig config;
  SessionStatus status = SessionStatus::kPending;
  double progress = 0.0;
  std::string failure_reason;
  std::vector<PlannedVariant> variants;
  std::vector<CellRecord> cells;
  std::vector<AdCapture> captures;
  std::vector<scorer::AlignmentSample> samples;
  std::optional<DistributionReport> report;
  std::int64_t created_ms = 0;
  std::int64_t updated_ms = 0;

  std::size_t total_cells() const {
    return variants.size() * config.sites.size() * static_cast<std::size_t>(config.rounds);
  }
  std::size_t gap_count() const;
  const AdCapture* capture(std::string_view id) const;
  bool operator==(const AuditSession&) const = default;
};

// Every (variant, site, round) cell in visit order.
std::vector<CellKey> plan_cells(const AuditSession& session);

void to_json(nlohmann::json& j, const CellKey& k);
void from_json(const nlohmann::json& j, CellKey& k);
void to_json(nlohmann::json& j, const PlannedVariant& v);
void from_json(const nlohmann::json& j, PlannedVariant& v);
void to_json(nlohmann::json& j, const CellRecord& c);
void from_json(const nlohmann::json& j, CellRecord& c);
void to_json(nlohmann::json& j, const AdCapture& c);
void from_json(const nlohmann::json& j, AdCapture& c);
void to_json(nlohmann::json& j, const DistributionReport& r);
void from_json(const nlohmann::json& j, DistributionReport& r);

}  // namespace pas::audit
