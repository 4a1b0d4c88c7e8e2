#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "pas/llm/gateway.hpp"
#include "pas/llm/prompts.hpp"
#include "pas/persona/consistency.hpp"
#include "pas/persona/persona.hpp"
#include "pas/profile/builder.hpp"
#include "pas/profile/geocoder.hpp"

namespace pas::persona {

struct EngineOptions {
  llm::PromptTemplates prompts;
  std::shared_ptr<const profile::Geocoder> geocoder;
  std::shared_ptr<const profile::RegionTable> regions;
  profile::BuildOptions build;
  double temperature = 0.7;
  // "Now" for history timestamps; visits are placed at anchor - minutes_ago.
  // Fixing it keeps profiles reproducible.
  std::int64_t anchor_time_ms = 0;
  // Minimum history size accepted from the generator.
  std::size_t min_history_records = 20;
  bool with_profiles = true;

  // Default prompts, geocoder and region tables from the config directory;
  // anchor = start of the current UTC day.
  static EngineOptions defaults();
};

// Stateless apart from its configuration; safe to share across sessions.
class PersonaEngine {
 public:
  PersonaEngine(std::shared_ptr<llm::Gateway> gateway, EngineOptions options);

  BasePersona generate_base_persona(std::string_view guidance,
                                    std::optional<std::uint64_t> seed = std::nullopt) const;

  // Three variants in level order. Each passes validate_variant_consistency
  // or the call throws kConsistency with the field diff in the detail.
  PersonaSet generate_variants(const BasePersona& base, AttributeKind attribute,
                               std::uint64_t seed = 0) const;

  profile::BrowserProfile synthesize_longitudinal_data(const PersonaVariant& variant,
                                                       std::uint64_t seed = 0) const;

  const EngineOptions& options() const { return options_; }
  Guardrails guardrails() const { return {options_.geocoder.get(), true}; }

 private:
  std::shared_ptr<llm::Gateway> gateway_;
  EngineOptions options_;
};

// Start of the UTC day containing `epoch_ms`.
std::int64_t utc_day_start(std::int64_t epoch_ms);

}  // namespace pas::persona
