#pragma once

#include "pas/llm/schema.hpp"

namespace pas::llm {

// Structured-output envelopes shared by the persona generator, the rater and
// the stub provider (which dispatches on ResponseSchema::name).
inline constexpr std::string_view kBasePersonaTask = "base_persona";
inline constexpr std::string_view kPersonaVariantTask = "persona_variant";
inline constexpr std::string_view kLongitudinalTask = "longitudinal_data";
inline constexpr std::string_view kAlignmentTask = "alignment_score";

ResponseSchema base_persona_schema();
ResponseSchema persona_variant_schema();
ResponseSchema longitudinal_schema();
ResponseSchema alignment_schema();

}  // namespace pas::llm
