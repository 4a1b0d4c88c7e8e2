#pragma once

#include <string>

namespace pas::llm {

// Plain-text prompt templates with {named} placeholders, one file each in
// the prompt directory (base_persona.txt, persona_variant.txt,
// longitudinal.txt, alignment_rating.txt).
struct PromptTemplates {
  std::string base_persona;      // {guidance}
  std::string persona_variant;   // {base persona}, {privacy attribute}
  std::string longitudinal;      // {persona}
  std::string alignment_rating;  // {attribute}, {low-end label}, {high-end label}, {ad description}

  static PromptTemplates load(const std::string& directory);
  // <config dir>/prompts
  static const PromptTemplates& defaults();
};

}  // namespace pas::llm
