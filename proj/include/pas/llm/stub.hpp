#pragma once

#include <memory>

#include <nlohmann/json.hpp>

#include "pas/llm/gateway.hpp"

namespace pas::llm {

// Rule-based provider: a pure function of (request, seed) over the lexicon.
//
// Task inputs are read from the prompt's triple-quoted blocks:
//   base_persona       block 0 = free-text guidance
//   persona_variant    block 0 = base persona JSON; the target level is the
//                      level phrase occurring most often outside that block
//   longitudinal_data  block 0 = variant persona JSON
//   alignment_score    block 0 = attribute name, last block = ad description
class StubGateway final : public Gateway {
 public:
  StubGateway(const ProviderConfig& cfg, std::shared_ptr<const Lexicon> lexicon);

  const Lexicon& lexicon() const { return *lexicon_; }

  // Keyword-anchor rating before noise; exposed for oracles and tests.
  double base_score(AttributeKind kind, std::string_view description) const;

 private:
  std::string do_complete(const CompletionRequest& req) override;
  std::string do_describe(const ImagePayload& payload,
                          std::optional<std::uint64_t> seed) override;

  nlohmann::json base_persona(std::string_view guidance, std::uint64_t seed) const;
  nlohmann::json variant(const nlohmann::json& base, AttributeKind kind,
                         std::size_t level, std::uint64_t seed) const;
  nlohmann::json longitudinal(const nlohmann::json& persona, std::uint64_t seed) const;
  nlohmann::json rating(std::string_view prompt, std::string_view attribute_text,
                        std::string_view description, std::uint64_t seed) const;

  std::shared_ptr<const Lexicon> lexicon_;
  double noise_sigma_;
};

// One-paragraph profile text from persona fields.
std::string describe_persona(const nlohmann::json& fields);

}  // namespace pas::llm
