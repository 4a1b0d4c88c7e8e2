#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "pas/llm/gateway.hpp"

namespace pas::llm {

// Minimal chat-completion client.
//
//   POST <endpoint_url>
//   Authorization: Bearer $<api_key_env>       (only when api_key_env is set)
//   {"model": ..., "messages": [{"role": "user", "content": ...}],
//    "temperature": ..., "max_tokens": ..., "seed": ...?}
//
// Image description adds "image": {"mime_type": ..., "data_base64": ...} to
// the user message. The provider answers {"text": "..."}.
class RemoteChatGateway final : public Gateway {
 public:
  explicit RemoteChatGateway(const ProviderConfig& cfg);

  // Request body for `req`; exposed for wire-format tests.
  nlohmann::json build_body(const CompletionRequest& req) const;

 private:
  std::string do_complete(const CompletionRequest& req) override;
  std::string do_describe(const ImagePayload& payload,
                          std::optional<std::uint64_t> seed) override;
  std::string post(const nlohmann::json& body) const;

  ProviderConfig cfg_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
};

}  // namespace pas::llm
