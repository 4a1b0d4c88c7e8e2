#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>

#include <nlohmann/json.hpp>

#include "pas/llm/lexicon.hpp"
#include "pas/llm/schema.hpp"

namespace pas::llm {

struct CompletionRequest {
  std::string prompt;
  int max_tokens = 1024;
  double temperature = 0.7;  // [0, 2]
  std::optional<std::uint64_t> seed;
  std::optional<ResponseSchema> response_schema;

  void validate() const;
};

enum class ProviderKind { kStub, kRemoteChat };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::kStub;
  std::optional<std::string> endpoint_url;
  std::optional<std::string> model_name;
  // Name of the environment variable holding the API key. The key itself is
  // never stored in configuration.
  std::optional<std::string> api_key_env;
  double request_timeout_s = 60.0;
  int max_concurrency = 4;
  // Stub only: standard deviation of seeded Gaussian noise added to ratings.
  double stub_noise_sigma = 0.0;

  void validate() const;
};

struct ImagePayload {
  enum class Kind { kMarkup, kImage };
  Kind kind = Kind::kMarkup;
  std::string bytes;
  std::string mime_type = "text/html";

  static ImagePayload markup(std::string html) {
    return {Kind::kMarkup, std::move(html), "text/html"};
  }
  static ImagePayload image(std::string data, std::string mime) {
    return {Kind::kImage, std::move(data), std::move(mime)};
  }
};

// Provider-independent front door. Validation, structured-output checking
// and the per-provider concurrency limit live here; providers implement the
// private hooks.
class Gateway {
 public:
  explicit Gateway(int max_concurrency);
  virtual ~Gateway() = default;
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  // Returns validated text. With a response schema the result is the
  // normalized JSON object (compact dump) and has passed validation.
  std::string complete_text(const CompletionRequest& req);
  std::string describe_image(const ImagePayload& payload,
                             std::optional<std::uint64_t> seed = std::nullopt);

 private:
  virtual std::string do_complete(const CompletionRequest& req) = 0;
  virtual std::string do_describe(const ImagePayload& payload,
                                  std::optional<std::uint64_t> seed) = 0;

  std::counting_semaphore<64> slots_;
};

std::shared_ptr<Gateway> make_gateway(const ProviderConfig& cfg,
                                      std::shared_ptr<const Lexicon> lexicon);

// One-shot convenience wrappers.
std::string complete_text(const CompletionRequest& req, const ProviderConfig& cfg);
std::string describe_image(const ImagePayload& payload, const ProviderConfig& cfg);

std::string_view to_string(ProviderKind k);
ProviderKind parse_provider_kind(std::string_view text);

void to_json(nlohmann::json& j, const ProviderConfig& c);
void from_json(const nlohmann::json& j, ProviderConfig& c);

}  // namespace pas::llm
