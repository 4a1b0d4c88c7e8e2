#include "pas/llm/gateway.hpp"

#include <algorithm>

#include "pas/error.hpp"
#include "pas/llm/remote.hpp"
#include "pas/llm/stub.hpp"
#include "pas/util/text.hpp"

namespace pas::llm {

namespace {

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<64>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<64>& s_;
};

}  // namespace

void CompletionRequest::validate() const {
  if (util::trim(prompt).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "completion prompt is empty");
  }
  if (max_tokens <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_tokens must be positive");
  }
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be in [0, 2]");
  }
}

void ProviderConfig::validate() const {
  if (kind == ProviderKind::kRemoteChat) {
    if (!endpoint_url || endpoint_url->empty() || !model_name ||
        model_name->empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "remote provider requires endpoint_url and model_name");
    }
  }
  if (max_concurrency < 1 || max_concurrency > 64) {
    throw Error(ErrorCode::kInvalidArgument,
                "max_concurrency must be in [1, 64]");
  }
  if (!(request_timeout_s > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "request_timeout must be positive");
  }
  if (!(stub_noise_sigma >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "stub_noise_sigma must be >= 0");
  }
}

Gateway::Gateway(int max_concurrency)
    : slots_(std::clamp(max_concurrency, 1, 64)) {}

std::string Gateway::complete_text(const CompletionRequest& req) {
  req.validate();
  std::string raw;
  {
    SlotGuard guard(slots_);
    raw = do_complete(req);
  }
  if (!req.response_schema) {
    if (util::trim(raw).empty()) {
      throw Error(ErrorCode::kStructuredOutput, "provider returned empty text",
                  {{"raw", raw}});
    }
    return raw;
  }
  const auto parsed = extract_json_object(raw);
  if (!parsed) {
    throw Error(ErrorCode::kStructuredOutput,
                "provider output contains no JSON object",
                {{"raw", raw}, {"schema", req.response_schema->name}});
  }
  const auto problems = req.response_schema->validate(*parsed);
  if (!problems.empty()) {
    throw Error(ErrorCode::kStructuredOutput,
                "provider output does not match schema '" +
                    req.response_schema->name + "'",
                {{"raw", raw}, {"problems", problems}});
  }
  return parsed->dump();
}

std::string Gateway::describe_image(const ImagePayload& payload,
                                    std::optional<std::uint64_t> seed) {
  if (payload.bytes.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "image payload is empty");
  }
  std::string text;
  {
    SlotGuard guard(slots_);
    text = do_describe(payload, seed);
  }
  if (util::trim(text).empty()) {
    throw Error(ErrorCode::kStructuredOutput, "provider returned an empty description",
                {{"raw", text}});
  }
  return text;
}

std::shared_ptr<Gateway> make_gateway(const ProviderConfig& cfg,
                                      std::shared_ptr<const Lexicon> lexicon) {
  cfg.validate();
  switch (cfg.kind) {
    case ProviderKind::kStub:
      if (!lexicon) lexicon = Lexicon::load_default();
      return std::make_shared<StubGateway>(cfg, std::move(lexicon));
    case ProviderKind::kRemoteChat:
      return std::make_shared<RemoteChatGateway>(cfg);
  }
  throw Error(ErrorCode::kInternal, "unknown provider kind");
}

std::string complete_text(const CompletionRequest& req, const ProviderConfig& cfg) {
  return make_gateway(cfg, nullptr)->complete_text(req);
}

std::string describe_image(const ImagePayload& payload, const ProviderConfig& cfg) {
  return make_gateway(cfg, nullptr)->describe_image(payload);
}

std::string_view to_string(ProviderKind k) {
  return k == ProviderKind::kStub ? "stub" : "remote_chat";
}

ProviderKind parse_provider_kind(std::string_view text) {
  const auto t = util::to_lower(text);
  if (t == "stub") return ProviderKind::kStub;
  if (t == "remote_chat" || t == "remotechat" || t == "remote") {
    return ProviderKind::kRemoteChat;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown provider kind '" + std::string(text) + "'");
}

void to_json(nlohmann::json& j, const ProviderConfig& c) {
  j = {{"kind", std::string(to_string(c.kind))},
       {"request_timeout_s", c.request_timeout_s},
       {"max_concurrency", c.max_concurrency},
       {"stub_noise_sigma", c.stub_noise_sigma}};
  if (c.endpoint_url) j["endpoint_url"] = *c.endpoint_url;
  if (c.model_name) j["model_name"] = *c.model_name;
  if (c.api_key_env) j["api_key_env"] = *c.api_key_env;
}

void from_json(const nlohmann::json& j, ProviderConfig& c) {
  c = ProviderConfig{};
  c.kind = parse_provider_kind(j.value("kind", std::string("stub")));
  if (j.contains("endpoint_url")) c.endpoint_url = j.at("endpoint_url").get<std::string>();
  if (j.contains("model_name")) c.model_name = j.at("model_name").get<std::string>();
  if (j.contains("api_key_env")) c.api_key_env = j.at("api_key_env").get<std::string>();
  c.request_timeout_s = j.value("request_timeout_s", c.request_timeout_s);
  c.max_concurrency = j.value("max_concurrency", c.max_concurrency);
  c.stub_noise_sigma = j.value("stub_noise_sigma", c.stub_noise_sigma);
}

}  // namespace pas::llm
