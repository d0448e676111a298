#pragma once

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "phishbench/rng.hpp"

namespace phishbench {

/// One chat-completion endpoint. The provider named "stub" is served by the
/// deterministic offline stub and needs no endpoint, key, or network.
/// API keys are read from the environment variable named here, never from
/// configuration files.
struct ProviderConfig {
  std::string name;
  std::string endpoint;
  std::string model_id;
  std::string api_key_env;
  std::size_t max_retries = 3;
  double timeout_seconds = 60.0;
  double temperature = 0.0;
  std::size_t max_concurrent = 4;

  bool is_stub() const { return name == "stub"; }
};

struct ChatRequest {
  std::string system;
  std::string user;
  std::optional<double> temperature;
};

struct ChatResponse {
  std::string text;
  std::string provider;
  std::string model_id;
  long latency_ms = 0;
  std::optional<long> prompt_tokens;
  std::optional<long> completion_tokens;
  bool cache_hit = false;
  std::size_t attempts = 1;
};

/// Raw HTTP exchange result. status 0 means the request never completed
/// (connect failure, timeout); body then holds the reason.
struct TransportReply {
  int status = 0;
  std::string body;
};

class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  /// Posts a JSON chat-completion request body to config.endpoint.
  virtual TransportReply post(const ProviderConfig& config,
                              const std::string& request_body) = 0;
};

/// Real HTTPS/HTTP transport.
class HttpTransport : public ChatTransport {
 public:
  TransportReply post(const ProviderConfig& config,
                      const std::string& request_body) override;
};

/// Disk cache keyed by hash(provider, model_id, temperature, system, user);
/// one JSON file per key. Writes are serialized and atomic (temp + rename).
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  static std::string key_for(const ProviderConfig& config, const ChatRequest& request);

  std::optional<ChatResponse> lookup(const std::string& key) const;
  void store(const std::string& key, const ChatResponse& response);

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
};

/// Deterministic offline provider. Routing by user-text prefix:
///  - classification directive: answers "PHISHING"/"LEGITIMATE" (plus one
///    reasoning sentence) by scanning the quoted email's subject and body
///    for the fixed suspicious token list;
///  - rephrase instruction: returns the quoted email with suspicious tokens
///    replaced by the fixed neutral synonyms and "Dear <receiver
///    local-part>," prepended (skipped if that greeting already opens the
///    body, which makes stub rephrasing idempotent);
///  - generation directive: synthesizes a phishing email from a seeded
///    grammar keyed on the hash of the user text.
/// Anything else echoes a fixed acknowledgement. Pure function of the
/// request text.
ChatResponse stub_complete(const ChatRequest& request);

struct GatewayOptions {
  /// Cache directory; caching disabled when absent.
  std::optional<std::filesystem::path> cache_dir;
  /// Injectable so tests can observe backoff instead of sleeping.
  std::function<void(double seconds)> sleep;
  std::uint64_t jitter_seed = 0;
};

/// Provider-agnostic gateway: cache consultation, bounded per-provider
/// concurrency, retries with exponential backoff on transient failures
/// (HTTP 429/5xx, network errors), and stub dispatch.
class ChatGateway {
 public:
  using Options = GatewayOptions;

  explicit ChatGateway(std::shared_ptr<ChatTransport> transport,
                       Options options = Options());

  /// Errors: missing API key variable, auth failure (non-retried), retries
  /// exhausted (message carries the attempt count), malformed payload.
  ChatResponse complete(const ProviderConfig& config, const ChatRequest& request);

 private:
  struct Gate {
    std::mutex mutex;
    std::condition_variable cv;
    std::size_t active = 0;
  };

  Gate& gate_for(const std::string& provider);
  double next_backoff(std::size_t attempt);

  std::shared_ptr<ChatTransport> transport_;
  std::optional<ResponseCache> cache_;
  std::function<void(double)> sleep_;
  std::mutex gates_mutex_;
  std::map<std::string, std::unique_ptr<Gate>> gates_;
  std::mutex jitter_mutex_;
  Xoshiro256StarStar jitter_rng_;
};

}  // namespace phishbench
