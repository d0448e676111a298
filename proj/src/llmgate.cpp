#include "phishbench/llmgate.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "phishbench/errors.hpp"
#include "phishbench/hash.hpp"
#include "phishbench/prompts.hpp"
#include "phishbench/textenc.hpp"
#include "phishbench/util.hpp"

namespace phishbench {

namespace {

using ordered_json = nlohmann::ordered_json;

struct ParsedUrl {
  std::string scheme_host_port;  // e.g. "https://api.example.com:8443"
  std::string path;              // e.g. "/v1/chat/completions"
};

ParsedUrl parse_endpoint(const std::string& endpoint) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw ProviderError("malformed endpoint URL (missing scheme): " + endpoint);
  }
  const auto path_start = endpoint.find('/', scheme_end + 3);
  ParsedUrl url;
  if (path_start == std::string::npos) {
    url.scheme_host_port = endpoint;
    url.path = "/";
  } else {
    url.scheme_host_port = endpoint.substr(0, path_start);
    url.path = endpoint.substr(path_start);
  }
  if (url.scheme_host_port.size() == scheme_end + 3) {
    throw ProviderError("malformed endpoint URL (empty host): " + endpoint);
  }
  return url;
}

std::string build_request_body(const ProviderConfig& config, const ChatRequest& request) {
  ordered_json body;
  body["model"] = config.model_id;
  body["temperature"] = request.temperature.value_or(config.temperature);
  body["messages"] = ordered_json::array();
  body["messages"].push_back({{"role", "system"}, {"content", request.system}});
  body["messages"].push_back({{"role", "user"}, {"content", request.user}});
  return body.dump();
}

struct ParsedPayload {
  std::string text;
  std::optional<long> prompt_tokens;
  std::optional<long> completion_tokens;
};

ParsedPayload parse_payload(const std::string& body) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed provider payload (not JSON): ") +
                        e.what());
  }
  ParsedPayload out;
  try {
    out.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ProviderError("malformed provider payload (missing choices[0].message.content)");
  }
  if (out.text.empty()) {
    throw ProviderError("provider returned an empty completion");
  }
  if (doc.contains("usage") && doc["usage"].is_object()) {
    const auto& usage = doc["usage"];
    if (usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number_integer()) {
      out.prompt_tokens = usage["prompt_tokens"].get<long>();
    }
    if (usage.contains("completion_tokens") &&
        usage["completion_tokens"].is_number_integer()) {
      out.completion_tokens = usage["completion_tokens"].get<long>();
    }
  }
  return out;
}

bool retryable(int status) {
  return status == 0 || status == 429 || (status >= 500 && status <= 599);
}

std::string format_temperature(double t) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", t);
  return buffer;
}

// ---- stub provider -------------------------------------------------------

/// The quoted email inside a rendered prompt: the LAST labeled-field block
/// (few-shot prompts contain earlier blocks inside the worked examples).
struct QuotedEmail {
  std::string subject;
  std::string body;
  std::string sender;
  std::string receiver;
};

std::optional<QuotedEmail> extract_quoted_email(const std::string& user_text) {
  const std::string subject_tag = "SUBJECT: ";
  std::size_t subject_pos = user_text.rfind("\nSUBJECT: ");
  if (subject_pos != std::string::npos) {
    ++subject_pos;
  } else if (user_text.rfind(subject_tag, 0) == 0) {
    subject_pos = 0;
  } else {
    return std::nullopt;
  }

  QuotedEmail email;
  const std::size_t subject_end = user_text.find('\n', subject_pos);
  if (subject_end == std::string::npos) return std::nullopt;
  email.subject = user_text.substr(subject_pos + subject_tag.size(),
                                   subject_end - subject_pos - subject_tag.size());

  const std::string body_tag = "BODY:\n";
  const std::size_t body_pos = user_text.find(body_tag, subject_end);
  if (body_pos == std::string::npos) return std::nullopt;
  const std::size_t body_start = body_pos + body_tag.size();
  const std::string sender_tag = "\nSENDER: ";
  const std::size_t sender_pos = user_text.find(sender_tag, body_start);
  if (sender_pos == std::string::npos) return std::nullopt;
  email.body = user_text.substr(body_start, sender_pos - body_start);

  const std::size_t sender_start = sender_pos + sender_tag.size();
  const std::size_t sender_end = user_text.find('\n', sender_start);
  if (sender_end == std::string::npos) return std::nullopt;
  email.sender = user_text.substr(sender_start, sender_end - sender_start);

  const std::string receiver_tag = "RECEIVER: ";
  const std::size_t receiver_pos = user_text.find(receiver_tag, sender_end);
  if (receiver_pos == std::string::npos) return std::nullopt;
  const std::size_t receiver_start = receiver_pos + receiver_tag.size();
  std::size_t receiver_end = user_text.find('\n', receiver_start);
  if (receiver_end == std::string::npos) receiver_end = user_text.size();
  email.receiver = user_text.substr(receiver_start, receiver_end - receiver_start);
  return email;
}

bool contains_suspicious_token(const std::string& text) {
  TokenizerConfig config;
  config.min_token_length = 1;
  const auto tokens = tokenize(text, config);
  for (const auto& token : tokens) {
    for (const auto& suspicious : prompts::suspicious_tokens()) {
      if (token == suspicious) return true;
    }
  }
  return false;
}

/// Case-insensitive whole-token synonym substitution; replacement is the
/// lowercase synonym regardless of the original casing.
std::string substitute_suspicious(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_ascii_alnum(text[i])) {
      out.push_back(text[i]);
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && is_ascii_alnum(text[end])) ++end;
    const std::string token = text.substr(i, end - i);
    const std::string lowered = to_lower(token);
    auto it = prompts::neutral_synonyms().find(lowered);
    out += (it != prompts::neutral_synonyms().end()) ? it->second : token;
    i = end;
  }
  return out;
}

std::string local_part(const std::string& address) {
  const std::size_t at = address.find('@');
  return at == std::string::npos ? address : address.substr(0, at);
}

ChatResponse stub_classify(const QuotedEmail& email) {
  ChatResponse response;
  if (contains_suspicious_token(email.subject + " " + email.body)) {
    response.text = "PHISHING The message relies on pressure wording typical of "
                    "credential and payment lures.";
  } else {
    response.text = "LEGITIMATE The message reads like routine correspondence "
                    "without pressure wording.";
  }
  return response;
}

ChatResponse stub_rephrase(const QuotedEmail& email) {
  const std::string greeting = "Dear " + local_part(email.receiver) + ",";
  std::string body = substitute_suspicious(email.body);

  std::string_view trimmed = trim(body);
  const bool already_greeted =
      trimmed.size() >= greeting.size() && trimmed.substr(0, greeting.size()) == greeting;
  if (!already_greeted) {
    body = greeting + "\n\n" + body;
  }

  ChatResponse response;
  response.text = "Subject: " + substitute_suspicious(email.subject) + "\nBody:\n" + body;
  return response;
}

ChatResponse stub_generate(const std::string& user_text) {
  static const char* const kSubjects[] = {
      "Payment verification needed",  "Immediate password check",
      "Account services update",      "Transfer confirmation required",
      "Mailbox upgrade available",    "Urgent account notice",
  };
  static const char* const kOpenings[] = {
      "We could not process your last payment and your account access is on hold.",
      "Your password will expire and your mailbox will be locked.",
      "An urgent review of your account found unusual transfer activity.",
      "Your account upgrade is pending and requires confirmation.",
      "We detected a sign-in that requires immediate verification.",
  };
  static const char* const kRequests[] = {
      "Click the link below and confirm your credentials to continue.",
      "Submit your password on the secure page to restore access.",
      "Select the update option and enter your account confirmation details.",
      "Complete the payment verification form to avoid interruption.",
  };
  static const char* const kSignoffs[] = {
      "Account Services Team", "Security Operations", "Billing Support Desk",
  };

  Xoshiro256StarStar rng(fnv1a64(user_text));
  const auto pick = [&rng](auto& pool) {
    return pool[rng.below(std::size(pool))];
  };

  ChatResponse response;
  response.text = std::string("Subject: ") + pick(kSubjects) + "\nBody:\n" +
                  pick(kOpenings) + " " + pick(kRequests) + "\n" + pick(kSignoffs);
  return response;
}

}  // namespace

ChatResponse stub_complete(const ChatRequest& request) {
  ChatResponse response;
  response.provider = "stub";
  response.model_id = "stub";
  response.latency_ms = 0;
  response.attempts = 1;

  const auto starts_with = [&](const char* prefix) {
    return request.user.rfind(prefix, 0) == 0;
  };

  if (starts_with(prompts::kClassifyDirective)) {
    const auto email = extract_quoted_email(request.user);
    response.text = email ? stub_classify(*email).text
                          : "LEGITIMATE No email content was found in the request.";
  } else if (starts_with(prompts::kRephraseInstruction)) {
    const auto email = extract_quoted_email(request.user);
    if (!email) {
      response.text = "Subject: (none)\nBody:\n(no email content found)";
    } else {
      response.text = stub_rephrase(*email).text;
    }
  } else if (starts_with(prompts::kGenerateDirective)) {
    response.text = stub_generate(request.user).text;
  } else {
    response.text = "Acknowledged.";
  }
  return response;
}

// ---- transport -----------------------------------------------------------

TransportReply HttpTransport::post(const ProviderConfig& config,
                                   const std::string& request_body) {
  const ParsedUrl url = parse_endpoint(config.endpoint);
  httplib::Client client(url.scheme_host_port);
  const auto timeout_ms = static_cast<time_t>(config.timeout_seconds * 1000.0);
  client.set_connection_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
  client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
  client.set_write_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);

  httplib::Headers headers;
  if (!config.api_key_env.empty()) {
    const char* key = std::getenv(config.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw ProviderError("API key environment variable is not set: " +
                          config.api_key_env);
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  auto result = client.Post(url.path, headers, request_body, "application/json");
  if (!result) {
    return TransportReply{0, httplib::to_string(result.error())};
  }
  return TransportReply{result->status, result->body};
}

// ---- cache ---------------------------------------------------------------

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
}

std::string ResponseCache::key_for(const ProviderConfig& config,
                                   const ChatRequest& request) {
  ordered_json parts = {
      config.name,
      config.model_id,
      format_temperature(request.temperature.value_or(config.temperature)),
      request.system,
      request.user,
  };
  return content_hash128(parts.dump());
}

std::optional<ChatResponse> ResponseCache::lookup(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mutex_);
  const auto path = dir_ / (key + ".json");
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  ordered_json doc;
  try {
    doc = ordered_json::parse(read_text_file(path));
  } catch (const Error&) {
    return std::nullopt;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
  ChatResponse response;
  response.text = doc.value("text", "");
  response.provider = doc.value("provider", "");
  response.model_id = doc.value("model_id", "");
  if (doc.contains("prompt_tokens") && !doc["prompt_tokens"].is_null()) {
    response.prompt_tokens = doc["prompt_tokens"].get<long>();
  }
  if (doc.contains("completion_tokens") && !doc["completion_tokens"].is_null()) {
    response.completion_tokens = doc["completion_tokens"].get<long>();
  }
  response.cache_hit = true;
  response.latency_ms = 0;
  response.attempts = 0;
  if (response.text.empty()) return std::nullopt;
  return response;
}

void ResponseCache::store(const std::string& key, const ChatResponse& response) {
  std::lock_guard<std::mutex> lock(mutex_);
  ordered_json doc;
  doc["text"] = response.text;
  doc["provider"] = response.provider;
  doc["model_id"] = response.model_id;
  doc["prompt_tokens"] =
      response.prompt_tokens ? ordered_json(*response.prompt_tokens) : ordered_json();
  doc["completion_tokens"] = response.completion_tokens
                                 ? ordered_json(*response.completion_tokens)
                                 : ordered_json();
  const auto final_path = dir_ / (key + ".json");
  const auto temp_path = dir_ / (key + ".tmp");
  write_text_file(temp_path, doc.dump(2) + "\n");
  std::error_code ec;
  std::filesystem::rename(temp_path, final_path, ec);
  if (ec) {
    throw DataError("cannot write cache entry " + final_path.string() + ": " +
                    ec.message());
  }
}

// ---- gateway -------------------------------------------------------------

ChatGateway::ChatGateway(std::shared_ptr<ChatTransport> transport, Options options)
    : transport_(std::move(transport)),
      sleep_(options.sleep),
      jitter_rng_(derive_seed(options.jitter_seed, "gateway_jitter")) {
  if (options.cache_dir) cache_.emplace(*options.cache_dir);
  if (!sleep_) {
    sleep_ = [](double seconds) {
      std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    };
  }
}

ChatGateway::Gate& ChatGateway::gate_for(const std::string& provider) {
  std::lock_guard<std::mutex> lock(gates_mutex_);
  auto& slot = gates_[provider];
  if (!slot) slot = std::make_unique<Gate>();
  return *slot;
}

double ChatGateway::next_backoff(std::size_t attempt) {
  double unit;
  {
    std::lock_guard<std::mutex> lock(jitter_mutex_);
    unit = jitter_rng_.unit();
  }
  // Base 1 s, factor 2, jitter scaling the delay into [0.5x, 1.0x).
  const double base = std::ldexp(1.0, static_cast<int>(attempt - 1));
  return base * (0.5 + 0.5 * unit);
}

ChatResponse ChatGateway::complete(const ProviderConfig& config,
                                   const ChatRequest& request) {
  if (config.max_concurrent < 1) throw ConfigError("max_concurrent must be >= 1");
  if (!(config.timeout_seconds > 0.0)) throw ConfigError("timeout must be positive");

  std::string key;
  if (cache_) {
    key = ResponseCache::key_for(config, request);
    if (auto hit = cache_->lookup(key)) return *hit;
  }

  ChatResponse response;
  if (config.is_stub()) {
    response = stub_complete(request);
  } else {
    const std::string body = build_request_body(config, request);
    const std::size_t max_attempts = config.max_retries + 1;
    Gate& gate = gate_for(config.name);

    for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
      TransportReply reply;
      const auto started = std::chrono::steady_clock::now();
      {
        std::unique_lock<std::mutex> lock(gate.mutex);
        gate.cv.wait(lock, [&] { return gate.active < config.max_concurrent; });
        ++gate.active;
      }
      try {
        reply = transport_->post(config, body);
      } catch (...) {
        {
          std::lock_guard<std::mutex> lock(gate.mutex);
          --gate.active;
        }
        gate.cv.notify_one();
        throw;
      }
      {
        std::lock_guard<std::mutex> lock(gate.mutex);
        --gate.active;
      }
      gate.cv.notify_one();
      const auto elapsed = std::chrono::steady_clock::now() - started;

      if (reply.status == 200) {
        ParsedPayload payload = parse_payload(reply.body);
        response.text = std::move(payload.text);
        response.prompt_tokens = payload.prompt_tokens;
        response.completion_tokens = payload.completion_tokens;
        response.latency_ms = static_cast<long>(
            std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count());
        response.attempts = attempt;
        break;
      }
      if (reply.status == 401 || reply.status == 403) {
        throw ProviderError("authentication failed (HTTP " +
                            std::to_string(reply.status) + ") for provider " +
                            config.name);
      }
      if (!retryable(reply.status)) {
        throw ProviderError("provider " + config.name + " returned HTTP " +
                            std::to_string(reply.status) + ": " + reply.body);
      }
      if (attempt == max_attempts) {
        throw ProviderError("retries exhausted after " + std::to_string(attempt) +
                            " attempts for provider " + config.name + " (last: " +
                            (reply.status == 0 ? reply.body
                                               : "HTTP " + std::to_string(reply.status)) +
                            ")");
      }
      sleep_(next_backoff(attempt));
    }
  }

  response.provider = config.name;
  response.model_id = config.is_stub() && config.model_id.empty() ? "stub"
                                                                  : config.model_id;
  if (cache_) cache_->store(key, response);
  return response;
}

}  // namespace phishbench
