#include "phishbench/detectors.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <cstring>
#include <sstream>

#include "phishbench/errors.hpp"
#include "phishbench/prompts.hpp"
#include "phishbench/util.hpp"

namespace phishbench {
namespace {

struct ParsedVote {
  Decision vote = Decision::Undecided;
  std::string reasoning;
};

/// First-word protocol: skip to the first alphabetic run, compare it
/// case-insensitively against the two labels, keep the rest as reasoning.
ParsedVote parse_vote(const std::string& text) {
  std::size_t start = 0;
  while (start < text.size() && !std::isalpha(static_cast<unsigned char>(text[start]))) {
    ++start;
  }
  std::size_t end = start;
  while (end < text.size() && std::isalpha(static_cast<unsigned char>(text[end]))) {
    ++end;
  }
  ParsedVote parsed;
  const std::string word = to_lower(std::string_view(text).substr(start, end - start));
  if (word == "phishing") {
    parsed.vote = Decision::Phishing;
  } else if (word == "legitimate") {
    parsed.vote = Decision::Legitimate;
  }
  parsed.reasoning = std::string(trim(std::string_view(text).substr(end)));
  return parsed;
}

std::string_view sysexits_name(int code) {
  switch (code) {
    case 64: return "EX_USAGE";
    case 65: return "EX_DATAERR";
    case 66: return "EX_NOINPUT";
    case 67: return "EX_NOUSER";
    case 68: return "EX_NOHOST";
    case 69: return "EX_UNAVAILABLE";
    case 70: return "EX_SOFTWARE";
    case 71: return "EX_OSERR";
    case 72: return "EX_OSFILE";
    case 73: return "EX_CANTCREAT";
    case 74: return "EX_IOERR";
    case 75: return "EX_TEMPFAIL";
    case 76: return "EX_PROTOCOL";
    case 77: return "EX_NOPERM";
    case 78: return "EX_CONFIG";
    default: return "unknown";
  }
}

class SocketHandle {
 public:
  explicit SocketHandle(int fd) : fd_(fd) {}
  ~SocketHandle() {
    if (fd_ >= 0) ::close(fd_);
  }
  SocketHandle(const SocketHandle&) = delete;
  SocketHandle& operator=(const SocketHandle&) = delete;

  int get() const { return fd_; }

 private:
  int fd_;
};

}  // namespace

std::string_view decision_name(Decision decision) {
  switch (decision) {
    case Decision::Phishing: return "phishing";
    case Decision::Legitimate: return "legitimate";
    case Decision::Undecided: return "undecided";
    case Decision::Error: return "error";
  }
  return "error";
}

LocalModelDetector::LocalModelDetector(TrainedModel model, EncoderBinding binding,
                                       double threshold)
    : model_(std::move(model)), binding_(std::move(binding)), threshold_(threshold) {
  if (binding_.fingerprint() != model_.encoder_fingerprint()) {
    throw DataError("encoder fingerprint mismatch: model was fitted with " +
                    model_.encoder_fingerprint() + " but the supplied encoder is " +
                    binding_.fingerprint());
  }
}

std::string LocalModelDetector::name() const {
  return std::string(model_kind_name(model_.kind()));
}

DetectorVerdict LocalModelDetector::classify(const EmailRecord& record) {
  DetectorVerdict verdict;
  verdict.id = record.id;
  verdict.detector = name();
  try {
    const FeatureVector vec = binding_.encode(record);
    const double score = model_.score(vec);
    verdict.score = score;
    verdict.decision = score >= threshold_ ? Decision::Phishing : Decision::Legitimate;
  } catch (const std::exception& e) {
    verdict.decision = Decision::Error;
    verdict.rationale = e.what();
  }
  return verdict;
}

LlmDetector::LlmDetector(ProviderConfig provider, std::shared_ptr<ChatGateway> gateway,
                         std::size_t iterations)
    : provider_(std::move(provider)), gateway_(std::move(gateway)), iterations_(iterations) {
  if (iterations_ == 0 || iterations_ % 2 == 0) {
    throw ConfigError("llm detector iterations must be odd (got " +
                      std::to_string(iterations_) + ")");
  }
  if (!gateway_) {
    throw ConfigError("llm detector requires a gateway");
  }
}

std::string LlmDetector::name() const { return "llm-" + provider_.name; }

std::string LlmDetector::render_user_text(const EmailRecord& record) {
  std::string user = prompts::kClassifyDirective;
  user += "\n\n";
  user += prompts::render_email_fields(record);
  return user;
}

DetectorVerdict LlmDetector::classify(const EmailRecord& record) {
  DetectorVerdict verdict;
  verdict.id = record.id;
  verdict.detector = name();

  const std::string user = render_user_text(record);
  std::vector<Decision> votes;
  std::vector<std::string> reasons;
  votes.reserve(iterations_);
  reasons.reserve(iterations_);
  for (std::size_t i = 0; i < iterations_; ++i) {
    ChatResponse response;
    try {
      response =
          gateway_->complete(provider_, ChatRequest{prompts::kClassifySystem, user, {}});
    } catch (const std::exception& e) {
      verdict.decision = Decision::Error;
      verdict.rationale = e.what();
      return verdict;
    }
    const ParsedVote parsed = parse_vote(response.text);
    votes.push_back(parsed.vote);
    reasons.push_back(parsed.reasoning);
  }

  std::size_t phishing = 0;
  std::size_t legitimate = 0;
  for (Decision vote : votes) {
    if (vote == Decision::Phishing) ++phishing;
    if (vote == Decision::Legitimate) ++legitimate;
  }
  if (phishing * 2 > votes.size()) {
    verdict.decision = Decision::Phishing;
  } else if (legitimate * 2 > votes.size()) {
    verdict.decision = Decision::Legitimate;
  } else {
    verdict.decision = Decision::Undecided;
  }
  verdict.score = static_cast<double>(phishing) / static_cast<double>(votes.size());
  for (std::size_t i = 0; i < votes.size(); ++i) {
    if (votes[i] == verdict.decision && !reasons[i].empty()) {
      verdict.rationale = reasons[i];
      break;
    }
  }
  verdict.votes = std::move(votes);
  return verdict;
}

std::string spamc_render_message(const EmailRecord& record) {
  std::string message;
  message += "From: " + record.sender + "\r\n";
  message += "To: " + record.receiver + "\r\n";
  message += "Subject: " + record.subject + "\r\n";
  message += "\r\n";
  for (const auto& line : split_lines(record.body)) {
    message += line;
    message += "\r\n";
  }
  return message;
}

std::string spamc_check_request(const EmailRecord& record) {
  const std::string message = spamc_render_message(record);
  std::string request = "CHECK SPAMC/1.5\r\nContent-length: ";
  request += std::to_string(message.size());
  request += "\r\n\r\n";
  request += message;
  return request;
}

SpamdReply parse_spamd_response(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) {
    throw ProviderError("empty spamd response");
  }
  std::istringstream status_line(lines[0]);
  std::string protocol;
  int code = -1;
  status_line >> protocol >> code;
  if (protocol.rfind("SPAMD/", 0) != 0 || status_line.fail()) {
    throw ProviderError("malformed spamd status line: " + lines[0]);
  }
  if (code != 0) {
    std::string detail;
    std::getline(status_line, detail);
    throw ProviderError("spamd returned status " + std::to_string(code) + " (" +
                        std::string(sysexits_name(code)) + "):" + detail);
  }

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto trimmed = trim(lines[i]);
    if (trimmed.rfind("Spam:", 0) != 0) continue;
    std::istringstream header(std::string(trimmed.substr(5)));
    std::string flag;
    char semicolon = 0;
    char slash = 0;
    SpamdReply reply;
    header >> flag >> semicolon >> reply.score >> slash >> reply.threshold;
    if (header.fail() || semicolon != ';' || slash != '/') {
      throw ProviderError("malformed Spam header: " + lines[i]);
    }
    const std::string flag_lower = to_lower(flag);
    if (flag_lower == "true" || flag_lower == "yes") {
      reply.spam = true;
    } else if (flag_lower == "false" || flag_lower == "no") {
      reply.spam = false;
    } else {
      throw ProviderError("malformed Spam header: " + lines[i]);
    }
    return reply;
  }
  throw ProviderError("spamd response carries no Spam header");
}

std::string tcp_roundtrip(const std::string& host, std::uint16_t port,
                          const std::string& payload, double timeout_seconds) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* results = nullptr;
  const std::string port_text = std::to_string(port);
  const int rc = ::getaddrinfo(host.c_str(), port_text.c_str(), &hints, &results);
  if (rc != 0) {
    throw ProviderError("cannot resolve " + host + ": " + gai_strerror(rc));
  }

  timeval timeout{};
  timeout.tv_sec = static_cast<time_t>(timeout_seconds);
  timeout.tv_usec =
      static_cast<suseconds_t>((timeout_seconds - static_cast<double>(timeout.tv_sec)) * 1e6);

  int fd = -1;
  int connect_errno = 0;
  for (addrinfo* entry = results; entry != nullptr; entry = entry->ai_next) {
    fd = ::socket(entry->ai_family, entry->ai_socktype, entry->ai_protocol);
    if (fd < 0) {
      connect_errno = errno;
      continue;
    }
    ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &timeout, sizeof(timeout));
    ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &timeout, sizeof(timeout));
    if (::connect(fd, entry->ai_addr, entry->ai_addrlen) == 0) break;
    connect_errno = errno;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(results);
  if (fd < 0) {
    throw ProviderError("cannot connect to " + host + ":" + port_text + ": " +
                        std::strerror(connect_errno));
  }
  SocketHandle socket(fd);

  std::size_t sent = 0;
  while (sent < payload.size()) {
    const ssize_t n = ::send(socket.get(), payload.data() + sent, payload.size() - sent, 0);
    if (n < 0) {
      throw ProviderError("send to " + host + ":" + port_text + " failed: " +
                          std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
  ::shutdown(socket.get(), SHUT_WR);

  std::string response;
  char buffer[4096];
  for (;;) {
    const ssize_t n = ::recv(socket.get(), buffer, sizeof(buffer), 0);
    if (n == 0) break;
    if (n < 0) {
      if (errno == EAGAIN || errno == EWOULDBLOCK) {
        throw ProviderError("read from " + host + ":" + port_text + " timed out after " +
                            std::to_string(timeout_seconds) + "s");
      }
      throw ProviderError("read from " + host + ":" + port_text + " failed: " +
                          std::strerror(errno));
    }
    response.append(buffer, static_cast<std::size_t>(n));
  }
  return response;
}

SpamdDetector::SpamdDetector(std::string host, std::uint16_t port,
                             std::optional<double> score_override, double timeout_seconds)
    : host_(std::move(host)),
      port_(port),
      score_override_(score_override),
      timeout_seconds_(timeout_seconds) {
  if (timeout_seconds_ <= 0.0) {
    throw ConfigError("spamd timeout must be positive");
  }
}

std::string SpamdDetector::name() const { return "spamassassin"; }

DetectorVerdict SpamdDetector::classify(const EmailRecord& record) {
  DetectorVerdict verdict;
  verdict.id = record.id;
  verdict.detector = name();
  try {
    const std::string response =
        tcp_roundtrip(host_, port_, spamc_check_request(record), timeout_seconds_);
    const SpamdReply reply = parse_spamd_response(response);
    verdict.score = reply.score;
    const bool phishing =
        reply.spam || (score_override_.has_value() && reply.score >= *score_override_);
    verdict.decision = phishing ? Decision::Phishing : Decision::Legitimate;
  } catch (const std::exception& e) {
    verdict.decision = Decision::Error;
    verdict.rationale = e.what();
  }
  return verdict;
}

std::vector<DetectorVerdict> run_detector(DetectorAdapter& detector, const Corpus& corpus) {
  std::vector<DetectorVerdict> verdicts;
  verdicts.reserve(corpus.size());
  for (const auto& record : corpus.records()) {
    try {
      verdicts.push_back(detector.classify(record));
    } catch (const std::exception& e) {
      DetectorVerdict verdict;
      verdict.id = record.id;
      verdict.detector = detector.name();
      verdict.decision = Decision::Error;
      verdict.rationale = e.what();
      verdicts.push_back(std::move(verdict));
    }
  }
  return verdicts;
}

}  // namespace phishbench
