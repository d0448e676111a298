#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phishbench/corpus.hpp"
#include "phishbench/llmgate.hpp"
#include "phishbench/models.hpp"
#include "phishbench/textenc.hpp"

namespace phishbench {

/// Detector outcome for one email. Undecided is reserved for vote-based
/// detectors that reach no strict majority; Error marks a record the
/// detector could not judge at all.
enum class Decision { Phishing, Legitimate, Undecided, Error };

std::string_view decision_name(Decision decision);

struct DetectorVerdict {
  std::string id;
  Decision decision = Decision::Error;
  std::optional<double> score;
  std::optional<std::string> rationale;
  std::string detector;
  /// Per-iteration votes, present only for vote-based detectors.
  std::optional<std::vector<Decision>> votes;
};

/// Uniform detector interface. classify() is total: internal failures
/// surface as Error verdicts, never as exceptions.
class DetectorAdapter {
 public:
  virtual ~DetectorAdapter() = default;
  virtual std::string name() const = 0;
  virtual DetectorVerdict classify(const EmailRecord& record) = 0;
};

/// Wraps a trained model plus the encoder it was fitted with. Construction
/// fails when the encoder fingerprint does not match the one recorded in
/// the model, so a model can never score features from a different space.
class LocalModelDetector : public DetectorAdapter {
 public:
  LocalModelDetector(TrainedModel model, EncoderBinding binding, double threshold = 0.5);

  std::string name() const override;
  DetectorVerdict classify(const EmailRecord& record) override;

 private:
  TrainedModel model_;
  EncoderBinding binding_;
  double threshold_;
};

/// LLM-as-detector: runs the classification prompt a fixed odd number of
/// times and takes a strict majority. Unparsable responses abstain; when
/// abstentions prevent a strict majority the verdict is Undecided. The
/// score is the fraction of phishing votes; the rationale is the first
/// reasoning sentence from the majority side.
class LlmDetector : public DetectorAdapter {
 public:
  LlmDetector(ProviderConfig provider, std::shared_ptr<ChatGateway> gateway,
              std::size_t iterations = 3);

  std::string name() const override;
  DetectorVerdict classify(const EmailRecord& record) override;

  /// The exact user text sent for one email, exposed for tests.
  static std::string render_user_text(const EmailRecord& record);

 private:
  ProviderConfig provider_;
  std::shared_ptr<ChatGateway> gateway_;
  std::size_t iterations_;
};

/// Reply from a spamd daemon's CHECK command.
struct SpamdReply {
  bool spam = false;
  double score = 0.0;
  double threshold = 0.0;
};

/// The RFC-822 style message submitted to spamd: From/To/Subject headers,
/// blank line, body; CRLF line endings throughout.
std::string spamc_render_message(const EmailRecord& record);

/// Full SPAMC/1.5 CHECK request: command line, Content-length header, blank
/// line, message.
std::string spamc_check_request(const EmailRecord& record);

/// Parses "SPAMD/<version> <code> <message>" plus the "Spam:" header line.
/// A non-zero response code raises ProviderError naming the code and its
/// sysexits meaning (e.g. 68 EX_NOHOST).
SpamdReply parse_spamd_response(const std::string& text);

/// Connects, sends the payload, half-closes the write side, reads to EOF.
/// Throws ProviderError on connect/send/receive failure or timeout.
std::string tcp_roundtrip(const std::string& host, std::uint16_t port,
                          const std::string& payload, double timeout_seconds);

/// SpamAssassin adapter speaking SPAMC/1.5 over TCP. The decision is
/// Phishing when the daemon says spam=True, or when score_override is set
/// and the reported score reaches it.
class SpamdDetector : public DetectorAdapter {
 public:
  SpamdDetector(std::string host, std::uint16_t port,
                std::optional<double> score_override = std::nullopt,
                double timeout_seconds = 10.0);

  std::string name() const override;
  DetectorVerdict classify(const EmailRecord& record) override;

 private:
  std::string host_;
  std::uint16_t port_;
  std::optional<double> score_override_;
  double timeout_seconds_;
};

/// Runs a detector over a corpus sequentially. Output order matches corpus
/// order and has exactly one verdict per record; a throwing adapter is
/// converted into an Error verdict for that record.
std::vector<DetectorVerdict> run_detector(DetectorAdapter& detector, const Corpus& corpus);

}  // namespace phishbench
