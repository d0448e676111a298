#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "phishbench/corpus.hpp"
#include "phishbench/detectors.hpp"
#include "phishbench/models.hpp"
#include "phishbench/textenc.hpp"

namespace phishbench {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
};

/// Confusion counts plus the records that could not be scored at all.
/// counts.total() + errors always equals the corpus size.
struct TallyResult {
  ConfusionCounts counts;
  std::size_t errors = 0;
};

/// Aggregates verdicts against ground-truth labels. Verdicts must align
/// 1:1 with the corpus by id. Undecided verdicts on phishing-labeled
/// records count as false negatives (a missed detection is a miss however
/// it happened); Undecided on legitimate-labeled records and Error verdicts
/// land in the error tally, never in the confusion counts.
TallyResult tally(const std::vector<DetectorVerdict>& verdicts, const Corpus& corpus);

/// Ratios in [0, 1]. A metric whose denominator is zero is absent, never a
/// fabricated zero.
struct MetricSet {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

MetricSet metrics(const ConfusionCounts& counts);

/// Renders a ratio as a percentage with two decimals (banker's rounding on
/// the hundredths digit), e.g. 0.9683 -> "96.83".
std::string format_percent(double ratio);

/// Evaluation condition a test corpus represents.
enum class Condition { Original, ZeroShotRephrased, FewShotRephrased };

Condition parse_condition(std::string_view text);
std::string_view condition_name(Condition condition);
/// Table-heading form: "Original", "Zero-Shot Rephrased", "Few-Shot Rephrased".
std::string_view condition_display_name(Condition condition);

/// One (detector, condition) row group: counts, derived metrics, errors.
struct ConditionReport {
  std::string detector;
  Condition condition = Condition::Original;
  ConfusionCounts counts;
  std::size_t errors = 0;
  MetricSet metric_set;
};

ConditionReport make_condition_report(std::string detector, Condition condition,
                                      const TallyResult& tallied);

/// Per-email phishing probabilities with a fixed-bin histogram over [0,1].
struct BoundaryDistribution {
  std::string model;
  Condition condition = Condition::Original;
  std::vector<double> probabilities;
  std::vector<std::size_t> histogram;
  double mean = 0.0;

  std::size_t bins() const { return histogram.size(); }
};

/// Scores every record with a probability model (Naive Bayes or logistic
/// regression; the SVM margin is not a probability and is rejected) and
/// buckets the probabilities into `bins` equal-width bins; 1.0 falls into
/// the last bin. Histogram counts always sum to the corpus size.
BoundaryDistribution boundary_distribution(const TrainedModel& model,
                                           const EncoderBinding& binding,
                                           const Corpus& corpus, Condition condition,
                                           std::size_t bins = 20);

struct WordSensitivityRow {
  std::string token;
  double phishing_probability = 0.0;
};

/// Single-word phishing probability per vocabulary token (the posterior of
/// a one-token document), sorted descending with ties broken by token.
/// top_k larger than the vocabulary returns the full vocabulary. Defined
/// for Naive Bayes and logistic regression only.
std::vector<WordSensitivityRow> word_sensitivity_table(const TrainedModel& model,
                                                       const Vocabulary& vocab,
                                                       std::size_t top_k);

/// Verdicts persisted as JSONL: a metadata header line, then one verdict
/// per line. The header carries the detector name, evaluation condition,
/// and source corpus name so a report run needs no side channel.
struct VerdictFile {
  std::string detector;
  Condition condition = Condition::Original;
  std::string corpus_name;
  std::vector<DetectorVerdict> verdicts;
};

void write_verdicts(const VerdictFile& file, const std::filesystem::path& path);
VerdictFile read_verdicts(const std::filesystem::path& path);

enum class ReportFormat { Markdown, Csv, Json };

ReportFormat parse_report_format(std::string_view text);

/// Renders one metrics table per condition (detectors as rows; columns
/// TP/TN/FP/FN/Accuracy/Precision/Recall/F1) in the requested format, plus
/// boundary_histogram.csv (bin_low, bin_high, count, condition) when
/// distributions are supplied. Absent metrics render as "—" in Markdown,
/// an empty field in CSV, null in JSON. Returns the written file paths.
std::vector<std::filesystem::path> emit_report(
    const std::vector<ConditionReport>& reports,
    const std::vector<BoundaryDistribution>& distributions, ReportFormat format,
    const std::filesystem::path& dir);

}  // namespace phishbench
