#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace phishbench {

enum class Label { Phishing, Legitimate };

enum class Provenance { Original, ZeroShotRephrased, FewShotRephrased, Generated };

/// Label strings accepted on ingest: "phishing"/"legitimate" (case-insensitive)
/// plus the numeric aliases "1"/"0". Anything else is a hard data error.
Label parse_label(std::string_view text);
std::string_view label_name(Label label);

Provenance parse_provenance(std::string_view text);
std::string_view provenance_name(Provenance provenance);

/// One email in the four-feature schema: sender, receiver, subject, body,
/// plus label and provenance. sender/receiver are address-like strings and
/// may be empty; body must be non-empty after trimming.
struct EmailRecord {
  std::string id;
  std::string sender;
  std::string receiver;
  std::string subject;
  std::string body;
  Label label = Label::Legitimate;
  Provenance provenance = Provenance::Original;
};

/// Rephrased records carry their origin in the id ("<source>::rz" for
/// zero-shot, "<source>::rf" for few-shot). lineage_root strips the suffix;
/// for originals and generated records it is the id itself.
std::string rephrased_id(const std::string& source_id, Provenance provenance);
std::string lineage_root(const std::string& id);

/// Ordered collection of EmailRecords with unique ids. Immutable by
/// convention once built; iteration order is insertion order.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  const std::vector<EmailRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// Appends a record. Throws DataError on duplicate id.
  void add(EmailRecord record);

  bool contains(const std::string& id) const { return ids_.count(id) != 0; }
  const EmailRecord* find(const std::string& id) const;

  /// Recomputed on demand, never stored stale.
  std::map<Label, std::size_t> class_counts() const;

 private:
  std::string name_;
  std::vector<EmailRecord> records_;
  std::unordered_set<std::string> ids_;
};

enum class CorpusFormat { Csv, Jsonl };

/// Per-file ingestion outcome: the valid records plus counts of rejected
/// rows. Rows are rejected (not errored) for a missing label or an empty
/// body; an unrecognized label string is a hard error.
struct IngestResult {
  Corpus corpus;
  std::size_t total_rows = 0;
  std::size_t rejected_missing_label = 0;
  std::size_t rejected_empty_body = 0;

  std::size_t rejected() const {
    return rejected_missing_label + rejected_empty_body;
  }
};

/// Reads a labeled corpus from CSV (header row required, RFC-style double
/// quoting) or JSONL. Required fields: sender, receiver, subject, body,
/// label. Optional: id (synthesized as the 1-based row index when absent)
/// and provenance (defaults to original). Unknown columns/keys are ignored.
IngestResult ingest(const std::filesystem::path& path, CorpusFormat format);

/// Writes one JSON object per line with keys exactly
/// {id, sender, receiver, subject, body, label, provenance}.
void export_jsonl(const Corpus& corpus, const std::filesystem::path& path);
std::string to_jsonl(const Corpus& corpus);

/// CSV with the same seven fields; header row included.
void export_csv(const Corpus& corpus, const std::filesystem::path& path);

struct SampleSpec {
  std::size_t per_class = 1;
  std::uint64_t seed = 0;
};

/// Seeded uniform sampling without replacement to exactly per_class records
/// of each label. Output preserves source order. Errors name the deficient
/// class and its available count.
Corpus sample_balanced(const Corpus& corpus, const SampleSpec& spec);

/// Stratified split preserving per-class proportions to within one record.
/// The two outputs partition the input; both preserve source order.
struct SplitResult {
  Corpus train;
  Corpus test;
};
SplitResult split(const Corpus& corpus, double train_fraction, std::uint64_t seed);

/// Body length statistics in bytes (length filtering is intentionally not
/// applied; the stats are informational).
struct LengthStats {
  std::size_t min_chars = 0;
  std::size_t max_chars = 0;
  double mean_chars = 0.0;
};
LengthStats length_stats(const Corpus& corpus);

}  // namespace phishbench
