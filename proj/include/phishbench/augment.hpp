#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phishbench/corpus.hpp"
#include "phishbench/llmgate.hpp"
#include "phishbench/models.hpp"
#include "phishbench/textenc.hpp"

namespace phishbench {

/// How many records of each origin go into an augmented training corpus.
/// There is no sensible default mix; callers must choose one explicitly.
struct MixSpec {
  std::size_t originals = 0;
  std::size_t rephrased = 0;
  std::size_t generated = 0;

  std::size_t total() const { return originals + rephrased + generated; }
};

struct AugmentManifest {
  std::map<std::string, std::size_t> provenance_counts;
  std::map<std::string, std::size_t> class_counts;
  std::string provider;
  std::uint64_t seed = 0;
  std::string content_hash;
};

struct AugmentedDataset {
  Corpus corpus;
  AugmentManifest manifest;
};

/// Samples the requested mix: originals from the base corpus, rephrased and
/// generated records from the supplement corpora (bucketed by provenance).
/// Sampling is seeded and without replacement per pool; the result is
/// deterministic under (inputs, seed). A pool smaller than its requested
/// count is an error naming the pool.
AugmentedDataset build_augmented(const Corpus& base, const std::vector<Corpus>& supplements,
                                 const MixSpec& mix, std::uint64_t seed,
                                 const std::string& provider_label = "");

/// Serializes the dataset as corpus JSONL plus a manifest JSON next to it.
void save_augmented(const AugmentedDataset& dataset, const std::filesystem::path& corpus_path,
                    const std::filesystem::path& manifest_path);

/// Synthesizes `count` new phishing records through the generation prompt.
/// Ids are gen-000001..; sender/receiver pairs are drawn from fixed pools
/// with a seeded generator, and each prompt carries a distinct variation
/// tag so responses differ record to record.
Corpus generate_phishing(ChatGateway& gateway, const ProviderConfig& provider,
                         std::size_t count, std::uint64_t seed);

struct ExperimentSpec {
  std::vector<ModelKind> kinds = {ModelKind::NaiveBayes, ModelKind::LogisticRegression,
                                  ModelKind::LinearSvm};
  TokenizerConfig tokenizer;
  EncoderKind encoder = EncoderKind::Tfidf;
  ModelHyperparameters params;
  /// Required when encoder is the embedding average.
  std::shared_ptr<const EmbeddingTable> embeddings;
};

struct ExperimentCell {
  ModelKind kind = ModelKind::NaiveBayes;
  double traditional_accuracy = 0.0;
  double augmented_accuracy = 0.0;
  double delta = 0.0;
};

struct AugmentExperimentResult {
  std::vector<ExperimentCell> cells;
  std::size_t traditional_size = 0;
  std::size_t augmented_size = 0;
  std::size_t test_size = 0;
  /// True when the test corpus contains phishing records only, which makes
  /// accuracy coincide with recall. Recorded so reports are unambiguous.
  bool test_phishing_only = false;
};

/// Trains every requested model kind twice (traditional corpus, augmented
/// corpus) and evaluates both on the same test corpus. The vocabulary is
/// refitted per training set so neither model sees the other's tokens.
/// Refuses to run when any test record shares a lineage root with either
/// training corpus, listing the offending ids.
AugmentExperimentResult run_augment_experiment(const Corpus& traditional,
                                               const Corpus& augmented, const Corpus& test,
                                               const ExperimentSpec& spec);

std::string experiment_to_markdown(const AugmentExperimentResult& result);
std::string experiment_to_json(const AugmentExperimentResult& result);

}  // namespace phishbench
