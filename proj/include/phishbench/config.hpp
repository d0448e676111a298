#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "phishbench/augment.hpp"
#include "phishbench/llmgate.hpp"
#include "phishbench/models.hpp"
#include "phishbench/rephrase.hpp"
#include "phishbench/textenc.hpp"

namespace phishbench {

/// Typed view of the INI-style run configuration. Section and key names
/// are fixed; unknown ones are rejected. Parsing collects every violation
/// and reports them all in one error, not first-only. Paths are kept as
/// written (resolution happens relative to the working directory), so a
/// snapshot replayed from the same directory reproduces the run.
struct RunConfig {
  struct Run {
    std::uint64_t seed = 42;
    std::string output_dir = "out";
  } run;

  struct CorpusSection {
    std::string path;
    std::string format;  // "" = infer from extension, else csv | jsonl
    std::size_t sample_per_class = 0;  // 0 = keep everything
    double train_fraction = 0.8;
  } corpus;

  struct Tokenizer {
    bool lowercase = true;
    std::size_t min_token_length = 2;
    std::size_t min_document_frequency = 1;
    std::optional<std::size_t> max_vocab;
  } tokenizer;

  struct Encoder {
    std::string kind = "tfidf";
    std::string embeddings_path;
  } encoder;

  struct Model {
    std::string kind = "naive_bayes";
    double nb_alpha = 1.0;
    double lr_learning_rate = 0.1;
    std::size_t lr_epochs = 300;
    double lr_lambda = 1e-4;
    double svm_lambda = 1e-4;
    std::size_t svm_epochs = 200;
    double threshold = 0.5;
  } model;

  struct Provider {
    std::string name = "stub";
    std::string endpoint;
    std::string model_id;
    std::string api_key_env;
    std::size_t max_retries = 3;
    double timeout_seconds = 60.0;
    double temperature = 0.0;
    std::size_t max_concurrent = 4;
    std::string cache_dir;
  } provider;

  struct Rephrase {
    std::string condition = "zero_shot";
    std::size_t max_attempts = 3;
    std::string shots_path;  // "" = built-in examples
  } rephrase;

  struct Detect {
    std::string detectors = "local";
    std::string condition = "original";
    std::string model_path;
    std::string vocab_path;
    std::size_t llm_iterations = 3;
    std::string spamd_host = "127.0.0.1";
    std::uint16_t spamd_port = 783;
    double spamd_timeout_seconds = 10.0;
    std::optional<double> spamd_score_override;
  } detect;

  struct Report {
    std::string format = "all";  // markdown | csv | json | all
    std::size_t bins = 20;
    std::size_t top_k = 10;
  } report;

  struct Experiment {
    std::size_t mix_originals = 0;
    std::size_t mix_rephrased = 0;
    std::size_t mix_generated = 0;
    std::size_t generate = 0;  // records to synthesize before mixing
    std::string models = "naive_bayes,logistic_regression,linear_svm";
    bool test_phishing_only = true;
  } experiment;

  static RunConfig load(const std::filesystem::path& path);
  /// source_name appears in error messages.
  static RunConfig parse(const std::string& text, const std::string& source_name);

  /// Canonical re-serialization of every resolved value, re-parseable by
  /// parse(). Carries the tool version as a comment header.
  std::string snapshot() const;

  // Typed accessors that translate the raw string fields, throwing
  // ConfigError on values that pass syntactic validation but name unknown
  // variants.
  TokenizerConfig tokenizer_config() const;
  EncoderKind encoder_kind() const;
  ModelKind model_kind() const;
  ModelHyperparameters hyperparameters() const;
  ProviderConfig provider_config() const;
  PromptCondition prompt_condition() const;
  std::vector<ModelKind> experiment_models() const;
  std::vector<std::string> detector_roster() const;
};

}  // namespace phishbench
