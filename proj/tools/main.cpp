#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "phishbench/augment.hpp"
#include "phishbench/config.hpp"
#include "phishbench/corpus.hpp"
#include "phishbench/detectors.hpp"
#include "phishbench/errors.hpp"
#include "phishbench/evalreport.hpp"
#include "phishbench/llmgate.hpp"
#include "phishbench/models.hpp"
#include "phishbench/rephrase.hpp"
#include "phishbench/textenc.hpp"
#include "phishbench/util.hpp"
#include "phishbench/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace phishbench;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
};

void attach_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("-c,--config", opts.config_path, "Run configuration file (INI)");
  cmd->add_option("-o,--output", opts.output_dir,
                  "Output directory (overrides [run] output_dir)");
  cmd->add_option("--seed", opts.seed, "Seed (overrides [run] seed)");
}

RunConfig resolve_config(const CommonOpts& opts) {
  RunConfig config =
      opts.config_path.empty() ? RunConfig() : RunConfig::load(opts.config_path);
  if (!opts.output_dir.empty()) config.run.output_dir = opts.output_dir;
  if (opts.seed) config.run.seed = *opts.seed;
  return config;
}

fs::path out_dir(const RunConfig& config) { return fs::path(config.run.output_dir); }

void write_snapshot(const RunConfig& config) {
  write_text_file(out_dir(config) / "snapshot.ini", config.snapshot());
}

CorpusFormat resolve_format(const std::string& path, const std::string& format_name) {
  if (format_name == "csv") return CorpusFormat::Csv;
  if (format_name == "jsonl") return CorpusFormat::Jsonl;
  if (!format_name.empty()) {
    throw ConfigError("unknown corpus format '" + format_name + "' (expected csv or jsonl)");
  }
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".csv") return CorpusFormat::Csv;
  if (ext == ".jsonl" || ext == ".json") return CorpusFormat::Jsonl;
  throw ConfigError("cannot infer the corpus format of '" + path +
                    "'; set [corpus] format or use a .csv/.jsonl extension");
}

std::string require_input(const std::string& flag_value, const RunConfig& config,
                          const char* what) {
  if (!flag_value.empty()) return flag_value;
  if (!config.corpus.path.empty()) return config.corpus.path;
  throw ConfigError(std::string(what) + ": no input corpus given (use --input or set "
                                        "[corpus] path)");
}

IngestResult load_corpus(const std::string& path, const std::string& format_name) {
  return ingest(path, resolve_format(path, format_name));
}

/// Fails fast, before any network traffic, when a real provider is not
/// actually usable: endpoint/model unset or the API key variable missing
/// from the environment. Keys never come from configuration files.
void preflight_provider(const ProviderConfig& provider) {
  if (provider.is_stub()) return;
  std::vector<std::string> problems;
  if (provider.endpoint.empty()) problems.push_back("provider.endpoint is not set");
  if (provider.model_id.empty()) problems.push_back("provider.model_id is not set");
  if (provider.api_key_env.empty()) {
    problems.push_back("provider.api_key_env is not set");
  } else if (const char* key = std::getenv(provider.api_key_env.c_str());
             key == nullptr || *key == '\0') {
    problems.push_back("environment variable " + provider.api_key_env +
                       " is not set (it must hold the API key for provider '" +
                       provider.name + "')");
  }
  if (!problems.empty()) {
    throw ConfigError("provider '" + provider.name + "' is not usable: " +
                      join(problems, "; "));
  }
}

std::shared_ptr<ChatGateway> make_gateway(const RunConfig& config) {
  ChatGateway::Options options;
  if (!config.provider.cache_dir.empty()) {
    options.cache_dir = fs::path(config.provider.cache_dir);
  }
  options.jitter_seed = config.run.seed;
  return std::make_shared<ChatGateway>(std::make_shared<HttpTransport>(), options);
}

PromptTemplate make_template(const RunConfig& config) {
  const PromptCondition condition = config.prompt_condition();
  if (condition == PromptCondition::ZeroShot) return PromptTemplate::zero_shot();
  if (config.rephrase.shots_path.empty()) return PromptTemplate::few_shot();
  return PromptTemplate::few_shot(load_shots(config.rephrase.shots_path));
}

EncoderBinding binding_for_model(const TrainedModel& model, const RunConfig& config) {
  switch (model.encoder_kind()) {
    case EncoderKind::Bow:
    case EncoderKind::Tfidf: {
      if (config.detect.vocab_path.empty()) {
        throw ConfigError("the model needs its vocabulary; set [detect] vocab_path");
      }
      auto vocab = std::make_shared<Vocabulary>(Vocabulary::load(config.detect.vocab_path));
      return model.encoder_kind() == EncoderKind::Bow
                 ? EncoderBinding::bow(std::move(vocab))
                 : EncoderBinding::tfidf(std::move(vocab));
    }
    case EncoderKind::EmbeddingAvg: {
      if (config.encoder.embeddings_path.empty()) {
        throw ConfigError("the model needs its embedding table; set [encoder] "
                          "embeddings_path");
      }
      auto table = std::make_shared<EmbeddingTable>(
          EmbeddingTable::load(config.encoder.embeddings_path));
      return EncoderBinding::embedding(std::move(table), config.tokenizer_config());
    }
  }
  throw ConfigError("unknown encoder kind");
}

ordered_json class_counts_json(const Corpus& corpus) {
  ordered_json counts = ordered_json::object();
  for (const auto& [label, count] : corpus.class_counts()) {
    counts[std::string(label_name(label))] = count;
  }
  return counts;
}

ordered_json failures_json(const std::vector<RephraseFailure>& failures) {
  ordered_json rows = ordered_json::array();
  for (const auto& failure : failures) {
    ordered_json row = ordered_json::object();
    row["id"] = failure.id;
    row["reason"] = failure.reason;
    row["failed_rules"] = failure.failed_rules;
    rows.push_back(std::move(row));
  }
  return rows;
}

Corpus keep_rephrased_phishing(const Corpus& corpus, const std::string& name) {
  Corpus filtered(name);
  for (const auto& record : corpus.records()) {
    if (record.label == Label::Phishing &&
        (record.provenance == Provenance::ZeroShotRephrased ||
         record.provenance == Provenance::FewShotRephrased)) {
      filtered.add(record);
    }
  }
  return filtered;
}

// ---------------------------------------------------------------- ingest

struct IngestOpts {
  CommonOpts common;
  std::string input;
  std::string format;
};

void cmd_ingest(const IngestOpts& opts) {
  RunConfig config = resolve_config(opts.common);
  if (!opts.format.empty()) config.corpus.format = opts.format;
  const std::string input = require_input(opts.input, config, "ingest");
  config.corpus.path = input;
  write_snapshot(config);

  const IngestResult result = load_corpus(input, config.corpus.format);
  const fs::path corpus_path = out_dir(config) / "corpus.jsonl";
  export_jsonl(result.corpus, corpus_path);

  ordered_json summary = ordered_json::object();
  summary["source"] = input;
  summary["total_rows"] = result.total_rows;
  summary["records"] = result.corpus.size();
  summary["rejected_missing_label"] = result.rejected_missing_label;
  summary["rejected_empty_body"] = result.rejected_empty_body;
  summary["class_counts"] = class_counts_json(result.corpus);
  write_text_file(out_dir(config) / "ingest_summary.json", summary.dump(2) + "\n");

  std::cout << "wrote " << corpus_path.string() << " (" << result.corpus.size()
            << " records, " << result.rejected() << " rows rejected)\n";
}

// ---------------------------------------------------------------- sample

struct SampleOpts {
  CommonOpts common;
  std::string input;
  std::optional<std::size_t> per_class;
  std::optional<double> train_fraction;
};

void cmd_sample(const SampleOpts& opts) {
  RunConfig config = resolve_config(opts.common);
  if (opts.per_class) config.corpus.sample_per_class = *opts.per_class;
  if (opts.train_fraction) config.corpus.train_fraction = *opts.train_fraction;
  const std::string input = require_input(opts.input, config, "sample");
  config.corpus.path = input;
  write_snapshot(config);

  Corpus corpus = load_corpus(input, config.corpus.format).corpus;
  if (config.corpus.sample_per_class > 0) {
    corpus = sample_balanced(corpus, {config.corpus.sample_per_class, config.run.seed});
  }
  const SplitResult parts = split(corpus, config.corpus.train_fraction, config.run.seed);

  export_jsonl(corpus, out_dir(config) / "sampled.jsonl");
  export_jsonl(parts.train, out_dir(config) / "train.jsonl");
  export_jsonl(parts.test, out_dir(config) / "test.jsonl");

  ordered_json summary = ordered_json::object();
  summary["source"] = input;
  summary["sampled"] = corpus.size();
  summary["sampled_class_counts"] = class_counts_json(corpus);
  summary["train"] = parts.train.size();
  summary["test"] = parts.test.size();
  write_text_file(out_dir(config) / "sample_summary.json", summary.dump(2) + "\n");

  std::cout << "sampled " << corpus.size() << " records; train " << parts.train.size()
            << ", test " << parts.test.size() << " -> " << out_dir(config).string() << "\n";
}

// ----------------------------------------------------------------- train

struct TrainOpts {
  CommonOpts common;
  std::string input;
};

void cmd_train(const TrainOpts& opts) {
  RunConfig config = resolve_config(opts.common);
  const std::string input = require_input(opts.input, config, "train");
  config.corpus.path = input;
  write_snapshot(config);

  const Corpus corpus = load_corpus(input, config.corpus.format).corpus;
  const EncoderKind encoder_kind = config.encoder_kind();

  EncoderBinding binding = [&] {
    switch (encoder_kind) {
      case EncoderKind::Bow:
      case EncoderKind::Tfidf: {
        auto vocab = std::make_shared<Vocabulary>(
            Vocabulary::fit(corpus, config.tokenizer_config()));
        vocab->save(out_dir(config) / "vocabulary.jsonl");
        return encoder_kind == EncoderKind::Bow ? EncoderBinding::bow(std::move(vocab))
                                                : EncoderBinding::tfidf(std::move(vocab));
      }
      case EncoderKind::EmbeddingAvg: {
        if (config.encoder.embeddings_path.empty()) {
          throw ConfigError("encoder embedding_avg requires [encoder] embeddings_path");
        }
        auto table = std::make_shared<EmbeddingTable>(
            EmbeddingTable::load(config.encoder.embeddings_path));
        return EncoderBinding::embedding(std::move(table), config.tokenizer_config());
      }
    }
    throw ConfigError("unknown encoder kind");
  }();

  const FeatureMatrix matrix = encode_corpus(corpus, binding);
  const TrainedModel model = fit_model(config.model_kind(), matrix, config.hyperparameters(),
                                       binding.kind(), binding.fingerprint());
  const fs::path model_path = out_dir(config) / "model.json";
  model.save(model_path);

  ordered_json summary = ordered_json::object();
  summary["model"] = std::string(model_kind_name(model.kind()));
  summary["encoder"] = std::string(encoder_kind_name(binding.kind()));
  summary["encoder_fingerprint"] = binding.fingerprint();
  summary["records"] = corpus.size();
  summary["class_counts"] = class_counts_json(corpus);
  summary["dimension"] = model.dimension();
  if (model.kind() == ModelKind::LogisticRegression && !model.lr().epoch_loss.empty()) {
    summary["final_epoch_loss"] = model.lr().epoch_loss.back();
  } else if (model.kind() == ModelKind::LinearSvm && !model.svm().epoch_objective.empty()) {
    summary["final_epoch_objective"] = model.svm().epoch_objective.back();
  }
  write_text_file(out_dir(config) / "training_summary.json", summary.dump(2) + "\n");

  std::cout << "trained " << model_kind_name(model.kind()) << " on " << corpus.size()
            << " records (" << model.dimension() << " features) -> " << model_path.string()
            << "\n";
}

// -------------------------------------------------------------- rephrase

struct RephraseOpts {
  CommonOpts common;
  std::string input;
  std::string condition;
  std::optional<std::size_t> max_attempts;
};

void cmd_rephrase(const RephraseOpts& opts) {
  RunConfig config = resolve_config(opts.common);
  if (!opts.condition.empty()) config.rephrase.condition = opts.condition;
  if (opts.max_attempts) config.rephrase.max_attempts = *opts.max_attempts;
  const std::string input = require_input(opts.input, config, "rephrase");
  config.corpus.path = input;
  (void)config.prompt_condition();  // validate before writing the snapshot
  write_snapshot(config);

  const Corpus corpus = load_corpus(input, config.corpus.format).corpus;
  const ProviderConfig provider = config.provider_config();
  preflight_provider(provider);
  const auto gateway = make_gateway(config);
  const PromptTemplate tmpl = make_template(config);

  const RephraseResult result =
      rephrase_corpus(corpus, tmpl, provider, *gateway, config.rephrase.max_attempts);

  const fs::path rephrased_path = out_dir(config) / "rephrased.jsonl";
  export_jsonl(result.corpus, rephrased_path);
  write_text_file(out_dir(config) / "rephrase_failures.json",
                  failures_json(result.failures).dump(2) + "\n");

  std::size_t rephrased_count = 0;
  for (const auto& record : result.corpus.records()) {
    if (record.provenance != Provenance::Original) ++rephrased_count;
  }
  std::cout << "rephrased " << rephrased_count << " phishing records ("
            << result.failures.size() << " failures) -> " << rephrased_path.string() << "\n";
}

// ---------------------------------------------------------------- detect

struct DetectOpts {
  CommonOpts common;
  std::string input;
  std::string detectors;
  std::string model_path;
  std::string vocab_path;
};

void cmd_detect(const DetectOpts& opts) {
  RunConfig config = resolve_config(opts.common);
  if (!opts.detectors.empty()) config.detect.detectors = opts.detectors;
  if (!opts.model_path.empty()) config.detect.model_path = opts.model_path;
  if (!opts.vocab_path.empty()) config.detect.vocab_path = opts.vocab_path;
  const std::string input = require_input(opts.input, config, "detect");
  config.corpus.path = input;
  const std::vector<std::string> roster = config.detector_roster();
  const Condition condition = parse_condition(config.detect.condition);
  write_snapshot(config);

  const Corpus corpus = load_corpus(input, config.corpus.format).corpus;

  std::shared_ptr<ChatGateway> gateway;
  for (const auto& name : roster) {
    std::unique_ptr<DetectorAdapter> adapter;
    if (name == "local") {
      if (config.detect.model_path.empty()) {
        throw ConfigError("detector 'local' needs [detect] model_path");
      }
      TrainedModel model = TrainedModel::load(config.detect.model_path);
      EncoderBinding binding = binding_for_model(model, config);
      adapter = std::make_unique<LocalModelDetector>(std::move(model), std::move(binding),
                                                     config.model.threshold);
    } else if (name == "llm") {
      const ProviderConfig provider = config.provider_config();
      preflight_provider(provider);
      if (!gateway) gateway = make_gateway(config);
      adapter = std::make_unique<LlmDetector>(provider, gateway, config.detect.llm_iterations);
    } else {  // spamd, the roster is validated
      adapter = std::make_unique<SpamdDetector>(
          config.detect.spamd_host, config.detect.spamd_port,
          config.detect.spamd_score_override, config.detect.spamd_timeout_seconds);
    }

    VerdictFile file;
    file.detector = adapter->name();
    file.condition = condition;
    file.corpus_name = corpus.name();
    file.verdicts = run_detector(*adapter, corpus);
    const fs::path path = out_dir(config) / ("verdicts-" + name + ".jsonl");
    write_verdicts(file, path);
    std::cout << "wrote " << path.string() << " (" << file.verdicts.size() << " verdicts, "
              << file.detector << ")\n";
  }
}

// ---------------------------------------------------------------- report

struct ReportOpts {
  CommonOpts common;
  std::string corpus_path;
  std::vector<std::string> verdict_paths;
  std::string model_path;
  std::string vocab_path;
  std::string format;
};

void cmd_report(const ReportOpts& opts) {
  RunConfig config = resolve_config(opts.common);
  if (!opts.model_path.empty()) config.detect.model_path = opts.model_path;
  if (!opts.vocab_path.empty()) config.detect.vocab_path = opts.vocab_path;
  if (!opts.format.empty()) config.report.format = opts.format;
  const std::string input = require_input(opts.corpus_path, config, "report");
  config.corpus.path = input;
  if (opts.verdict_paths.empty()) {
    throw ConfigError("report: no verdict files given (use --verdicts)");
  }
  if (config.report.format != "all") (void)parse_report_format(config.report.format);
  write_snapshot(config);

  const Corpus corpus = load_corpus(input, config.corpus.format).corpus;

  std::vector<ConditionReport> reports;
  for (const auto& path : opts.verdict_paths) {
    const VerdictFile file = read_verdicts(path);
    const TallyResult tallied = tally(file.verdicts, corpus);
    reports.push_back(make_condition_report(file.detector, file.condition, tallied));
  }

  std::vector<BoundaryDistribution> distributions;
  if (!config.detect.model_path.empty()) {
    const TrainedModel model = TrainedModel::load(config.detect.model_path);
    if (model.kind() == ModelKind::LinearSvm) {
      std::cout << "note: skipping boundary histogram and word sensitivity (the SVM "
                   "margin is not a probability)\n";
    } else {
      const EncoderBinding binding = binding_for_model(model, config);
      distributions.push_back(boundary_distribution(
          model, binding, corpus, parse_condition(config.detect.condition),
          config.report.bins));
      if (const Vocabulary* vocab = binding.vocabulary()) {
        std::string csv = "token,phishing_probability\n";
        char buf[64];
        for (const auto& row : word_sensitivity_table(model, *vocab, config.report.top_k)) {
          std::snprintf(buf, sizeof(buf), "%.6f", row.phishing_probability);
          csv += row.token;
          csv += ",";
          csv += buf;
          csv += "\n";
        }
        write_text_file(out_dir(config) / "word_sensitivity.csv", csv);
      }
    }
  }

  std::vector<fs::path> written;
  if (config.report.format == "all") {
    for (ReportFormat format :
         {ReportFormat::Markdown, ReportFormat::Csv, ReportFormat::Json}) {
      for (auto& path : emit_report(reports, distributions, format, out_dir(config))) {
        if (std::find(written.begin(), written.end(), path) == written.end()) {
          written.push_back(std::move(path));
        }
      }
    }
  } else {
    written = emit_report(reports, distributions, parse_report_format(config.report.format),
                          out_dir(config));
  }
  for (const auto& path : written) {
    std::cout << "wrote " << path.string() << "\n";
  }
}

// --------------------------------------------------------------- augment

struct AugmentOpts {
  CommonOpts common;
  std::string base;
  std::vector<std::string> supplements;
  std::optional<std::size_t> generate;
  std::optional<std::size_t> mix_originals;
  std::optional<std::size_t> mix_rephrased;
  std::optional<std::size_t> mix_generated;
};

void cmd_augment(const AugmentOpts& opts) {
  RunConfig config = resolve_config(opts.common);
  if (opts.generate) config.experiment.generate = *opts.generate;
  if (opts.mix_originals) config.experiment.mix_originals = *opts.mix_originals;
  if (opts.mix_rephrased) config.experiment.mix_rephrased = *opts.mix_rephrased;
  if (opts.mix_generated) config.experiment.mix_generated = *opts.mix_generated;
  const std::string base_path = require_input(opts.base, config, "augment");
  config.corpus.path = base_path;
  write_snapshot(config);

  const Corpus base = load_corpus(base_path, config.corpus.format).corpus;
  std::vector<Corpus> supplements;
  for (const auto& path : opts.supplements) {
    supplements.push_back(load_corpus(path, "").corpus);
  }

  if (config.experiment.generate > 0) {
    const ProviderConfig provider = config.provider_config();
    preflight_provider(provider);
    const auto gateway = make_gateway(config);
    Corpus generated =
        generate_phishing(*gateway, provider, config.experiment.generate, config.run.seed);
    export_jsonl(generated, out_dir(config) / "generated.jsonl");
    supplements.push_back(std::move(generated));
  }

  MixSpec mix;
  mix.originals = config.experiment.mix_originals;
  mix.rephrased = config.experiment.mix_rephrased;
  mix.generated = config.experiment.mix_generated;
  if (mix.total() == 0) {
    throw ConfigError("augment: the mix is empty; set [experiment] mix_originals / "
                      "mix_rephrased / mix_generated (there is no sensible default)");
  }

  const AugmentedDataset dataset =
      build_augmented(base, supplements, mix, config.run.seed, config.provider.name);
  save_augmented(dataset, out_dir(config) / "augmented.jsonl",
                 out_dir(config) / "augmented_manifest.json");

  std::cout << "built augmented corpus: " << dataset.corpus.size() << " records ("
            << mix.originals << " original, " << mix.rephrased << " rephrased, "
            << mix.generated << " generated) -> "
            << (out_dir(config) / "augmented.jsonl").string() << "\n";
}

// ------------------------------------------------------------ experiment

struct ExperimentOpts {
  CommonOpts common;
  std::string input;
};

void cmd_experiment(const ExperimentOpts& opts) {
  RunConfig config = resolve_config(opts.common);
  const std::string input = require_input(opts.input, config, "experiment");
  config.corpus.path = input;
  const std::vector<ModelKind> kinds = config.experiment_models();
  (void)config.prompt_condition();
  write_snapshot(config);

  MixSpec mix;
  mix.originals = config.experiment.mix_originals;
  mix.rephrased = config.experiment.mix_rephrased;
  mix.generated = config.experiment.mix_generated;
  if (mix.total() == 0) {
    throw ConfigError("experiment: the mix is empty; set [experiment] mix_originals / "
                      "mix_rephrased / mix_generated (there is no sensible default)");
  }

  // Stage 1: corpus preparation (ingest, optional balancing, split).
  Corpus corpus = load_corpus(input, config.corpus.format).corpus;
  if (config.corpus.sample_per_class > 0) {
    corpus = sample_balanced(corpus, {config.corpus.sample_per_class, config.run.seed});
  }
  const SplitResult parts = split(corpus, config.corpus.train_fraction, config.run.seed);
  export_jsonl(parts.train, out_dir(config) / "train.jsonl");
  export_jsonl(parts.test, out_dir(config) / "test.jsonl");

  // Stage 2: rephrase the test phishing (the adversarial condition) and the
  // training phishing (the augmentation pool).
  const ProviderConfig provider = config.provider_config();
  preflight_provider(provider);
  const auto gateway = make_gateway(config);
  const PromptTemplate tmpl = make_template(config);

  const RephraseResult test_rephrased =
      rephrase_corpus(parts.test, tmpl, provider, *gateway, config.rephrase.max_attempts);
  const RephraseResult train_rephrased =
      rephrase_corpus(parts.train, tmpl, provider, *gateway, config.rephrase.max_attempts);
  export_jsonl(test_rephrased.corpus, out_dir(config) / "rephrased_test.jsonl");
  export_jsonl(train_rephrased.corpus, out_dir(config) / "rephrased_train.jsonl");

  ordered_json failure_log = ordered_json::object();
  failure_log["test"] = failures_json(test_rephrased.failures);
  failure_log["train"] = failures_json(train_rephrased.failures);
  write_text_file(out_dir(config) / "rephrase_failures.json", failure_log.dump(2) + "\n");

  const Corpus final_test =
      config.experiment.test_phishing_only
          ? keep_rephrased_phishing(test_rephrased.corpus,
                                    parts.test.name() + "-rephrased-phishing")
          : test_rephrased.corpus;
  if (final_test.empty()) {
    throw DataError("experiment: the rephrased test corpus is empty");
  }

  // Stage 3: generation and the augmented training corpus.
  std::vector<Corpus> supplements;
  supplements.push_back(train_rephrased.corpus);
  if (config.experiment.generate > 0) {
    Corpus generated =
        generate_phishing(*gateway, provider, config.experiment.generate, config.run.seed);
    export_jsonl(generated, out_dir(config) / "generated.jsonl");
    supplements.push_back(std::move(generated));
  }
  const AugmentedDataset dataset =
      build_augmented(parts.train, supplements, mix, config.run.seed, config.provider.name);
  save_augmented(dataset, out_dir(config) / "augmented.jsonl",
                 out_dir(config) / "augmented_manifest.json");

  // Stage 4: train on traditional vs augmented, evaluate both on the
  // rephrased test corpus.
  ExperimentSpec spec;
  spec.kinds = kinds;
  spec.tokenizer = config.tokenizer_config();
  spec.encoder = config.encoder_kind();
  spec.params = config.hyperparameters();
  if (spec.encoder == EncoderKind::EmbeddingAvg) {
    if (config.encoder.embeddings_path.empty()) {
      throw ConfigError("encoder embedding_avg requires [encoder] embeddings_path");
    }
    spec.embeddings = std::make_shared<EmbeddingTable>(
        EmbeddingTable::load(config.encoder.embeddings_path));
  }

  const AugmentExperimentResult result =
      run_augment_experiment(parts.train, dataset.corpus, final_test, spec);

  const std::string markdown = experiment_to_markdown(result);
  write_text_file(out_dir(config) / "experiment_results.md", markdown);
  write_text_file(out_dir(config) / "experiment_results.json", experiment_to_json(result));

  std::cout << markdown;
  std::cout << "wrote " << (out_dir(config) / "experiment_results.json").string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phishing-detection evaluation toolkit: corpus preparation, encoders and "
               "classifiers, LLM rephrasing, detector adapters, reports, and augmentation "
               "experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("phishbench ") + kVersion);

  IngestOpts ingest_opts;
  auto* ingest_cmd = app.add_subcommand(
      "ingest", "Read a labeled CSV/JSONL corpus into the canonical JSONL form");
  attach_common(ingest_cmd, ingest_opts.common);
  ingest_cmd->add_option("-i,--input", ingest_opts.input, "Corpus file to ingest");
  ingest_cmd->add_option("--format", ingest_opts.format, "Input format: csv or jsonl");

  SampleOpts sample_opts;
  auto* sample_cmd = app.add_subcommand(
      "sample", "Balance classes by seeded sampling and split into train/test");
  attach_common(sample_cmd, sample_opts.common);
  sample_cmd->add_option("-i,--input", sample_opts.input, "Corpus file (JSONL or CSV)");
  sample_cmd->add_option("--per-class", sample_opts.per_class,
                         "Records to keep per class (0 keeps everything)");
  sample_cmd->add_option("--train-fraction", sample_opts.train_fraction,
                         "Training share of the split, strictly between 0 and 1");

  TrainOpts train_opts;
  auto* train_cmd = app.add_subcommand(
      "train", "Fit the configured encoder and classifier on a training corpus");
  attach_common(train_cmd, train_opts.common);
  train_cmd->add_option("-i,--input", train_opts.input, "Training corpus file");

  RephraseOpts rephrase_opts;
  auto* rephrase_cmd = app.add_subcommand(
      "rephrase", "Rephrase phishing records through the configured provider");
  attach_common(rephrase_cmd, rephrase_opts.common);
  rephrase_cmd->add_option("-i,--input", rephrase_opts.input, "Corpus file");
  rephrase_cmd->add_option("--condition", rephrase_opts.condition,
                           "Prompt condition: zero_shot or few_shot");
  rephrase_cmd->add_option("--max-attempts", rephrase_opts.max_attempts,
                           "Validation retry budget per record");

  DetectOpts detect_opts;
  auto* detect_cmd =
      app.add_subcommand("detect", "Run detector adapters over a corpus, one verdict per "
                                   "record");
  attach_common(detect_cmd, detect_opts.common);
  detect_cmd->add_option("-i,--input", detect_opts.input, "Corpus file");
  detect_cmd->add_option("--detectors", detect_opts.detectors,
                         "Comma list drawn from: local, llm, spamd");
  detect_cmd->add_option("--model", detect_opts.model_path, "Trained model file (local)");
  detect_cmd->add_option("--vocab", detect_opts.vocab_path, "Vocabulary file (local)");

  ReportOpts report_opts;
  auto* report_cmd = app.add_subcommand(
      "report", "Tally verdicts against ground truth and render metric tables");
  attach_common(report_cmd, report_opts.common);
  report_cmd->add_option("--corpus", report_opts.corpus_path, "Ground-truth corpus file");
  report_cmd->add_option("--verdicts", report_opts.verdict_paths,
                         "Verdict files produced by detect (repeatable)");
  report_cmd->add_option("--model", report_opts.model_path,
                         "Probability model for the boundary histogram (optional)");
  report_cmd->add_option("--vocab", report_opts.vocab_path, "Vocabulary for --model");
  report_cmd->add_option("--format", report_opts.format,
                         "Report format: markdown, csv, json, or all");

  AugmentOpts augment_opts;
  auto* augment_cmd = app.add_subcommand(
      "augment", "Build an augmented training corpus from original, rephrased, and "
                 "generated pools");
  attach_common(augment_cmd, augment_opts.common);
  augment_cmd->add_option("--base", augment_opts.base, "Base corpus (original records)");
  augment_cmd->add_option("--supplement", augment_opts.supplements,
                          "Corpus holding rephrased/generated records (repeatable)");
  augment_cmd->add_option("--generate", augment_opts.generate,
                          "Phishing records to synthesize through the provider");
  augment_cmd->add_option("--mix-originals", augment_opts.mix_originals,
                          "Original records in the mix");
  augment_cmd->add_option("--mix-rephrased", augment_opts.mix_rephrased,
                          "Rephrased records in the mix");
  augment_cmd->add_option("--mix-generated", augment_opts.mix_generated,
                          "Generated records in the mix");

  ExperimentOpts experiment_opts;
  auto* experiment_cmd = app.add_subcommand(
      "experiment", "Full chain: prepare, rephrase, augment, train both ways, compare");
  attach_common(experiment_cmd, experiment_opts.common);
  experiment_cmd->add_option("-i,--input", experiment_opts.input, "Source corpus file");

  try {
    app.parse(argc, argv);
    if (ingest_cmd->parsed()) cmd_ingest(ingest_opts);
    if (sample_cmd->parsed()) cmd_sample(sample_opts);
    if (train_cmd->parsed()) cmd_train(train_opts);
    if (rephrase_cmd->parsed()) cmd_rephrase(rephrase_opts);
    if (detect_cmd->parsed()) cmd_detect(detect_opts);
    if (report_cmd->parsed()) cmd_report(report_opts);
    if (augment_cmd->parsed()) cmd_augment(augment_opts);
    if (experiment_cmd->parsed()) cmd_experiment(experiment_opts);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const ProviderError& e) {
    std::cerr << "provider error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
