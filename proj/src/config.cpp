#include "phishbench/config.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "json.hpp"
#include "phishbench/errors.hpp"
#include "phishbench/evalreport.hpp"
#include "phishbench/util.hpp"
#include "phishbench/version.hpp"

namespace phishbench {
namespace {

struct IniEntry {
  std::string section;
  std::string key;
  std::string value;
  std::size_t line = 0;
};

struct Violations {
  std::vector<std::string> items;

  void add(const IniEntry& entry, const std::string& why) {
    items.push_back(entry.section + "." + entry.key + " (line " +
                    std::to_string(entry.line) + "): " + why);
  }
  void add(const std::string& what) { items.push_back(what); }
};

std::vector<IniEntry> parse_ini(const std::string& text, Violations& violations) {
  std::vector<IniEntry> entries;
  std::string section;
  std::size_t line_number = 0;
  for (const auto& raw_line : split_lines(text)) {
    ++line_number;
    const auto line = trim(raw_line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        violations.add("line " + std::to_string(line_number) + ": malformed section header '" +
                       std::string(line) + "'");
        continue;
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      violations.add("line " + std::to_string(line_number) + ": expected key = value, got '" +
                     std::string(line) + "'");
      continue;
    }
    if (section.empty()) {
      violations.add("line " + std::to_string(line_number) + ": key outside any [section]");
      continue;
    }
    IniEntry entry;
    entry.section = section;
    entry.key = std::string(trim(line.substr(0, eq)));
    entry.value = std::string(trim(line.substr(eq + 1)));
    entry.line = line_number;
    if (entry.key.empty()) {
      violations.add("line " + std::to_string(line_number) + ": empty key");
      continue;
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

class FieldParser {
 public:
  explicit FieldParser(Violations& violations) : violations_(violations) {}

  void set_string(std::string& field, const IniEntry& entry) { field = entry.value; }

  void set_bool(bool& field, const IniEntry& entry) {
    const std::string value = to_lower(entry.value);
    if (value == "true" || value == "1" || value == "yes") {
      field = true;
    } else if (value == "false" || value == "0" || value == "no") {
      field = false;
    } else {
      violations_.add(entry, "expected a boolean (true/false), got '" + entry.value + "'");
    }
  }

  void set_size(std::size_t& field, const IniEntry& entry) {
    if (auto parsed = parse_unsigned(entry)) field = *parsed;
  }

  void set_optional_size(std::optional<std::size_t>& field, const IniEntry& entry) {
    if (auto parsed = parse_unsigned(entry)) field = *parsed;
  }

  void set_u64(std::uint64_t& field, const IniEntry& entry) {
    if (auto parsed = parse_unsigned(entry)) field = *parsed;
  }

  void set_u16(std::uint16_t& field, const IniEntry& entry) {
    auto parsed = parse_unsigned(entry);
    if (!parsed) return;
    if (*parsed > 65535) {
      violations_.add(entry, "value " + entry.value + " exceeds 65535");
      return;
    }
    field = static_cast<std::uint16_t>(*parsed);
  }

  void set_double(double& field, const IniEntry& entry) {
    if (auto parsed = parse_decimal(entry)) field = *parsed;
  }

  void set_optional_double(std::optional<double>& field, const IniEntry& entry) {
    if (auto parsed = parse_decimal(entry)) field = *parsed;
  }

 private:
  std::optional<std::uint64_t> parse_unsigned(const IniEntry& entry) {
    const std::string& value = entry.value;
    if (value.empty() ||
        !std::all_of(value.begin(), value.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      violations_.add(entry, "expected a nonnegative integer, got '" + value + "'");
      return std::nullopt;
    }
    try {
      return std::stoull(value);
    } catch (const std::exception&) {
      violations_.add(entry, "integer out of range: '" + value + "'");
      return std::nullopt;
    }
  }

  std::optional<double> parse_decimal(const IniEntry& entry) {
    try {
      std::size_t consumed = 0;
      const double parsed = std::stod(entry.value, &consumed);
      if (consumed != entry.value.size()) throw std::invalid_argument("trailing text");
      return parsed;
    } catch (const std::exception&) {
      violations_.add(entry, "expected a number, got '" + entry.value + "'");
      return std::nullopt;
    }
  }

  Violations& violations_;
};

std::string format_double(double value) {
  return nlohmann::json(value).dump();  // shortest round-trip decimal form
}

void apply_entry(RunConfig& config, const IniEntry& entry, Violations& violations) {
  FieldParser parser(violations);
  const std::string& s = entry.section;
  const std::string& k = entry.key;

  if (s == "run") {
    if (k == "seed") return parser.set_u64(config.run.seed, entry);
    if (k == "output_dir") return parser.set_string(config.run.output_dir, entry);
  } else if (s == "corpus") {
    if (k == "path") return parser.set_string(config.corpus.path, entry);
    if (k == "format") return parser.set_string(config.corpus.format, entry);
    if (k == "sample_per_class") return parser.set_size(config.corpus.sample_per_class, entry);
    if (k == "train_fraction") return parser.set_double(config.corpus.train_fraction, entry);
  } else if (s == "tokenizer") {
    if (k == "lowercase") return parser.set_bool(config.tokenizer.lowercase, entry);
    if (k == "min_token_length")
      return parser.set_size(config.tokenizer.min_token_length, entry);
    if (k == "min_document_frequency")
      return parser.set_size(config.tokenizer.min_document_frequency, entry);
    if (k == "max_vocab") return parser.set_optional_size(config.tokenizer.max_vocab, entry);
  } else if (s == "encoder") {
    if (k == "kind") return parser.set_string(config.encoder.kind, entry);
    if (k == "embeddings_path") return parser.set_string(config.encoder.embeddings_path, entry);
  } else if (s == "model") {
    if (k == "kind") return parser.set_string(config.model.kind, entry);
    if (k == "nb_alpha") return parser.set_double(config.model.nb_alpha, entry);
    if (k == "lr_learning_rate") return parser.set_double(config.model.lr_learning_rate, entry);
    if (k == "lr_epochs") return parser.set_size(config.model.lr_epochs, entry);
    if (k == "lr_lambda") return parser.set_double(config.model.lr_lambda, entry);
    if (k == "svm_lambda") return parser.set_double(config.model.svm_lambda, entry);
    if (k == "svm_epochs") return parser.set_size(config.model.svm_epochs, entry);
    if (k == "threshold") return parser.set_double(config.model.threshold, entry);
  } else if (s == "provider") {
    if (k == "name") return parser.set_string(config.provider.name, entry);
    if (k == "endpoint") return parser.set_string(config.provider.endpoint, entry);
    if (k == "model_id") return parser.set_string(config.provider.model_id, entry);
    if (k == "api_key_env") return parser.set_string(config.provider.api_key_env, entry);
    if (k == "max_retries") return parser.set_size(config.provider.max_retries, entry);
    if (k == "timeout_seconds")
      return parser.set_double(config.provider.timeout_seconds, entry);
    if (k == "temperature") return parser.set_double(config.provider.temperature, entry);
    if (k == "max_concurrent") return parser.set_size(config.provider.max_concurrent, entry);
    if (k == "cache_dir") return parser.set_string(config.provider.cache_dir, entry);
  } else if (s == "rephrase") {
    if (k == "condition") return parser.set_string(config.rephrase.condition, entry);
    if (k == "max_attempts") return parser.set_size(config.rephrase.max_attempts, entry);
    if (k == "shots_path") return parser.set_string(config.rephrase.shots_path, entry);
  } else if (s == "detect") {
    if (k == "detectors") return parser.set_string(config.detect.detectors, entry);
    if (k == "condition") return parser.set_string(config.detect.condition, entry);
    if (k == "model_path") return parser.set_string(config.detect.model_path, entry);
    if (k == "vocab_path") return parser.set_string(config.detect.vocab_path, entry);
    if (k == "llm_iterations") return parser.set_size(config.detect.llm_iterations, entry);
    if (k == "spamd_host") return parser.set_string(config.detect.spamd_host, entry);
    if (k == "spamd_port") return parser.set_u16(config.detect.spamd_port, entry);
    if (k == "spamd_timeout_seconds")
      return parser.set_double(config.detect.spamd_timeout_seconds, entry);
    if (k == "spamd_score_override")
      return parser.set_optional_double(config.detect.spamd_score_override, entry);
  } else if (s == "report") {
    if (k == "format") return parser.set_string(config.report.format, entry);
    if (k == "bins") return parser.set_size(config.report.bins, entry);
    if (k == "top_k") return parser.set_size(config.report.top_k, entry);
  } else if (s == "experiment") {
    if (k == "mix_originals") return parser.set_size(config.experiment.mix_originals, entry);
    if (k == "mix_rephrased") return parser.set_size(config.experiment.mix_rephrased, entry);
    if (k == "mix_generated") return parser.set_size(config.experiment.mix_generated, entry);
    if (k == "generate") return parser.set_size(config.experiment.generate, entry);
    if (k == "models") return parser.set_string(config.experiment.models, entry);
    if (k == "test_phishing_only")
      return parser.set_bool(config.experiment.test_phishing_only, entry);
  } else {
    violations.add("line " + std::to_string(entry.line) + ": unknown section [" + s + "]");
    return;
  }
  violations.add(entry, "unknown key");
}

void check_semantics(const RunConfig& config, Violations& violations) {
  const auto check_name = [&](const char* what, auto&& parse) {
    try {
      parse();
    } catch (const ConfigError& e) {
      violations.add(std::string(what) + ": " + e.what());
    }
  };
  check_name("encoder.kind", [&] { (void)config.encoder_kind(); });
  check_name("model.kind", [&] { (void)config.model_kind(); });
  check_name("rephrase.condition", [&] { (void)config.prompt_condition(); });
  check_name("detect.condition", [&] { (void)parse_condition(config.detect.condition); });
  check_name("detect.detectors", [&] { (void)config.detector_roster(); });
  check_name("experiment.models", [&] { (void)config.experiment_models(); });
  check_name("report.format", [&] {
    if (config.report.format != "all") (void)parse_report_format(config.report.format);
  });
  check_name("corpus.format", [&] {
    if (!config.corpus.format.empty() && config.corpus.format != "csv" &&
        config.corpus.format != "jsonl") {
      throw ConfigError("expected csv or jsonl, got '" + config.corpus.format + "'");
    }
  });

  if (config.corpus.train_fraction <= 0.0 || config.corpus.train_fraction >= 1.0) {
    violations.add("corpus.train_fraction: must lie strictly between 0 and 1, got " +
                   format_double(config.corpus.train_fraction));
  }
  if (config.tokenizer.min_token_length == 0) {
    violations.add("tokenizer.min_token_length: must be at least 1");
  }
  if (config.tokenizer.max_vocab && *config.tokenizer.max_vocab == 0) {
    violations.add("tokenizer.max_vocab: must be at least 1 when set");
  }
  if (config.model.nb_alpha <= 0.0) {
    violations.add("model.nb_alpha: must be positive, got " +
                   format_double(config.model.nb_alpha));
  }
  if (config.model.lr_learning_rate <= 0.0) {
    violations.add("model.lr_learning_rate: must be positive, got " +
                   format_double(config.model.lr_learning_rate));
  }
  if (config.model.lr_lambda < 0.0) {
    violations.add("model.lr_lambda: must be nonnegative, got " +
                   format_double(config.model.lr_lambda));
  }
  if (config.model.svm_lambda <= 0.0) {
    violations.add("model.svm_lambda: must be positive, got " +
                   format_double(config.model.svm_lambda));
  }
  if (config.model.threshold < 0.0 || config.model.threshold > 1.0) {
    violations.add("model.threshold: must lie in [0, 1], got " +
                   format_double(config.model.threshold));
  }
  if (config.provider.timeout_seconds <= 0.0) {
    violations.add("provider.timeout_seconds: must be positive, got " +
                   format_double(config.provider.timeout_seconds));
  }
  if (config.provider.temperature < 0.0) {
    violations.add("provider.temperature: must be nonnegative, got " +
                   format_double(config.provider.temperature));
  }
  if (config.provider.max_concurrent == 0) {
    violations.add("provider.max_concurrent: must be at least 1");
  }
  if (config.rephrase.max_attempts == 0) {
    violations.add("rephrase.max_attempts: must be at least 1");
  }
  if (config.detect.llm_iterations == 0 || config.detect.llm_iterations % 2 == 0) {
    violations.add("detect.llm_iterations: must be odd, got " +
                   std::to_string(config.detect.llm_iterations));
  }
  if (config.detect.spamd_timeout_seconds <= 0.0) {
    violations.add("detect.spamd_timeout_seconds: must be positive, got " +
                   format_double(config.detect.spamd_timeout_seconds));
  }
  if (config.report.bins == 0) {
    violations.add("report.bins: must be at least 1");
  }
  if (config.report.top_k == 0) {
    violations.add("report.top_k: must be at least 1");
  }
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
  return parse(read_text_file(path), path.string());
}

RunConfig RunConfig::parse(const std::string& text, const std::string& source_name) {
  Violations violations;
  const std::vector<IniEntry> entries = parse_ini(text, violations);

  std::unordered_set<std::string> seen;
  RunConfig config;
  for (const auto& entry : entries) {
    const std::string qualified = entry.section + "." + entry.key;
    if (!seen.insert(qualified).second) {
      violations.add(entry, "duplicate key");
      continue;
    }
    apply_entry(config, entry, violations);
  }
  check_semantics(config, violations);

  if (!violations.items.empty()) {
    std::string message = "configuration invalid (" + source_name + "):";
    for (const auto& item : violations.items) {
      message += "\n  - " + item;
    }
    throw ConfigError(message);
  }
  return config;
}

std::string RunConfig::snapshot() const {
  std::string out;
  out += "# phishbench ";
  out += kVersion;
  out += " resolved configuration\n";

  out += "\n[run]\n";
  out += "seed = " + std::to_string(run.seed) + "\n";
  out += "output_dir = " + run.output_dir + "\n";

  out += "\n[corpus]\n";
  out += "path = " + corpus.path + "\n";
  out += "format = " + corpus.format + "\n";
  out += "sample_per_class = " + std::to_string(corpus.sample_per_class) + "\n";
  out += "train_fraction = " + format_double(corpus.train_fraction) + "\n";

  out += "\n[tokenizer]\n";
  out += std::string("lowercase = ") + (tokenizer.lowercase ? "true" : "false") + "\n";
  out += "min_token_length = " + std::to_string(tokenizer.min_token_length) + "\n";
  out += "min_document_frequency = " + std::to_string(tokenizer.min_document_frequency) + "\n";
  if (tokenizer.max_vocab) {
    out += "max_vocab = " + std::to_string(*tokenizer.max_vocab) + "\n";
  }

  out += "\n[encoder]\n";
  out += "kind = " + encoder.kind + "\n";
  out += "embeddings_path = " + encoder.embeddings_path + "\n";

  out += "\n[model]\n";
  out += "kind = " + model.kind + "\n";
  out += "nb_alpha = " + format_double(model.nb_alpha) + "\n";
  out += "lr_learning_rate = " + format_double(model.lr_learning_rate) + "\n";
  out += "lr_epochs = " + std::to_string(model.lr_epochs) + "\n";
  out += "lr_lambda = " + format_double(model.lr_lambda) + "\n";
  out += "svm_lambda = " + format_double(model.svm_lambda) + "\n";
  out += "svm_epochs = " + std::to_string(model.svm_epochs) + "\n";
  out += "threshold = " + format_double(model.threshold) + "\n";

  out += "\n[provider]\n";
  out += "name = " + provider.name + "\n";
  out += "endpoint = " + provider.endpoint + "\n";
  out += "model_id = " + provider.model_id + "\n";
  out += "api_key_env = " + provider.api_key_env + "\n";
  out += "max_retries = " + std::to_string(provider.max_retries) + "\n";
  out += "timeout_seconds = " + format_double(provider.timeout_seconds) + "\n";
  out += "temperature = " + format_double(provider.temperature) + "\n";
  out += "max_concurrent = " + std::to_string(provider.max_concurrent) + "\n";
  out += "cache_dir = " + provider.cache_dir + "\n";

  out += "\n[rephrase]\n";
  out += "condition = " + rephrase.condition + "\n";
  out += "max_attempts = " + std::to_string(rephrase.max_attempts) + "\n";
  out += "shots_path = " + rephrase.shots_path + "\n";

  out += "\n[detect]\n";
  out += "detectors = " + detect.detectors + "\n";
  out += "condition = " + detect.condition + "\n";
  out += "model_path = " + detect.model_path + "\n";
  out += "vocab_path = " + detect.vocab_path + "\n";
  out += "llm_iterations = " + std::to_string(detect.llm_iterations) + "\n";
  out += "spamd_host = " + detect.spamd_host + "\n";
  out += "spamd_port = " + std::to_string(detect.spamd_port) + "\n";
  out += "spamd_timeout_seconds = " + format_double(detect.spamd_timeout_seconds) + "\n";
  if (detect.spamd_score_override) {
    out += "spamd_score_override = " + format_double(*detect.spamd_score_override) + "\n";
  }

  out += "\n[report]\n";
  out += "format = " + report.format + "\n";
  out += "bins = " + std::to_string(report.bins) + "\n";
  out += "top_k = " + std::to_string(report.top_k) + "\n";

  out += "\n[experiment]\n";
  out += "mix_originals = " + std::to_string(experiment.mix_originals) + "\n";
  out += "mix_rephrased = " + std::to_string(experiment.mix_rephrased) + "\n";
  out += "mix_generated = " + std::to_string(experiment.mix_generated) + "\n";
  out += "generate = " + std::to_string(experiment.generate) + "\n";
  out += "models = " + experiment.models + "\n";
  out += std::string("test_phishing_only = ") +
         (experiment.test_phishing_only ? "true" : "false") + "\n";
  return out;
}

TokenizerConfig RunConfig::tokenizer_config() const {
  TokenizerConfig config;
  config.lowercase = tokenizer.lowercase;
  config.min_token_length = tokenizer.min_token_length;
  config.min_document_frequency = tokenizer.min_document_frequency;
  config.max_vocab = tokenizer.max_vocab;
  return config;
}

EncoderKind RunConfig::encoder_kind() const { return parse_encoder_kind(encoder.kind); }

ModelKind RunConfig::model_kind() const { return parse_model_kind(model.kind); }

ModelHyperparameters RunConfig::hyperparameters() const {
  ModelHyperparameters params;
  params.nb_alpha = model.nb_alpha;
  params.lr.learning_rate = model.lr_learning_rate;
  params.lr.epochs = model.lr_epochs;
  params.lr.l2_lambda = model.lr_lambda;
  params.lr.seed = run.seed;
  params.svm.lambda = model.svm_lambda;
  params.svm.epochs = model.svm_epochs;
  params.svm.seed = run.seed;
  params.threshold = model.threshold;
  return params;
}

ProviderConfig RunConfig::provider_config() const {
  ProviderConfig config;
  config.name = provider.name;
  config.endpoint = provider.endpoint;
  config.model_id = provider.model_id;
  config.api_key_env = provider.api_key_env;
  config.max_retries = provider.max_retries;
  config.timeout_seconds = provider.timeout_seconds;
  config.temperature = provider.temperature;
  config.max_concurrent = provider.max_concurrent;
  return config;
}

PromptCondition RunConfig::prompt_condition() const {
  return parse_prompt_condition(rephrase.condition);
}

std::vector<ModelKind> RunConfig::experiment_models() const {
  std::vector<ModelKind> kinds;
  for (const auto& part : split(experiment.models, ',')) {
    const auto name = trim(part);
    if (name.empty()) continue;
    kinds.push_back(parse_model_kind(name));
  }
  if (kinds.empty()) {
    throw ConfigError("experiment.models names no model kinds");
  }
  return kinds;
}

std::vector<std::string> RunConfig::detector_roster() const {
  std::vector<std::string> roster;
  for (const auto& part : split(detect.detectors, ',')) {
    const std::string name(trim(part));
    if (name.empty()) continue;
    if (name != "local" && name != "llm" && name != "spamd") {
      throw ConfigError("unknown detector '" + name + "' (expected local, llm, or spamd)");
    }
    roster.push_back(name);
  }
  if (roster.empty()) {
    throw ConfigError("detect.detectors names no detectors");
  }
  return roster;
}

}  // namespace phishbench
