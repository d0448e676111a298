#include "phishbench/augment.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <iterator>

#include "json.hpp"
#include "phishbench/errors.hpp"
#include "phishbench/evalreport.hpp"
#include "phishbench/hash.hpp"
#include "phishbench/prompts.hpp"
#include "phishbench/rephrase.hpp"
#include "phishbench/rng.hpp"
#include "phishbench/util.hpp"

namespace phishbench {
namespace {

using nlohmann::ordered_json;

std::vector<const EmailRecord*> sample_pool(const std::vector<const EmailRecord*>& pool,
                                            std::size_t count, const char* pool_name,
                                            std::uint64_t seed) {
  if (count > pool.size()) {
    throw DataError(std::string("augmentation mix asks for ") + std::to_string(count) +
                    " " + pool_name + " records but the " + pool_name + " pool holds " +
                    std::to_string(pool.size()));
  }
  Xoshiro256StarStar rng(derive_seed(seed, std::string("augment:") + pool_name));
  const std::vector<std::size_t> picks = sample_indices(pool.size(), count, rng);
  std::vector<const EmailRecord*> sampled;
  sampled.reserve(count);
  for (std::size_t index : picks) sampled.push_back(pool[index]);
  return sampled;
}

double evaluate_accuracy(const TrainedModel& model, const EncoderBinding& binding,
                         const Corpus& corpus, double threshold) {
  std::size_t correct = 0;
  for (const auto& record : corpus.records()) {
    const Label predicted = classify(model, binding.encode(record), threshold);
    if (predicted == record.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(corpus.size());
}

EncoderBinding binding_for(const Corpus& training, const ExperimentSpec& spec) {
  switch (spec.encoder) {
    case EncoderKind::Bow:
      return EncoderBinding::bow(
          std::make_shared<Vocabulary>(Vocabulary::fit(training, spec.tokenizer)));
    case EncoderKind::Tfidf:
      return EncoderBinding::tfidf(
          std::make_shared<Vocabulary>(Vocabulary::fit(training, spec.tokenizer)));
    case EncoderKind::EmbeddingAvg:
      if (!spec.embeddings) {
        throw ConfigError("embedding_avg encoder requires an embedding table");
      }
      return EncoderBinding::embedding(spec.embeddings, spec.tokenizer);
  }
  throw ConfigError("unknown encoder kind");
}

std::string overlap_message(const std::vector<std::string>& ids, const char* which) {
  std::string message = "test corpus shares lineage with the ";
  message += which;
  message += " training corpus: ";
  const std::size_t shown = std::min<std::size_t>(ids.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i > 0) message += ", ";
    message += ids[i];
  }
  if (ids.size() > shown) {
    message += ", and " + std::to_string(ids.size() - shown) + " more";
  }
  return message;
}

void check_lineage_disjoint(const Corpus& training, const Corpus& test, const char* which) {
  std::unordered_set<std::string> train_roots;
  for (const auto& record : training.records()) {
    train_roots.insert(lineage_root(record.id));
  }
  std::vector<std::string> offending;
  for (const auto& record : test.records()) {
    if (train_roots.count(lineage_root(record.id)) != 0) {
      offending.push_back(record.id);
    }
  }
  if (!offending.empty()) {
    throw DataError(overlap_message(offending, which));
  }
}

}  // namespace

AugmentedDataset build_augmented(const Corpus& base, const std::vector<Corpus>& supplements,
                                 const MixSpec& mix, std::uint64_t seed,
                                 const std::string& provider_label) {
  std::vector<const EmailRecord*> original_pool;
  for (const auto& record : base.records()) {
    if (record.provenance == Provenance::Original) original_pool.push_back(&record);
  }
  std::vector<const EmailRecord*> rephrased_pool;
  std::vector<const EmailRecord*> generated_pool;
  for (const auto& corpus : supplements) {
    for (const auto& record : corpus.records()) {
      switch (record.provenance) {
        case Provenance::ZeroShotRephrased:
        case Provenance::FewShotRephrased:
          rephrased_pool.push_back(&record);
          break;
        case Provenance::Generated:
          generated_pool.push_back(&record);
          break;
        case Provenance::Original:
          break;  // supplements contribute transformed records only
      }
    }
  }

  AugmentedDataset dataset;
  dataset.corpus.set_name(base.name().empty() ? "augmented" : base.name() + "-augmented");
  for (const auto* record : sample_pool(original_pool, mix.originals, "original", seed)) {
    dataset.corpus.add(*record);
  }
  for (const auto* record : sample_pool(rephrased_pool, mix.rephrased, "rephrased", seed)) {
    dataset.corpus.add(*record);
  }
  for (const auto* record : sample_pool(generated_pool, mix.generated, "generated", seed)) {
    dataset.corpus.add(*record);
  }

  dataset.manifest.provider = provider_label;
  dataset.manifest.seed = seed;
  for (const auto& record : dataset.corpus.records()) {
    ++dataset.manifest.provenance_counts[std::string(provenance_name(record.provenance))];
    ++dataset.manifest.class_counts[std::string(label_name(record.label))];
  }
  dataset.manifest.content_hash = content_hash128(to_jsonl(dataset.corpus));
  return dataset;
}

void save_augmented(const AugmentedDataset& dataset, const std::filesystem::path& corpus_path,
                    const std::filesystem::path& manifest_path) {
  export_jsonl(dataset.corpus, corpus_path);
  ordered_json manifest = ordered_json::object();
  manifest["corpus"] = dataset.corpus.name();
  manifest["records"] = dataset.corpus.size();
  manifest["provenance_counts"] = dataset.manifest.provenance_counts;
  manifest["class_counts"] = dataset.manifest.class_counts;
  manifest["provider"] = dataset.manifest.provider;
  manifest["seed"] = dataset.manifest.seed;
  manifest["content_hash"] = dataset.manifest.content_hash;
  write_text_file(manifest_path, manifest.dump(2) + "\n");
}

Corpus generate_phishing(ChatGateway& gateway, const ProviderConfig& provider,
                         std::size_t count, std::uint64_t seed) {
  static const char* const kSenders[] = {
      "alerts@account-services.example",    "support@mail-hosting.example",
      "billing@invoice-center.example",     "security@access-review.example",
      "notifications@storage-team.example",
  };
  static const char* const kReceivers[] = {
      "jordan.lee", "casey.morgan", "taylor.brooks", "riley.chen",
      "avery.patel", "quinn.foster", "morgan.diaz",  "jamie.novak",
  };

  Corpus corpus("generated");
  Xoshiro256StarStar rng(derive_seed(seed, "generate"));
  for (std::size_t i = 0; i < count; ++i) {
    char tag[32];
    std::snprintf(tag, sizeof(tag), "%016" PRIx64, derive_seed(seed, "variation") + i);
    std::string user = prompts::kGenerateDirective;
    user += "\n\nVariation tag: ";
    user += tag;

    const ChatResponse response =
        gateway.complete(provider, ChatRequest{prompts::kGenerateSystem, user, {}});
    auto [subject, body] = parse_rephrase_response(response.text);

    EmailRecord record;
    char id[32];
    std::snprintf(id, sizeof(id), "gen-%06zu", i + 1);
    record.id = id;
    record.sender = kSenders[rng.below(std::size(kSenders))];
    record.receiver = std::string(kReceivers[rng.below(std::size(kReceivers))]) + "@" +
                      "corpmail.example";
    record.subject = std::move(subject);
    record.body = std::move(body);
    record.label = Label::Phishing;
    record.provenance = Provenance::Generated;
    corpus.add(std::move(record));
  }
  return corpus;
}

AugmentExperimentResult run_augment_experiment(const Corpus& traditional,
                                               const Corpus& augmented, const Corpus& test,
                                               const ExperimentSpec& spec) {
  if (spec.kinds.empty()) {
    throw ConfigError("experiment needs at least one model kind");
  }
  if (traditional.empty() || augmented.empty() || test.empty()) {
    throw DataError("experiment corpora must all be non-empty");
  }
  check_lineage_disjoint(traditional, test, "traditional");
  check_lineage_disjoint(augmented, test, "augmented");

  const EncoderBinding traditional_binding = binding_for(traditional, spec);
  const EncoderBinding augmented_binding = binding_for(augmented, spec);
  const FeatureMatrix traditional_matrix = encode_corpus(traditional, traditional_binding);
  const FeatureMatrix augmented_matrix = encode_corpus(augmented, augmented_binding);

  AugmentExperimentResult result;
  result.traditional_size = traditional.size();
  result.augmented_size = augmented.size();
  result.test_size = test.size();
  result.test_phishing_only =
      std::all_of(test.records().begin(), test.records().end(),
                  [](const EmailRecord& r) { return r.label == Label::Phishing; });

  for (ModelKind kind : spec.kinds) {
    const TrainedModel traditional_model =
        fit_model(kind, traditional_matrix, spec.params, traditional_binding.kind(),
                  traditional_binding.fingerprint());
    const TrainedModel augmented_model =
        fit_model(kind, augmented_matrix, spec.params, augmented_binding.kind(),
                  augmented_binding.fingerprint());

    ExperimentCell cell;
    cell.kind = kind;
    cell.traditional_accuracy =
        evaluate_accuracy(traditional_model, traditional_binding, test, spec.params.threshold);
    cell.augmented_accuracy =
        evaluate_accuracy(augmented_model, augmented_binding, test, spec.params.threshold);
    cell.delta = cell.augmented_accuracy - cell.traditional_accuracy;
    result.cells.push_back(cell);
  }
  return result;
}

std::string experiment_to_markdown(const AugmentExperimentResult& result) {
  std::string out = "# Augmented-training experiment\n\n";
  out += "Training corpora: traditional " + std::to_string(result.traditional_size) +
         " records, augmented " + std::to_string(result.augmented_size) + " records. ";
  out += "Test corpus: " + std::to_string(result.test_size) + " records";
  out += result.test_phishing_only
             ? " (phishing only; accuracy below coincides with recall).\n\n"
             : " (both classes).\n\n";
  out += "| Model | Traditional | Augmented | Delta |\n";
  out += "|---|---:|---:|---:|\n";
  for (const auto& cell : result.cells) {
    out += "| " + std::string(model_kind_name(cell.kind));
    out += " | " + format_percent(cell.traditional_accuracy);
    out += " | " + format_percent(cell.augmented_accuracy);
    const std::string delta = format_percent(std::abs(cell.delta));
    out += " | ";
    out += cell.delta < 0 ? "-" : "+";
    out += delta;
    out += " |\n";
  }
  return out;
}

std::string experiment_to_json(const AugmentExperimentResult& result) {
  ordered_json doc = ordered_json::object();
  doc["traditional_size"] = result.traditional_size;
  doc["augmented_size"] = result.augmented_size;
  doc["test_size"] = result.test_size;
  doc["test_phishing_only"] = result.test_phishing_only;
  ordered_json cells = ordered_json::array();
  for (const auto& cell : result.cells) {
    ordered_json row = ordered_json::object();
    row["model"] = std::string(model_kind_name(cell.kind));
    row["traditional_accuracy"] = cell.traditional_accuracy;
    row["augmented_accuracy"] = cell.augmented_accuracy;
    row["delta"] = cell.delta;
    cells.push_back(std::move(row));
  }
  doc["cells"] = std::move(cells);
  return doc.dump(2) + "\n";
}

}  // namespace phishbench
