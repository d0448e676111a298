// Acceptance gate for the toolkit: ten independently checkable criteria,
// each printing one PASS/FAIL line. Every numeric tolerance is pinned here,
// next to the check that uses it. The process exit code is the number of
// failed criteria, so a fully green run exits 0.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "phishbench/augment.hpp"
#include "phishbench/corpus.hpp"
#include "phishbench/detectors.hpp"
#include "phishbench/errors.hpp"
#include "phishbench/evalreport.hpp"
#include "phishbench/llmgate.hpp"
#include "phishbench/models.hpp"
#include "phishbench/prompts.hpp"
#include "phishbench/rephrase.hpp"
#include "phishbench/rng.hpp"
#include "phishbench/textenc.hpp"
#include "phishbench/util.hpp"
#include "support/fake_spamd.hpp"
#include "support/reference_rows.hpp"
#include "support/subprocess.hpp"
#include "support/synth.hpp"
#include "support/temp_dir.hpp"

namespace fs = std::filesystem;
using namespace phishbench;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kDataDir = PHISHBENCH_TEST_DATA_DIR;

struct CriterionOutcome {
  bool pass = false;
  std::string detail;                // appended to the PASS/FAIL line
  std::vector<std::string> notes;    // printed indented below the line
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_seconds(double seconds) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2fs", seconds);
  return buffer;
}

std::string format_ratio(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.3f", value);
  return buffer;
}

std::string format_sci(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.1e", value);
  return buffer;
}

std::vector<std::string> whitespace_split(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) {
        tokens.push_back(current);
        current.clear();
      }
    } else {
      current += c;
    }
  }
  if (!current.empty()) tokens.push_back(current);
  return tokens;
}

ChatGateway make_stub_gateway() {
  GatewayOptions options;
  options.sleep = [](double) {};
  return ChatGateway(std::make_shared<HttpTransport>(), options);
}

ProviderConfig stub_provider() {
  ProviderConfig provider;
  provider.name = "stub";
  return provider;
}

// ------------------------------------------------------------ criterion 1
// Every reference confusion-matrix row must reproduce all four printed
// percentages exactly. Three rows in the reference tables are inconsistent
// with their own printed counts; they are listed rather than masked, so
// this criterion stays red by design and documents exactly why.

CriterionOutcome criterion_reference_rows() {
  const auto start = Clock::now();
  std::size_t matched = 0;
  std::vector<std::string> notes;

  for (const auto& row : testsupport::kReferenceRows) {
    ConfusionCounts counts;
    counts.tp = static_cast<std::size_t>(row.tp);
    counts.tn = static_cast<std::size_t>(row.tn);
    counts.fp = static_cast<std::size_t>(row.fp);
    counts.fn = static_cast<std::size_t>(row.fn);
    const MetricSet computed = metrics(counts);

    const struct {
      const char* name;
      const std::optional<double>& value;
      const char* printed;
    } fields[] = {
        {"accuracy", computed.accuracy, row.accuracy},
        {"precision", computed.precision, row.precision},
        {"recall", computed.recall, row.recall},
        {"f1", computed.f1, row.f1},
    };

    std::string mismatches;
    for (const auto& field : fields) {
      const std::string rendered = field.value ? format_percent(*field.value) : "(absent)";
      if (rendered != field.printed) {
        if (!mismatches.empty()) mismatches += ", ";
        mismatches += std::string(field.name) + " computes to " + rendered +
                      " but the table prints " + field.printed;
      }
    }
    if (mismatches.empty()) {
      ++matched;
    } else {
      notes.push_back(std::string("table ") + row.table + ", " + row.condition + ", " +
                      row.detector + ": " + mismatches);
    }
  }

  const double elapsed = seconds_since(start);
  CriterionOutcome outcome;
  outcome.pass = matched == testsupport::kReferenceRows.size() && elapsed < 1.0;
  outcome.detail = std::to_string(matched) + "/" +
                   std::to_string(testsupport::kReferenceRows.size()) + " rows reproduce, " +
                   format_seconds(elapsed);
  outcome.notes = std::move(notes);
  if (!outcome.pass) {
    outcome.notes.push_back(
        "the remaining rows reproduce; the mismatching rows disagree with their own "
        "printed counts, so the implementation is left honest rather than patched to "
        "match them");
  }
  return outcome;
}

// ------------------------------------------------------------ criterion 2
// Naive Bayes posteriors on the committed four-document fixture must match
// a from-scratch counting oracle (whitespace tokens, add-one smoothing,
// log-sum-exp) to within 1e-9 in log space.

CriterionOutcome criterion_nb_oracle() {
  constexpr double kLogTolerance = 1e-9;
  const fs::path fixture = kDataDir / "nb_tiny.jsonl";

  // Independent oracle built directly from the file text.
  struct OracleDoc {
    std::vector<std::string> tokens;
    bool phishing = false;
  };
  std::vector<OracleDoc> docs;
  std::set<std::string> vocab_tokens;
  for (const auto& line : split_lines(read_text_file(fixture))) {
    if (trim(line).empty()) continue;
    const auto parsed = nlohmann::json::parse(line);
    OracleDoc doc;
    doc.tokens = whitespace_split(parsed.at("body").get<std::string>());
    doc.phishing = parsed.at("label").get<std::string>() == "phishing";
    for (const auto& token : doc.tokens) vocab_tokens.insert(token);
    docs.push_back(std::move(doc));
  }

  std::map<std::string, double> count_phishing;
  std::map<std::string, double> count_legit;
  double total_phishing = 0.0;
  double total_legit = 0.0;
  std::size_t docs_phishing = 0;
  for (const auto& doc : docs) {
    if (doc.phishing) ++docs_phishing;
    for (const auto& token : doc.tokens) {
      if (doc.phishing) {
        count_phishing[token] += 1.0;
        total_phishing += 1.0;
      } else {
        count_legit[token] += 1.0;
        total_legit += 1.0;
      }
    }
  }
  const double vocab_size = static_cast<double>(vocab_tokens.size());
  const double alpha = 1.0;
  const auto oracle_log_posterior = [&](const OracleDoc& doc) {
    double joint_ph = std::log(static_cast<double>(docs_phishing) /
                               static_cast<double>(docs.size()));
    double joint_lg = std::log(static_cast<double>(docs.size() - docs_phishing) /
                               static_cast<double>(docs.size()));
    for (const auto& token : doc.tokens) {
      joint_ph += std::log((count_phishing[token] + alpha) / (total_phishing + alpha * vocab_size));
      joint_lg += std::log((count_legit[token] + alpha) / (total_legit + alpha * vocab_size));
    }
    const double peak = std::max(joint_ph, joint_lg);
    const double log_norm = peak + std::log(std::exp(joint_ph - peak) + std::exp(joint_lg - peak));
    return std::pair<double, double>{joint_ph - log_norm, joint_lg - log_norm};
  };

  // The pipeline under test.
  const Corpus corpus = ingest(fixture, CorpusFormat::Jsonl).corpus;
  const auto vocab = std::make_shared<Vocabulary>(Vocabulary::fit(corpus, TokenizerConfig{}));
  const EncoderBinding binding = EncoderBinding::bow(vocab);
  const FeatureMatrix matrix = encode_corpus(corpus, binding);
  const NaiveBayesModel model = nb_fit(matrix, alpha);

  double max_delta = 0.0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto [oracle_ph, oracle_lg] = oracle_log_posterior(docs[i]);
    const ClassPosterior posterior = nb_posterior(model, binding.encode(corpus.records()[i]));
    max_delta = std::max(max_delta, std::fabs(std::log(posterior.phishing) - oracle_ph));
    max_delta = std::max(max_delta, std::fabs(std::log(posterior.legitimate) - oracle_lg));
  }

  CriterionOutcome outcome;
  outcome.pass = max_delta < kLogTolerance;
  outcome.detail = "max |delta log-posterior| " + format_sci(max_delta);
  return outcome;
}

// ------------------------------------------------------------ criterion 3
// The analytic logistic-regression gradient must agree with central finite
// differences (step 1e-5) at five seeded parameter points over a seeded
// 20x10 sparse fixture, to a relative error below 1e-5 per coordinate.

CriterionOutcome criterion_lr_gradient() {
  constexpr double kStep = 1e-5;
  constexpr double kRelTolerance = 1e-5;
  constexpr double kLambda = 1e-3;

  FeatureMatrix matrix;
  matrix.dimension = 10;
  Xoshiro256StarStar fixture_rng(derive_seed(4242, "acceptance_lr_fixture"));
  for (int row = 0; row < 20; ++row) {
    const std::size_t nnz = 3 + fixture_rng.below(4);
    FeatureVector vec;
    vec.dimension = 10;
    for (std::size_t index : sample_indices(10, nnz, fixture_rng)) {
      vec.entries.emplace_back(static_cast<std::uint32_t>(index),
                               fixture_rng.unit() * 2.0 - 1.0);
    }
    matrix.rows.push_back(std::move(vec));
    matrix.labels.push_back(row % 2);
  }

  const auto loss_at = [&](const std::vector<double>& weights, double bias) {
    return lr_loss_and_gradient(weights, bias, matrix, kLambda).loss;
  };

  Xoshiro256StarStar point_rng(derive_seed(4242, "acceptance_lr_points"));
  double max_rel_error = 0.0;
  for (int point = 0; point < 5; ++point) {
    std::vector<double> weights(10);
    for (double& w : weights) w = point_rng.unit() * 2.0 - 1.0;
    const double bias = point_rng.unit() * 2.0 - 1.0;

    const LrGradient analytic = lr_loss_and_gradient(weights, bias, matrix, kLambda);
    for (std::size_t j = 0; j <= weights.size(); ++j) {
      std::vector<double> up = weights;
      std::vector<double> down = weights;
      double bias_up = bias;
      double bias_down = bias;
      double analytic_value = 0.0;
      if (j < weights.size()) {
        up[j] += kStep;
        down[j] -= kStep;
        analytic_value = analytic.grad_weights[j];
      } else {
        bias_up += kStep;
        bias_down -= kStep;
        analytic_value = analytic.grad_bias;
      }
      const double numeric = (loss_at(up, bias_up) - loss_at(down, bias_down)) / (2.0 * kStep);
      const double scale =
          std::max({1.0, std::fabs(numeric), std::fabs(analytic_value)});
      max_rel_error = std::max(max_rel_error, std::fabs(analytic_value - numeric) / scale);
    }
  }

  CriterionOutcome outcome;
  outcome.pass = max_rel_error < kRelTolerance;
  outcome.detail = "max relative error " + format_sci(max_rel_error) + " over 5 points";
  return outcome;
}

// ------------------------------------------------------------ criterion 4
// The linear SVM must reach 100% training accuracy on the committed
// separable fixture within 200 epochs, and refitting with the same seed
// must reproduce the parameters bit for bit.

CriterionOutcome criterion_svm_separable() {
  FeatureMatrix matrix;
  matrix.dimension = 2;
  const auto lines = split_lines(read_text_file(kDataDir / "svm_separable.csv"));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    double x1 = 0.0;
    double x2 = 0.0;
    int label = 0;
    if (std::sscanf(lines[i].c_str(), "%lf,%lf,%d", &x1, &x2, &label) != 3) {
      throw DataError("unparseable fixture row: " + lines[i]);
    }
    FeatureVector vec;
    vec.dimension = 2;
    vec.entries = {{0, x1}, {1, x2}};
    matrix.rows.push_back(std::move(vec));
    matrix.labels.push_back(label);
  }

  SvmConfig config;
  config.lambda = 1e-4;
  config.epochs = 200;
  config.seed = 42;
  const LinearSvmModel model = svm_fit(matrix, config);

  std::size_t correct = 0;
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    const double margin = svm_margin(model, matrix.rows[i]);
    if ((matrix.labels[i] == 1 && margin > 0.0) || (matrix.labels[i] == 0 && margin < 0.0)) {
      ++correct;
    }
  }

  const LinearSvmModel refit = svm_fit(matrix, config);
  const bool deterministic = model.weights == refit.weights && model.bias == refit.bias &&
                             model.epoch_objective == refit.epoch_objective;

  CriterionOutcome outcome;
  outcome.pass = correct == matrix.rows.size() && deterministic;
  outcome.detail = std::to_string(correct) + "/" + std::to_string(matrix.rows.size()) +
                   " training points separated, refit " +
                   (deterministic ? "bit-identical" : "DIVERGED");
  return outcome;
}

// ------------------------------------------------------------ criterion 5
// TF-IDF on the committed three-document fixture must match a hand oracle:
// idf(free) = ln(4/3) + 1 before normalization (tolerance 1e-9), every
// encoded vector L2-normalized to 1 within 1e-9, and every component equal
// to the hand-computed tf*idf/norm within 1e-9.

CriterionOutcome criterion_tfidf_oracle() {
  constexpr double kTolerance = 1e-9;
  const Corpus corpus = ingest(kDataDir / "tfidf_tiny.jsonl", CorpusFormat::Jsonl).corpus;
  const Vocabulary vocab = Vocabulary::fit(corpus, TokenizerConfig{});

  // Oracle document frequencies from the raw text.
  std::map<std::string, double> df;
  std::vector<std::vector<std::string>> doc_tokens;
  for (const auto& record : corpus.records()) {
    auto tokens = whitespace_split(record.body);
    std::set<std::string> unique(tokens.begin(), tokens.end());
    for (const auto& token : unique) df[token] += 1.0;
    doc_tokens.push_back(std::move(tokens));
  }
  const double num_docs = static_cast<double>(corpus.size());
  const auto oracle_idf = [&](const std::string& token) {
    return std::log((1.0 + num_docs) / (1.0 + df.at(token))) + 1.0;
  };

  double max_idf_delta = 0.0;
  for (const auto& [token, _] : df) {
    const auto index = vocab.index_of(token);
    if (!index) {
      CriterionOutcome outcome;
      outcome.notes.push_back("token '" + token + "' missing from the fitted vocabulary");
      return outcome;
    }
    max_idf_delta = std::max(max_idf_delta, std::fabs(vocab.idf(*index) - oracle_idf(token)));
  }
  const double free_expected = std::log(4.0 / 3.0) + 1.0;
  const double free_actual = vocab.idf(*vocab.index_of("free"));
  max_idf_delta = std::max(max_idf_delta, std::fabs(free_actual - free_expected));

  double max_component_delta = 0.0;
  double max_norm_delta = 0.0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::map<std::string, double> tf;
    for (const auto& token : doc_tokens[i]) tf[token] += 1.0;
    double norm_squared = 0.0;
    for (const auto& [token, count] : tf) {
      const double raw = count * oracle_idf(token);
      norm_squared += raw * raw;
    }
    const double norm = std::sqrt(norm_squared);

    const FeatureVector encoded = encode_tfidf(corpus.records()[i], vocab);
    max_norm_delta = std::max(max_norm_delta, std::fabs(encoded.l2_norm() - 1.0));
    for (const auto& [index, value] : encoded.entries) {
      const std::string& token = vocab.token_at(index);
      const double expected = tf.at(token) * oracle_idf(token) / norm;
      max_component_delta = std::max(max_component_delta, std::fabs(value - expected));
    }
  }

  CriterionOutcome outcome;
  outcome.pass = max_idf_delta < kTolerance && max_component_delta < kTolerance &&
                 max_norm_delta < kTolerance;
  outcome.detail = "max idf delta " + format_sci(max_idf_delta) + ", max component delta " +
                   format_sci(max_component_delta) + ", max norm delta " +
                   format_sci(max_norm_delta);
  return outcome;
}

// ------------------------------------------------------------ criterion 6
// The SPAMC/1.5 CHECK request for the pinned record must match the
// committed golden file byte for byte, and a scripted daemon must drive the
// three response paths: spam, not spam, and a protocol error.

CriterionOutcome criterion_spamc() {
  EmailRecord record;
  record.id = "golden-1";
  record.sender = "a@x";
  record.receiver = "b@y";
  record.subject = "hi";
  record.body = "hello";
  record.label = Label::Phishing;

  const std::string request = spamc_check_request(record);
  const std::string golden = read_text_file(kDataDir / "spamc_check_request.golden");
  const bool golden_ok = request == golden;

  bool spam_ok = false;
  bool wire_ok = false;
  {
    testsupport::FakeSpamd daemon("SPAMD/1.1 0 EX_OK\r\nSpam: True ; 15.2 / 5.0\r\n\r\n");
    SpamdDetector detector("127.0.0.1", daemon.port(), std::nullopt, 5.0);
    const DetectorVerdict verdict = detector.classify(record);
    spam_ok = verdict.decision == Decision::Phishing && verdict.score &&
              std::fabs(*verdict.score - 15.2) < 1e-12;
    const auto seen = daemon.requests();
    wire_ok = seen.size() == 1 && seen[0] == golden;
  }

  bool ham_ok = false;
  {
    testsupport::FakeSpamd daemon("SPAMD/1.1 0 EX_OK\r\nSpam: False ; -1.0 / 5.0\r\n\r\n");
    SpamdDetector detector("127.0.0.1", daemon.port(), std::nullopt, 5.0);
    ham_ok = detector.classify(record).decision == Decision::Legitimate;
  }

  bool error_ok = false;
  {
    testsupport::FakeSpamd daemon("SPAMD/1.1 68 EX_NOHOST\r\n\r\n");
    SpamdDetector detector("127.0.0.1", daemon.port(), std::nullopt, 5.0);
    const DetectorVerdict verdict = detector.classify(record);
    error_ok = verdict.decision == Decision::Error && verdict.rationale &&
               verdict.rationale->find("EX_NOHOST") != std::string::npos;
  }

  CriterionOutcome outcome;
  outcome.pass = golden_ok && spam_ok && wire_ok && ham_ok && error_ok;
  outcome.detail = std::string("golden bytes ") + (golden_ok ? "match" : "DIFFER") +
                   "; daemon paths spam/ham/error " +
                   (spam_ok && wire_ok ? "ok" : "BAD") + "/" + (ham_ok ? "ok" : "BAD") +
                   "/" + (error_ok ? "ok" : "BAD");
  return outcome;
}

// ------------------------------------------------------------ criterion 7
// The first built-in worked example: its rewrite must pass every
// validation rule, and the original email it rewrites must fail exactly
// the urgency-words and personalized-greeting rules.

CriterionOutcome criterion_reference_pair() {
  const prompts::ShotPair& shot = prompts::default_shots().front();

  RephrasedOutput rewrite;
  rewrite.subject = shot.rephrased_subject;
  rewrite.body = shot.rephrased_body;
  rewrite.source_id = shot.original.id;
  const ValidationReport rewrite_report = validate(rewrite, shot.original);

  RephrasedOutput untouched;
  untouched.subject = shot.original.subject;
  untouched.body = shot.original.body;
  untouched.source_id = shot.original.id;
  const ValidationReport original_report = validate(untouched, shot.original);
  const std::vector<std::string> expected = {"no_urgency_words", "personalized_greeting"};

  CriterionOutcome outcome;
  outcome.pass = rewrite_report.pass() && original_report.failed_rules() == expected;
  std::string failed;
  for (const auto& rule : original_report.failed_rules()) {
    if (!failed.empty()) failed += ", ";
    failed += rule;
  }
  outcome.detail = std::string("rewrite ") + (rewrite_report.pass() ? "passes" : "FAILS") +
                   "; original fails {" + failed + "}";
  return outcome;
}

// --------------------------------------------------- shared desk context
// Criteria 8 and 9 share one seeded 400-email synthetic corpus, its 80/20
// split, and the stub-rephrased test phishing.

struct DeskContext {
  Corpus train;
  Corpus test_phishing;
  Corpus rephrased_phishing;
  std::size_t rephrase_failures = 0;
};

const DeskContext& desk_context() {
  static const DeskContext context = [] {
    DeskContext ctx;
    const Corpus corpus = testsupport::make_desk_corpus(200, 42);
    SplitResult parts = split(corpus, 0.8, 42);

    ChatGateway gateway = make_stub_gateway();
    const RephraseResult rephrased =
        rephrase_corpus(parts.test, PromptTemplate::zero_shot(), stub_provider(), gateway, 3);
    ctx.rephrase_failures = rephrased.failures.size();

    ctx.test_phishing = Corpus("test-phishing");
    for (const auto& record : parts.test.records()) {
      if (record.label == Label::Phishing) ctx.test_phishing.add(record);
    }
    ctx.rephrased_phishing = Corpus("test-phishing-rephrased");
    for (const auto& record : rephrased.corpus.records()) {
      if (record.provenance != Provenance::Original) ctx.rephrased_phishing.add(record);
    }
    ctx.train = std::move(parts.train);
    return ctx;
  }();
  return context;
}

ModelHyperparameters seeded_hyperparameters() {
  ModelHyperparameters params;
  params.lr.seed = 42;
  params.svm.seed = 42;
  return params;
}

double phishing_recall(const TrainedModel& model, const EncoderBinding& binding,
                       const Corpus& phishing_only) {
  std::size_t hits = 0;
  for (const auto& record : phishing_only.records()) {
    if (classify(model, binding.encode(record), 0.5) == Label::Phishing) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(phishing_only.size());
}

// ------------------------------------------------------------ criterion 8
// Training the three classifiers on original emails and testing against
// stub-rephrased phishing must strictly lower recall for every model, and
// the Naive Bayes score distribution over the phishing records must shift
// toward the boundary (lower mean). Budget: 30 seconds.

CriterionOutcome criterion_degradation() {
  constexpr double kBudgetSeconds = 30.0;
  const auto start = Clock::now();
  const DeskContext& ctx = desk_context();

  const auto vocab =
      std::make_shared<Vocabulary>(Vocabulary::fit(ctx.train, TokenizerConfig{}));
  const EncoderBinding binding = EncoderBinding::tfidf(vocab);
  const FeatureMatrix matrix = encode_corpus(ctx.train, binding);
  const ModelHyperparameters params = seeded_hyperparameters();

  bool all_degraded = true;
  std::string summary;
  std::optional<double> nb_mean_original;
  std::optional<double> nb_mean_rephrased;
  for (ModelKind kind :
       {ModelKind::NaiveBayes, ModelKind::LogisticRegression, ModelKind::LinearSvm}) {
    const TrainedModel model =
        fit_model(kind, matrix, params, binding.kind(), binding.fingerprint());
    const double recall_original = phishing_recall(model, binding, ctx.test_phishing);
    const double recall_rephrased = phishing_recall(model, binding, ctx.rephrased_phishing);
    all_degraded = all_degraded && recall_rephrased < recall_original;
    if (!summary.empty()) summary += ", ";
    summary += std::string(model_kind_name(kind)) + " " + format_ratio(recall_original) +
               "->" + format_ratio(recall_rephrased);
    if (kind == ModelKind::NaiveBayes) {
      nb_mean_original = boundary_distribution(model, binding, ctx.test_phishing,
                                               Condition::Original, 20)
                             .mean;
      nb_mean_rephrased = boundary_distribution(model, binding, ctx.rephrased_phishing,
                                                Condition::ZeroShotRephrased, 20)
                              .mean;
    }
  }

  const bool mean_dropped =
      nb_mean_original && nb_mean_rephrased && *nb_mean_rephrased < *nb_mean_original;
  const double elapsed = seconds_since(start);

  CriterionOutcome outcome;
  outcome.pass = all_degraded && mean_dropped && elapsed < kBudgetSeconds;
  outcome.detail = "recall " + summary + "; nb score mean " +
                   format_ratio(nb_mean_original.value_or(0.0)) + "->" +
                   format_ratio(nb_mean_rephrased.value_or(0.0)) + "; " +
                   format_seconds(elapsed);
  if (ctx.rephrase_failures > 0) {
    outcome.notes.push_back(std::to_string(ctx.rephrase_failures) +
                            " test record(s) failed stub rephrasing");
  }
  return outcome;
}

// ------------------------------------------------------------ criterion 9
// Augmenting the training corpus with stub-rephrased and stub-generated
// phishing must lift accuracy on the rephrased test phishing by at least
// five percentage points for every model kind. Budget: 60 seconds.

CriterionOutcome criterion_augmentation() {
  constexpr double kBudgetSeconds = 60.0;
  constexpr double kMinimumLift = 0.05;
  const auto start = Clock::now();
  const DeskContext& ctx = desk_context();

  ChatGateway gateway = make_stub_gateway();
  const RephraseResult train_rephrased =
      rephrase_corpus(ctx.train, PromptTemplate::zero_shot(), stub_provider(), gateway, 3);
  const Corpus generated = generate_phishing(gateway, stub_provider(), 40, 42);

  MixSpec mix;
  mix.originals = 320;
  mix.rephrased = 160;
  mix.generated = 40;
  const AugmentedDataset dataset =
      build_augmented(ctx.train, {train_rephrased.corpus, generated}, mix, 42, "stub");

  ExperimentSpec spec;
  spec.params = seeded_hyperparameters();
  const AugmentExperimentResult result =
      run_augment_experiment(ctx.train, dataset.corpus, ctx.rephrased_phishing, spec);

  bool all_lifted = true;
  std::string summary;
  for (const auto& cell : result.cells) {
    all_lifted = all_lifted && cell.delta >= kMinimumLift;
    if (!summary.empty()) summary += ", ";
    summary += std::string(model_kind_name(cell.kind)) + " " +
               format_ratio(cell.traditional_accuracy) + "->" +
               format_ratio(cell.augmented_accuracy);
  }
  const double elapsed = seconds_since(start);

  CriterionOutcome outcome;
  outcome.pass = all_lifted && result.cells.size() == 3 && elapsed < kBudgetSeconds;
  outcome.detail = summary + "; " + format_seconds(elapsed);
  return outcome;
}

// ----------------------------------------------------------- criterion 10
// Two cli experiment runs with the same seed and the stub provider, from
// two different working directories with relative paths, must produce
// byte-identical output trees; and corpus JSONL must round-trip through
// export and ingest without losing a byte.

std::map<std::string, std::string> tree_contents(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      files[fs::relative(entry.path(), root).generic_string()] =
          read_text_file(entry.path());
    }
  }
  return files;
}

CriterionOutcome criterion_determinism() {
  testsupport::TempDir tmp;
  const Corpus desk = testsupport::make_desk_corpus(30, 7);
  const char* config_text =
      "[run]\n"
      "output_dir = out\n"
      "[corpus]\n"
      "path = desk.jsonl\n"
      "train_fraction = 0.8\n"
      "[experiment]\n"
      "mix_originals = 40\n"
      "mix_rephrased = 20\n"
      "generate = 10\n"
      "mix_generated = 5\n";

  CriterionOutcome outcome;
  for (const char* run : {"run1", "run2"}) {
    const fs::path dir = tmp / run;
    fs::create_directories(dir);
    export_jsonl(desk, dir / "desk.jsonl");
    write_text_file(dir / "cfg.ini", config_text);
    const auto result =
        testsupport::run_cli({"experiment", "-c", "cfg.ini"}, dir);
    if (result.exit_code != 0) {
      outcome.notes.push_back(std::string(run) + " exited " +
                              std::to_string(result.exit_code) + ": " +
                              result.output.substr(0, 200));
      return outcome;
    }
  }

  const auto first = tree_contents(tmp / "run1" / "out");
  const auto second = tree_contents(tmp / "run2" / "out");
  bool trees_match = first.size() == second.size() && !first.empty();
  if (trees_match) {
    for (const auto& [path, bytes] : first) {
      const auto other = second.find(path);
      if (other == second.end() || other->second != bytes) {
        trees_match = false;
        outcome.notes.push_back("output file differs between runs: " + path);
        break;
      }
    }
  } else {
    outcome.notes.push_back("output trees hold " + std::to_string(first.size()) + " vs " +
                            std::to_string(second.size()) + " files");
  }

  // Lossless JSONL round-trip, including escapes and non-ASCII text.
  Corpus tricky_corpus = testsupport::make_desk_corpus(5, 3);
  EmailRecord tricky;
  tricky.id = "tricky-1";
  tricky.sender = "ops@corp.example";
  tricky.receiver = "dana@corp.example";
  tricky.subject = "quotes \" and \\ backslash";
  tricky.body = "line one\nline two\twith tab and caf\xC3\xA9 na\xC3\xAFve text";
  tricky.label = Label::Phishing;
  tricky_corpus.add(tricky);
  const std::string exported = to_jsonl(tricky_corpus);
  write_text_file(tmp / "roundtrip.jsonl", exported);
  const Corpus reloaded = ingest(tmp / "roundtrip.jsonl", CorpusFormat::Jsonl).corpus;
  const bool roundtrip_ok = to_jsonl(reloaded) == exported;
  if (!roundtrip_ok) outcome.notes.push_back("corpus JSONL did not round-trip losslessly");

  outcome.pass = trees_match && roundtrip_ok;
  outcome.detail = std::to_string(first.size()) + " output files compared, trees " +
                   (trees_match ? "identical" : "DIFFER") + ", jsonl round-trip " +
                   (roundtrip_ok ? "lossless" : "LOSSY");
  return outcome;
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* summary;
    std::function<CriterionOutcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "reference metric tables reproduce from their confusion counts",
       criterion_reference_rows},
      {2, "naive bayes matches an independent counting oracle", criterion_nb_oracle},
      {3, "logistic-regression gradients match central finite differences",
       criterion_lr_gradient},
      {4, "linear svm separates the committed fixture deterministically",
       criterion_svm_separable},
      {5, "tf-idf encoding matches the hand-derived oracle", criterion_tfidf_oracle},
      {6, "spamc requests match the golden bytes and scripted daemon paths",
       criterion_spamc},
      {7, "the built-in worked example validates as designed", criterion_reference_pair},
      {8, "rephrasing degrades every local model's recall", criterion_degradation},
      {9, "augmented training recovers at least five points per model",
       criterion_augmentation},
      {10, "same-seed cli runs are byte-identical and jsonl round-trips",
       criterion_determinism},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    CriterionOutcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& error) {
      outcome.pass = false;
      outcome.notes.push_back(std::string("unexpected exception: ") + error.what());
    }
    if (!outcome.pass) ++failures;
    std::string line = outcome.pass ? "PASS" : "FAIL";
    line += " criterion " + std::to_string(criterion.number) + ": " + criterion.summary;
    if (!outcome.detail.empty()) line += " (" + outcome.detail + ")";
    std::puts(line.c_str());
    for (const auto& note : outcome.notes) {
      std::puts(("  - " + note).c_str());
    }
  }

  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures;
}
