#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "phishbench/textenc.hpp"

namespace phishbench {

/// Class posterior over the two labels; fields sum to 1.
struct ClassPosterior {
  double phishing = 0.0;
  double legitimate = 0.0;
};

/// Multinomial Naive Bayes with add-alpha smoothing. Likelihoods are
/// estimated from summed feature mass per class, so fractional inputs
/// (TF-IDF values) are valid evidence weights.
struct NaiveBayesModel {
  double log_prior_phishing = 0.0;
  double log_prior_legitimate = 0.0;
  std::vector<double> log_likelihood_phishing;
  std::vector<double> log_likelihood_legitimate;
  double alpha = 1.0;

  std::size_t dimension() const { return log_likelihood_phishing.size(); }
};

NaiveBayesModel nb_fit(const FeatureMatrix& matrix, double alpha);

/// Posterior via log-sum-exp normalization; probabilities sum to 1.
ClassPosterior nb_posterior(const NaiveBayesModel& model, const FeatureVector& vec);

/// Bayes' rule on the one-token document: the posterior of a unit vector
/// at the given index.
double nb_word_posterior(const NaiveBayesModel& model, std::uint32_t token_index);

struct LrConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 300;
  double l2_lambda = 1e-4;
  // Recorded for provenance; full-batch descent from zero init draws no
  // random numbers.
  std::uint64_t seed = 0;
};

struct LogisticRegressionModel {
  std::vector<double> weights;
  double bias = 0.0;
  LrConfig config;
  /// Regularized mean negative log-likelihood at the start of each epoch.
  std::vector<double> epoch_loss;
};

struct LrGradient {
  double loss = 0.0;
  std::vector<double> grad_weights;
  double grad_bias = 0.0;
};

/// Loss and analytic gradient of the L2-regularized logistic objective
/// (mean NLL + lambda/2 * ||w||^2; bias unregularized). Exposed separately
/// so tests can check it against finite differences.
LrGradient lr_loss_and_gradient(const std::vector<double>& weights, double bias,
                                const FeatureMatrix& matrix, double l2_lambda);

/// Full-batch gradient descent, fixed epoch count, zero initialization.
/// Throws when the loss goes non-finite, naming the epoch.
LogisticRegressionModel lr_fit(const FeatureMatrix& matrix, const LrConfig& config);

double lr_probability(const LogisticRegressionModel& model, const FeatureVector& vec);

struct SvmConfig {
  double lambda = 1e-4;
  std::size_t epochs = 200;
  std::uint64_t seed = 0;
};

/// Linear SVM trained by primal subgradient descent on hinge loss +
/// lambda/2 * ||w||^2 with step size 1/(lambda*t) and a seeded per-epoch
/// shuffle. The stored parameters are the averaged iterate, which is what
/// carries the near-monotone objective trace.
struct LinearSvmModel {
  std::vector<double> weights;
  double bias = 0.0;
  SvmConfig config;
  /// Objective evaluated at the running averaged iterate after each epoch.
  std::vector<double> epoch_objective;
};

LinearSvmModel svm_fit(const FeatureMatrix& matrix, const SvmConfig& config);

double svm_margin(const LinearSvmModel& model, const FeatureVector& vec);

/// Hinge objective at explicit parameters (used for the trace and tests).
double svm_objective(const std::vector<double>& weights, double bias,
                     const FeatureMatrix& matrix, double lambda);

enum class ModelKind { NaiveBayes, LogisticRegression, LinearSvm };

/// Accepts the canonical names plus the short aliases nb / lr / svm.
ModelKind parse_model_kind(std::string_view text);
std::string_view model_kind_name(ModelKind kind);

struct ModelHyperparameters {
  double nb_alpha = 1.0;
  LrConfig lr;
  SvmConfig svm;
  double threshold = 0.5;
};

/// A fitted classifier of any of the three kinds, bound to the encoder it
/// was trained with. score() is a phishing probability for NB/LR and the
/// margin through a fixed logistic link for the SVM, so one threshold
/// applies to all three.
class TrainedModel {
 public:
  TrainedModel(NaiveBayesModel model, EncoderKind encoder, std::string fingerprint);
  TrainedModel(LogisticRegressionModel model, EncoderKind encoder, std::string fingerprint);
  TrainedModel(LinearSvmModel model, EncoderKind encoder, std::string fingerprint);

  ModelKind kind() const { return kind_; }
  EncoderKind encoder_kind() const { return encoder_kind_; }
  const std::string& encoder_fingerprint() const { return encoder_fingerprint_; }
  std::size_t dimension() const;

  double score(const FeatureVector& vec) const;

  const NaiveBayesModel& nb() const;
  const LogisticRegressionModel& lr() const;
  const LinearSvmModel& svm() const;

  /// Versioned JSON document: kind, hyperparameters, parameter arrays, and
  /// the fingerprint of the encoder the model was fitted with.
  void save(const std::filesystem::path& path) const;
  static TrainedModel load(const std::filesystem::path& path);

 private:
  ModelKind kind_;
  std::variant<NaiveBayesModel, LogisticRegressionModel, LinearSvmModel> model_;
  EncoderKind encoder_kind_;
  std::string encoder_fingerprint_;
};

TrainedModel fit_model(ModelKind kind, const FeatureMatrix& matrix,
                       const ModelHyperparameters& params, EncoderKind encoder,
                       const std::string& encoder_fingerprint);

/// Phishing iff score >= threshold; ties flag as phishing (the
/// recall-conservative direction).
Label classify(const TrainedModel& model, const FeatureVector& vec,
               double threshold = 0.5);

}  // namespace phishbench
