#include "phishbench/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "phishbench/errors.hpp"
#include "phishbench/rng.hpp"
#include "phishbench/util.hpp"

namespace phishbench {

namespace {

using ordered_json = nlohmann::ordered_json;

double stable_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow for large |z|.
double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

void check_dimension(std::size_t have, std::size_t want, const char* what) {
  if (have != want) {
    throw DataError(std::string(what) + ": dimension mismatch (vector " +
                    std::to_string(have) + ", model " + std::to_string(want) + ")");
  }
}

}  // namespace

NaiveBayesModel nb_fit(const FeatureMatrix& matrix, double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("naive bayes alpha must be positive");
  if (matrix.rows.empty()) throw DataError("cannot fit on an empty matrix");

  const std::size_t dim = matrix.dimension;
  std::size_t docs_phishing = 0;
  std::size_t docs_legitimate = 0;
  std::vector<double> mass_phishing(dim, 0.0);
  std::vector<double> mass_legitimate(dim, 0.0);

  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    const bool phishing = matrix.labels[i] == 1;
    auto& mass = phishing ? mass_phishing : mass_legitimate;
    (phishing ? docs_phishing : docs_legitimate) += 1;
    for (const auto& [index, value] : matrix.rows[i].entries) {
      if (value < 0.0) {
        throw DataError("naive bayes requires nonnegative feature values");
      }
      mass[index] += value;
    }
  }
  if (docs_phishing == 0 || docs_legitimate == 0) {
    throw DataError(std::string("class absent from training data: ") +
                    (docs_phishing == 0 ? "phishing" : "legitimate"));
  }

  NaiveBayesModel model;
  model.alpha = alpha;
  const double total_docs = static_cast<double>(docs_phishing + docs_legitimate);
  model.log_prior_phishing = std::log(static_cast<double>(docs_phishing) / total_docs);
  model.log_prior_legitimate =
      std::log(static_cast<double>(docs_legitimate) / total_docs);

  const double v = static_cast<double>(dim);
  const double total_phishing =
      std::accumulate(mass_phishing.begin(), mass_phishing.end(), 0.0);
  const double total_legitimate =
      std::accumulate(mass_legitimate.begin(), mass_legitimate.end(), 0.0);
  model.log_likelihood_phishing.resize(dim);
  model.log_likelihood_legitimate.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    model.log_likelihood_phishing[j] =
        std::log((alpha + mass_phishing[j]) / (alpha * v + total_phishing));
    model.log_likelihood_legitimate[j] =
        std::log((alpha + mass_legitimate[j]) / (alpha * v + total_legitimate));
  }
  return model;
}

ClassPosterior nb_posterior(const NaiveBayesModel& model, const FeatureVector& vec) {
  check_dimension(vec.dimension, model.dimension(), "nb_posterior");
  double log_phishing = model.log_prior_phishing;
  double log_legitimate = model.log_prior_legitimate;
  for (const auto& [index, value] : vec.entries) {
    log_phishing += value * model.log_likelihood_phishing[index];
    log_legitimate += value * model.log_likelihood_legitimate[index];
  }
  const double peak = std::max(log_phishing, log_legitimate);
  const double ep = std::exp(log_phishing - peak);
  const double el = std::exp(log_legitimate - peak);
  return ClassPosterior{ep / (ep + el), el / (ep + el)};
}

double nb_word_posterior(const NaiveBayesModel& model, std::uint32_t token_index) {
  if (token_index >= model.dimension()) {
    throw DataError("token index " + std::to_string(token_index) +
                    " outside vocabulary of size " + std::to_string(model.dimension()));
  }
  FeatureVector unit;
  unit.dimension = model.dimension();
  unit.entries.emplace_back(token_index, 1.0);
  return nb_posterior(model, unit).phishing;
}

LrGradient lr_loss_and_gradient(const std::vector<double>& weights, double bias,
                                const FeatureMatrix& matrix, double l2_lambda) {
  const std::size_t n = matrix.rows.size();
  if (n == 0) throw DataError("cannot evaluate loss on an empty matrix");

  LrGradient out;
  out.grad_weights.assign(weights.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = matrix.rows[i].dot(weights) + bias;
    const double y = static_cast<double>(matrix.labels[i]);
    out.loss += softplus(z) - y * z;
    const double residual = stable_sigmoid(z) - y;
    for (const auto& [index, value] : matrix.rows[i].entries) {
      out.grad_weights[index] += residual * value;
    }
    out.grad_bias += residual;
  }
  const double scale = 1.0 / static_cast<double>(n);
  out.loss *= scale;
  out.grad_bias *= scale;
  double reg = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    out.grad_weights[j] = out.grad_weights[j] * scale + l2_lambda * weights[j];
    reg += weights[j] * weights[j];
  }
  out.loss += 0.5 * l2_lambda * reg;
  return out;
}

LogisticRegressionModel lr_fit(const FeatureMatrix& matrix, const LrConfig& config) {
  if (!(config.learning_rate > 0.0)) {
    throw ConfigError("logistic regression learning rate must be positive");
  }
  if (config.l2_lambda < 0.0) {
    throw ConfigError("logistic regression lambda must be nonnegative");
  }
  for (int label : matrix.labels) {
    if (label != 0 && label != 1) throw DataError("labels must be 0 or 1");
  }

  LogisticRegressionModel model;
  model.config = config;
  model.weights.assign(matrix.dimension, 0.0);
  model.bias = 0.0;
  model.epoch_loss.reserve(config.epochs);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const LrGradient grad =
        lr_loss_and_gradient(model.weights, model.bias, matrix, config.l2_lambda);
    if (!std::isfinite(grad.loss)) {
      throw ConfigError("logistic regression diverged at epoch " +
                        std::to_string(epoch) + "; reduce the learning rate");
    }
    model.epoch_loss.push_back(grad.loss);
    for (std::size_t j = 0; j < model.weights.size(); ++j) {
      model.weights[j] -= config.learning_rate * grad.grad_weights[j];
    }
    model.bias -= config.learning_rate * grad.grad_bias;
  }
  return model;
}

double lr_probability(const LogisticRegressionModel& model, const FeatureVector& vec) {
  check_dimension(vec.dimension, model.weights.size(), "lr_probability");
  return stable_sigmoid(vec.dot(model.weights) + model.bias);
}

double svm_objective(const std::vector<double>& weights, double bias,
                     const FeatureMatrix& matrix, double lambda) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    const double y = matrix.labels[i] == 1 ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - y * (matrix.rows[i].dot(weights) + bias));
  }
  hinge /= static_cast<double>(matrix.rows.size());
  double reg = 0.0;
  for (double w : weights) reg += w * w;
  return 0.5 * lambda * reg + hinge;
}

LinearSvmModel svm_fit(const FeatureMatrix& matrix, const SvmConfig& config) {
  if (!(config.lambda > 0.0)) throw ConfigError("svm lambda must be positive");
  if (matrix.rows.empty()) throw DataError("cannot fit on an empty matrix");

  const std::size_t n = matrix.rows.size();
  const std::size_t dim = matrix.dimension;
  std::vector<double> w(dim, 0.0);
  double b = 0.0;
  std::vector<double> w_sum(dim, 0.0);
  double b_sum = 0.0;

  LinearSvmModel model;
  model.config = config;
  model.epoch_objective.reserve(config.epochs);

  Xoshiro256StarStar rng(derive_seed(config.seed, "svm_fit"));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (config.lambda * static_cast<double>(t));
      const double y = matrix.labels[i] == 1 ? 1.0 : -1.0;
      const double margin = y * (matrix.rows[i].dot(w) + b);
      const double shrink = 1.0 - eta * config.lambda;
      for (double& wj : w) wj *= shrink;
      if (margin < 1.0) {
        for (const auto& [index, value] : matrix.rows[i].entries) {
          w[index] += eta * y * value;
        }
        b += eta * y;
      }
      for (std::size_t j = 0; j < dim; ++j) w_sum[j] += w[j];
      b_sum += b;
    }
    std::vector<double> w_avg(dim);
    const double inv_t = 1.0 / static_cast<double>(t);
    for (std::size_t j = 0; j < dim; ++j) w_avg[j] = w_sum[j] * inv_t;
    const double b_avg = b_sum * inv_t;
    for (double wj : w_avg) {
      if (!std::isfinite(wj)) {
        throw ConfigError("svm training produced non-finite parameters at epoch " +
                          std::to_string(epoch));
      }
    }
    if (!std::isfinite(b_avg)) {
      throw ConfigError("svm training produced non-finite parameters at epoch " +
                        std::to_string(epoch));
    }
    model.epoch_objective.push_back(svm_objective(w_avg, b_avg, matrix, config.lambda));
  }

  const double inv_t = t > 0 ? 1.0 / static_cast<double>(t) : 0.0;
  model.weights.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) model.weights[j] = w_sum[j] * inv_t;
  model.bias = b_sum * inv_t;
  return model;
}

double svm_margin(const LinearSvmModel& model, const FeatureVector& vec) {
  check_dimension(vec.dimension, model.weights.size(), "svm_margin");
  return vec.dot(model.weights) + model.bias;
}

ModelKind parse_model_kind(std::string_view text) {
  const std::string lowered = to_lower(trim(text));
  if (lowered == "naive_bayes" || lowered == "nb") return ModelKind::NaiveBayes;
  if (lowered == "logistic_regression" || lowered == "lr") {
    return ModelKind::LogisticRegression;
  }
  if (lowered == "linear_svm" || lowered == "svm") return ModelKind::LinearSvm;
  throw ConfigError("unknown model kind: \"" + std::string(text) + "\"");
}

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::NaiveBayes: return "naive_bayes";
    case ModelKind::LogisticRegression: return "logistic_regression";
    case ModelKind::LinearSvm: return "linear_svm";
  }
  throw ConfigError("invalid model kind value");
}

TrainedModel::TrainedModel(NaiveBayesModel model, EncoderKind encoder,
                           std::string fingerprint)
    : kind_(ModelKind::NaiveBayes),
      model_(std::move(model)),
      encoder_kind_(encoder),
      encoder_fingerprint_(std::move(fingerprint)) {}

TrainedModel::TrainedModel(LogisticRegressionModel model, EncoderKind encoder,
                           std::string fingerprint)
    : kind_(ModelKind::LogisticRegression),
      model_(std::move(model)),
      encoder_kind_(encoder),
      encoder_fingerprint_(std::move(fingerprint)) {}

TrainedModel::TrainedModel(LinearSvmModel model, EncoderKind encoder,
                           std::string fingerprint)
    : kind_(ModelKind::LinearSvm),
      model_(std::move(model)),
      encoder_kind_(encoder),
      encoder_fingerprint_(std::move(fingerprint)) {}

std::size_t TrainedModel::dimension() const {
  switch (kind_) {
    case ModelKind::NaiveBayes: return nb().dimension();
    case ModelKind::LogisticRegression: return lr().weights.size();
    case ModelKind::LinearSvm: return svm().weights.size();
  }
  return 0;
}

double TrainedModel::score(const FeatureVector& vec) const {
  switch (kind_) {
    case ModelKind::NaiveBayes: return nb_posterior(nb(), vec).phishing;
    case ModelKind::LogisticRegression: return lr_probability(lr(), vec);
    case ModelKind::LinearSvm:
      // Margins are not probabilities; the fixed logistic link only makes
      // them comparable to the shared threshold.
      return stable_sigmoid(svm_margin(svm(), vec));
  }
  throw DataError("invalid model kind value");
}

const NaiveBayesModel& TrainedModel::nb() const {
  return std::get<NaiveBayesModel>(model_);
}
const LogisticRegressionModel& TrainedModel::lr() const {
  return std::get<LogisticRegressionModel>(model_);
}
const LinearSvmModel& TrainedModel::svm() const {
  return std::get<LinearSvmModel>(model_);
}

void TrainedModel::save(const std::filesystem::path& path) const {
  ordered_json doc;
  doc["format_version"] = 1;
  doc["kind"] = model_kind_name(kind_);
  doc["encoder"] = encoder_kind_name(encoder_kind_);
  doc["encoder_fingerprint"] = encoder_fingerprint_;
  switch (kind_) {
    case ModelKind::NaiveBayes: {
      const auto& m = nb();
      doc["hyperparameters"] = {{"alpha", m.alpha}};
      doc["parameters"] = {
          {"log_prior_phishing", m.log_prior_phishing},
          {"log_prior_legitimate", m.log_prior_legitimate},
          {"log_likelihood_phishing", m.log_likelihood_phishing},
          {"log_likelihood_legitimate", m.log_likelihood_legitimate},
      };
      break;
    }
    case ModelKind::LogisticRegression: {
      const auto& m = lr();
      doc["hyperparameters"] = {
          {"learning_rate", m.config.learning_rate},
          {"epochs", m.config.epochs},
          {"l2_lambda", m.config.l2_lambda},
          {"seed", m.config.seed},
      };
      doc["parameters"] = {
          {"weights", m.weights},
          {"bias", m.bias},
          {"epoch_loss", m.epoch_loss},
      };
      break;
    }
    case ModelKind::LinearSvm: {
      const auto& m = svm();
      doc["hyperparameters"] = {
          {"lambda", m.config.lambda},
          {"epochs", m.config.epochs},
          {"seed", m.config.seed},
      };
      doc["parameters"] = {
          {"weights", m.weights},
          {"bias", m.bias},
          {"epoch_objective", m.epoch_objective},
      };
      break;
    }
  }
  write_text_file(path, doc.dump(2) + "\n");
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed model file " + path.string() + ": " + e.what());
  }
  if (doc.value("format_version", 0) != 1) {
    throw DataError("unsupported model format version in " + path.string());
  }
  const ModelKind kind = parse_model_kind(doc.at("kind").get<std::string>());
  const EncoderKind encoder = parse_encoder_kind(doc.at("encoder").get<std::string>());
  std::string fingerprint = doc.at("encoder_fingerprint").get<std::string>();
  const auto& params = doc.at("parameters");
  const auto& hyper = doc.at("hyperparameters");

  switch (kind) {
    case ModelKind::NaiveBayes: {
      NaiveBayesModel m;
      m.alpha = hyper.at("alpha").get<double>();
      m.log_prior_phishing = params.at("log_prior_phishing").get<double>();
      m.log_prior_legitimate = params.at("log_prior_legitimate").get<double>();
      m.log_likelihood_phishing =
          params.at("log_likelihood_phishing").get<std::vector<double>>();
      m.log_likelihood_legitimate =
          params.at("log_likelihood_legitimate").get<std::vector<double>>();
      if (m.log_likelihood_phishing.size() != m.log_likelihood_legitimate.size()) {
        throw DataError("inconsistent likelihood arrays in " + path.string());
      }
      return TrainedModel(std::move(m), encoder, std::move(fingerprint));
    }
    case ModelKind::LogisticRegression: {
      LogisticRegressionModel m;
      m.config.learning_rate = hyper.at("learning_rate").get<double>();
      m.config.epochs = hyper.at("epochs").get<std::size_t>();
      m.config.l2_lambda = hyper.at("l2_lambda").get<double>();
      m.config.seed = hyper.at("seed").get<std::uint64_t>();
      m.weights = params.at("weights").get<std::vector<double>>();
      m.bias = params.at("bias").get<double>();
      m.epoch_loss = params.at("epoch_loss").get<std::vector<double>>();
      return TrainedModel(std::move(m), encoder, std::move(fingerprint));
    }
    case ModelKind::LinearSvm: {
      LinearSvmModel m;
      m.config.lambda = hyper.at("lambda").get<double>();
      m.config.epochs = hyper.at("epochs").get<std::size_t>();
      m.config.seed = hyper.at("seed").get<std::uint64_t>();
      m.weights = params.at("weights").get<std::vector<double>>();
      m.bias = params.at("bias").get<double>();
      m.epoch_objective = params.at("epoch_objective").get<std::vector<double>>();
      return TrainedModel(std::move(m), encoder, std::move(fingerprint));
    }
  }
  throw DataError("invalid model kind value");
}

TrainedModel fit_model(ModelKind kind, const FeatureMatrix& matrix,
                       const ModelHyperparameters& params, EncoderKind encoder,
                       const std::string& encoder_fingerprint) {
  switch (kind) {
    case ModelKind::NaiveBayes:
      return TrainedModel(nb_fit(matrix, params.nb_alpha), encoder, encoder_fingerprint);
    case ModelKind::LogisticRegression:
      return TrainedModel(lr_fit(matrix, params.lr), encoder, encoder_fingerprint);
    case ModelKind::LinearSvm:
      return TrainedModel(svm_fit(matrix, params.svm), encoder, encoder_fingerprint);
  }
  throw DataError("invalid model kind value");
}

Label classify(const TrainedModel& model, const FeatureVector& vec, double threshold) {
  return model.score(vec) >= threshold ? Label::Phishing : Label::Legitimate;
}

}  // namespace phishbench
