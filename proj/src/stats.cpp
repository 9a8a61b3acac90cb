#include "parlens/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace parlens {

namespace {

double centered_r(const Eigen::VectorXd& xc, const Eigen::VectorXd& yc,
                  double x_norm, double y_norm) {
  return xc.dot(yc) / (x_norm * y_norm);
}

}  // namespace

double pearson_r(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size())
    throw DimensionMismatch("vectors have lengths " + std::to_string(x.size()) +
                            " and " + std::to_string(y.size()));
  if (x.size() < 3) throw DegenerateInput("need at least 3 observations");
  Eigen::VectorXd xc = x.array() - x.mean();
  Eigen::VectorXd yc = y.array() - y.mean();
  double xn = xc.norm(), yn = yc.norm();
  if (xn == 0.0 || yn == 0.0)
    throw DegenerateInput("constant vector has no correlation");
  return centered_r(xc, yc, xn, yn);
}

PearsonResult pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      int permutations, std::uint64_t seed) {
  PearsonResult result;
  result.r = pearson_r(x, y);
  if (permutations < 1) throw ValidationError("permutations must be >= 1");

  Eigen::VectorXd xc = x.array() - x.mean();
  Eigen::VectorXd yc = y.array() - y.mean();
  const double xn = xc.norm();
  const double yn = yc.norm();
  const double observed = std::abs(result.r);

  std::mt19937_64 rng(seed);
  std::vector<double> shuffled(yc.data(), yc.data() + yc.size());
  long hits = 0;
  for (int k = 0; k < permutations; ++k) {
    for (size_t i = shuffled.size() - 1; i > 0; --i) {
      std::uniform_int_distribution<size_t> pick(0, i);
      std::swap(shuffled[i], shuffled[pick(rng)]);
    }
    double dot = 0.0;
    for (Eigen::Index i = 0; i < xc.size(); ++i) dot += xc[i] * shuffled[i];
    if (std::abs(dot / (xn * yn)) >= observed - 1e-12) ++hits;
  }
  result.p = static_cast<double>(hits + 1) / (permutations + 1);
  return result;
}

namespace {

double softplus(double t) {
  // log(1 + exp(t)) without overflow
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

void check_inputs(const Eigen::MatrixXd& features, const std::vector<int>& labels) {
  if (features.rows() != static_cast<Eigen::Index>(labels.size()))
    throw DimensionMismatch("feature rows and label count differ");
  if (!features.allFinite())
    throw ValidationError("features contain non-finite values");
  for (int y : labels)
    if (y != 0 && y != 1) throw ValidationError("labels must be 0 or 1");
}

}  // namespace

double logistic_nll(const Eigen::VectorXd& weights, double bias,
                    const Eigen::MatrixXd& features, const std::vector<int>& labels,
                    const std::array<double, 2>& class_weights) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::VectorXd z = features * weights;
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double margin = z[i] + bias;
    // -log sigma(z) = softplus(-z); -log(1 - sigma(z)) = softplus(z)
    double loss = labels[i] == 1 ? softplus(-margin) : softplus(margin);
    total += class_weights[labels[i]] * loss;
  }
  return total / static_cast<double>(n);
}

void logistic_gradient(const Eigen::VectorXd& weights, double bias,
                       const Eigen::MatrixXd& features,
                       const std::vector<int>& labels,
                       const std::array<double, 2>& class_weights,
                       Eigen::VectorXd* grad_weights, double* grad_bias) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::VectorXd z = features * weights;
  Eigen::VectorXd residual(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double margin = z[i] + bias;
    double prob = 1.0 / (1.0 + std::exp(-margin));
    residual[i] = class_weights[labels[i]] * (prob - labels[i]);
  }
  *grad_weights = features.transpose() * residual / static_cast<double>(n);
  *grad_bias = residual.sum() / static_cast<double>(n);
}

RegressionModel logistic_fit(const Eigen::MatrixXd& features,
                             const std::vector<int>& labels, bool balance,
                             LogisticConfig config) {
  check_inputs(features, labels);
  long counts[2] = {0, 0};
  for (int y : labels) ++counts[y];
  if (counts[0] < 2 || counts[1] < 2)
    throw SingleClass("need at least 2 examples of each class");

  RegressionModel model;
  model.weights = Eigen::VectorXd::Zero(features.cols());
  if (balance) {
    double total = static_cast<double>(labels.size());
    model.class_weights = {total / (2.0 * counts[0]), total / (2.0 * counts[1])};
  }

  double loss = logistic_nll(model.weights, model.bias, features, labels,
                             model.class_weights);
  Eigen::VectorXd grad(features.cols());
  double grad_bias = 0.0;
  for (int iter = 0; iter < config.max_iter; ++iter) {
    logistic_gradient(model.weights, model.bias, features, labels,
                      model.class_weights, &grad, &grad_bias);
    double norm = std::sqrt(grad.squaredNorm() + grad_bias * grad_bias);
    if (norm < config.tol) break;

    double step = 4.0;
    while (step > 1e-12) {
      Eigen::VectorXd w = model.weights - step * grad;
      double b = model.bias - step * grad_bias;
      double candidate = logistic_nll(w, b, features, labels, model.class_weights);
      if (candidate <= loss - 0.5 * step * norm * norm) {
        model.weights = std::move(w);
        model.bias = b;
        loss = candidate;
        break;
      }
      step *= 0.5;
    }
    if (step <= 1e-12) break;  // no descent step left
  }
  return model;
}

Predictions logistic_predict(const RegressionModel& model,
                             const Eigen::MatrixXd& features) {
  if (features.cols() != model.weights.size())
    throw DimensionMismatch("model expects " + std::to_string(model.weights.size()) +
                            " features, got " + std::to_string(features.cols()));
  Predictions out;
  Eigen::VectorXd z = features * model.weights;
  out.probabilities.resize(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    out.probabilities[i] = 1.0 / (1.0 + std::exp(-(z[i] + model.bias)));
    out.labels.push_back(out.probabilities[i] >= 0.5 ? 1 : 0);
  }
  return out;
}

ClassificationReport classification_report(const std::vector<int>& truth,
                                           const std::vector<int>& predicted) {
  if (truth.size() != predicted.size())
    throw DimensionMismatch("label vectors differ in length");
  if (truth.empty()) throw DegenerateInput("no labels");

  long correct = 0;
  long tp[2] = {0, 0}, fp[2] = {0, 0}, fn[2] = {0, 0};
  for (size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == predicted[i]) {
      ++correct;
      ++tp[truth[i]];
    } else {
      ++fp[predicted[i]];
      ++fn[truth[i]];
    }
  }
  ClassificationReport report;
  report.accuracy = static_cast<double>(correct) / truth.size();
  for (int c = 0; c < 2; ++c) {
    auto& m = report.per_class[c];
    m.precision = tp[c] + fp[c] > 0
                      ? static_cast<double>(tp[c]) / (tp[c] + fp[c])
                      : 0.0;
    m.recall =
        tp[c] + fn[c] > 0 ? static_cast<double>(tp[c]) / (tp[c] + fn[c]) : 0.0;
    m.f1 = m.precision + m.recall > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
  }
  return report;
}

}  // namespace parlens
