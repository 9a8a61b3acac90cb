#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "parlens/errors.hpp"

namespace parlens {

struct PearsonResult {
  double r = 0.0;
  double p = 1.0;
};

/// Product-moment correlation with a two-sided permutation-test p-value
/// (seeded, default 10000 shuffles). Throws DegenerateInput on a constant
/// vector, DimensionMismatch on unequal lengths.
PearsonResult pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      int permutations = 10000, std::uint64_t seed = 0);

/// r only, no permutation test.
double pearson_r(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

struct RegressionModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  std::array<double, 2> class_weights = {1.0, 1.0};
  std::vector<std::string> feature_names;
};

struct LogisticConfig {
  int max_iter = 5000;
  double tol = 1e-6;  // gradient norm stopping threshold
};

/// Class-weighted mean negative log-likelihood and its gradient; exposed so
/// the analytic gradient can be checked against finite differences.
double logistic_nll(const Eigen::VectorXd& weights, double bias,
                    const Eigen::MatrixXd& features, const std::vector<int>& labels,
                    const std::array<double, 2>& class_weights);
void logistic_gradient(const Eigen::VectorXd& weights, double bias,
                       const Eigen::MatrixXd& features,
                       const std::vector<int>& labels,
                       const std::array<double, 2>& class_weights,
                       Eigen::VectorXd* grad_weights, double* grad_bias);

/// Full-batch gradient descent with backtracking line search, run until the
/// gradient norm drops below tol or max_iter. With balance = true the class
/// weights are n_total / (2 * n_c).
RegressionModel logistic_fit(const Eigen::MatrixXd& features,
                             const std::vector<int>& labels, bool balance,
                             LogisticConfig config = {});

struct Predictions {
  std::vector<int> labels;
  Eigen::VectorXd probabilities;
};

Predictions logistic_predict(const RegressionModel& model,
                             const Eigen::MatrixXd& features);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ClassificationReport {
  double accuracy = 0.0;
  std::array<ClassMetrics, 2> per_class;
};

ClassificationReport classification_report(const std::vector<int>& truth,
                                           const std::vector<int>& predicted);

}  // namespace parlens
