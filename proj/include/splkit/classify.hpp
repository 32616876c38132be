#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "splkit/matrix.hpp"
#include "splkit/spl.hpp"

namespace splkit {

struct LabeledDataset {
  Matrix features;          // n x d
  std::vector<int> labels;  // one of {-1, +1} per row
};

void validateDataset(const LabeledDataset& data);

struct LogregParams {
  Vector w;  // empty means "not fitted yet"
  double b = 0.0;
};

// Full-batch gradient descent with Armijo backtracking on
// sum_i v_i * log(1 + exp(-y_i (w.x_i + b))) + (l2Reg/2)|w|^2, intercept free.
LogregParams weightedLogregFit(const LabeledDataset& data, const Vector& weights, double l2Reg,
                               double tol = 1e-6, int maxIter = 500, LogregParams warm = {});

// Softplus losses log(1 + exp(-margin)), overflow-safe at both tails.
Vector logregLosses(const LogregParams& params, const LabeledDataset& data);

double logregObjective(const LabeledDataset& data, const Vector& weights, double l2Reg,
                       const LogregParams& params);

// Negates the labels of round(fraction*n) indices drawn without replacement.
LabeledDataset flipLabels(const LabeledDataset& data, double fraction, std::uint64_t seed);

// Two spherical Gaussian classes, n/2 each, centers `separation` apart.
LabeledDataset twoGaussianData(int n, int d, double separation, std::uint64_t seed);

using Predictor = std::function<int(const Vector& features)>;
// Receives the training split and the held-out fold index (for per-fold seeds).
using Pipeline = std::function<Predictor(const LabeledDataset& train, int fold)>;

struct KfoldResult {
  std::vector<double> accuracies;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation over folds
};

// Stratified k-fold: per-class shuffled round-robin dealing keeps fold sizes
// within one of each other and class proportions within one sample per fold.
KfoldResult kfoldCv(const LabeledDataset& data, int k, const Pipeline& pipeline,
                    std::uint64_t seed);

class LogregWeightedModel : public WeightedModel {
 public:
  LogregWeightedModel(LabeledDataset data, double l2Reg, double tol = 1e-6, int maxIter = 500);
  Eigen::Index sampleCount() const override;
  void fitWeighted(const Vector& weights) override;
  Vector perSampleLosses() const override;
  double regularizationValue() const override;
  const LogregParams& params() const { return params_; }

 private:
  LabeledDataset data_;
  double l2Reg_;
  double tol_;
  int maxIter_;
  LogregParams params_;
};

}  // namespace splkit
