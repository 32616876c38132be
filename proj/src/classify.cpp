#include "splkit/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace splkit {

namespace {

double softplus(double z) {
  if (z > 30.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Vector margins(const LogregParams& p, const LabeledDataset& data) {
  Vector m = data.features * p.w;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m[i] = static_cast<double>(data.labels[static_cast<size_t>(i)]) * (m[i] + p.b);
  }
  return m;
}

}  // namespace

void validateDataset(const LabeledDataset& data) {
  requireFinite(data.features, "dataset features");
  if (data.labels.size() != static_cast<size_t>(data.features.rows())) {
    throw std::invalid_argument("dataset: one label per feature row required");
  }
  bool pos = false, neg = false;
  for (int y : data.labels) {
    if (y == 1) {
      pos = true;
    } else if (y == -1) {
      neg = true;
    } else {
      throw std::invalid_argument("dataset: labels must be -1 or +1");
    }
  }
  if (!pos || !neg) throw std::invalid_argument("dataset: both classes must be present");
}

LogregParams weightedLogregFit(const LabeledDataset& data, const Vector& weights, double l2Reg,
                               double tol, int maxIter, LogregParams warm) {
  validateDataset(data);
  const Eigen::Index n = data.features.rows();
  const Eigen::Index d = data.features.cols();
  if (weights.size() != n) throw std::invalid_argument("weighted_logreg_fit: weight per sample");
  if ((weights.array() < 0.0).any() || !(weights.sum() > 0.0)) {
    throw std::invalid_argument("weighted_logreg_fit: weights must be >= 0 with positive sum");
  }
  if (!(l2Reg > 0.0)) throw std::invalid_argument("weighted_logreg_fit: l2_reg must be positive");

  LogregParams p = std::move(warm);
  if (p.w.size() != d) {
    p.w = Vector::Zero(d);
    p.b = 0.0;
  }

  const auto objective = [&](const LogregParams& q) {
    Vector m = margins(q, data);
    double obj = 0.5 * l2Reg * q.w.squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i) obj += weights[i] * softplus(-m[i]);
    return obj;
  };

  double step = 1.0;
  double obj = objective(p);
  for (int it = 0; it < maxIter; ++it) {
    const Vector m = margins(p, data);
    Vector gw = l2Reg * p.w;
    double gb = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double coeff =
          -weights[i] * sigmoid(-m[i]) * static_cast<double>(data.labels[static_cast<size_t>(i)]);
      gw.noalias() += coeff * data.features.row(i).transpose();
      gb += coeff;
    }
    const double gradSq = gw.squaredNorm() + gb * gb;
    if (!std::isfinite(gradSq)) {
      throw std::runtime_error("weighted_logreg_fit: non-finite gradient at iteration " +
                               std::to_string(it));
    }
    if (std::sqrt(gradSq) <= tol) break;

    // Armijo backtracking; the accepted step seeds the next search.
    double alpha = std::min(1.0, 4.0 * step);
    bool accepted = false;
    for (int shrink = 0; shrink < 60; ++shrink) {
      LogregParams trial{p.w - alpha * gw, p.b - alpha * gb};
      const double trialObj = objective(trial);
      if (trialObj <= obj - 1e-4 * alpha * gradSq) {
        p = std::move(trial);
        obj = trialObj;
        step = alpha;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // step underflow: gradient-level noise, nothing left to gain
  }
  return p;
}

Vector logregLosses(const LogregParams& params, const LabeledDataset& data) {
  validateDataset(data);
  if (params.w.size() != data.features.cols()) {
    throw std::invalid_argument("logreg_losses: parameter dimension mismatch");
  }
  Vector m = margins(params, data);
  return m.unaryExpr([](double v) { return softplus(-v); });
}

double logregObjective(const LabeledDataset& data, const Vector& weights, double l2Reg,
                       const LogregParams& params) {
  Vector losses = logregLosses(params, data);
  return weights.dot(losses) + 0.5 * l2Reg * params.w.squaredNorm();
}

LabeledDataset flipLabels(const LabeledDataset& data, double fraction, std::uint64_t seed) {
  validateDataset(data);
  if (fraction < 0.0 || fraction >= 1.0) {
    throw std::invalid_argument("flip_labels: fraction must lie in [0, 1)");
  }
  const size_t n = data.labels.size();
  const size_t flips = static_cast<size_t>(std::lround(fraction * static_cast<double>(n)));
  LabeledDataset out = data;
  if (flips == 0) return out;

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::mt19937_64 rng(seed);
  for (size_t i = 0; i < flips; ++i) {
    std::uniform_int_distribution<size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
    out.labels[order[i]] = -out.labels[order[i]];
  }
  return out;
}

LabeledDataset twoGaussianData(int n, int d, double separation, std::uint64_t seed) {
  if (n < 2 || d < 1) throw std::invalid_argument("two_gaussian_data: need n >= 2, d >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double shift = 0.5 * separation / std::sqrt(static_cast<double>(d));
  LabeledDataset data;
  data.features.resize(n, d);
  data.labels.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int label = i < n / 2 ? 1 : -1;
    data.labels[static_cast<size_t>(i)] = label;
    for (int j = 0; j < d; ++j) {
      data.features(i, j) = normal(rng) + label * shift;
    }
  }
  return data;
}

KfoldResult kfoldCv(const LabeledDataset& data, int k, const Pipeline& pipeline,
                    std::uint64_t seed) {
  validateDataset(data);
  const size_t n = data.labels.size();
  if (k < 2 || static_cast<size_t>(k) > n) {
    throw std::invalid_argument("kfold_cv: k must lie in [2, n]");
  }

  // Deal each class round-robin from a running counter so total fold sizes
  // stay within one of each other too.
  std::mt19937_64 rng(seed);
  std::vector<int> fold(n, -1);
  size_t counter = 0;
  for (int cls : {-1, 1}) {
    std::vector<size_t> members;
    for (size_t i = 0; i < n; ++i) {
      if (data.labels[i] == cls) members.push_back(i);
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (size_t i : members) fold[i] = static_cast<int>(counter++ % static_cast<size_t>(k));
  }

  KfoldResult result;
  for (int f = 0; f < k; ++f) {
    LabeledDataset train;
    std::vector<size_t> heldOut;
    std::vector<Eigen::Index> trainRows;
    for (size_t i = 0; i < n; ++i) {
      if (fold[i] == f) {
        heldOut.push_back(i);
      } else {
        trainRows.push_back(static_cast<Eigen::Index>(i));
        train.labels.push_back(data.labels[i]);
      }
    }
    train.features.resize(static_cast<Eigen::Index>(trainRows.size()), data.features.cols());
    for (size_t r = 0; r < trainRows.size(); ++r) {
      train.features.row(static_cast<Eigen::Index>(r)) = data.features.row(trainRows[r]);
    }
    bool pos = false, neg = false;
    for (int y : train.labels) (y == 1 ? pos : neg) = true;
    if (!pos || !neg) {
      throw std::runtime_error("kfold_cv: training split for fold " + std::to_string(f) +
                               " contains a single class; reduce k or rebalance");
    }

    const Predictor predict = pipeline(train, f);
    size_t hits = 0;
    for (size_t i : heldOut) {
      const Vector x = data.features.row(static_cast<Eigen::Index>(i)).transpose();
      if (predict(x) == data.labels[i]) ++hits;
    }
    result.accuracies.push_back(static_cast<double>(hits) /
                                static_cast<double>(heldOut.size()));
  }

  result.mean = std::accumulate(result.accuracies.begin(), result.accuracies.end(), 0.0) /
                static_cast<double>(k);
  double ss = 0.0;
  for (double a : result.accuracies) ss += (a - result.mean) * (a - result.mean);
  result.stddev = k > 1 ? std::sqrt(ss / static_cast<double>(k - 1)) : 0.0;
  return result;
}

LogregWeightedModel::LogregWeightedModel(LabeledDataset data, double l2Reg, double tol,
                                         int maxIter)
    : data_(std::move(data)), l2Reg_(l2Reg), tol_(tol), maxIter_(maxIter) {
  validateDataset(data_);
}

Eigen::Index LogregWeightedModel::sampleCount() const { return data_.features.rows(); }

void LogregWeightedModel::fitWeighted(const Vector& weights) {
  params_ = weightedLogregFit(data_, weights, l2Reg_, tol_, maxIter_, std::move(params_));
}

Vector LogregWeightedModel::perSampleLosses() const { return logregLosses(params_, data_); }

double LogregWeightedModel::regularizationValue() const {
  return 0.5 * l2Reg_ * params_.w.squaredNorm();
}

}  // namespace splkit
