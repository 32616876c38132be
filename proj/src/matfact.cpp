#include "splkit/matfact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace splkit {

namespace {

constexpr double kSmoothEps = 1e-6;
constexpr double kRidgeJitter = 1e-10;

double smoothedAbs(double r) { return std::sqrt(r * r + kSmoothEps * kSmoothEps) - kSmoothEps; }

struct ObservedIndex {
  // Row-major order over the mask fixes the sample numbering.
  std::vector<std::pair<int, int>> entries;            // (i, j) per sample
  std::vector<std::vector<std::pair<int, int>>> byRow;  // (j, sample) per row
  std::vector<std::vector<std::pair<int, int>>> byCol;  // (i, sample) per column
};

ObservedIndex indexObserved(const MfProblem& prob) {
  const Eigen::Index m = prob.observed.rows();
  const Eigen::Index n = prob.observed.cols();
  if (prob.mask.rows() != m || prob.mask.cols() != n) {
    throw std::invalid_argument("matfact: mask shape differs from the observed matrix");
  }
  if (prob.rank < 1 || prob.rank > std::min(m, n)) {
    throw std::invalid_argument("matfact: rank must lie in [1, min(m, n)]");
  }
  if (prob.l2Reg < 0.0) throw std::invalid_argument("matfact: l2_reg must be nonnegative");
  ObservedIndex idx;
  idx.byRow.resize(static_cast<size_t>(m));
  idx.byCol.resize(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!prob.mask(i, j)) continue;
      const int sample = static_cast<int>(idx.entries.size());
      idx.entries.emplace_back(static_cast<int>(i), static_cast<int>(j));
      idx.byRow[static_cast<size_t>(i)].emplace_back(static_cast<int>(j), sample);
      idx.byCol[static_cast<size_t>(j)].emplace_back(static_cast<int>(i), sample);
    }
  }
  if (idx.entries.empty()) throw std::invalid_argument("matfact: empty observed set");
  if (static_cast<Eigen::Index>(idx.entries.size()) < prob.rank * (m + n)) {
    std::fprintf(stderr,
                 "matfact: only %zu observed entries for rank %d on %ldx%ld; "
                 "factors may be unidentifiable\n",
                 idx.entries.size(), prob.rank, static_cast<long>(m), static_cast<long>(n));
  }
  return idx;
}

void checkFactors(const MfProblem& prob, const MfFactors& f) {
  if (f.u.rows() != prob.observed.rows() || f.u.cols() != prob.rank ||
      f.v.rows() != prob.observed.cols() || f.v.cols() != prob.rank) {
    throw std::invalid_argument("matfact: factor shapes do not match the problem");
  }
  requireFinite(f.u, "matfact factors u");
  requireFinite(f.v, "matfact factors v");
}

// One majorize-minimize pass: freeze the smoothing weights at the current
// residuals, then solve every row of `side` exactly as a small ridge system.
void solveSide(const MfProblem& prob, const ObservedIndex& idx, const Vector& weights,
               Matrix& side, const Matrix& other, bool rows) {
  const int r = prob.rank;
  const auto& lists = rows ? idx.byRow : idx.byCol;
  size_t maxCount = 0;
  for (const auto& list : lists) maxCount = std::max(maxCount, list.size());

  Matrix basis(static_cast<Eigen::Index>(maxCount), r);
  Vector target(static_cast<Eigen::Index>(maxCount));
  Vector weight(static_cast<Eigen::Index>(maxCount));
  Matrix gram(r, r);
  Vector rhs(r);
  Eigen::LDLT<Matrix> solver(r);
  for (size_t a = 0; a < lists.size(); ++a) {
    const auto& list = lists[a];
    if (list.empty()) {
      side.row(a).setZero();
      continue;
    }
    const auto count = static_cast<Eigen::Index>(list.size());
    for (Eigen::Index s = 0; s < count; ++s) {
      const auto& [b, sample] = list[static_cast<size_t>(s)];
      const int i = rows ? static_cast<int>(a) : b;
      const int j = rows ? b : static_cast<int>(a);
      basis.row(s) = other.row(b);
      target[s] = prob.observed(i, j);
      weight[s] = weights[sample];
    }
    const auto b0 = basis.topRows(count);
    const auto resid =
        (target.head(count) - b0 * side.row(a).transpose()).array();
    weight.head(count).array() /=
        2.0 * (resid.square() + kSmoothEps * kSmoothEps).sqrt();
    gram.noalias() = b0.transpose() * weight.head(count).asDiagonal() * b0;
    gram.diagonal().array() += prob.l2Reg + kRidgeJitter;
    rhs.noalias() = b0.transpose() * (weight.head(count).array() * target.head(count).array()).matrix();
    side.row(a) = solver.compute(gram).solve(rhs).transpose();
  }
}

}  // namespace

SyntheticMfInstance generateSynthetic(std::uint64_t seed) {
  constexpr int m = 100, n = 100, r = 4;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix u(m, r), v(n, r);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < r; ++j) u(i, j) = normal(rng);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < r; ++j) v(i, j) = normal(rng);
  }

  SyntheticMfInstance inst;
  inst.groundTruth = u * v.transpose();
  inst.observed = inst.groundTruth;
  inst.mask = Mask::Constant(m, n, true);
  inst.noise = Eigen::ArrayXXi::Constant(m, n, static_cast<int>(EntryNoise::Gaussian));

  std::vector<int> order(m * n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const int missing = m * n * 40 / 100;
  const int outliers = m * n * 20 / 100;
  std::uniform_real_distribution<double> uniform(-20.0, 20.0);
  std::normal_distribution<double> gaussian(0.0, 0.1);
  for (int k = 0; k < m * n; ++k) {
    const int i = order[k] / n;
    const int j = order[k] % n;
    if (k < missing) {
      inst.mask(i, j) = false;
      inst.observed(i, j) = 0.0;
      inst.noise(i, j) = static_cast<int>(EntryNoise::Missing);
    } else if (k < missing + outliers) {
      inst.observed(i, j) += uniform(rng);
      inst.noise(i, j) = static_cast<int>(EntryNoise::Outlier);
    } else {
      inst.observed(i, j) += gaussian(rng);
    }
  }
  return inst;
}

MfFactors randomFactors(const MfProblem& prob, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(prob.rank));
  MfFactors f;
  f.u.resize(prob.observed.rows(), prob.rank);
  f.v.resize(prob.observed.cols(), prob.rank);
  for (Eigen::Index i = 0; i < f.u.rows(); ++i) {
    for (Eigen::Index j = 0; j < f.u.cols(); ++j) f.u(i, j) = scale * normal(rng);
  }
  for (Eigen::Index i = 0; i < f.v.rows(); ++i) {
    for (Eigen::Index j = 0; j < f.v.cols(); ++j) f.v(i, j) = scale * normal(rng);
  }
  return f;
}

MfFactors weightedL1Mf(const MfProblem& prob, const Vector& weights, MfFactors init,
                       int iters, double tol) {
  const ObservedIndex idx = indexObserved(prob);
  if (weights.size() != static_cast<Eigen::Index>(idx.entries.size())) {
    throw std::invalid_argument("weighted_l1_mf: one weight per observed entry required");
  }
  if ((weights.array() < 0.0).any()) {
    throw std::invalid_argument("weighted_l1_mf: negative weight");
  }
  checkFactors(prob, init);

  MfFactors f = std::move(init);
  double prev = mfObjective(prob, weights, f);
  for (int it = 0; it < iters; ++it) {
    solveSide(prob, idx, weights, f.u, f.v, true);
    solveSide(prob, idx, weights, f.v, f.u, false);
    const double obj = mfObjective(prob, weights, f);
    if (!std::isfinite(obj)) throw std::runtime_error("weighted_l1_mf: non-finite objective");
    if (std::abs(prev - obj) <= tol * std::max(1.0, std::abs(prev))) break;
    prev = obj;
  }
  return f;
}

Vector mfLosses(const MfProblem& prob, const MfFactors& f) {
  const ObservedIndex idx = indexObserved(prob);
  checkFactors(prob, f);
  Vector losses(static_cast<Eigen::Index>(idx.entries.size()));
  for (size_t s = 0; s < idx.entries.size(); ++s) {
    const auto& [i, j] = idx.entries[s];
    losses[static_cast<Eigen::Index>(s)] =
        std::abs(prob.observed(i, j) - f.u.row(i).dot(f.v.row(j)));
  }
  return losses;
}

double mfObjective(const MfProblem& prob, const Vector& weights, const MfFactors& f) {
  const ObservedIndex idx = indexObserved(prob);
  checkFactors(prob, f);
  double obj = prob.l2Reg * (f.u.squaredNorm() + f.v.squaredNorm());
  for (size_t s = 0; s < idx.entries.size(); ++s) {
    const auto& [i, j] = idx.entries[s];
    obj += weights[static_cast<Eigen::Index>(s)] *
           smoothedAbs(prob.observed(i, j) - f.u.row(i).dot(f.v.row(j)));
  }
  return obj;
}

double rmse(const Matrix& y0, const MfFactors& f) {
  if (y0.rows() != f.u.rows() || y0.cols() != f.v.rows()) {
    throw std::invalid_argument("rmse: shape mismatch");
  }
  const Matrix diff = y0 - f.u * f.v.transpose();
  return diff.norm() / std::sqrt(static_cast<double>(y0.size()));
}

double mae(const Matrix& y0, const MfFactors& f) {
  if (y0.rows() != f.u.rows() || y0.cols() != f.v.rows()) {
    throw std::invalid_argument("mae: shape mismatch");
  }
  const Matrix diff = y0 - f.u * f.v.transpose();
  return diff.cwiseAbs().sum() / static_cast<double>(y0.size());
}

MfWeightedModel::MfWeightedModel(MfProblem prob, MfFactors init, int itersPerFit, double tol)
    : prob_(std::move(prob)), factors_(std::move(init)), itersPerFit_(itersPerFit), tol_(tol) {
  checkFactors(prob_, factors_);
}

Eigen::Index MfWeightedModel::sampleCount() const {
  return static_cast<Eigen::Index>(prob_.mask.count());
}

void MfWeightedModel::fitWeighted(const Vector& weights) {
  factors_ = weightedL1Mf(prob_, weights, std::move(factors_), itersPerFit_, tol_);
}

Vector MfWeightedModel::perSampleLosses() const {
  Vector raw = mfLosses(prob_, factors_);
  return raw.unaryExpr([](double r) { return smoothedAbs(r); });
}

double MfWeightedModel::regularizationValue() const {
  return prob_.l2Reg * (factors_.u.squaredNorm() + factors_.v.squaredNorm());
}

}  // namespace splkit
