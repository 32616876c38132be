#pragma once

#include <cstdint>

#include "splkit/matrix.hpp"
#include "splkit/spl.hpp"

namespace splkit {

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct MfProblem {
  Matrix observed;  // values outside the mask are ignored
  Mask mask;
  int rank = 4;
  double l2Reg = 1e-2;
};

struct MfFactors {
  Matrix u;  // m x rank
  Matrix v;  // n x rank
};

// How each entry of the synthetic instance was generated.
enum class EntryNoise : int { Missing = 0, Outlier = 1, Gaussian = 2 };

struct SyntheticMfInstance {
  Matrix groundTruth;  // rank-4 100x100
  Matrix observed;
  Mask mask;
  Eigen::ArrayXXi noise;  // EntryNoise per entry
};

// 100x100 rank-4 ground truth; 40% of entries hidden, 20% of all entries hit
// with uniform noise on [-20, 20], the rest with N(0, 0.1^2).
SyntheticMfInstance generateSynthetic(std::uint64_t seed);

MfFactors randomFactors(const MfProblem& prob, std::uint64_t seed);

// Alternating row-wise reweighted ridge solves for
// sum_obs w_ij * |observed_ij - (UV^T)_ij| + l2Reg * (|U|_F^2 + |V|_F^2),
// with |x| smoothed as sqrt(x^2 + eps^2) - eps, eps = 1e-6.
MfFactors weightedL1Mf(const MfProblem& prob, const Vector& weights, MfFactors init,
                       int iters = 100, double tol = 1e-6);

// Absolute residuals on observed entries, row-major over the mask.
Vector mfLosses(const MfProblem& prob, const MfFactors& f);

// Smoothed solver objective; the quantity weightedL1Mf drives down.
double mfObjective(const MfProblem& prob, const Vector& weights, const MfFactors& f);

// Reconstruction error against the full ground truth, masked entries included.
double rmse(const Matrix& y0, const MfFactors& f);
double mae(const Matrix& y0, const MfFactors& f);

// Observed entries are the samples; losses are the smoothed per-entry residuals
// so that fits and losses refer to the same objective.
class MfWeightedModel : public WeightedModel {
 public:
  MfWeightedModel(MfProblem prob, MfFactors init, int itersPerFit = 30, double tol = 1e-6);
  Eigen::Index sampleCount() const override;
  void fitWeighted(const Vector& weights) override;
  Vector perSampleLosses() const override;
  double regularizationValue() const override;
  const MfFactors& factors() const { return factors_; }

 private:
  MfProblem prob_;
  MfFactors factors_;
  int itersPerFit_;
  double tol_;
};

}  // namespace splkit
