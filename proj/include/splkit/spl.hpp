#pragma once

#include <optional>
#include <string>
#include <vector>

#include "splkit/matrix.hpp"
#include "splkit/regularizers.hpp"

namespace splkit {

// Any learner that can minimize sum_i v_i * loss_i(params) + ownRegularization(params).
// Implementations keep their parameters internally and warm-start each fit from them.
class WeightedModel {
 public:
  virtual ~WeightedModel() = default;
  virtual Eigen::Index sampleCount() const = 0;
  // Must not increase its own weighted objective relative to the warm start.
  virtual void fitWeighted(const Vector& weights) = 0;
  // Finite, nonnegative, and exactly the per-unit-weight quantity fitWeighted minimizes.
  virtual Vector perSampleLosses() const = 0;
  virtual double regularizationValue() const = 0;
};

struct PaceSchedule {
  std::optional<double> lambda0;  // empty: derive from the bootstrap losses (half rule)
  double mu = 1.05;
  int maxRounds = 30;
  double innerTol = 1e-6;
  int innerCap = 50;
};

struct SplRound {
  int round = 0;
  double lambda = 0.0;
  Vector weights;
  Vector losses;
  double modelReg = 0.0;
  double objective = 0.0;  // weights dot losses after the last inner alternation
  int inners = 0;
};

struct SplTrace {
  std::vector<SplRound> rounds;
  bool saturated = false;  // stopped because every weight reached its ceiling
  void writeCsv(const std::string& path) const;
};

struct LambdaInit {
  double lambda = 1.0;
  bool degenerate = false;  // median loss is zero; no half-weight crossing exists
};

// Smallest pace value at which the median-loss sample reaches half the weight
// ceiling, so about half the samples sit at or above it. Bisection to 1e-8
// relative, returning the bracket endpoint on the included side.
LambdaInit initLambdaHalf(const Regularizer& reg, const std::vector<double>& losses);

// Alternating search: per round, alternate weight updates and weighted fits at
// fixed lambda until the weighted objective settles, then step lambda in the
// regularizer's pace direction. Stops on maxRounds or weight saturation.
SplTrace splIrFit(WeightedModel& model, const Regularizer& reg, const PaceSchedule& sched);

// Fixed-lambda variant of the same alternation; one trace row per alternation.
SplTrace hqFit(WeightedModel& model, const ImplicitRegularizer& reg, double lambda,
               double tol = 1e-6, int cap = 200);

}  // namespace splkit
