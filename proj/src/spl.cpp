#include "splkit/spl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace splkit {

namespace {

Vector checkedLosses(const WeightedModel& model, int round) {
  Vector losses = model.perSampleLosses();
  for (Eigen::Index i = 0; i < losses.size(); ++i) {
    if (!std::isfinite(losses[i]) || losses[i] < 0.0) {
      throw std::runtime_error("spl fit: non-finite or negative loss at round " +
                               std::to_string(round));
    }
  }
  return losses;
}

Vector weightsFromLosses(const Regularizer& reg, double lambda, const Vector& losses) {
  Vector v(losses.size());
  for (Eigen::Index i = 0; i < losses.size(); ++i) {
    v[i] = weightFromLoss(reg, lambda, losses[i]);
  }
  return v;
}

}  // namespace

void SplTrace::writeCsv(const std::string& path) const {
  std::string out = "round,lambda,mean_weight,min_weight,max_weight,objective\n";
  for (const SplRound& r : rounds) {
    out += std::to_string(r.round);
    out += ',';
    out += formatDouble(r.lambda);
    out += ',';
    out += formatDouble(r.weights.size() ? r.weights.mean() : 0.0);
    out += ',';
    out += formatDouble(r.weights.size() ? r.weights.minCoeff() : 0.0);
    out += ',';
    out += formatDouble(r.weights.size() ? r.weights.maxCoeff() : 0.0);
    out += ',';
    out += formatDouble(r.objective);
    out += '\n';
  }
  writeTextFile(path, out);
}

LambdaInit initLambdaHalf(const Regularizer& reg, const std::vector<double>& losses) {
  if (losses.empty()) throw std::invalid_argument("init_lambda_half: no losses");
  for (double l : losses) {
    if (!std::isfinite(l) || l < 0.0) {
      throw std::invalid_argument("init_lambda_half: losses must be finite and nonnegative");
    }
  }
  std::vector<double> sorted = losses;
  const size_t medianIdx = (sorted.size() + 1) / 2 - 1;  // ceil(n/2)-th smallest
  std::nth_element(sorted.begin(), sorted.begin() + medianIdx, sorted.end());
  const double med = sorted[medianIdx];
  if (med <= 0.0) return {1.0, true};

  const bool logKind = std::holds_alternative<ExplicitRegularizer>(reg) &&
                       std::get<ExplicitRegularizer>(reg).kind == ExplicitKind::Logarithmic;
  const auto gap = [&](double lambda) {
    return weightFromLoss(reg, lambda, med) - 0.5 * weightCeiling(reg, lambda);
  };

  // Expand around a unit start until the half-weight level is bracketed.
  double lo = logKind ? 0.5 : 1.0;
  double hi = lo;
  const char* kind = "init_lambda_half: cannot bracket the half-weight pace value";
  if (gap(lo) < 0.0) {
    for (int i = 0;; ++i) {
      if (i >= 600 || (logKind && 1.0 - hi < 1e-15)) throw std::runtime_error(kind);
      lo = hi;
      hi = logKind ? 0.5 * (hi + 1.0) : 2.0 * hi;
      if (gap(hi) >= 0.0) break;
    }
  } else {
    for (int i = 0;; ++i) {
      if (i >= 600) throw std::runtime_error(kind);
      hi = lo;
      lo *= 0.5;
      if (gap(lo) < 0.0) break;
    }
  }

  while (hi - lo > 1e-8 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {hi, false};
}

SplTrace splIrFit(WeightedModel& model, const Regularizer& reg, const PaceSchedule& sched) {
  const Eigen::Index n = model.sampleCount();
  if (n < 1) throw std::invalid_argument("spl_ir_fit: model exposes no samples");
  if (!(sched.mu > 1.0)) throw std::invalid_argument("spl_ir_fit: mu must exceed 1");
  if (sched.maxRounds < 1) throw std::invalid_argument("spl_ir_fit: max_rounds must be positive");

  model.fitWeighted(Vector::Ones(n));
  Vector losses = checkedLosses(model, 0);

  double lambda;
  if (sched.lambda0) {
    lambda = *sched.lambda0;
  } else {
    lambda = initLambdaHalf(reg, {losses.data(), losses.data() + losses.size()}).lambda;
  }
  validatePace(reg, lambda);

  const bool grow = paceDirection(reg) == PaceDirection::Grow;
  SplTrace trace;
  for (int round = 1; round <= sched.maxRounds; ++round) {
    Vector weights;
    double objective = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    int inners = 0;
    for (int k = 0; k < sched.innerCap; ++k) {
      weights = weightsFromLosses(reg, lambda, losses);
      // A pace value far below every loss admits no samples; leave the model
      // untouched and let the schedule advance until weights revive.
      if (weights.sum() <= 0.0) {
        objective = 0.0;
        inners = k + 1;
        break;
      }
      model.fitWeighted(weights);
      losses = checkedLosses(model, round);
      objective = weights.dot(losses);
      inners = k + 1;
      if (std::isfinite(prev) &&
          std::abs(objective - prev) <= sched.innerTol * std::max(1.0, std::abs(prev))) {
        break;
      }
      prev = objective;
    }
    trace.rounds.push_back(
        {round, lambda, weights, losses, model.regularizationValue(), objective, inners});
    if (weightCeiling(reg, lambda) - weights.minCoeff() <= 1e-9) {
      trace.saturated = true;
      break;
    }
    lambda = grow ? lambda * sched.mu : lambda / sched.mu;
  }
  return trace;
}

SplTrace hqFit(WeightedModel& model, const ImplicitRegularizer& reg, double lambda,
               double tol, int cap) {
  const Eigen::Index n = model.sampleCount();
  if (n < 1) throw std::invalid_argument("hq_fit: model exposes no samples");
  if (!(lambda > 0.0)) throw std::invalid_argument("hq_fit: lambda must be positive");

  model.fitWeighted(Vector::Ones(n));
  Vector losses = checkedLosses(model, 0);

  SplTrace trace;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= cap; ++k) {
    Vector weights(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      weights[i] = reg.weightFromLoss(lambda, losses[i]);
    }
    // The pace value is fixed, so an empty admitted set cannot recover.
    if (weights.sum() <= 0.0) {
      trace.rounds.push_back({k, lambda, weights, losses, model.regularizationValue(), 0.0, 1});
      break;
    }
    model.fitWeighted(weights);
    losses = checkedLosses(model, k);
    const double objective = weights.dot(losses);
    trace.rounds.push_back(
        {k, lambda, weights, losses, model.regularizationValue(), objective, 1});
    if (std::isfinite(prev) && std::abs(objective - prev) <= tol * std::max(1.0, std::abs(prev))) {
      break;
    }
    prev = objective;
  }
  return trace;
}

}  // namespace splkit
