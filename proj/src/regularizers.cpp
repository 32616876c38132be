#include "splkit/regularizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace splkit {

namespace {

void checkLambdaT(double lambda, double t, const char* op) {
  if (!(lambda > 0.0)) throw std::invalid_argument(std::string(op) + ": lambda must be positive");
  if (t < 0.0) throw std::invalid_argument(std::string(op) + ": negative t");
}

const char* kindName(ImplicitKind k) {
  switch (k) {
    case ImplicitKind::Huber: return "huber";
    case ImplicitKind::Cauchy: return "cauchy";
    case ImplicitKind::L1L2: return "l1l2";
    case ImplicitKind::Welsch: return "welsch";
  }
  return "?";
}

const char* kindName(ExplicitKind k) {
  switch (k) {
    case ExplicitKind::Hard: return "hard";
    case ExplicitKind::Linear: return "linear";
    case ExplicitKind::Logarithmic: return "logarithmic";
    case ExplicitKind::Mixture: return "mixture";
    case ExplicitKind::Logistic: return "logistic";
  }
  return "?";
}

// Analytic derivative of phi in t, used by the condition report.
double latentLossDeriv(ImplicitKind kind, double lambda, double t) {
  switch (kind) {
    case ImplicitKind::Huber: return t <= lambda ? t : lambda;
    case ImplicitKind::Cauchy: return 2.0 * t / (1.0 + (t / lambda) * (t / lambda));
    case ImplicitKind::L1L2: return t / std::sqrt(lambda + t * t);
    case ImplicitKind::Welsch: return 2.0 * t * std::exp(-(t * t) / (lambda * lambda));
  }
  return 0.0;
}

}  // namespace

double ImplicitRegularizer::latentLoss(double lambda, double t) const {
  checkLambdaT(lambda, t, "latent_loss");
  switch (kind) {
    case ImplicitKind::Huber:
      return t <= lambda ? 0.5 * t * t : lambda * t - 0.5 * lambda * lambda;
    case ImplicitKind::Cauchy:
      return lambda * lambda * std::log1p((t / lambda) * (t / lambda));
    case ImplicitKind::L1L2:
      return std::sqrt(lambda + t * t) - 1.0;
    case ImplicitKind::Welsch:
      return lambda * lambda * (1.0 - std::exp(-(t * t) / (lambda * lambda)));
  }
  return 0.0;
}

double ImplicitRegularizer::minimizer(double lambda, double t) const {
  checkLambdaT(lambda, t, "minimizer");
  switch (kind) {
    case ImplicitKind::Huber:
      return t <= lambda ? 1.0 : lambda / t;
    case ImplicitKind::Cauchy:
      return 2.0 / (1.0 + (t / lambda) * (t / lambda));
    case ImplicitKind::L1L2:
      return 1.0 / std::sqrt(lambda + t * t);
    case ImplicitKind::Welsch:
      return 2.0 * std::exp(-(t * t) / (lambda * lambda));
  }
  return 0.0;
}

double ImplicitRegularizer::minimizerSup(double lambda) const {
  checkLambdaT(lambda, 0.0, "minimizer_sup");
  switch (kind) {
    case ImplicitKind::Huber: return 1.0;
    case ImplicitKind::Cauchy: return 2.0;
    case ImplicitKind::L1L2: return 1.0 / std::sqrt(lambda);
    case ImplicitKind::Welsch: return 2.0;
  }
  return 0.0;
}

double ImplicitRegularizer::weightFromLoss(double lambda, double loss) const {
  if (loss < 0.0) throw std::invalid_argument("weight_from_loss: negative loss");
  return 0.5 * minimizer(lambda, std::sqrt(loss));
}

double ImplicitRegularizer::weightCeiling(double lambda) const {
  return 0.5 * minimizerSup(lambda);
}

PaceDirection ImplicitRegularizer::direction() const {
  return kind == ImplicitKind::L1L2 ? PaceDirection::Shrink : PaceDirection::Grow;
}

void ExplicitRegularizer::validateParams(double lambda) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("explicit_weight: lambda must be positive");
  if (kind == ExplicitKind::Logarithmic && !(lambda < 1.0)) {
    throw std::invalid_argument("explicit_weight: logarithmic kind needs lambda in (0,1)");
  }
  if (kind == ExplicitKind::Mixture && !(gamma > 0.0)) {
    throw std::invalid_argument("explicit_weight: mixture kind needs gamma > 0");
  }
}

double ExplicitRegularizer::weight(double lambda, double loss) const {
  validateParams(lambda);
  if (loss < 0.0) throw std::invalid_argument("explicit_weight: negative loss");
  switch (kind) {
    case ExplicitKind::Hard:
      return loss <= lambda ? 1.0 : 0.0;
    case ExplicitKind::Linear:
      return std::max(0.0, 1.0 - loss / lambda);
    case ExplicitKind::Logarithmic: {
      if (loss >= lambda) return 0.0;  // continuous extension: log(lambda + zeta) = log 1 = 0
      const double zeta = 1.0 - lambda;
      return std::log(loss + zeta) / std::log(zeta);
    }
    case ExplicitKind::Mixture: {
      const double lower = (lambda * gamma) / (lambda + gamma);
      if (loss <= lower * lower) return 1.0;
      if (loss >= lambda * lambda) return 0.0;
      return gamma * (1.0 / std::sqrt(loss) - 1.0 / lambda);
    }
    case ExplicitKind::Logistic:
      return (1.0 + std::exp(-lambda)) / (1.0 + std::exp(loss - lambda));
  }
  return 0.0;
}

double ExplicitRegularizer::weightCeiling(double lambda) const {
  validateParams(lambda);
  return 1.0;  // every kind attains 1 at loss 0
}

double weightFromLoss(const Regularizer& reg, double lambda, double loss) {
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ImplicitRegularizer>) {
          return r.weightFromLoss(lambda, loss);
        } else {
          return r.weight(lambda, loss);
        }
      },
      reg);
}

double weightCeiling(const Regularizer& reg, double lambda) {
  return std::visit([&](const auto& r) { return r.weightCeiling(lambda); }, reg);
}

PaceDirection paceDirection(const Regularizer& reg) {
  return std::visit([](const auto& r) { return r.direction(); }, reg);
}

void validatePace(const Regularizer& reg, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("pace parameter must be positive");
  if (const auto* e = std::get_if<ExplicitRegularizer>(&reg)) e->validateParams(lambda);
}

ImplicitRegularizer implicitFromName(const std::string& name) {
  if (name == "huber") return {ImplicitKind::Huber};
  if (name == "cauchy") return {ImplicitKind::Cauchy};
  if (name == "l1l2") return {ImplicitKind::L1L2};
  if (name == "welsch") return {ImplicitKind::Welsch};
  throw std::invalid_argument("unknown implicit regularizer kind '" + name + "'");
}

Regularizer regularizerFromName(const std::string& name, double gamma) {
  if (name == "huber" || name == "cauchy" || name == "l1l2" || name == "welsch") {
    return implicitFromName(name);
  }
  if (name == "hard") return ExplicitRegularizer{ExplicitKind::Hard, gamma};
  if (name == "linear") return ExplicitRegularizer{ExplicitKind::Linear, gamma};
  if (name == "logarithmic") return ExplicitRegularizer{ExplicitKind::Logarithmic, gamma};
  if (name == "mixture") return ExplicitRegularizer{ExplicitKind::Mixture, gamma};
  if (name == "logistic") return ExplicitRegularizer{ExplicitKind::Logistic, gamma};
  throw std::invalid_argument("unknown regularizer kind '" + name + "'");
}

std::string regularizerName(const Regularizer& reg) {
  return std::visit([](const auto& r) { return std::string(kindName(r.kind)); }, reg);
}

double dualPotentialNumeric(const ImplicitRegularizer& reg, double lambda, double v,
                            DualGrid grid) {
  if (!(v > 0.0)) throw std::invalid_argument("dual_potential_numeric: v must be positive");
  if (grid.points < 8) throw std::invalid_argument("dual_potential_numeric: grid too small");
  const double tMax = grid.tMax > 0.0 ? grid.tMax : 10.0 * std::max(lambda, 1.0);

  const auto supremand = [&](double t) {
    return reg.latentLoss(lambda, t) - 0.5 * v * t * t;
  };

  const int n = grid.points;
  int best = 0;
  double bestVal = supremand(0.0);
  double prev = bestVal;
  double last = bestVal;
  for (int i = 1; i < n; ++i) {
    const double t = tMax * static_cast<double>(i) / (n - 1);
    const double g = supremand(t);
    if (g > bestVal) {
      bestVal = g;
      best = i;
    }
    prev = last;
    last = g;
  }
  if (best == n - 1 && last > prev) {
    throw std::runtime_error(
        "dual_potential_numeric: supremand still increasing at the grid edge; "
        "enlarge t_max or the grid");
  }

  const double step = tMax / (n - 1);
  double lo = std::max(0.0, (best - 1) * step);
  double hi = std::min(tMax, (best + 1) * step);

  // Golden-section refinement of the bracketed maximum to 1e-10 in t.
  const double invPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invPhi * (b - a);
  double d = a + invPhi * (b - a);
  double fc = supremand(c), fd = supremand(d);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invPhi * (b - a);
      fc = supremand(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invPhi * (b - a);
      fd = supremand(d);
    }
  }
  return std::max({bestVal, fc, fd});
}

ConditionReport validateConditions(const ImplicitRegularizer& reg,
                                   const std::vector<double>& lambdaGrid,
                                   const std::vector<double>& tGrid) {
  ConditionReport rep;
  const auto fail = [&](const std::string& msg) {
    rep.ok = false;
    rep.violations.push_back(std::string(kindName(reg.kind)) + ": " + msg);
  };
  std::vector<double> lambdas = lambdaGrid;
  std::vector<double> ts = tGrid;
  std::sort(lambdas.begin(), lambdas.end());
  std::sort(ts.begin(), ts.end());
  for (double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      fail("lambda grid entry not positive finite");
      return rep;
    }
  }
  for (double t : ts) {
    if (t < 0.0 || !std::isfinite(t)) {
      fail("t grid entry negative or non-finite");
      return rep;
    }
  }

  constexpr double slack = 1e-12;
  for (double lambda : lambdas) {
    const double sup = reg.minimizerSup(lambda);
    double prevSigma = std::numeric_limits<double>::infinity();
    for (double t : ts) {
      const double sigma = reg.minimizer(lambda, t);
      if (sigma < -slack || sigma > sup + slack) {
        fail("sigma out of [0, sigma_max] at lambda=" + std::to_string(lambda) +
             " t=" + std::to_string(t));
      }
      if (sigma > prevSigma + slack) {
        fail("sigma increased in t at lambda=" + std::to_string(lambda) +
             " t=" + std::to_string(t));
      }
      prevSigma = sigma;
      if (t > 1e-6) {
        const double ratio = latentLossDeriv(reg.kind, lambda, t) / t;
        if (std::abs(sigma - ratio) > 1e-6) {
          fail("minimizer identity violated at lambda=" + std::to_string(lambda) +
               " t=" + std::to_string(t));
        }
      }
    }
  }
  // Monotone in lambda, direction given by the kind's pace direction.
  const bool grows = reg.direction() == PaceDirection::Grow;
  for (double t : ts) {
    double prevSigma = grows ? -std::numeric_limits<double>::infinity()
                             : std::numeric_limits<double>::infinity();
    for (double lambda : lambdas) {
      const double sigma = reg.minimizer(lambda, t);
      const bool bad = grows ? sigma < prevSigma - slack : sigma > prevSigma + slack;
      if (bad) {
        fail("sigma not monotone in lambda at lambda=" + std::to_string(lambda) +
             " t=" + std::to_string(t));
      }
      prevSigma = sigma;
    }
  }
  return rep;
}

}  // namespace splkit
