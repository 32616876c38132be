#pragma once

#include <string>
#include <variant>
#include <vector>

namespace splkit {

// The four robust losses whose minimizer functions drive the implicit weight
// rule, and the five classical explicit rules they are compared against.
enum class ImplicitKind { Huber, Cauchy, L1L2, Welsch };
enum class ExplicitKind { Hard, Linear, Logarithmic, Mixture, Logistic };

// Direction the pace parameter moves so that more samples get admitted over
// rounds. L1-L2 is the odd one out: its minimizer grows as lambda shrinks.
enum class PaceDirection { Grow, Shrink };

struct ImplicitRegularizer {
  ImplicitKind kind = ImplicitKind::Welsch;

  double latentLoss(double lambda, double t) const;  // phi(lambda, t)
  double minimizer(double lambda, double t) const;   // sigma(lambda, t)
  double minimizerSup(double lambda) const;          // sigma at t = 0
  // Sample weight for a loss value: 0.5 * sigma(lambda, sqrt(loss)).
  double weightFromLoss(double lambda, double loss) const;
  double weightCeiling(double lambda) const;  // 0.5 * minimizerSup
  PaceDirection direction() const;
};

struct ExplicitRegularizer {
  ExplicitKind kind = ExplicitKind::Hard;
  double gamma = 1.0;  // mixture's second knob; unused by the other kinds

  double weight(double lambda, double loss) const;  // v*(lambda, loss) in [0, 1]
  double weightCeiling(double lambda) const;
  PaceDirection direction() const { return PaceDirection::Grow; }
  void validateParams(double lambda) const;  // logarithmic needs lambda in (0,1)
};

using Regularizer = std::variant<ImplicitRegularizer, ExplicitRegularizer>;

double weightFromLoss(const Regularizer& reg, double lambda, double loss);
double weightCeiling(const Regularizer& reg, double lambda);
PaceDirection paceDirection(const Regularizer& reg);
void validatePace(const Regularizer& reg, double lambda);

// Lowercase config-file names: huber, cauchy, l1l2, welsch, hard, linear,
// logarithmic, mixture, logistic.
ImplicitRegularizer implicitFromName(const std::string& name);
Regularizer regularizerFromName(const std::string& name, double gamma = 1.0);
std::string regularizerName(const Regularizer& reg);

struct DualGrid {
  int points = 4096;
  double tMax = 0.0;  // 0 = auto: 10 * max(lambda, 1)
};

// psi(lambda, v) = sup_{t >= 0} { -v t^2 / 2 + phi(lambda, t) }, evaluated on
// the grid and refined by golden-section search around the best grid point to
// 1e-10 in t. The dual is exposed numerically only; no closed forms exist here.
// Throws when the supremand is still increasing at the grid's right edge.
double dualPotentialNumeric(const ImplicitRegularizer& reg, double lambda, double v,
                            DualGrid grid = {});

struct ConditionReport {
  bool ok = true;
  std::vector<std::string> violations;  // human-readable (kind, lambda, t) witnesses
};

// Pointwise checks on the grids: sigma bounded in [0, sigma_max], sigma
// non-increasing in t, sigma monotone in lambda in the kind's pace direction,
// and the minimizer identity sigma(lambda, t) = phi'(lambda, t) / t for t > 1e-6.
ConditionReport validateConditions(const ImplicitRegularizer& reg,
                                   const std::vector<double>& lambdaGrid,
                                   const std::vector<double>& tGrid);

}  // namespace splkit
