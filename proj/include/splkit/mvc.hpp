#pragma once

#include <cstdint>
#include <vector>

#include "splkit/matrix.hpp"
#include "splkit/regularizers.hpp"
#include "splkit/spl.hpp"

namespace splkit {

struct MultiViewDataset {
  std::vector<Matrix> views;  // view v is d_v x n, columns are samples
};

void validateMultiview(const MultiViewDataset& data);

struct MvcConfig {
  double beta = 1.0;
  double rho = 0.1;
  double gamma = 1.1;  // step-size safety factor, > 1
  int k = 2;
  PaceSchedule pace;
  int palmIters = 200;
  double palmTol = 1e-6;
  // The affinity penalty enters the monitored objective as (rho/2) tr(ZC), so
  // the matching gradient constant is rho/2. The doubled constant is kept
  // available for comparison runs.
  bool zStepDoubledC = false;
  int kmeansRestarts = 10;
  std::uint64_t seed = 0;
};

struct MvcState {
  std::vector<Matrix> z;  // n x n, nonnegative, zero diagonal
  std::vector<Matrix> w;  // k x d_v
  std::vector<Vector> b;  // k
  std::vector<Vector> p;  // n sample weights per view
  Matrix y;               // k x n, orthonormal rows
};

// Z = W = b = 0, unit weights, Y = nearest orthonormal-rows matrix to a
// seeded Gaussian. The weights get their real values from the pace loop.
MvcState mvcInit(const MultiViewDataset& data, const MvcConfig& cfg);

// Per-view per-sample residual norms sqrt(|X_i - X Z_i|^2 + beta |W X_i + b - Y_i|^2).
std::vector<Vector> mvcViewLosses(const MvcState& s, const MultiViewDataset& data, double beta);

// p_i^v = weight at the squared residual, i.e. half the minimizer at the residual.
void p1UpdateWeights(MvcState& s, const MultiViewDataset& data, double lambda,
                     const ImplicitRegularizer& reg, double beta);

double objectiveH(const MvcState& s, const MultiViewDataset& data, const MvcConfig& cfg);

// One PALM block update each. Step sizes are 1/(gamma * modulus) with the
// modulus named in each function; zero modulus leaves the block unchanged.
void wStep(MvcState& s, const MultiViewDataset& data, const MvcConfig& cfg);
void bStep(MvcState& s, const MultiViewDataset& data, const MvcConfig& cfg);
void yStep(MvcState& s, const MultiViewDataset& data, const MvcConfig& cfg);
void zStep(MvcState& s, const MultiViewDataset& data, const MvcConfig& cfg);

// Squared distances between the columns of y; symmetric, zero diagonal.
Matrix pairwiseSquaredDistances(const Matrix& y);

struct PalmResult {
  std::vector<double> hTrajectory;  // objective before the first sweep and after each
  int sweeps = 0;
  double maxOrthoError = 0.0;  // worst |YY^T - I|_F seen after a Y-step
  double minZEntry = 0.0;
  double maxAbsZDiag = 0.0;
};

// Sweeps (W, b, Y, Z) at fixed weights until H settles or palmIters is hit.
PalmResult palmSolveP2(MvcState& s, const MultiViewDataset& data, const MvcConfig& cfg);

struct MvcResult {
  MvcState state;
  std::vector<int> labels;
  std::vector<double> lambdas;    // pace value per round
  std::vector<PalmResult> palm;   // bootstrap solve first, then one per round
  SplTrace trace;                 // concatenated per-view weights and squared losses
};

// Alternates the weight rule and PALM per pace round, then reads out cluster
// labels by k-means over the columns of Y. initY, when given, overrides the
// seeded orthonormal initialization (k x n).
MvcResult splMvcFit(const MultiViewDataset& data, const MvcConfig& cfg,
                    const ImplicitRegularizer& reg, const Matrix* initY = nullptr);

// Lloyd iterations from k-means++ seeding, best of `restarts` by within-cluster
// sum of squares; points are the n columns. wcssTrace, when given, collects one
// per-iteration WCSS sequence per restart (non-increasing absent repairs).
std::vector<int> kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts = 10,
                        std::vector<std::vector<double>>* wcssTrace = nullptr);

}  // namespace splkit
