#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "splkit/matrix.hpp"
#include "splkit/metrics.hpp"
#include "splkit/mvc.hpp"

using namespace splkit;

namespace {

Matrix gaussianMatrix(int rows, int cols, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = scale * gauss(rng);
  }
  return m;
}

// Columns grouped by cluster; cluster c sits at separation * e_c per view.
Matrix blobView(int dims, int clusters, int perCluster, double separation, double noise,
                std::uint64_t seed) {
  Matrix x = gaussianMatrix(dims, clusters * perCluster, seed, noise);
  for (int c = 0; c < clusters; ++c) {
    for (int i = 0; i < perCluster; ++i) x(c, c * perCluster + i) += separation;
  }
  return x;
}

std::vector<int> blobLabels(int clusters, int perCluster) {
  std::vector<int> labels;
  for (int c = 0; c < clusters; ++c) labels.insert(labels.end(), perCluster, c);
  return labels;
}

MvcConfig smallConfig(int k) {
  MvcConfig cfg;
  cfg.k = k;
  cfg.beta = 0.7;
  cfg.rho = 0.2;
  cfg.gamma = 1.2;
  return cfg;
}

// Random feasible state with active weights and affinities for step tests.
MvcState seededState(const MultiViewDataset& data, const MvcConfig& cfg, std::uint64_t seed) {
  MvcState s = mvcInit(data, cfg);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  const Eigen::Index n = data.views.front().cols();
  for (std::size_t v = 0; v < data.views.size(); ++v) {
    for (Eigen::Index i = 0; i < n; ++i) s.p[v][i] = unit(rng);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) s.z[v](i, j) = i == j ? 0.0 : 0.5 * unit(rng);
    }
    s.w[v] = gaussianMatrix(cfg.k, static_cast<int>(data.views[v].rows()), seed + 7 * v, 0.3);
    for (int r = 0; r < cfg.k; ++r) s.b[v][r] = 0.2 * unit(rng);
  }
  return s;
}

Matrix wGradient(const MvcState& s, const MultiViewDataset& data, std::size_t v) {
  const Matrix& x = data.views[v];
  const Vector sqrtP = s.p[v].cwiseSqrt();
  const Matrix b = x * sqrtP.asDiagonal();
  const Matrix a = (s.y - s.b[v] * Vector::Ones(x.cols()).transpose()) * sqrtP.asDiagonal();
  return s.w[v] * (b * b.transpose()) - a * b.transpose();
}

Vector bGradient(const MvcState& s, const MultiViewDataset& data, std::size_t v) {
  const Matrix& x = data.views[v];
  const Vector sqrtP = s.p[v].cwiseSqrt();
  const Matrix f = (s.y - s.w[v] * x) * sqrtP.asDiagonal();
  return s.b[v] * sqrtP.sum() - f.rowwise().sum();
}

void yGradient(const MvcState& s, const MultiViewDataset& data, const MvcConfig& cfg,
               Matrix* grad, double* modulus) {
  const Eigen::Index n = data.views.front().cols();
  Matrix coupling = Matrix::Zero(n, n);
  Matrix pull = Matrix::Zero(s.y.rows(), n);
  for (std::size_t v = 0; v < data.views.size(); ++v) {
    coupling.diagonal() += cfg.beta * s.p[v];
    const Vector rowSums = s.z[v].rowwise().sum();
    coupling +=
        0.5 * cfg.rho * (Matrix(2.0 * rowSums.asDiagonal()) - s.z[v] - s.z[v].transpose());
    pull.noalias() += cfg.beta * (s.w[v] * data.views[v] + s.b[v] * Vector::Ones(n).transpose()) *
                      s.p[v].asDiagonal();
  }
  *grad = s.y * coupling - pull;
  *modulus = coupling.norm();
}

Matrix zGradient(const MvcState& s, const MultiViewDataset& data, double cConst, std::size_t v) {
  const Matrix gram = data.views[v].transpose() * data.views[v];
  const Matrix c = pairwiseSquaredDistances(s.y);
  return gram * s.z[v] * s.p[v].asDiagonal() - gram * s.p[v].asDiagonal() + cConst * c;
}

}  // namespace

TEST_CASE("multiview inputs are validated") {
  CHECK_THROWS_AS(validateMultiview(MultiViewDataset{}), std::invalid_argument);

  MultiViewDataset ragged;
  ragged.views.push_back(Matrix::Zero(3, 4));
  ragged.views.push_back(Matrix::Zero(2, 5));
  CHECK_THROWS_WITH_AS(validateMultiview(ragged), doctest::Contains("view 1"),
                       std::invalid_argument);

  MultiViewDataset bad;
  bad.views.push_back(Matrix::Zero(2, 3));
  bad.views[0](1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validateMultiview(bad), std::invalid_argument);
}

TEST_CASE("initial state is zeroed with orthonormal projection rows") {
  MultiViewDataset data;
  data.views.push_back(gaussianMatrix(3, 10, 1));
  data.views.push_back(gaussianMatrix(5, 10, 2));
  const MvcConfig cfg = smallConfig(3);
  const MvcState s = mvcInit(data, cfg);
  for (std::size_t v = 0; v < 2; ++v) {
    CHECK(s.z[v].cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.w[v].cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.b[v].cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.p[v].minCoeff() == 1.0);
    CHECK(s.p[v].maxCoeff() == 1.0);
  }
  const Matrix gram = s.y * s.y.transpose();
  CHECK((gram - Matrix::Identity(3, 3)).norm() <= 1e-10);

  MultiViewDataset tiny;
  tiny.views.push_back(Matrix::Zero(2, 2));
  CHECK_THROWS_AS(mvcInit(tiny, smallConfig(3)), std::invalid_argument);
}

TEST_CASE("per-sample view losses match their definition") {
  MultiViewDataset data;
  data.views.push_back(gaussianMatrix(3, 6, 11));
  const MvcConfig cfg = smallConfig(2);
  const MvcState s = seededState(data, cfg, 12);

  const std::vector<Vector> losses = mvcViewLosses(s, data, cfg.beta);
  REQUIRE(losses.size() == 1);
  const Matrix& x = data.views[0];
  for (Eigen::Index i = 0; i < 6; ++i) {
    const double self = (x.col(i) - x * s.z[0].col(i)).squaredNorm();
    const double reg = (s.w[0] * x.col(i) + s.b[0] - s.y.col(i)).squaredNorm();
    REQUIRE(std::abs(losses[0][i] - std::sqrt(self + cfg.beta * reg)) <= 1e-12);
  }

  // beta = 0 silences the regression residual entirely.
  const std::vector<Vector> selfOnly = mvcViewLosses(s, data, 0.0);
  for (Eigen::Index i = 0; i < 6; ++i) {
    const double self = (x.col(i) - x * s.z[0].col(i)).norm();
    REQUIRE(std::abs(selfOnly[0][i] - self) <= 1e-12);
  }
}

TEST_CASE("the weight rule applies the minimizer at the squared residual") {
  MultiViewDataset data;
  data.views.push_back(gaussianMatrix(4, 5, 21));
  const MvcConfig cfg = smallConfig(2);
  MvcState s = seededState(data, cfg, 22);
  const ImplicitRegularizer reg{ImplicitKind::Cauchy};

  const std::vector<Vector> losses = mvcViewLosses(s, data, cfg.beta);
  p1UpdateWeights(s, data, 1.7, reg, cfg.beta);
  for (Eigen::Index i = 0; i < 5; ++i) {
    REQUIRE(s.p[0][i] == reg.weightFromLoss(1.7, losses[0][i] * losses[0][i]));
  }

  // Zero residuals earn the full ceiling weight.
  MultiViewDataset silent;
  silent.views.push_back(Matrix::Zero(3, 4));
  MvcState quiet = mvcInit(silent, smallConfig(2));
  p1UpdateWeights(quiet, silent, 1.0, ImplicitRegularizer{ImplicitKind::Welsch}, 0.0);
  CHECK(quiet.p[0].minCoeff() == 1.0);
}

TEST_CASE("pairwise squared distances match brute force") {
  const Matrix y = gaussianMatrix(3, 7, 31);
  const Matrix c = pairwiseSquaredDistances(y);
  for (Eigen::Index i = 0; i < 7; ++i) {
    REQUIRE(c(i, i) == 0.0);
    for (Eigen::Index j = 0; j < 7; ++j) {
      double d = 0.0;
      for (Eigen::Index r = 0; r < 3; ++r) {
        d += (y(r, i) - y(r, j)) * (y(r, i) - y(r, j));
      }
      REQUIRE(std::abs(c(i, j) - d) <= 1e-12);
      REQUIRE(c(i, j) == c(j, i));
    }
  }

  Matrix twin = y;
  twin.col(4) = twin.col(2);
  CHECK(pairwiseSquaredDistances(twin)(2, 4) == 0.0);
}

TEST_CASE("the monitored objective matches a term-by-term evaluation") {
  MultiViewDataset data;
  data.views.push_back(gaussianMatrix(3, 4, 41));
  const MvcConfig cfg = smallConfig(2);
  const MvcState s = seededState(data, cfg, 42);

  const Matrix& x = data.views[0];
  double expected = 0.0;
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double self = (x.col(i) - x * s.z[0].col(i)).squaredNorm();
    const double reg = (s.w[0] * x.col(i) + s.b[0] - s.y.col(i)).squaredNorm();
    expected += 0.5 * s.p[0][i] * (self + cfg.beta * reg);
  }
  double affinity = 0.0;
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      affinity += s.z[0](i, j) * (s.y.col(i) - s.y.col(j)).squaredNorm();
    }
  }
  expected += 0.5 * cfg.rho * affinity;
  CHECK(std::abs(objectiveH(s, data, cfg) - expected) <= 1e-12);

  // H is affine in rho with slope half the summed affinity penalties.
  MvcConfig doubled = cfg;
  doubled.rho = 2.0 * cfg.rho;
  CHECK(std::abs(objectiveH(s, data, doubled) - objectiveH(s, data, cfg) -
                 0.5 * cfg.rho * affinity) <= 1e-12);

  MvcState zeroed = s;
  for (auto& p : zeroed.p) p.setZero();
  CHECK(std::abs(objectiveH(zeroed, data, cfg) - 0.5 * cfg.rho * affinity) <= 1e-12);
}

TEST_CASE("regression map step is stationary at its solution and descends otherwise") {
  MultiViewDataset data;
  data.views.push_back(gaussianMatrix(3, 8, 51));
  const MvcConfig cfg = smallConfig(2);

  MvcState fitted = seededState(data, cfg, 52);
  fitted.y = fitted.w[0] * data.views[0] +
             fitted.b[0] * Vector::Ones(8).transpose();  // zero regression residual
  const Matrix before = fitted.w[0];
  wStep(fitted, data, cfg);
  CHECK((fitted.w[0] - before).cwiseAbs().maxCoeff() <= 1e-12);

  MvcState s = seededState(data, cfg, 53);
  const Vector sqrtP = s.p[0].cwiseSqrt();
  const Matrix bMat = data.views[0] * sqrtP.asDiagonal();
  const Matrix aMat = (s.y - s.b[0] * Vector::Ones(8).transpose()) * sqrtP.asDiagonal();
  const double objBefore = 0.5 * (s.w[0] * bMat - aMat).squaredNorm();
  wStep(s, data, cfg);
  const double objAfter = 0.5 * (s.w[0] * bMat - aMat).squaredNorm();
  CHECK(objAfter < objBefore);

  MvcState idle = seededState(data, cfg, 54);
  idle.p[0].setZero();
  const Matrix frozen = idle.w[0];
  wStep(idle, data, cfg);
  CHECK((idle.w[0] - frozen).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("intercept step fixed point, hand trace, and descent") {
  MultiViewDataset data;
  data.views.push_back(gaussianMatrix(3, 8, 61));
  const MvcConfig cfg = smallConfig(2);

  MvcState fitted = seededState(data, cfg, 62);
  fitted.y = fitted.w[0] * data.views[0] + fitted.b[0] * Vector::Ones(8).transpose();
  const Vector before = fitted.b[0];
  bStep(fitted, data, cfg);
  CHECK((fitted.b[0] - before).cwiseAbs().maxCoeff() <= 1e-12);

  // Scalar case k = 1 is impossible (k >= 2), so trace two independent rows.
  MultiViewDataset tiny;
  tiny.views.push_back((Matrix(1, 2) << 1.0, 2.0).finished());
  MvcConfig tinyCfg = smallConfig(2);
  tinyCfg.gamma = 1.5;
  MvcState t = mvcInit(tiny, tinyCfg);
  t.p[0] << 0.25, 1.0;
  t.w[0] << 0.5, -0.5;
  t.b[0] << 0.2, 0.0;
  t.y.row(0) << 1.0, -1.0;
  t.y.row(1) << 0.5, 0.5;
  bStep(t, tiny, tinyCfg);
  // Row 0: F = (0.5*(1-0.5), 1*(-1-1)) = (0.25, -2); grad = 0.2*1.5 + 1.75 = 2.05.
  const double expected0 = 0.2 - 2.05 / (1.5 * 1.5);
  // Row 1: F = (0.5*(0.5+0.5), 1*(0.5+1)) = (0.5, 1.5); grad = 0 - 2.0.
  const double expected1 = 0.0 + 2.0 / (1.5 * 1.5);
  CHECK(std::abs(t.b[0][0] - expected0) <= 1e-12);
  CHECK(std::abs(t.b[0][1] - expected1) <= 1e-12);

  MvcState s = seededState(data, cfg, 63);
  const Vector sqrtP = s.p[0].cwiseSqrt();
  const Matrix f = (s.y - s.w[0] * data.views[0]) * sqrtP.asDiagonal();
  const auto quadratic = [&](const Vector& b) {
    return 0.5 * (b * Vector::Ones(8).transpose() * sqrtP.asDiagonal() - f).squaredNorm();
  };
  const double objBefore = quadratic(s.b[0]);
  bStep(s, data, cfg);
  CHECK(quadratic(s.b[0]) < objBefore);
}

TEST_CASE("embedding step keeps orthonormal rows and follows the objective gradient") {
  MultiViewDataset data;
  data.views.push_back(gaussianMatrix(3, 9, 71));
  data.views.push_back(gaussianMatrix(4, 9, 72));
  const MvcConfig cfg = smallConfig(2);

  MvcState s = seededState(data, cfg, 73);
  yStep(s, data, cfg);
  CHECK((s.y * s.y.transpose() - Matrix::Identity(2, 2)).norm() <= 1e-10);

  // With Z = 0 the implemented direction is the exact gradient of H in Y.
  MvcState flat = seededState(data, cfg, 74);
  for (auto& z : flat.z) z.setZero();
  for (auto& p : flat.p) p.setOnes();
  Matrix grad;
  double modulus = 0.0;
  yGradient(flat, data, cfg, &grad, &modulus);
  const double h = 1e-6;
  for (const auto [r, c] : {std::pair<int, int>{0, 0}, {1, 3}, {0, 7}, {1, 8}}) {
    MvcState up = flat, down = flat;
    up.y(r, c) += h;
    down.y(r, c) -= h;
    const double fd = (objectiveH(up, data, cfg) - objectiveH(down, data, cfg)) / (2.0 * h);
    REQUIRE(std::abs(fd - grad(r, c)) <= 1e-5 * std::max(1.0, std::abs(grad(r, c))));
  }

  // Full-state replication, including the affinity row sums, at 1e-12.
  MvcState replay = seededState(data, cfg, 75);
  Matrix expectedGrad;
  double expectedModulus = 0.0;
  yGradient(replay, data, cfg, &expectedGrad, &expectedModulus);
  const Matrix expectedY =
      projectOrthonormalRows(replay.y - expectedGrad / (cfg.gamma * expectedModulus)).y;
  yStep(replay, data, cfg);
  CHECK((replay.y - expectedY).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("affinity step respects constraints and matches finite differences") {
  MultiViewDataset data;
  data.views.push_back(gaussianMatrix(3, 5, 81, 0.5));
  MvcConfig cfg = smallConfig(2);
  cfg.rho = 0.05;

  MvcState s = mvcInit(data, cfg);
  std::mt19937_64 rng(82);
  std::uniform_real_distribution<double> unit(0.3, 0.6);
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = 0; j < 5; ++j) s.z[0](i, j) = i == j ? 0.0 : unit(rng);
    s.p[0][i] = unit(rng) + 0.4;
  }

  const Matrix z0 = s.z[0];
  const double hBefore = objectiveH(s, data, cfg);
  zStep(s, data, cfg);
  CHECK(s.z[0].minCoeff() >= 0.0);
  CHECK(s.z[0].diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(objectiveH(s, data, cfg) <= hBefore);

  // No clipping off the diagonal, so the step exposes the raw gradient.
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = 0; j < 5; ++j) {
      if (i != j) REQUIRE(s.z[0](i, j) > 0.0);
    }
  }
  const double modulus =
      (data.views[0].transpose() * data.views[0]).norm() * s.p[0].norm();
  const Matrix implied = (z0 - s.z[0]) * (cfg.gamma * modulus);
  const double h = 1e-5;
  MvcState probe = s;
  probe.z[0] = z0;
  for (const auto [i, j] : {std::pair<int, int>{0, 1}, {2, 4}, {3, 0}, {4, 2}}) {
    MvcState up = probe, down = probe;
    up.z[0](i, j) += h;
    down.z[0](i, j) -= h;
    const double fd = (objectiveH(up, data, cfg) - objectiveH(down, data, cfg)) / (2.0 * h);
    REQUIRE(std::abs(fd - implied(i, j)) <= 1e-5 * std::max(1.0, std::abs(fd)));
  }

  // The doubled constant matches the gradient of H plus a second affinity term.
  MvcConfig doubledCfg = cfg;
  doubledCfg.zStepDoubledC = true;
  MvcState d = probe;
  zStep(d, data, doubledCfg);
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = 0; j < 5; ++j) {
      if (i != j) REQUIRE(d.z[0](i, j) > 0.0);
    }
  }
  const Matrix impliedDoubled = (z0 - d.z[0]) * (doubledCfg.gamma * modulus);
  const Matrix c = pairwiseSquaredDistances(probe.y);
  const auto augmented = [&](const MvcState& st) {
    return objectiveH(st, data, cfg) + 0.5 * cfg.rho * (st.z[0].array() * c.array()).sum();
  };
  for (const auto [i, j] : {std::pair<int, int>{0, 1}, {2, 4}}) {
    MvcState up = probe, down = probe;
    up.z[0](i, j) += h;
    down.z[0](i, j) -= h;
    const double fd = (augmented(up) - augmented(down)) / (2.0 * h);
    REQUIRE(std::abs(fd - impliedDoubled(i, j)) <= 1e-5 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("stated step moduli bound the gradient change along each step") {
  MultiViewDataset data;
  data.views.push_back(gaussianMatrix(4, 10, 91));
  data.views.push_back(gaussianMatrix(3, 10, 92));
  const MvcConfig cfg = smallConfig(3);

  MvcState s = seededState(data, cfg, 93);
  for (std::size_t v = 0; v < 2; ++v) {
    const Vector sqrtP = s.p[v].cwiseSqrt();
    const Matrix bMat = data.views[v] * sqrtP.asDiagonal();
    const double wModulus = (bMat * bMat.transpose()).norm();
    const Matrix wBefore = s.w[v];
    const Matrix gBefore = wGradient(s, data, v);
    wStep(s, data, cfg);
    const Matrix gAfter = wGradient(s, data, v);
    CHECK((gAfter - gBefore).norm() <= wModulus * (s.w[v] - wBefore).norm() + 1e-9);
  }
  for (std::size_t v = 0; v < 2; ++v) {
    const double bModulus = s.p[v].cwiseSqrt().sum();
    const Vector bBefore = s.b[v];
    const Vector gBefore = bGradient(s, data, v);
    bStep(s, data, cfg);
    const Vector gAfter = bGradient(s, data, v);
    CHECK((gAfter - gBefore).norm() <= bModulus * (s.b[v] - bBefore).norm() + 1e-9);
  }
  {
    Matrix gBefore;
    double yModulus = 0.0;
    yGradient(s, data, cfg, &gBefore, &yModulus);
    const Matrix yBefore = s.y;
    yStep(s, data, cfg);
    Matrix gAfter;
    double ignored = 0.0;
    yGradient(s, data, cfg, &gAfter, &ignored);
    CHECK((gAfter - gBefore).norm() <= yModulus * (s.y - yBefore).norm() + 1e-9);
  }
  const double cConst = 0.5 * cfg.rho;
  for (std::size_t v = 0; v < 2; ++v) {
    const double zModulus =
        (data.views[v].transpose() * data.views[v]).norm() * s.p[v].norm();
    const Matrix zBefore = s.z[v];
    const Matrix gBefore = zGradient(s, data, cConst, v);
    zStep(s, data, cfg);
    const Matrix gAfter = zGradient(s, data, cConst, v);
    CHECK((gAfter - gBefore).norm() <= zModulus * (s.z[v] - zBefore).norm() + 1e-9);
  }
}

TEST_CASE("full sweeps never increase the objective and keep constraints") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    MultiViewDataset data;
    data.views.push_back(gaussianMatrix(4, 20, 100 + seed));
    data.views.push_back(gaussianMatrix(3, 20, 200 + seed));
    MvcConfig cfg = smallConfig(2);
    cfg.seed = seed;
    cfg.palmIters = 40;
    cfg.palmTol = 1e-12;

    MvcState s = seededState(data, cfg, 300 + seed);
    const PalmResult res = palmSolveP2(s, data, cfg);
    REQUIRE(res.hTrajectory.size() >= 2);
    for (std::size_t t = 1; t < res.hTrajectory.size(); ++t) {
      REQUIRE(res.hTrajectory[t] <=
              res.hTrajectory[t - 1] + 1e-8 * std::max(1.0, std::abs(res.hTrajectory[t - 1])));
    }
    CHECK(res.maxOrthoError <= 1e-8);
    CHECK(res.minZEntry >= 0.0);
    CHECK(res.maxAbsZDiag == 0.0);
    CHECK(res.sweeps >= 1);
  }
}

TEST_CASE("zero data pins the affinities at zero") {
  MultiViewDataset data;
  data.views.push_back(Matrix::Zero(3, 8));
  MvcConfig cfg = smallConfig(2);
  cfg.palmIters = 30;
  MvcState s = mvcInit(data, cfg);
  const PalmResult res = palmSolveP2(s, data, cfg);
  CHECK(s.z[0].cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::isfinite(res.hTrajectory.back()));
}

TEST_CASE("frozen residuals admit monotone weights along the pace direction") {
  MultiViewDataset data;
  data.views.push_back(gaussianMatrix(4, 12, 111));
  const MvcConfig cfg = smallConfig(2);
  const MvcState base = seededState(data, cfg, 112);
  const double mu = 1.3;

  MvcState grow = base;
  p1UpdateWeights(grow, data, 0.8, ImplicitRegularizer{ImplicitKind::Welsch}, cfg.beta);
  const std::vector<Vector> atLambda = grow.p;
  p1UpdateWeights(grow, data, 0.8 * mu, ImplicitRegularizer{ImplicitKind::Welsch}, cfg.beta);
  for (Eigen::Index i = 0; i < 12; ++i) REQUIRE(grow.p[0][i] >= atLambda[0][i]);

  MvcState shrink = base;
  p1UpdateWeights(shrink, data, 0.8, ImplicitRegularizer{ImplicitKind::L1L2}, cfg.beta);
  const std::vector<Vector> before = shrink.p;
  p1UpdateWeights(shrink, data, 0.8 / mu, ImplicitRegularizer{ImplicitKind::L1L2}, cfg.beta);
  for (Eigen::Index i = 0; i < 12; ++i) REQUIRE(shrink.p[0][i] >= before[0][i]);
}

TEST_CASE("well-separated blobs are clustered perfectly") {
  MultiViewDataset data;
  data.views.push_back(blobView(4, 2, 20, 6.0, 0.5, 121));
  MvcConfig cfg = smallConfig(2);
  cfg.seed = 5;
  cfg.pace.maxRounds = 6;

  const MvcResult res = splMvcFit(data, cfg, ImplicitRegularizer{ImplicitKind::Welsch});
  CHECK(acc(res.labels, blobLabels(2, 20)) == 1.0);
  CHECK(res.lambdas.size() == res.trace.rounds.size());
  CHECK(!res.palm.empty());
  CHECK((res.state.y * res.state.y.transpose() - Matrix::Identity(2, 2)).norm() <= 1e-8);

  Matrix badInit = Matrix::Zero(3, 40);
  CHECK_THROWS_WITH_AS(splMvcFit(data, cfg, ImplicitRegularizer{ImplicitKind::Welsch}, &badInit),
                       doctest::Contains("shape"), std::invalid_argument);
}

TEST_CASE("sweeps commute with sample permutations") {
  const int n = 12;
  MultiViewDataset data;
  data.views.push_back(gaussianMatrix(3, n, 131));
  data.views.push_back(gaussianMatrix(4, n, 132));
  MvcConfig cfg = smallConfig(2);
  cfg.palmIters = 5;
  cfg.palmTol = 1e-300;

  MvcState a = seededState(data, cfg, 133);
  const MvcState a0 = a;

  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = (i * 5 + 3) % n;
  MultiViewDataset permuted;
  MvcState b = a0;
  for (std::size_t v = 0; v < 2; ++v) {
    Matrix x(data.views[v].rows(), n);
    for (int i = 0; i < n; ++i) x.col(i) = data.views[v].col(perm[static_cast<std::size_t>(i)]);
    permuted.views.push_back(x);
    for (int i = 0; i < n; ++i) {
      b.p[v][i] = a0.p[v][perm[static_cast<std::size_t>(i)]];
      for (int j = 0; j < n; ++j) {
        b.z[v](i, j) = a0.z[v](perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
      }
    }
  }
  Matrix yb(2, n);
  for (int i = 0; i < n; ++i) yb.col(i) = a0.y.col(perm[static_cast<std::size_t>(i)]);
  b.y = yb;

  palmSolveP2(a, data, cfg);
  palmSolveP2(b, permuted, cfg);

  for (int i = 0; i < n; ++i) {
    REQUIRE((b.y.col(i) - a.y.col(perm[static_cast<std::size_t>(i)])).norm() <= 1e-6);
    for (std::size_t v = 0; v < 2; ++v) {
      REQUIRE(std::abs(b.p[v][i] - a.p[v][perm[static_cast<std::size_t>(i)]]) <= 1e-6);
      for (int j = 0; j < n; ++j) {
        REQUIRE(std::abs(b.z[v](i, j) - a.z[v](perm[static_cast<std::size_t>(i)],
                                               perm[static_cast<std::size_t>(j)])) <= 1e-6);
      }
    }
  }
  for (std::size_t v = 0; v < 2; ++v) {
    REQUIRE((b.w[v] - a.w[v]).cwiseAbs().maxCoeff() <= 1e-6);
    REQUIRE((b.b[v] - a.b[v]).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("permuting the samples leaves separable accuracy unchanged") {
  const int n = 30;
  MultiViewDataset data;
  data.views.push_back(blobView(3, 2, 15, 6.0, 0.5, 141));
  MvcConfig cfg = smallConfig(2);
  cfg.seed = 9;
  cfg.pace.maxRounds = 4;
  const std::vector<int> truth = blobLabels(2, 15);

  const MvcResult straight = splMvcFit(data, cfg, ImplicitRegularizer{ImplicitKind::Welsch});

  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = (i * 7 + 4) % n;
  MultiViewDataset shuffled;
  Matrix x(3, n);
  std::vector<int> truthPerm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    x.col(i) = data.views[0].col(perm[static_cast<std::size_t>(i)]);
    truthPerm[static_cast<std::size_t>(i)] = truth[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
  }
  shuffled.views.push_back(x);
  const Matrix initA = mvcInit(data, cfg).y;
  Matrix initB(2, n);
  for (int i = 0; i < n; ++i) initB.col(i) = initA.col(perm[static_cast<std::size_t>(i)]);
  const MvcResult moved =
      splMvcFit(shuffled, cfg, ImplicitRegularizer{ImplicitKind::Welsch}, &initB);

  CHECK(acc(straight.labels, truth) == acc(moved.labels, truthPerm));
}

TEST_CASE("duplicated views reproduce the single-view run") {
  MultiViewDataset one;
  one.views.push_back(blobView(4, 2, 15, 5.0, 1.0, 151) * 3.0);
  MultiViewDataset two;
  two.views.push_back(one.views[0]);
  two.views.push_back(one.views[0]);

  MvcConfig cfg = smallConfig(2);
  cfg.seed = 3;
  cfg.pace.maxRounds = 5;
  cfg.palmIters = 60;

  const MvcResult a = splMvcFit(one, cfg, ImplicitRegularizer{ImplicitKind::Welsch});
  const MvcResult b = splMvcFit(two, cfg, ImplicitRegularizer{ImplicitKind::Welsch});

  // Equal stopping decisions need the relative-change guard above 1; verify.
  for (const PalmResult& palm : a.palm) {
    for (double h : palm.hTrajectory) REQUIRE(h >= 1.0);
  }

  CHECK(a.labels == b.labels);
  // The two copies of a view see identical inputs every sweep, so their
  // affinities must agree bitwise. Across runs the coupling accumulation
  // order differs, which admits ulp-level drift but nothing larger.
  CHECK((b.state.z[0] - b.state.z[1]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.state.y - b.state.y).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((a.state.z[0] - b.state.z[0]).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(a.lambdas == b.lambdas);
}

TEST_CASE("k-means recovers planted structure and reports honest traces") {
  // n = k distinct points: every point its own cluster at zero cost.
  const Matrix distinct = (Matrix(2, 3) << 0.0, 5.0, 10.0, 0.0, -5.0, 3.0).finished();
  const std::vector<int> solo = kmeans(distinct, 3, 17);
  std::vector<int> seen(3, 0);
  for (int label : solo) {
    REQUIRE(label >= 0);
    REQUIRE(label < 3);
    ++seen[static_cast<std::size_t>(label)];
  }
  CHECK(seen == std::vector<int>(3, 1));

  const Matrix blobs = blobView(3, 3, 15, 8.0, 0.5, 161);
  CHECK(acc(kmeans(blobs, 3, 7), blobLabels(3, 15)) == 1.0);
  CHECK(kmeans(blobs, 3, 7) == kmeans(blobs, 3, 7));

  std::vector<std::vector<double>> trace;
  const std::vector<int> labels = kmeans(blobs, 3, 11, 4, &trace);
  REQUIRE(trace.size() == 4);
  for (const auto& run : trace) {
    REQUIRE(!run.empty());
    for (std::size_t t = 1; t < run.size(); ++t) REQUIRE(run[t] <= run[t - 1] + 1e-9);
  }

  const auto wcssOf = [&](const std::vector<int>& assign, int k) {
    Matrix centers = Matrix::Zero(blobs.rows(), k);
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < blobs.cols(); ++i) {
      centers.col(assign[static_cast<std::size_t>(i)]) += blobs.col(i);
      ++sizes[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) centers.col(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);
    double total = 0.0;
    for (Eigen::Index i = 0; i < blobs.cols(); ++i) {
      total += (blobs.col(i) - centers.col(assign[static_cast<std::size_t>(i)])).squaredNorm();
    }
    return total;
  };
  CHECK(wcssOf(kmeans(blobs, 3, 23, 10), 3) <= wcssOf(kmeans(blobs, 3, 23, 1), 3) + 1e-12);

  CHECK_THROWS_AS(kmeans(Matrix::Zero(2, 3), 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(kmeans(blobs, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(kmeans(blobs, 3, 1, 0), std::invalid_argument);
}
