#include "splkit/mvc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace splkit {

namespace {

void validateConfig(const MvcConfig& cfg) {
  if (!(cfg.beta >= 0.0)) throw std::invalid_argument("mvc: beta must be nonnegative");
  if (!(cfg.rho >= 0.0)) throw std::invalid_argument("mvc: rho must be nonnegative");
  if (!(cfg.gamma > 1.0)) throw std::invalid_argument("mvc: gamma must exceed 1");
  if (cfg.k < 2) throw std::invalid_argument("mvc: need at least 2 clusters");
  if (cfg.palmIters < 1 || !(cfg.palmTol > 0.0)) {
    throw std::invalid_argument("mvc: palm budget must be positive");
  }
}

void checkState(const MvcState& s, const MultiViewDataset& data) {
  const size_t m = data.views.size();
  if (s.z.size() != m || s.w.size() != m || s.b.size() != m || s.p.size() != m) {
    throw std::invalid_argument("mvc: state view count differs from the dataset");
  }
}

double zGradientConstant(const MvcConfig& cfg) {
  return cfg.zStepDoubledC ? cfg.rho : 0.5 * cfg.rho;
}

}  // namespace

void validateMultiview(const MultiViewDataset& data) {
  if (data.views.empty()) throw std::invalid_argument("mvc: no views");
  const Eigen::Index n = data.views.front().cols();
  for (size_t v = 0; v < data.views.size(); ++v) {
    requireFinite(data.views[v], "view " + std::to_string(v));
    if (data.views[v].cols() != n) {
      throw std::invalid_argument("mvc: view " + std::to_string(v) + " has " +
                                  std::to_string(data.views[v].cols()) +
                                  " samples, expected " + std::to_string(n));
    }
  }
}

MvcState mvcInit(const MultiViewDataset& data, const MvcConfig& cfg) {
  validateMultiview(data);
  validateConfig(cfg);
  const Eigen::Index n = data.views.front().cols();
  if (n < cfg.k) throw std::invalid_argument("mvc: fewer samples than clusters");

  MvcState s;
  for (const Matrix& x : data.views) {
    s.z.push_back(Matrix::Zero(n, n));
    s.w.push_back(Matrix::Zero(cfg.k, x.rows()));
    s.b.push_back(Vector::Zero(cfg.k));
    s.p.push_back(Vector::Ones(n));
  }
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(cfg.k, n);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = normal(rng);
  }
  s.y = projectOrthonormalRows(g).y;
  return s;
}

std::vector<Vector> mvcViewLosses(const MvcState& s, const MultiViewDataset& data, double beta) {
  checkState(s, data);
  std::vector<Vector> losses;
  for (size_t v = 0; v < data.views.size(); ++v) {
    const Matrix& x = data.views[v];
    const Matrix selfRep = x - x * s.z[v];
    const Matrix regress = s.w[v] * x + s.b[v] * Vector::Ones(x.cols()).transpose() - s.y;
    Vector l(x.cols());
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
      l[i] = std::sqrt(selfRep.col(i).squaredNorm() + beta * regress.col(i).squaredNorm());
    }
    losses.push_back(std::move(l));
  }
  return losses;
}

void p1UpdateWeights(MvcState& s, const MultiViewDataset& data, double lambda,
                     const ImplicitRegularizer& reg, double beta) {
  const std::vector<Vector> losses = mvcViewLosses(s, data, beta);
  for (size_t v = 0; v < losses.size(); ++v) {
    for (Eigen::Index i = 0; i < losses[v].size(); ++i) {
      s.p[v][i] = reg.weightFromLoss(lambda, losses[v][i] * losses[v][i]);
    }
  }
}

Matrix pairwiseSquaredDistances(const Matrix& y) {
  const Eigen::Index n = y.cols();
  Matrix c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (y.col(i) - y.col(j)).squaredNorm();
      c(i, j) = d;
      c(j, i) = d;
    }
  }
  return c;
}

double objectiveH(const MvcState& s, const MultiViewDataset& data, const MvcConfig& cfg) {
  checkState(s, data);
  const Matrix c = pairwiseSquaredDistances(s.y);
  double h = 0.0;
  for (size_t v = 0; v < data.views.size(); ++v) {
    const Matrix& x = data.views[v];
    const Matrix selfRep = x - x * s.z[v];
    const Matrix regress = s.w[v] * x + s.b[v] * Vector::Ones(x.cols()).transpose() - s.y;
    double viewTerm = 0.0;
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
      viewTerm += s.p[v][i] * (selfRep.col(i).squaredNorm() +
                               cfg.beta * regress.col(i).squaredNorm());
    }
    viewTerm += cfg.rho * (s.z[v].array() * c.array()).sum();
    h += 0.5 * viewTerm;
  }
  return h;
}

void wStep(MvcState& s, const MultiViewDataset& data, const MvcConfig& cfg) {
  checkState(s, data);
  const Eigen::Index n = data.views.front().cols();
  for (size_t v = 0; v < data.views.size(); ++v) {
    const Matrix& x = data.views[v];
    const Vector sqrtP = s.p[v].cwiseSqrt();
    const Matrix b = x * sqrtP.asDiagonal();                       // X P
    const Matrix bbT = b * b.transpose();                          // X P^2 X^T
    const double modulus = bbT.norm();
    if (modulus == 0.0) continue;
    const Matrix a =
        (s.y - s.b[v] * Vector::Ones(n).transpose()) * sqrtP.asDiagonal();  // (Y - b 1^T) P
    const Matrix grad = s.w[v] * bbT - a * b.transpose();
    s.w[v] -= grad / (cfg.gamma * modulus);
  }
}

void bStep(MvcState& s, const MultiViewDataset& data, const MvcConfig& cfg) {
  checkState(s, data);
  for (size_t v = 0; v < data.views.size(); ++v) {
    const Matrix& x = data.views[v];
    const Vector sqrtP = s.p[v].cwiseSqrt();
    const double modulus = sqrtP.sum();  // tr(P)
    if (modulus == 0.0) continue;
    const Matrix f = (s.y - s.w[v] * x) * sqrtP.asDiagonal();
    const Vector grad = s.b[v] * sqrtP.sum() - f.rowwise().sum();  // (b 1^T P - F) 1
    s.b[v] -= grad / (cfg.gamma * modulus);
  }
}

void yStep(MvcState& s, const MultiViewDataset& data, const MvcConfig& cfg) {
  checkState(s, data);
  const Eigen::Index n = data.views.front().cols();
  Matrix coupling = Matrix::Zero(n, n);  // beta sum_v P_v^2 + (rho/2)(L* + L*^T)
  Matrix pull = Matrix::Zero(s.y.rows(), n);
  for (size_t v = 0; v < data.views.size(); ++v) {
    const Matrix& x = data.views[v];
    coupling.diagonal() += cfg.beta * s.p[v];
    const Vector rowSums = s.z[v].rowwise().sum();
    coupling += 0.5 * cfg.rho *
                (Matrix(2.0 * rowSums.asDiagonal()) - s.z[v] - s.z[v].transpose());
    pull.noalias() +=
        cfg.beta * (s.w[v] * x + s.b[v] * Vector::Ones(n).transpose()) * s.p[v].asDiagonal();
  }
  const double modulus = coupling.norm();
  if (modulus == 0.0) return;
  const Matrix grad = s.y * coupling - pull;
  s.y = projectOrthonormalRows(s.y - grad / (cfg.gamma * modulus)).y;
}

void zStep(MvcState& s, const MultiViewDataset& data, const MvcConfig& cfg) {
  checkState(s, data);
  const Matrix c = pairwiseSquaredDistances(s.y);
  const double cConst = zGradientConstant(cfg);
  for (size_t v = 0; v < data.views.size(); ++v) {
    const Matrix& x = data.views[v];
    const Matrix gram = x.transpose() * x;
    const double modulus = gram.norm() * s.p[v].norm();  // |X^T X|_F |P^2|_F, P^2 = diag(p)
    if (modulus == 0.0) continue;
    const Matrix grad =
        gram * s.z[v] * s.p[v].asDiagonal() - gram * s.p[v].asDiagonal() + cConst * c;
    Matrix vMat = s.z[v] - grad / (cfg.gamma * modulus);
    s.z[v] = vMat.cwiseMax(0.0);
    s.z[v].diagonal().setZero();
  }
}

PalmResult palmSolveP2(MvcState& s, const MultiViewDataset& data, const MvcConfig& cfg) {
  PalmResult result;
  result.minZEntry = std::numeric_limits<double>::infinity();
  double h = objectiveH(s, data, cfg);
  result.hTrajectory.push_back(h);
  for (int sweep = 1; sweep <= cfg.palmIters; ++sweep) {
    wStep(s, data, cfg);
    bStep(s, data, cfg);
    yStep(s, data, cfg);
    zStep(s, data, cfg);

    const Matrix ortho = s.y * s.y.transpose();
    result.maxOrthoError = std::max(
        result.maxOrthoError,
        (ortho - Matrix::Identity(ortho.rows(), ortho.cols())).norm());
    for (const Matrix& z : s.z) {
      result.minZEntry = std::min(result.minZEntry, z.minCoeff());
      result.maxAbsZDiag = std::max(result.maxAbsZDiag, z.diagonal().cwiseAbs().maxCoeff());
    }

    const double next = objectiveH(s, data, cfg);
    if (!std::isfinite(next)) {
      throw std::runtime_error("palm_solve_p2: non-finite objective at sweep " +
                               std::to_string(sweep));
    }
    result.hTrajectory.push_back(next);
    result.sweeps = sweep;
    if (std::abs(h - next) <= cfg.palmTol * std::max(1.0, std::abs(h))) break;
    h = next;
  }
  if (result.minZEntry == std::numeric_limits<double>::infinity()) result.minZEntry = 0.0;
  return result;
}

MvcResult splMvcFit(const MultiViewDataset& data, const MvcConfig& cfg,
                    const ImplicitRegularizer& reg, const Matrix* initY) {
  MvcResult res;
  res.state = mvcInit(data, cfg);
  if (initY) {
    if (initY->rows() != res.state.y.rows() || initY->cols() != res.state.y.cols()) {
      throw std::invalid_argument("spl_mvc_fit: init Y shape mismatch");
    }
    res.state.y = *initY;
  }
  const Eigen::Index n = data.views.front().cols();
  const size_t m = data.views.size();

  // Bootstrap: unit weights, one full P2 solve, pooled squared losses set the pace.
  res.palm.push_back(palmSolveP2(res.state, data, cfg));
  std::vector<Vector> losses = mvcViewLosses(res.state, data, cfg.beta);
  double lambda;
  if (cfg.pace.lambda0) {
    lambda = *cfg.pace.lambda0;
  } else {
    std::vector<double> pooled;
    pooled.reserve(m * static_cast<size_t>(n));
    for (const Vector& l : losses) {
      for (Eigen::Index i = 0; i < l.size(); ++i) pooled.push_back(l[i] * l[i]);
    }
    lambda = initLambdaHalf(Regularizer{reg}, pooled).lambda;
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("spl_mvc_fit: pace value must be positive");

  const bool grow = reg.direction() == PaceDirection::Grow;
  for (int round = 1; round <= cfg.pace.maxRounds; ++round) {
    p1UpdateWeights(res.state, data, lambda, reg, cfg.beta);
    res.palm.push_back(palmSolveP2(res.state, data, cfg));
    losses = mvcViewLosses(res.state, data, cfg.beta);

    Vector weights(static_cast<Eigen::Index>(m) * n);
    Vector squaredLosses(static_cast<Eigen::Index>(m) * n);
    for (size_t v = 0; v < m; ++v) {
      for (Eigen::Index i = 0; i < n; ++i) {
        weights[static_cast<Eigen::Index>(v) * n + i] = res.state.p[v][i];
        squaredLosses[static_cast<Eigen::Index>(v) * n + i] = losses[v][i] * losses[v][i];
      }
    }
    res.lambdas.push_back(lambda);
    res.trace.rounds.push_back({round, lambda, weights, squaredLosses, 0.0,
                                weights.dot(squaredLosses), res.palm.back().sweeps});
    if (reg.weightCeiling(lambda) - weights.minCoeff() <= 1e-9) {
      res.trace.saturated = true;
      break;
    }
    lambda = grow ? lambda * cfg.pace.mu : lambda / cfg.pace.mu;
  }

  res.labels = kmeans(res.state.y, cfg.k, cfg.seed + 1, cfg.kmeansRestarts);
  return res;
}

std::vector<int> kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts,
                        std::vector<std::vector<double>>* wcssTrace) {
  const Eigen::Index n = points.cols();
  if (k < 1 || static_cast<Eigen::Index>(k) > n) {
    throw std::invalid_argument("kmeans: need 1 <= k <= point count");
  }
  requireFinite(points, "kmeans points");
  if (restarts < 1) throw std::invalid_argument("kmeans: restarts must be positive");

  std::mt19937_64 rng(seed);
  std::vector<int> bestLabels;
  double bestWcss = std::numeric_limits<double>::infinity();

  for (int attempt = 0; attempt < restarts; ++attempt) {
    if (wcssTrace) wcssTrace->emplace_back();
    // k-means++ seeding with a single inverse-CDF draw per center.
    Matrix centers(points.rows(), k);
    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    centers.col(0) = points.col(first(rng));
    Vector dist2(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      dist2[i] = (points.col(i) - centers.col(0)).squaredNorm();
    }
    for (int c = 1; c < k; ++c) {
      const double total = dist2.sum();
      Eigen::Index chosen;
      if (total > 0.0) {
        std::uniform_real_distribution<double> pickMass(0.0, total);
        double remaining = pickMass(rng);
        chosen = n - 1;
        for (Eigen::Index i = 0; i < n; ++i) {
          remaining -= dist2[i];
          if (remaining <= 0.0) {
            chosen = i;
            break;
          }
        }
      } else {
        chosen = first(rng);
      }
      centers.col(c) = points.col(chosen);
      for (Eigen::Index i = 0; i < n; ++i) {
        dist2[i] = std::min(dist2[i], (points.col(i) - centers.col(c)).squaredNorm());
      }
    }

    std::vector<int> labels(static_cast<size_t>(n), 0);
    for (int iter = 0; iter < 100; ++iter) {
      bool changed = false;
      for (Eigen::Index i = 0; i < n; ++i) {
        int arg = 0;
        double best = (points.col(i) - centers.col(0)).squaredNorm();
        for (int c = 1; c < k; ++c) {
          const double d = (points.col(i) - centers.col(c)).squaredNorm();
          if (d < best) {
            best = d;
            arg = c;
          }
        }
        if (labels[static_cast<size_t>(i)] != arg) {
          labels[static_cast<size_t>(i)] = arg;
          changed = true;
        }
      }

      std::vector<Eigen::Index> sizes(static_cast<size_t>(k), 0);
      Matrix sums = Matrix::Zero(points.rows(), k);
      for (Eigen::Index i = 0; i < n; ++i) {
        sums.col(labels[static_cast<size_t>(i)]) += points.col(i);
        ++sizes[static_cast<size_t>(labels[static_cast<size_t>(i)])];
      }
      for (int c = 0; c < k; ++c) {
        if (sizes[static_cast<size_t>(c)] == 0) {
          // Repair: move the point farthest from the largest cluster's center.
          int largest = 0;
          for (int c2 = 1; c2 < k; ++c2) {
            if (sizes[static_cast<size_t>(c2)] > sizes[static_cast<size_t>(largest)]) {
              largest = c2;
            }
          }
          const Vector mean =
              sums.col(largest) / static_cast<double>(sizes[static_cast<size_t>(largest)]);
          Eigen::Index farthest = -1;
          double far = -1.0;
          for (Eigen::Index i = 0; i < n; ++i) {
            if (labels[static_cast<size_t>(i)] != largest) continue;
            const double d = (points.col(i) - mean).squaredNorm();
            if (d > far) {
              far = d;
              farthest = i;
            }
          }
          sums.col(largest) -= points.col(farthest);
          --sizes[static_cast<size_t>(largest)];
          sums.col(c) += points.col(farthest);
          ++sizes[static_cast<size_t>(c)];
          labels[static_cast<size_t>(farthest)] = c;
          changed = true;
        }
      }
      for (int c = 0; c < k; ++c) {
        centers.col(c) = sums.col(c) / static_cast<double>(sizes[static_cast<size_t>(c)]);
      }
      if (wcssTrace) {
        double w = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          w += (points.col(i) - centers.col(labels[static_cast<size_t>(i)])).squaredNorm();
        }
        wcssTrace->back().push_back(w);
      }
      if (!changed && iter > 0) break;
    }

    double wcss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      wcss += (points.col(i) - centers.col(labels[static_cast<size_t>(i)])).squaredNorm();
    }
    if (wcss < bestWcss) {
      bestWcss = wcss;
      bestLabels = labels;
    }
  }
  return bestLabels;
}

}  // namespace splkit
