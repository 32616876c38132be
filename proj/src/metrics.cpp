#include "splkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace splkit {

namespace {

// Jonker-Volgenant style shortest augmenting paths with potentials; O(n^3).
// Returns the assignment and its total cost.
std::pair<std::vector<int>, double> solveAssignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<double> u(static_cast<size_t>(n) + 1, 0.0), v(static_cast<size_t>(n) + 1, 0.0);
  std::vector<int> colRow(static_cast<size_t>(n) + 1, 0);  // 1-based; 0 = free
  std::vector<int> way(static_cast<size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    colRow[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<size_t>(n) + 1,
                             std::numeric_limits<double>::infinity());
    std::vector<bool> used(static_cast<size_t>(n) + 1, false);
    do {
      used[static_cast<size_t>(j0)] = true;
      const int i0 = colRow[static_cast<size_t>(j0)];
      double delta = std::numeric_limits<double>::infinity();
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] -
                           v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(colRow[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (colRow[static_cast<size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<size_t>(j0)];
      colRow[static_cast<size_t>(j0)] = colRow[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> perm(static_cast<size_t>(n), -1);
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    perm[static_cast<size_t>(colRow[static_cast<size_t>(j)]) - 1] = j - 1;
    total += cost(colRow[static_cast<size_t>(j)] - 1, j - 1);
  }
  return {perm, total};
}

struct Contingency {
  std::vector<std::vector<double>> counts;  // predicted cluster x true cluster
  std::vector<double> predSizes;
  std::vector<double> truthSizes;
  double n = 0.0;
};

std::vector<int> compactLabels(const std::vector<int>& labels, const char* what) {
  std::map<int, int> ids;
  std::vector<int> out(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw std::invalid_argument(std::string(what) + ": negative label");
    out[i] = ids.emplace(labels[i], static_cast<int>(ids.size())).first->second;
  }
  return out;
}

Contingency contingency(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.empty() || pred.size() != truth.size()) {
    throw std::invalid_argument("cluster metrics: label vectors must be nonempty, equal length");
  }
  const std::vector<int> p = compactLabels(pred, "pred labels");
  const std::vector<int> t = compactLabels(truth, "truth labels");
  const int kp = *std::max_element(p.begin(), p.end()) + 1;
  const int kt = *std::max_element(t.begin(), t.end()) + 1;
  Contingency c;
  c.counts.assign(static_cast<size_t>(kp), std::vector<double>(static_cast<size_t>(kt), 0.0));
  c.predSizes.assign(static_cast<size_t>(kp), 0.0);
  c.truthSizes.assign(static_cast<size_t>(kt), 0.0);
  c.n = static_cast<double>(p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    c.counts[static_cast<size_t>(p[i])][static_cast<size_t>(t[i])] += 1.0;
    c.predSizes[static_cast<size_t>(p[i])] += 1.0;
    c.truthSizes[static_cast<size_t>(t[i])] += 1.0;
  }
  return c;
}

// Identical as partitions: the contingency table is a matching.
bool samePartition(const Contingency& c) {
  if (c.counts.size() != c.counts.front().size()) return false;
  for (size_t i = 0; i < c.counts.size(); ++i) {
    int nonzero = 0;
    for (double v : c.counts[i]) nonzero += v > 0.0;
    if (nonzero != 1) return false;
  }
  return true;
}

double pairs(double m) { return 0.5 * m * (m - 1.0); }

}  // namespace

std::vector<int> hungarian(const Matrix& cost) {
  if (cost.rows() != cost.cols() || cost.rows() < 1) {
    throw std::invalid_argument("hungarian: square nonempty cost matrix required");
  }
  requireFinite(cost, "hungarian cost");
  const int n = static_cast<int>(cost.rows());
  const double best = solveAssignment(cost).second;

  // Fix rows in order, taking the smallest column that still completes
  // to an optimal assignment; optimality checked by re-solving the remainder.
  std::vector<int> perm(static_cast<size_t>(n), -1);
  std::vector<int> freeCols(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) freeCols[static_cast<size_t>(j)] = j;
  double fixedCost = 0.0;
  for (int i = 0; i < n; ++i) {
    for (size_t pick = 0; pick < freeCols.size(); ++pick) {
      const int j = freeCols[pick];
      const double withPick = fixedCost + cost(i, j);
      double rest = 0.0;
      if (i + 1 < n) {
        Matrix sub(n - i - 1, n - i - 1);
        int sc = 0;
        for (size_t q = 0; q < freeCols.size(); ++q) {
          if (q == pick) continue;
          for (int r = i + 1; r < n; ++r) sub(r - i - 1, sc) = cost(r, freeCols[q]);
          ++sc;
        }
        rest = solveAssignment(sub).second;
      }
      if (withPick + rest <= best + 1e-9) {
        perm[static_cast<size_t>(i)] = j;
        fixedCost = withPick;
        freeCols.erase(freeCols.begin() + static_cast<std::ptrdiff_t>(pick));
        break;
      }
    }
    if (perm[static_cast<size_t>(i)] < 0) {
      throw std::runtime_error("hungarian: lexicographic completion failed");
    }
  }
  return perm;
}

double acc(const std::vector<int>& pred, const std::vector<int>& truth) {
  const Contingency c = contingency(pred, truth);
  const size_t k = std::max(c.counts.size(), c.counts.front().size());
  Matrix cost = Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (size_t i = 0; i < c.counts.size(); ++i) {
    for (size_t j = 0; j < c.counts[i].size(); ++j) {
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = -c.counts[i][j];
    }
  }
  const std::vector<int> match = hungarian(cost);
  double hits = 0.0;
  for (size_t i = 0; i < c.counts.size(); ++i) {
    const size_t j = static_cast<size_t>(match[i]);
    if (j < c.counts[i].size()) hits += c.counts[i][j];
  }
  return hits / c.n;
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
  const Contingency c = contingency(pred, truth);
  if (samePartition(c)) return 1.0;
  double hp = 0.0, ht = 0.0;
  for (double s : c.predSizes) hp -= s / c.n * std::log(s / c.n);
  for (double s : c.truthSizes) ht -= s / c.n * std::log(s / c.n);
  if (hp <= 0.0 || ht <= 0.0) return 0.0;
  double mi = 0.0;
  for (size_t i = 0; i < c.counts.size(); ++i) {
    for (size_t j = 0; j < c.counts[i].size(); ++j) {
      const double nij = c.counts[i][j];
      if (nij <= 0.0) continue;
      mi += nij / c.n * std::log(c.n * nij / (c.predSizes[i] * c.truthSizes[j]));
    }
  }
  return mi / std::sqrt(hp * ht);
}

double adjustedRand(const std::vector<int>& pred, const std::vector<int>& truth) {
  const Contingency c = contingency(pred, truth);
  if (samePartition(c)) return 1.0;
  double sumIj = 0.0, sumP = 0.0, sumT = 0.0;
  for (const auto& row : c.counts) {
    for (double v : row) sumIj += pairs(v);
  }
  for (double s : c.predSizes) sumP += pairs(s);
  for (double s : c.truthSizes) sumT += pairs(s);
  const double total = pairs(c.n);
  if (total <= 0.0) return 1.0;  // single sample: identical by construction
  const double expected = sumP * sumT / total;
  const double denom = 0.5 * (sumP + sumT) - expected;
  if (denom == 0.0) return 0.0;
  return (sumIj - expected) / denom;
}

double fscore(const std::vector<int>& pred, const std::vector<int>& truth) {
  const Contingency c = contingency(pred, truth);
  double tp = 0.0, samePred = 0.0, sameTruth = 0.0;
  for (const auto& row : c.counts) {
    for (double v : row) tp += pairs(v);
  }
  for (double s : c.predSizes) samePred += pairs(s);
  for (double s : c.truthSizes) sameTruth += pairs(s);
  const double precision = samePred > 0.0 ? tp / samePred : 1.0;
  const double recall = sameTruth > 0.0 ? tp / sameTruth : 1.0;
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double purity(const std::vector<int>& pred, const std::vector<int>& truth) {
  const Contingency c = contingency(pred, truth);
  double hits = 0.0;
  for (const auto& row : c.counts) hits += *std::max_element(row.begin(), row.end());
  return hits / c.n;
}

}  // namespace splkit
