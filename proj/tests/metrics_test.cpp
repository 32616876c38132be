#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "splkit/metrics.hpp"

using namespace splkit;

namespace {

// All label vectors of length n in restricted growth form with at most kCap
// distinct values; one canonical representative per set partition.
std::vector<std::vector<int>> partitionsUpTo(int n, int kCap) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  const auto recurse = [&](auto&& self, int pos, int used) -> void {
    if (pos == n) {
      out.push_back(cur);
      return;
    }
    const int top = std::min(used + 1, kCap);
    for (int v = 0; v < top; ++v) {
      cur[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, std::max(used, v + 1));
    }
  };
  recurse(recurse, 0, 0);
  return out;
}

struct PairCounts {
  double n11 = 0.0, n00 = 0.0, n10 = 0.0, n01 = 0.0;
};

PairCounts pairCounts(const std::vector<int>& pred, const std::vector<int>& truth) {
  PairCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = i + 1; j < pred.size(); ++j) {
      const bool sp = pred[i] == pred[j];
      const bool st = truth[i] == truth[j];
      if (sp && st) c.n11 += 1.0;
      if (!sp && !st) c.n00 += 1.0;
      if (sp && !st) c.n10 += 1.0;
      if (!sp && st) c.n01 += 1.0;
    }
  }
  return c;
}

bool sameAsPartitions(const std::vector<int>& a, const std::vector<int>& b) {
  const PairCounts c = pairCounts(a, b);
  return c.n10 == 0.0 && c.n01 == 0.0;
}

std::vector<std::vector<double>> table(const std::vector<int>& pred,
                                       const std::vector<int>& truth, int* kp, int* kt) {
  *kp = *std::max_element(pred.begin(), pred.end()) + 1;
  *kt = *std::max_element(truth.begin(), truth.end()) + 1;
  std::vector<std::vector<double>> counts(static_cast<std::size_t>(*kp),
                                          std::vector<double>(static_cast<std::size_t>(*kt), 0.0));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    counts[static_cast<std::size_t>(pred[i])][static_cast<std::size_t>(truth[i])] += 1.0;
  }
  return counts;
}

double oracleAcc(const std::vector<int>& pred, const std::vector<int>& truth) {
  int kp = 0, kt = 0;
  const auto counts = table(pred, truth, &kp, &kt);
  const int k = std::max(kp, kt);
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double hits = 0.0;
    for (int i = 0; i < kp; ++i) {
      const int j = perm[static_cast<std::size_t>(i)];
      if (j < kt) hits += counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(pred.size());
}

double oracleNmi(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (sameAsPartitions(pred, truth)) return 1.0;
  int kp = 0, kt = 0;
  const auto counts = table(pred, truth, &kp, &kt);
  const double n = static_cast<double>(pred.size());
  double hp = 0.0, ht = 0.0;
  std::vector<double> rows(static_cast<std::size_t>(kp), 0.0);
  std::vector<double> cols(static_cast<std::size_t>(kt), 0.0);
  for (int i = 0; i < kp; ++i) {
    for (int j = 0; j < kt; ++j) {
      rows[static_cast<std::size_t>(i)] += counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      cols[static_cast<std::size_t>(j)] += counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  for (double s : rows) hp -= s / n * std::log(s / n);
  for (double s : cols) ht -= s / n * std::log(s / n);
  if (hp <= 0.0 || ht <= 0.0) return 0.0;
  double mi = 0.0;
  for (int i = 0; i < kp; ++i) {
    for (int j = 0; j < kt; ++j) {
      const double nij = counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (nij > 0.0) {
        mi += nij / n *
              std::log(n * nij / (rows[static_cast<std::size_t>(i)] * cols[static_cast<std::size_t>(j)]));
      }
    }
  }
  return mi / std::sqrt(hp * ht);
}

double oracleAr(const std::vector<int>& pred, const std::vector<int>& truth) {
  const PairCounts c = pairCounts(pred, truth);
  if (c.n10 == 0.0 && c.n01 == 0.0) return 1.0;
  const double num = 2.0 * (c.n00 * c.n11 - c.n01 * c.n10);
  const double den = (c.n00 + c.n01) * (c.n01 + c.n11) + (c.n00 + c.n10) * (c.n10 + c.n11);
  return num / den;
}

double oracleF(const std::vector<int>& pred, const std::vector<int>& truth) {
  const PairCounts c = pairCounts(pred, truth);
  const double samePred = c.n11 + c.n10;
  const double sameTruth = c.n11 + c.n01;
  const double precision = samePred > 0.0 ? c.n11 / samePred : 1.0;
  const double recall = sameTruth > 0.0 ? c.n11 / sameTruth : 1.0;
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double oraclePurity(const std::vector<int>& pred, const std::vector<int>& truth) {
  int kp = 0, kt = 0;
  const auto counts = table(pred, truth, &kp, &kt);
  double hits = 0.0;
  for (const auto& row : counts) hits += *std::max_element(row.begin(), row.end());
  return hits / static_cast<double>(pred.size());
}

}  // namespace

TEST_CASE("assignment on a zero matrix is the identity") {
  CHECK(hungarian(Matrix::Zero(4, 4)) == std::vector<int>{0, 1, 2, 3});
  CHECK(hungarian(Matrix::Zero(1, 1)) == std::vector<int>{0});
  CHECK(hungarian(Matrix::Constant(3, 3, 7.5)) == std::vector<int>{0, 1, 2});
}

TEST_CASE("assignment picks the cheap diagonal") {
  Matrix cost(2, 2);
  cost << 1.0, 2.0, 2.0, 1.0;
  const std::vector<int> perm = hungarian(cost);
  CHECK(perm == std::vector<int>{0, 1});
  CHECK(cost(0, perm[0]) + cost(1, perm[1]) == 2.0);
}

TEST_CASE("assignment inputs are validated") {
  CHECK_THROWS_AS(hungarian(Matrix::Zero(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(hungarian(Matrix(0, 0)), std::invalid_argument);
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(hungarian(bad), std::invalid_argument);
}

TEST_CASE("assignment matches exhaustive search on random instances") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> real(0.0, 10.0);
  std::uniform_int_distribution<int> integer(0, 9);

  for (int trial = 0; trial < 30; ++trial) {
    Matrix cost(6, 6);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) cost(i, j) = real(rng);
    }
    std::vector<int> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double total = 0.0;
      for (int i = 0; i < 6; ++i) total += cost(i, perm[static_cast<std::size_t>(i)]);
      best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));

    const std::vector<int> got = hungarian(cost);
    double gotCost = 0.0;
    for (int i = 0; i < 6; ++i) gotCost += cost(i, got[static_cast<std::size_t>(i)]);
    REQUIRE(gotCost <= best + 1e-9);
  }

  // Integer costs produce exact ties; the smallest row-to-column map must win.
  for (int trial = 0; trial < 20; ++trial) {
    Matrix cost(6, 6);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) cost(i, j) = static_cast<double>(integer(rng));
    }
    std::vector<int> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> lexBest;
    do {
      double total = 0.0;
      for (int i = 0; i < 6; ++i) total += cost(i, perm[static_cast<std::size_t>(i)]);
      if (total < best) {
        best = total;
        lexBest = perm;
      }
      // next_permutation visits in lexicographic order, so the first argmin stays.
    } while (std::next_permutation(perm.begin(), perm.end()));
    REQUIRE(hungarian(cost) == lexBest);
  }
}

TEST_CASE("agreement scores are perfect exactly for matching partitions") {
  const std::vector<int> truth{0, 0, 1, 1, 2, 2};
  const std::vector<int> relabeled{7, 7, 3, 3, 9, 9};
  CHECK(acc(truth, truth) == 1.0);
  CHECK(acc(relabeled, truth) == 1.0);
  CHECK(nmi(relabeled, truth) == 1.0);
  CHECK(adjustedRand(relabeled, truth) == 1.0);
  CHECK(fscore(relabeled, truth) == 1.0);
  CHECK(purity(relabeled, truth) == 1.0);

  const std::vector<int> half{0, 0, 1, 1};
  const std::vector<int> other{0, 1, 0, 1};
  CHECK(acc(half, other) == 0.5);

  const std::vector<int> singletons{0, 1, 2, 3, 4};
  CHECK(acc(singletons, singletons) == 1.0);
  CHECK(nmi(singletons, singletons) == 1.0);
  CHECK(adjustedRand(singletons, singletons) == 1.0);
  CHECK(fscore(singletons, singletons) == 1.0);

  const std::vector<int> merged{0, 0, 0, 0, 0};
  CHECK(nmi(merged, merged) == 1.0);
  CHECK(adjustedRand(merged, merged) == 1.0);
}

TEST_CASE("one merged cluster against a balanced split scores its known values") {
  const std::vector<int> pred(8, 0);
  const std::vector<int> truth{0, 0, 0, 0, 1, 1, 1, 1};
  CHECK(purity(pred, truth) == 0.5);
  CHECK(nmi(pred, truth) == 0.0);
  CHECK(acc(pred, truth) == 0.5);
  CHECK(std::abs(fscore(pred, truth) - 0.6) <= 1e-12);
  CHECK(adjustedRand(pred, truth) == 0.0);
}

TEST_CASE("every metric matches its oracle on all small partition pairs") {
  for (int n = 2; n <= 6; ++n) {
    const std::vector<std::vector<int>> parts = partitionsUpTo(n, 3);
    for (const auto& pred : parts) {
      for (const auto& truth : parts) {
        CAPTURE(n);
        REQUIRE(std::abs(acc(pred, truth) - oracleAcc(pred, truth)) <= 1e-12);
        REQUIRE(std::abs(nmi(pred, truth) - oracleNmi(pred, truth)) <= 1e-12);
        REQUIRE(std::abs(adjustedRand(pred, truth) - oracleAr(pred, truth)) <= 1e-12);
        REQUIRE(std::abs(fscore(pred, truth) - oracleF(pred, truth)) <= 1e-12);
        REQUIRE(std::abs(purity(pred, truth) - oraclePurity(pred, truth)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("adjusted agreement is centered near zero for random labelings") {
  const int n = 60;
  std::vector<int> truth(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) truth[static_cast<std::size_t>(i)] = i / 20;
  std::mt19937_64 rng(47);
  std::uniform_int_distribution<int> pick(0, 2);
  double sum = 0.0;
  for (int rep = 0; rep < 10000; ++rep) {
    std::vector<int> pred(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pred[static_cast<std::size_t>(i)] = pick(rng);
    sum += adjustedRand(pred, truth);
    // Matching against a balanced k-way truth can never fall below chance level.
    REQUIRE(acc(pred, truth) >= 1.0 / 3.0 - 1e-12);
  }
  CHECK(std::abs(sum / 10000.0) <= 0.02);
}

TEST_CASE("label vectors are validated") {
  const std::vector<int> good{0, 1, 0};
  CHECK_THROWS_AS(acc({0, -1, 0}, good), std::invalid_argument);
  CHECK_THROWS_AS(acc(good, {0, 1, -2}), std::invalid_argument);
  CHECK_THROWS_AS(nmi({0, 1}, good), std::invalid_argument);
  CHECK_THROWS_AS(purity({}, {}), std::invalid_argument);
}
