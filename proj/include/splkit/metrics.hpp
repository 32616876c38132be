#pragma once

#include <vector>

#include "splkit/matrix.hpp"

namespace splkit {

// Minimum-cost assignment on a square cost matrix; among optimal assignments
// the lexicographically smallest row-to-column map wins.
std::vector<int> hungarian(const Matrix& cost);

// Clustering agreement scores. Label values only matter up to relabeling;
// every metric is invariant under permuting either side's label alphabet.
double acc(const std::vector<int>& pred, const std::vector<int>& truth);
double nmi(const std::vector<int>& pred, const std::vector<int>& truth);
double adjustedRand(const std::vector<int>& pred, const std::vector<int>& truth);
double fscore(const std::vector<int>& pred, const std::vector<int>& truth);
double purity(const std::vector<int>& pred, const std::vector<int>& truth);

}  // namespace splkit
