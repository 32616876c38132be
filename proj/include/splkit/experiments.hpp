#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splkit/classify.hpp"
#include "splkit/config.hpp"
#include "splkit/datasets.hpp"
#include "splkit/matfact.hpp"
#include "splkit/mvc.hpp"
#include "splkit/regularizers.hpp"
#include "splkit/spl.hpp"

namespace splkit {

// Method strings: "baseline", "spl-ir-welsch", "spl-ir-cauchy", "spl-ir-huber",
// "spl-ir-l1l2", "spl-hard", "spl-mixture".
bool isSplMethod(const std::string& method);
Regularizer methodRegularizer(const std::string& method, double gamma);

struct MfParams {
  int rank = 4;
  double l2Reg = 1e-2;
  double gamma = 1.0;  // mixture knee
  PaceSchedule pace;
  int baselineIters = 100;
  int itersPerFit = 20;
  double tol = 1e-6;
};

struct MfRow {
  std::uint64_t seed = 0;
  std::string method;
  double rmse = 0.0;
  double mae = 0.0;
  int rounds = 0;
};

std::vector<MfRow> mfRunSeed(std::uint64_t seed, const std::vector<std::string>& methods,
                             const MfParams& params);

struct SweepParams {
  MfParams mf;
  double lambdaMin = 0.3;
  double lambdaMax = 3.0;
  int points = 10;
  int hqCap = 200;
};

struct SweepRow {
  std::uint64_t seed = 0;
  double lambda = 0.0;
  double hqRmse = 0.0;
  double splirRmse = 0.0;
};

std::vector<SweepRow> sweepRunSeed(std::uint64_t seed, const SweepParams& params);

struct ClassifyParams {
  int n = 400;
  int d = 5;
  double separation = 4.0;
  double flipFraction = 0.2;
  int folds = 10;
  double l2Reg = 1.0;
  double gamma = 1.0;
  // Logistic losses spread over decades, so the median-pinned automatic pace
  // start is degenerate here; a unit start spans the loss transition zone.
  PaceSchedule pace{1.0, 1.05, 10, 1e-6, 4};
  double tol = 1e-6;
  int maxIter = 200;
  bool standardize = false;
};

struct ClassifyRow {
  std::uint64_t seed = 0;
  std::string method;
  std::string scenario;  // "clean" or "noisy"
  int fold = 0;
  double accuracy = 0.0;
};

std::vector<ClassifyRow> classifyRunSeed(std::uint64_t seed,
                                         const std::vector<std::string>& methods,
                                         const ClassifyParams& params,
                                         const LabeledDataset* userData = nullptr);

struct MvcExperimentParams {
  MvcConfig base{.k = 3};  // k matches `clusters`; seed is overwritten per run
  int clusters = 3;
  int perCluster = 50;
  std::vector<int> dims = {4, 6, 5};
  double separation = 5.0;
  double noise = 1.0;
};

struct MvcRow {
  std::uint64_t seed = 0;
  std::string method;
  double accScore = 0.0;
  double nmiScore = 0.0;
  double arScore = 0.0;
  double fScore = 0.0;
  double purityScore = 0.0;
};

struct MvcSeedOutcome {
  std::vector<MvcRow> rows;  // empty when no ground truth is available
  MvcResult spl;             // the spl-mvc-welsch run, kept for audits and traces
  std::vector<int> baselineLabels;
  std::vector<int> truth;
};

struct BlobInstance {
  MultiViewDataset data;
  std::vector<int> labels;
};

// Axis-separated Gaussian blobs, one block of perCluster columns per cluster.
BlobInstance multiViewBlobs(std::uint64_t seed, int clusters, int perCluster,
                            const std::vector<int>& dims, double separation, double noise);

MvcSeedOutcome mvcRunSeed(std::uint64_t seed, const MvcExperimentParams& params,
                          const MultiViewFile* userData = nullptr);

struct RunOptions {
  std::string outDir = "out";
  std::vector<std::uint64_t> seeds;  // empty: take the config's `seeds` key
  int jobs = 1;
};

// Dispatches on the config's `experiment` key, fans seeds across jobs, and
// writes CSV/JSON artifacts. Returns a process exit status.
int runExperiment(const Config& cfg, const RunOptions& opt);

}  // namespace splkit
