#include "splkit/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "json.hpp"

#include "splkit/metrics.hpp"

namespace splkit {

namespace {

std::vector<std::string> splitList(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = item.find_last_not_of(" \t");
    out.push_back(item.substr(first, last - first + 1));
  }
  return out;
}

// SplitMix64 finalizer; keeps per-purpose seed streams decorrelated without
// sharing rng state across threads.
std::uint64_t deriveSeed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double meanOf(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sampleStddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = meanOf(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

template <typename Fn>
void forEachSeedParallel(std::size_t count, int jobs, Fn fn) {
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex errMutex;
  std::exception_ptr firstError;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(errMutex);
          if (!firstError) firstError = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (firstError) std::rethrow_exception(firstError);
}

// Per-column training-set mean/stddev transform; constant columns pass through
// centered but unscaled.
struct Standardizer {
  Vector mean;
  Vector scale;

  Vector apply(const Vector& x) const { return (x - mean).cwiseQuotient(scale); }
};

Standardizer fitStandardizer(const Matrix& features) {
  Standardizer s;
  s.mean = features.colwise().mean().transpose();
  const Matrix centered = features.rowwise() - s.mean.transpose();
  s.scale = centered.array().square().colwise().mean().sqrt().transpose();
  for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
    if (s.scale(j) <= 1e-12) s.scale(j) = 1.0;
  }
  return s;
}

Matrix applyStandardizer(const Standardizer& s, const Matrix& features) {
  Matrix out = features.rowwise() - s.mean.transpose();
  out.array().rowwise() /= s.scale.transpose().array();
  return out;
}

}  // namespace

bool isSplMethod(const std::string& method) { return method != "baseline"; }

Regularizer methodRegularizer(const std::string& method, double gamma) {
  if (method == "baseline") {
    throw std::invalid_argument("methodRegularizer: baseline has no regularizer");
  }
  if (method == "spl-hard") return regularizerFromName("hard", gamma);
  if (method == "spl-mixture") return regularizerFromName("mixture", gamma);
  const std::string prefix = "spl-ir-";
  if (method.rfind(prefix, 0) == 0) {
    return regularizerFromName(method.substr(prefix.size()), gamma);
  }
  throw std::invalid_argument("methodRegularizer: unknown method '" + method + "'");
}

std::vector<MfRow> mfRunSeed(std::uint64_t seed, const std::vector<std::string>& methods,
                             const MfParams& params) {
  const SyntheticMfInstance inst = generateSynthetic(seed);
  MfProblem prob;
  prob.observed = inst.observed;
  prob.mask = inst.mask;
  prob.rank = params.rank;
  prob.l2Reg = params.l2Reg;

  const MfFactors init = randomFactors(prob, deriveSeed(seed, 17));
  const Eigen::Index nObs = inst.mask.count();
  const MfFactors baseline =
      weightedL1Mf(prob, Vector::Ones(nObs), init, params.baselineIters, params.tol);

  std::vector<MfRow> rows;
  rows.reserve(methods.size());
  for (const auto& method : methods) {
    MfRow row;
    row.seed = seed;
    row.method = method;
    if (!isSplMethod(method)) {
      row.rmse = rmse(inst.groundTruth, baseline);
      row.mae = mae(inst.groundTruth, baseline);
      row.rounds = 0;
    } else {
      const Regularizer reg = methodRegularizer(method, params.gamma);
      // Every self-paced variant starts from the same unweighted fit, so the
      // comparison isolates the weighting rule.
      MfWeightedModel model(prob, baseline, params.itersPerFit, params.tol);
      const SplTrace trace = splIrFit(model, reg, params.pace);
      row.rmse = rmse(inst.groundTruth, model.factors());
      row.mae = mae(inst.groundTruth, model.factors());
      row.rounds = static_cast<int>(trace.rounds.size());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SweepRow> sweepRunSeed(std::uint64_t seed, const SweepParams& params) {
  if (params.points < 2) throw std::invalid_argument("sweepRunSeed: need at least 2 grid points");
  if (!(params.lambdaMin > 0.0) || !(params.lambdaMax > params.lambdaMin)) {
    throw std::invalid_argument("sweepRunSeed: need 0 < lambdaMin < lambdaMax");
  }

  const SyntheticMfInstance inst = generateSynthetic(seed);
  MfProblem prob;
  prob.observed = inst.observed;
  prob.mask = inst.mask;
  prob.rank = params.mf.rank;
  prob.l2Reg = params.mf.l2Reg;

  const MfFactors init = randomFactors(prob, deriveSeed(seed, 17));
  const Eigen::Index nObs = inst.mask.count();
  const MfFactors baseline =
      weightedL1Mf(prob, Vector::Ones(nObs), init, params.mf.baselineIters, params.mf.tol);

  const ImplicitRegularizer welsch{ImplicitKind::Welsch};

  MfWeightedModel splModel(prob, baseline, params.mf.itersPerFit, params.mf.tol);
  splIrFit(splModel, welsch, params.mf.pace);
  const double splirRmse = rmse(inst.groundTruth, splModel.factors());

  std::vector<SweepRow> rows;
  rows.reserve(params.points);
  const double ratio = params.lambdaMax / params.lambdaMin;
  for (int i = 0; i < params.points; ++i) {
    const double lambda =
        params.lambdaMin * std::pow(ratio, static_cast<double>(i) / (params.points - 1));
    MfWeightedModel model(prob, baseline, params.mf.itersPerFit, params.mf.tol);
    hqFit(model, welsch, lambda, params.mf.tol, params.hqCap);
    SweepRow row;
    row.seed = seed;
    row.lambda = lambda;
    row.hqRmse = rmse(inst.groundTruth, model.factors());
    row.splirRmse = splirRmse;
    rows.push_back(row);
  }
  return rows;
}

std::vector<ClassifyRow> classifyRunSeed(std::uint64_t seed,
                                         const std::vector<std::string>& methods,
                                         const ClassifyParams& params,
                                         const LabeledDataset* userData) {
  const LabeledDataset data =
      userData ? *userData : twoGaussianData(params.n, params.d, params.separation, seed);

  struct Scenario {
    std::string name;
    double flip;
  };
  const std::vector<Scenario> scenarios = {{"clean", 0.0}, {"noisy", params.flipFraction}};

  std::vector<ClassifyRow> rows;
  for (const auto& scenario : scenarios) {
    for (const auto& method : methods) {
      // Fold assignment depends only on (data, folds, seed), and the flip draw
      // only on (seed, fold), so every method sees identical splits and noise.
      Pipeline pipeline = [&](const LabeledDataset& train, int fold) -> Predictor {
        LabeledDataset used = train;
        if (scenario.flip > 0.0) {
          used = flipLabels(train, scenario.flip, deriveSeed(seed, 1000 + fold));
        }
        Standardizer standardizer;
        if (params.standardize) {
          standardizer = fitStandardizer(used.features);
          used.features = applyStandardizer(standardizer, used.features);
        }
        LogregParams fitted;
        if (!isSplMethod(method)) {
          fitted = weightedLogregFit(used, Vector::Ones(used.features.rows()), params.l2Reg,
                                     params.tol, params.maxIter);
        } else {
          LogregWeightedModel model(used, params.l2Reg, params.tol, params.maxIter);
          splIrFit(model, methodRegularizer(method, params.gamma), params.pace);
          fitted = model.params();
        }
        const bool standardize = params.standardize;
        return [fitted, standardizer, standardize](const Vector& x) {
          const Vector z = standardize ? standardizer.apply(x) : x;
          return fitted.w.dot(z) + fitted.b >= 0.0 ? 1 : -1;
        };
      };
      const KfoldResult res = kfoldCv(data, params.folds, pipeline, seed);
      for (int f = 0; f < static_cast<int>(res.accuracies.size()); ++f) {
        ClassifyRow row;
        row.seed = seed;
        row.method = method;
        row.scenario = scenario.name;
        row.fold = f;
        row.accuracy = res.accuracies[f];
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

BlobInstance multiViewBlobs(std::uint64_t seed, int clusters, int perCluster,
                            const std::vector<int>& dims, double separation, double noise) {
  if (clusters < 1 || perCluster < 1) {
    throw std::invalid_argument("multiViewBlobs: clusters and perCluster must be positive");
  }
  if (dims.empty()) throw std::invalid_argument("multiViewBlobs: need at least one view");
  for (int d : dims) {
    if (d < clusters) {
      throw std::invalid_argument("multiViewBlobs: every view dim must be >= clusters");
    }
  }

  const int n = clusters * perCluster;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  BlobInstance out;
  out.labels.resize(n);
  for (int i = 0; i < n; ++i) out.labels[i] = i / perCluster;

  // Cluster c sits at separation * e_c in every view; views differ only in
  // dimension and in their independent noise draws.
  for (int d : dims) {
    Matrix view(d, n);
    for (int j = 0; j < n; ++j) {
      const int c = j / perCluster;
      for (int r = 0; r < d; ++r) {
        view(r, j) = noise * gauss(rng) + (r == c ? separation : 0.0);
      }
    }
    out.data.views.push_back(std::move(view));
  }
  return out;
}

MvcSeedOutcome mvcRunSeed(std::uint64_t seed, const MvcExperimentParams& params,
                          const MultiViewFile* userData) {
  MvcSeedOutcome out;
  MultiViewDataset data;
  if (userData) {
    data = userData->data;
    out.truth = userData->labels;
  } else {
    BlobInstance blob = multiViewBlobs(seed, params.clusters, params.perCluster, params.dims,
                                       params.separation, params.noise);
    data = std::move(blob.data);
    out.truth = std::move(blob.labels);
  }

  MvcConfig cfg = params.base;
  cfg.seed = deriveSeed(seed, 2);
  const ImplicitRegularizer welsch{ImplicitKind::Welsch};
  out.spl = splMvcFit(data, cfg, welsch);

  Eigen::Index total = 0;
  for (const auto& view : data.views) total += view.rows();
  const Eigen::Index n = data.views.front().cols();
  Matrix stacked(total, n);
  Eigen::Index at = 0;
  for (const auto& view : data.views) {
    stacked.middleRows(at, view.rows()) = view;
    at += view.rows();
  }
  // Same readout seed as the self-paced run so the comparison is k-means vs
  // k-means on different embeddings, not different k-means draws.
  out.baselineLabels = kmeans(stacked, cfg.k, cfg.seed + 1, cfg.kmeansRestarts);

  if (!out.truth.empty()) {
    const auto score = [&](const std::string& method, const std::vector<int>& pred) {
      MvcRow row;
      row.seed = seed;
      row.method = method;
      row.accScore = acc(pred, out.truth);
      row.nmiScore = nmi(pred, out.truth);
      row.arScore = adjustedRand(pred, out.truth);
      row.fScore = fscore(pred, out.truth);
      row.purityScore = purity(pred, out.truth);
      return row;
    };
    out.rows.push_back(score("spl-mvc-welsch", out.spl.labels));
    out.rows.push_back(score("concat-kmeans", out.baselineLabels));
  }
  return out;
}

namespace {

// Omitted keys keep the experiment's own schedule, which differs per
// experiment (classify pins lambda0; see ClassifyParams).
PaceSchedule paceFromConfig(const Config& cfg, PaceSchedule pace) {
  if (cfg.has("pace.lambda0")) {
    if (cfg.str("pace.lambda0", "auto") == "auto") {
      pace.lambda0.reset();
    } else {
      pace.lambda0 = cfg.num("pace.lambda0", 1.0);
    }
  }
  pace.mu = cfg.num("pace.mu", pace.mu);
  pace.maxRounds = cfg.integer("pace.rounds", pace.maxRounds);
  pace.innerTol = cfg.num("pace.inner_tol", pace.innerTol);
  pace.innerCap = cfg.integer("pace.inner_cap", pace.innerCap);
  return pace;
}

MfParams mfParamsFromConfig(const Config& cfg) {
  MfParams params;
  params.rank = cfg.integer("mf.rank", params.rank);
  params.l2Reg = cfg.num("mf.l2_reg", params.l2Reg);
  params.gamma = cfg.num("regularizer.gamma", params.gamma);
  params.pace = paceFromConfig(cfg, params.pace);
  params.baselineIters = cfg.integer("mf.baseline_iters", params.baselineIters);
  params.itersPerFit = cfg.integer("mf.fit_iters", params.itersPerFit);
  params.tol = cfg.num("mf.tol", params.tol);
  return params;
}

std::filesystem::path preparedOutDir(const RunOptions& opt) {
  const std::filesystem::path dir(opt.outDir);
  std::filesystem::create_directories(dir);
  return dir;
}

void writeManifest(const std::filesystem::path& outDir, const Config& cfg,
                   const std::vector<std::uint64_t>& seeds,
                   const std::vector<std::string>& artifacts) {
  nlohmann::json doc;
  char hashText[32];
  std::snprintf(hashText, sizeof hashText, "%016llx",
                static_cast<unsigned long long>(cfg.hash()));
  doc["config_hash"] = hashText;
  doc["config"] = cfg.canonical();
  doc["seeds"] = seeds;
  doc["artifacts"] = artifacts;
  writeTextFile((outDir / "manifest.json").string(), doc.dump(2) + "\n");
}

std::vector<std::uint64_t> seedsFor(const Config& cfg, const RunOptions& opt,
                                    const std::string& fallbackRange) {
  if (!opt.seeds.empty()) return opt.seeds;
  return parseSeedRange(cfg.str("seeds", fallbackRange));
}

constexpr const char* kMfMethods =
    "baseline,spl-ir-welsch,spl-ir-cauchy,spl-ir-huber,spl-ir-l1l2,spl-hard,spl-mixture";
constexpr const char* kClassifyMethods =
    "baseline,spl-ir-welsch,spl-ir-cauchy,spl-ir-huber,spl-ir-l1l2";

int runMf(const Config& cfg, const RunOptions& opt) {
  const auto outDir = preparedOutDir(opt);
  const auto seeds = seedsFor(cfg, opt, "1..50");
  const auto methods = splitList(cfg.str("methods", kMfMethods));
  const MfParams params = mfParamsFromConfig(cfg);

  std::vector<std::vector<MfRow>> slots(seeds.size());
  forEachSeedParallel(seeds.size(), opt.jobs,
                      [&](std::size_t i) { slots[i] = mfRunSeed(seeds[i], methods, params); });

  std::string csv = "seed,method,rmse,mae,rounds\n";
  std::map<std::string, std::vector<double>> rmseBy, maeBy, roundsBy;
  for (const auto& rows : slots) {
    for (const auto& row : rows) {
      csv += std::to_string(row.seed) + "," + row.method + "," + formatDouble(row.rmse) + "," +
             formatDouble(row.mae) + "," + std::to_string(row.rounds) + "\n";
      rmseBy[row.method].push_back(row.rmse);
      maeBy[row.method].push_back(row.mae);
      roundsBy[row.method].push_back(row.rounds);
    }
  }
  writeTextFile((outDir / "results.csv").string(), csv);

  std::string summary = "method,mean_rmse,mean_mae,mean_rounds\n";
  for (const auto& method : methods) {
    summary += method + "," + formatDouble(meanOf(rmseBy[method])) + "," +
               formatDouble(meanOf(maeBy[method])) + "," +
               formatDouble(meanOf(roundsBy[method])) + "\n";
  }
  writeTextFile((outDir / "summary.csv").string(), summary);
  writeManifest(outDir, cfg, seeds, {"results.csv", "summary.csv"});
  return 0;
}

int runSweep(const Config& cfg, const RunOptions& opt) {
  const auto outDir = preparedOutDir(opt);
  const auto seeds = seedsFor(cfg, opt, "1..20");
  SweepParams params;
  params.mf = mfParamsFromConfig(cfg);
  params.lambdaMin = cfg.num("sweep.lambda_min", params.lambdaMin);
  params.lambdaMax = cfg.num("sweep.lambda_max", params.lambdaMax);
  params.points = cfg.integer("sweep.points", params.points);
  params.hqCap = cfg.integer("sweep.hq_cap", params.hqCap);

  std::vector<std::vector<SweepRow>> slots(seeds.size());
  forEachSeedParallel(seeds.size(), opt.jobs,
                      [&](std::size_t i) { slots[i] = sweepRunSeed(seeds[i], params); });

  std::string csv = "seed,lambda,hq_rmse,splir_rmse\n";
  std::vector<std::vector<double>> hqByPoint(params.points);
  std::vector<double> splir;
  std::vector<double> lambdas(params.points, 0.0);
  for (const auto& rows : slots) {
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const auto& row = rows[j];
      csv += std::to_string(row.seed) + "," + formatDouble(row.lambda) + "," +
             formatDouble(row.hqRmse) + "," + formatDouble(row.splirRmse) + "\n";
      hqByPoint[j].push_back(row.hqRmse);
      lambdas[j] = row.lambda;
    }
    if (!rows.empty()) splir.push_back(rows.front().splirRmse);
  }
  writeTextFile((outDir / "detail.csv").string(), csv);

  std::string summary = "lambda,mean_hq_rmse,mean_splir_rmse\n";
  const double meanSplir = meanOf(splir);
  for (int j = 0; j < params.points; ++j) {
    summary += formatDouble(lambdas[j]) + "," + formatDouble(meanOf(hqByPoint[j])) + "," +
               formatDouble(meanSplir) + "\n";
  }
  writeTextFile((outDir / "sweep.csv").string(), summary);
  writeManifest(outDir, cfg, seeds, {"detail.csv", "sweep.csv"});
  return 0;
}

int runClassify(const Config& cfg, const RunOptions& opt) {
  const auto outDir = preparedOutDir(opt);
  const auto seeds = seedsFor(cfg, opt, "1..20");
  const auto methods = splitList(cfg.str("methods", kClassifyMethods));

  ClassifyParams params;
  params.n = cfg.integer("classify.n", params.n);
  params.d = cfg.integer("classify.d", params.d);
  params.separation = cfg.num("classify.separation", params.separation);
  params.flipFraction = cfg.num("classify.flip_fraction", params.flipFraction);
  params.folds = cfg.integer("classify.folds", params.folds);
  params.l2Reg = cfg.num("classify.l2_reg", params.l2Reg);
  params.gamma = cfg.num("regularizer.gamma", params.gamma);
  params.pace = paceFromConfig(cfg, params.pace);
  params.tol = cfg.num("classify.tol", params.tol);
  params.maxIter = cfg.integer("classify.max_iter", params.maxIter);
  params.standardize = cfg.flag("classify.standardize", params.standardize);

  LabeledDataset userData;
  const bool haveUserData = cfg.has("classify.data");
  if (haveUserData) userData = loadLabeled(cfg.requiredStr("classify.data"));

  std::vector<std::vector<ClassifyRow>> slots(seeds.size());
  forEachSeedParallel(seeds.size(), opt.jobs, [&](std::size_t i) {
    slots[i] = classifyRunSeed(seeds[i], methods, params, haveUserData ? &userData : nullptr);
  });

  std::string csv = "seed,method,scenario,fold,accuracy\n";
  std::map<std::pair<std::string, std::string>, std::vector<double>> accBy;
  for (const auto& rows : slots) {
    for (const auto& row : rows) {
      csv += std::to_string(row.seed) + "," + row.method + "," + row.scenario + "," +
             std::to_string(row.fold) + "," + formatDouble(row.accuracy) + "\n";
      accBy[{row.scenario, row.method}].push_back(row.accuracy);
    }
  }
  writeTextFile((outDir / "folds.csv").string(), csv);

  std::string summary = "scenario,method,mean_accuracy,std_accuracy\n";
  for (const char* scenario : {"clean", "noisy"}) {
    for (const auto& method : methods) {
      const auto& accs = accBy[{scenario, method}];
      summary += std::string(scenario) + "," + method + "," + formatDouble(meanOf(accs)) + "," +
                 formatDouble(sampleStddev(accs)) + "\n";
    }
  }
  writeTextFile((outDir / "summary.csv").string(), summary);
  writeManifest(outDir, cfg, seeds, {"folds.csv", "summary.csv"});
  return 0;
}

std::vector<int> dimsFromConfig(const Config& cfg, const std::vector<int>& fallback) {
  if (!cfg.has("mvc.dims")) return fallback;
  std::vector<int> dims;
  for (const auto& item : splitList(cfg.requiredStr("mvc.dims"))) {
    std::size_t used = 0;
    const int d = std::stoi(item, &used);
    if (used != item.size() || d < 1) {
      throw std::invalid_argument("mvc.dims: bad entry '" + item + "'");
    }
    dims.push_back(d);
  }
  return dims;
}

int runMvc(const Config& cfg, const RunOptions& opt) {
  const auto outDir = preparedOutDir(opt);
  const auto seeds = seedsFor(cfg, opt, "1..10");

  MvcExperimentParams params;
  params.base.beta = cfg.num("mvc.beta", params.base.beta);
  params.base.rho = cfg.num("mvc.rho", params.base.rho);
  params.base.gamma = cfg.num("mvc.gamma", params.base.gamma);
  params.base.pace = paceFromConfig(cfg, params.base.pace);
  params.base.palmIters = cfg.integer("mvc.palm_iters", params.base.palmIters);
  params.base.palmTol = cfg.num("mvc.palm_tol", params.base.palmTol);
  params.base.zStepDoubledC = cfg.flag("mvc.z_doubled_c", params.base.zStepDoubledC);
  params.base.kmeansRestarts = cfg.integer("mvc.kmeans_restarts", params.base.kmeansRestarts);
  params.clusters = cfg.integer("mvc.clusters", params.clusters);
  params.perCluster = cfg.integer("mvc.per_cluster", params.perCluster);
  params.dims = dimsFromConfig(cfg, params.dims);
  params.separation = cfg.num("mvc.separation", params.separation);
  params.noise = cfg.num("mvc.noise", params.noise);

  MultiViewFile userData;
  const bool haveUserData = cfg.has("mvc.data");
  if (haveUserData) userData = loadMultiview(cfg.requiredStr("mvc.data"));
  params.base.k = cfg.integer("mvc.k", haveUserData ? params.base.k : params.clusters);

  std::vector<MvcSeedOutcome> slots(seeds.size());
  forEachSeedParallel(seeds.size(), opt.jobs, [&](std::size_t i) {
    slots[i] = mvcRunSeed(seeds[i], params, haveUserData ? &userData : nullptr);
  });

  std::vector<std::string> artifacts = {"results.csv", "summary.csv", "metrics.json"};
  std::string csv = "seed,method,acc,nmi,ar,fscore,purity\n";
  std::map<std::string, std::array<std::vector<double>, 5>> by;
  for (const auto& outcome : slots) {
    for (const auto& row : outcome.rows) {
      csv += std::to_string(row.seed) + "," + row.method + "," + formatDouble(row.accScore) +
             "," + formatDouble(row.nmiScore) + "," + formatDouble(row.arScore) + "," +
             formatDouble(row.fScore) + "," + formatDouble(row.purityScore) + "\n";
      auto& cols = by[row.method];
      cols[0].push_back(row.accScore);
      cols[1].push_back(row.nmiScore);
      cols[2].push_back(row.arScore);
      cols[3].push_back(row.fScore);
      cols[4].push_back(row.purityScore);
    }
  }
  writeTextFile((outDir / "results.csv").string(), csv);

  std::string summary = "method,acc,nmi,ar,fscore,purity\n";
  nlohmann::json metrics;
  for (const auto& [method, cols] : by) {
    summary += method;
    static const char* names[5] = {"acc", "nmi", "ar", "fscore", "purity"};
    for (int j = 0; j < 5; ++j) {
      summary += "," + formatDouble(meanOf(cols[j]));
      metrics[method][names[j]] = meanOf(cols[j]);
    }
    summary += "\n";
  }
  writeTextFile((outDir / "summary.csv").string(), summary);
  writeTextFile((outDir / "metrics.json").string(), metrics.dump(2) + "\n");

  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& outcome = slots[i];
    std::string htrace = "solve,sweep,objective\n";
    for (std::size_t s = 0; s < outcome.spl.palm.size(); ++s) {
      const auto& traj = outcome.spl.palm[s].hTrajectory;
      for (std::size_t t = 0; t < traj.size(); ++t) {
        htrace += std::to_string(s) + "," + std::to_string(t) + "," + formatDouble(traj[t]) +
                  "\n";
      }
    }
    const std::string htraceName = "htrace_seed" + std::to_string(seeds[i]) + ".csv";
    writeTextFile((outDir / htraceName).string(), htrace);
    artifacts.push_back(htraceName);

    std::string labels = outcome.truth.empty() ? "sample,spl,baseline\n"
                                               : "sample,spl,baseline,truth\n";
    for (std::size_t j = 0; j < outcome.spl.labels.size(); ++j) {
      labels += std::to_string(j) + "," + std::to_string(outcome.spl.labels[j]) + "," +
                std::to_string(outcome.baselineLabels[j]);
      if (!outcome.truth.empty()) labels += "," + std::to_string(outcome.truth[j]);
      labels += "\n";
    }
    const std::string labelsName = "labels_seed" + std::to_string(seeds[i]) + ".csv";
    writeTextFile((outDir / labelsName).string(), labels);
    artifacts.push_back(labelsName);
  }

  writeManifest(outDir, cfg, seeds, artifacts);
  return 0;
}

int runRegcheck(const Config& cfg, const RunOptions& opt) {
  const auto outDir = preparedOutDir(opt);
  (void)cfg;

  std::vector<double> lambdaGrid = {0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> tGrid = {0.0};
  for (int i = 0; i < 60; ++i) {
    tGrid.push_back(1e-3 * std::pow(20.0 / 1e-3, i / 59.0));
  }

  bool allOk = true;
  std::string report;
  for (ImplicitKind kind : {ImplicitKind::Huber, ImplicitKind::Cauchy, ImplicitKind::L1L2,
                            ImplicitKind::Welsch}) {
    const ImplicitRegularizer reg{kind};
    const ConditionReport rep = validateConditions(reg, lambdaGrid, tGrid);
    const Regularizer asVariant = reg;
    report += regularizerName(asVariant) + (rep.ok ? ": ok\n" : ": FAILED\n");
    for (const auto& line : rep.violations) report += "  " + line + "\n";
    allOk = allOk && rep.ok;
  }

  // The explicit rules have no minimizer identity to check; bound their
  // weights on a loss grid instead.
  for (const char* name : {"hard", "linear", "logarithmic", "mixture", "logistic"}) {
    const std::vector<double> lambdas = std::string(name) == "logarithmic"
                                            ? std::vector<double>{0.25, 0.5, 0.75}
                                            : lambdaGrid;
    const Regularizer reg = regularizerFromName(name, 1.0);
    bool ok = true;
    std::string witness;
    for (double lambda : lambdas) {
      for (double t : tGrid) {
        const double loss = t * t;
        const double w = weightFromLoss(reg, lambda, loss);
        if (!(w >= 0.0) || !(w <= weightCeiling(reg, lambda) + 1e-12)) {
          ok = false;
          witness = " at lambda=" + formatDouble(lambda) + " loss=" + formatDouble(loss);
          break;
        }
      }
      if (!ok) break;
    }
    report += std::string(name) + (ok ? ": ok\n" : ": FAILED" + witness + "\n");
    allOk = allOk && ok;
  }

  report += allOk ? "all conditions hold\n" : "violations found\n";
  writeTextFile((outDir / "report.txt").string(), report);
  return allOk ? 0 : 1;
}

}  // namespace

int runExperiment(const Config& cfg, const RunOptions& opt) {
  const std::string experiment = cfg.requiredStr("experiment");
  if (experiment == "mf") return runMf(cfg, opt);
  if (experiment == "hq-sweep") return runSweep(cfg, opt);
  if (experiment == "classify") return runClassify(cfg, opt);
  if (experiment == "mvc") return runMvc(cfg, opt);
  if (experiment == "regcheck") return runRegcheck(cfg, opt);
  throw std::invalid_argument("unknown experiment '" + experiment + "'");
}

}  // namespace splkit
