#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "splkit/config.hpp"
#include "splkit/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"self-paced learning experiment runner"};

  std::string configPath;
  splkit::RunOptions opt;
  std::string seedRange;
  app.add_option("--config", configPath, "experiment config file")->required();
  app.add_option("--out", opt.outDir, "output directory")->capture_default_str();
  app.add_option("--seeds", seedRange, "seed or inclusive range a..b (overrides the config)");
  app.add_option("--jobs", opt.jobs, "worker threads across seeds")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    const splkit::Config cfg = splkit::Config::fromFile(configPath);
    if (!seedRange.empty()) opt.seeds = splkit::parseSeedRange(seedRange);
    const int status = splkit::runExperiment(cfg, opt);
    std::cout << "wrote " << opt.outDir << "\n";
    return status;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
