// Experiment runner: scenario -> gradient solver / max-sinr baseline ->
// metric files (trace.csv, load.csv, ee_cdf.csv, rate_cdf.csv, summary.json).
#include "udn/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"mmWave ultra-dense network association/power simulator"};

  udn::ExperimentArgs args;
  std::string config, algo = "gradient", blockage, scale = "desk";
  long long iters = -1, seed = -1;

  app.add_option("--config", config, "scenario config file (key = value lines)");
  app.add_option("--algo", algo, "gradient | max-sinr | both")
      ->check(CLI::IsMember({"gradient", "max-sinr", "both"}));
  app.add_option("--iters", iters, "override solver max iterations")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "override rng seed")->check(CLI::NonNegativeNumber);
  app.add_option("--blockage", blockage, "force blockage channel on|off")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--out", args.out_dir, "output directory");
  app.add_option("--scale", scale, "profile: desk | paper")
      ->check(CLI::IsMember({"desk", "paper"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return udn::kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return udn::kExitConfigError;
  }

  if (!config.empty()) args.config_path = config;
  args.algo = algo == "gradient" ? udn::Algo::Gradient
              : algo == "max-sinr" ? udn::Algo::MaxSinr
                                   : udn::Algo::Both;
  if (iters > 0) args.iters = static_cast<std::size_t>(iters);
  if (seed >= 0) args.seed = static_cast<std::uint64_t>(seed);
  if (!blockage.empty()) args.blockage = blockage == "on";
  args.scale = scale;

  return udn::run_experiment(args, std::cout, std::cerr);
}
