// zkb: simulate the Zakharov-Kuznetsov-Burgers strip problem and check the
// decay theory against it.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zkb/harness.hpp"

namespace h = zkb::harness;

namespace {

std::vector<double> parse_lengths(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& s : items) out.push_back(h::parse_length(s));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral simulator and verification harness for the ZKB equation on a strip"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ZKB_CLI_VERSION));

  std::string B_text;
  auto* constants = app.add_subcommand("constants", "Closed-form decay constants for a strip width");
  constants->add_option("--B", B_text, "Strip width (number or expression such as pi/2)")->required();

  std::string config, out_dir;
  auto* simulate = app.add_subcommand("simulate", "Run one configuration and write manifest and series");
  simulate->add_option("--config", config, "Run configuration (JSON)")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();

  std::string suite;
  int samples = 100;
  std::uint64_t seed = 0;
  auto* verify = app.add_subcommand("verify", "Property suites: energy, steklov, gn, sup");
  verify->add_option("--suite", suite, "Suite name")->required();
  verify->add_option("--samples", samples, "Number of corpus members");
  verify->add_option("--seed", seed, "Corpus seed");
  verify->add_option("--config", config, "Geometry (inequality suites) or reference run (energy)");

  std::string run_dir, norm;
  std::optional<double> t0, t1;
  auto* fit = app.add_subcommand("fit-decay", "Fit the decay rate of a finished run and compare with chi");
  fit->add_option("--run", run_dir, "Run directory (manifest.json, series.csv)")->required();
  fit->add_option("--norm", norm, "l2, w_l2, w_h1 or sup_w (default from the run config)");
  fit->add_option("--t0", t0, "Window start");
  fit->add_option("--t1", t1, "Window end");

  std::vector<std::string> widths, amps;
  int workers = 1;
  auto* sweep = app.add_subcommand("sweep", "Grid of widths and amplitudes with decay verdicts");
  sweep->add_option("--config", config, "Template configuration")->required();
  sweep->add_option("--B", widths, "Strip widths")->delimiter(',')->required();
  sweep->add_option("--amps", amps, "Initial norms as fractions of the weak threshold")->delimiter(',')->required();
  sweep->add_option("--workers", workers, "Parallel workers");
  sweep->add_option("--out", out_dir, "Output directory")->required();

  double eps = 1e-3;
  auto* cdep = app.add_subcommand("cdep", "Two-run continuous-dependence experiment");
  cdep->add_option("--config", config, "Reference configuration")->required();
  cdep->add_option("--eps", eps, "Perturbation size");
  cdep->add_option("--out", out_dir, "Optional output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : h::exit_code::kUsage;
  }

  try {
    if (*constants) return h::cmd_constants(h::parse_length(B_text), std::cout);
    if (*simulate) return h::cmd_simulate(config, out_dir, std::cout);
    if (*verify) {
      std::optional<std::filesystem::path> cfg;
      if (!config.empty()) cfg = config;
      return h::cmd_verify(suite, samples, seed, cfg, std::cout);
    }
    if (*fit) return h::cmd_fit_decay(run_dir, norm, t0, t1, std::cout);
    if (*sweep) {
      std::vector<double> fractions;
      for (const auto& a : amps) fractions.push_back(h::parse_length(a));
      return h::cmd_sweep(config, parse_lengths(widths), fractions, workers, out_dir, std::cout);
    }
    if (*cdep) {
      std::optional<std::filesystem::path> dir;
      if (!out_dir.empty()) dir = out_dir;
      return h::cmd_cdep(config, eps, dir, std::cout);
    }
  } catch (const std::exception& e) {
    std::cout << "error: " << e.what() << '\n';
    return h::exit_code::kUsage;
  }
  return h::exit_code::kUsage;
}
