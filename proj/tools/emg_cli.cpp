// Command-line entry point:
//   emg run       --config FILE --out DIR [--seed U64] [--workers K]
//   emg sweep     --config FILE --out DIR [--workers K]
//   emg meanfield [--n0 X --q X [--n K]] [--regime below|above --N X] [--beta X]

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "emg/emg.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_run(const std::string& config, const std::string& out_dir,
            std::optional<std::uint64_t> seed, unsigned workers) {
  emg::ModelParams params = emg::parse_params(read_file(config));
  if (seed) params.master_seed = *seed;
  const auto runs = emg::run_ensemble(params, workers);
  const auto result = emg::aggregate(params, runs);

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream s(dir / "summary.csv", std::ios::binary);
    emg::write_summary_csv(s, {result});
  }
  {
    std::ofstream h(dir / emg::histogram_file_name(0), std::ios::binary);
    emg::write_histogram_csv(h, result);
  }
  {
    std::ofstream r(dir / "runs.csv", std::ios::binary);
    emg::write_runs_csv(r, params, runs);
  }
  {
    std::ofstream c(dir / "config.cfg", std::ios::binary);
    c << emg::serialize(params);
  }
  std::printf("mean_N_B=%s sigma_P_A=%s sigma_P_B=%s -> %s\n", emg::fmt9(result.mean_N_B).c_str(),
              emg::fmt9(result.sigma_P_A).c_str(), emg::fmt9(result.sigma_P_B).c_str(),
              dir.string().c_str());
  return 0;
}

int cmd_sweep(const std::string& config, const std::string& out_dir, unsigned workers) {
  auto parsed = emg::parse_config(read_file(config));
  auto* spec = std::get_if<emg::SweepSpec>(&parsed);
  if (!spec) throw emg::ConfigError(0, "sweep needs axis1 in the configuration");
  spec->output_dir = out_dir;
  const auto outcome = emg::run_sweep(*spec, workers);
  emg::write_sweep(outcome, out_dir);
  for (const auto& f : outcome.failures)
    std::fprintf(stderr, "cell %zu failed: %s\n", f.cell, f.message.c_str());
  std::printf("%zu/%zu cells -> %s\n", outcome.cells.size() - outcome.failures.size(),
              outcome.cells.size(), out_dir.c_str());
  return outcome.ok() ? 0 : 3;
}

struct MeanfieldArgs {
  std::optional<double> n0, q, beta, N;
  std::optional<std::int64_t> n;
  std::optional<std::string> regime;
};

int cmd_meanfield(const MeanfieldArgs& a) {
  namespace mf = emg::meanfield;
  bool printed = false;
  if (a.q && !(*a.q >= 0.0 && *a.q < 1.0)) throw std::domain_error("q must be in [0, 1)");
  if (a.n0 || a.q) {
    if (!a.n0 || !a.q) throw std::domain_error("--n0 and --q go together");
    std::printf("closed_form_gap: %.6f\n", mf::population_gap_closed_form(*a.n0, *a.q, a.n));
    printed = true;
  }
  if (a.regime) {
    if (*a.regime != "below" && *a.regime != "above")
      throw std::domain_error("--regime must be below or above");
    const auto regime = *a.regime == "below" ? mf::Regime::below : mf::Regime::above;
    auto flow = mf::FlowParams::reference(regime, a.N.value_or(1000.0));
    flow.n = a.n;
    std::printf("N0: %.6f\nq: %.9f\n", flow.N0(), flow.q());
    std::printf("closed_form_gap: %.6f\n", mf::population_gap_closed_form(flow.N0(), flow.q(), flow.n));
    std::printf("recursion_gap: %.6f\n", mf::population_gap_recursion(flow));
    std::printf("ordering_above_lt_below: %s\n",
                mf::gap_consistency_check(a.N.value_or(1000.0)) ? "true" : "false");
    printed = true;
  }
  if (a.beta) {
    std::printf("sign: %s\n", mf::to_string(mf::round_trip_sign(*a.beta)));
    printed = true;
  }
  if (!printed) throw std::domain_error("nothing to evaluate; see --help");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-market evolutionary minority game simulator"};
  app.require_subcommand(1);

  std::string config, out_dir;
  std::optional<std::uint64_t> seed;
  unsigned workers = emg::default_workers();

  auto* run = app.add_subcommand("run", "Run one ensemble and write CSV results");
  run->add_option("--config", config, "key=value configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--seed", seed, "override master_seed");
  run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "Run a parameter grid and write CSV results");
  sweep->add_option("--config", config, "configuration with axis1 [and axis2]")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

  MeanfieldArgs mf;
  auto* meanfield = app.add_subcommand("meanfield", "Evaluate the mean-field population gap and round-trip sign");
  meanfield->add_option("--n0", mf.n0, "first term of the gap series");
  meanfield->add_option("--q", mf.q, "contraction ratio, 0 <= q < 1");
  meanfield->add_option("--n", mf.n, "number of rounds (default: infinite)");
  meanfield->add_option("--regime", mf.regime, "reference cascade: below or above beta = 1/2");
  meanfield->add_option("--N", mf.N, "agent count for --regime (default 1000)");
  meanfield->add_option("--beta", mf.beta, "market impact for the round-trip sign");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, out_dir, seed, workers);
    if (*sweep) return cmd_sweep(config, out_dir, workers);
    if (*meanfield) return cmd_meanfield(mf);
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n%s", e.what(), meanfield->help().c_str());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
