#pragma once

// Sweep orchestration and CSV serialization.
//
// summary.csv columns:
//   beta,gamma_B,omega_th,mean_N_B,sigma_P_A,sigma_P_B,mean_W_A,mean_W_B,n_runs,master_seed
// hist_<cell>.csv columns:
//   bin_low,bin_high,mass_A,mass_B
// Reals use 9 significant digits; an undefined mean wealth is written as NA.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "emg/config.hpp"
#include "emg/ensemble.hpp"
#include "emg/observables.hpp"

namespace emg {

inline constexpr const char* kSummaryHeader =
    "beta,gamma_B,omega_th,mean_N_B,sigma_P_A,sigma_P_B,mean_W_A,mean_W_B,n_runs,master_seed";
inline constexpr const char* kHistogramHeader = "bin_low,bin_high,mass_A,mass_B";
inline constexpr const char* kRunsHeader =
    "run_index,derived_seed,mean_N_B,sigma_P_A,sigma_P_B,mean_W_A,mean_W_B,trades,"
    "mean_attainment,mutations_A,mutations_B,switches";

inline std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string fmt9(const std::optional<double>& v) { return v ? fmt9(*v) : "NA"; }

inline void write_summary_row(std::ostream& os, const SweepResult& r) {
  os << fmt9(r.beta) << ',' << fmt9(r.gamma_B) << ',' << fmt9(r.omega_th) << ','
     << fmt9(r.mean_N_B) << ',' << fmt9(r.sigma_P_A) << ',' << fmt9(r.sigma_P_B) << ','
     << fmt9(r.mean_W_A) << ',' << fmt9(r.mean_W_B) << ',' << r.n_runs << ','
     << r.master_seed << '\n';
}

inline void write_summary_csv(std::ostream& os, const std::vector<SweepResult>& rows) {
  os << kSummaryHeader << '\n';
  for (const auto& r : rows) write_summary_row(os, r);
}

inline void write_histogram_csv(std::ostream& os, const SweepResult& r) {
  if (r.histogram_A.bins() != r.histogram_B.bins())
    throw std::invalid_argument("histogram bin mismatch");
  os << kHistogramHeader << '\n';
  for (std::size_t i = 0; i < r.histogram_A.bins(); ++i)
    os << fmt9(r.histogram_A.bin_low(i)) << ',' << fmt9(r.histogram_A.bin_high(i)) << ','
       << fmt9(r.histogram_A.mass[i]) << ',' << fmt9(r.histogram_B.mass[i]) << '\n';
}

inline void write_runs_csv(std::ostream& os, const ModelParams& params,
                           const std::vector<RunSummary>& runs) {
  os << kRunsHeader << '\n';
  for (const auto& s : runs) {
    os << s.run_index << ',' << derive_seed(params.master_seed, s.run_index) << ','
       << fmt9(s.mean_N_B) << ',' << fmt9(s.sigma_P[0]) << ',' << fmt9(s.sigma_P[1]) << ','
       << fmt9(s.mean_W[0]) << ',' << fmt9(s.mean_W[1]) << ',' << s.trades << ','
       << fmt9(s.mean_attainment()) << ',' << s.mutations[0] << ',' << s.mutations[1] << ','
       << s.switches << '\n';
  }
}

inline std::string histogram_file_name(std::size_t cell) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "hist_%03zu.csv", cell);
  return buf;
}

/// Grid cells in axis1-major order.
inline std::vector<ModelParams> expand_grid(const SweepSpec& spec) {
  std::vector<ModelParams> cells;
  for (double v1 : spec.axis1.values) {
    ModelParams p = spec.base;
    set_numeric_param(p, spec.axis1.name, v1);
    if (!spec.axis2) {
      p.validate();
      cells.push_back(p);
      continue;
    }
    for (double v2 : spec.axis2->values) {
      ModelParams q = p;
      set_numeric_param(q, spec.axis2->name, v2);
      q.validate();
      cells.push_back(q);
    }
  }
  return cells;
}

struct CellFailure {
  std::size_t cell = 0;
  std::string message;
};

struct SweepOutcome {
  std::vector<ModelParams> cells;
  std::vector<std::optional<SweepResult>> results;  // grid order
  std::vector<CellFailure> failures;

  bool ok() const noexcept { return failures.empty(); }
};

/// Runs every cell's ensemble. A failing cell is recorded and the sweep
/// continues.
inline SweepOutcome run_sweep(const SweepSpec& spec, unsigned workers = default_workers()) {
  SweepOutcome out;
  out.cells = expand_grid(spec);
  out.results.resize(out.cells.size());
  for (std::size_t c = 0; c < out.cells.size(); ++c) {
    try {
      const auto runs = run_ensemble(out.cells[c], workers);
      out.results[c] = aggregate(out.cells[c], runs);
    } catch (const std::exception& e) {
      out.failures.push_back({c, e.what()});
    }
  }
  return out;
}

/// Writes summary.csv (successful cells, grid order) and one histogram file
/// per successful cell into `dir`.
inline void write_sweep(const SweepOutcome& outcome, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<SweepResult> rows;
  for (std::size_t c = 0; c < outcome.results.size(); ++c) {
    if (!outcome.results[c]) continue;
    rows.push_back(*outcome.results[c]);
    std::ofstream h(dir / histogram_file_name(c), std::ios::binary);
    write_histogram_csv(h, *outcome.results[c]);
    if (!h) throw std::runtime_error("cannot write " + (dir / histogram_file_name(c)).string());
  }
  std::ofstream s(dir / "summary.csv", std::ios::binary);
  write_summary_csv(s, rows);
  if (!s) throw std::runtime_error("cannot write " + (dir / "summary.csv").string());
}

}  // namespace emg
