#pragma once

#include <vector>

#include "emg/engine.hpp"
#include "emg/observables.hpp"

namespace emg {

/// Runs 0..n_runs-1, each from its own derived seed. Results are in run
/// order and do not depend on `workers`.
inline std::vector<RunSummary> run_ensemble(const ModelParams& params,
                                            unsigned workers = default_workers()) {
  params.validate();
  return parallel_map(static_cast<std::size_t>(params.n_runs), workers, [&](std::size_t i) {
    return summarize_run(RunPlan::make(params, i));
  });
}

}  // namespace emg
