#pragma once

// Statistics over recorded observations: populations, price volatility,
// wealth, gene histograms and round-trip attainment.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "emg/engine.hpp"
#include "emg/market.hpp"
#include "emg/params.hpp"

namespace emg {

/// Normalized gene histogram with uniform bins on [0, 1].
struct GeneHistogram {
  Market market = Market::A;
  std::vector<std::uint64_t> counts;
  std::vector<double> mass;

  GeneHistogram() = default;
  GeneHistogram(Market mk, int bins)
      : market(mk), counts(static_cast<std::size_t>(bins), 0),
        mass(static_cast<std::size_t>(bins), 0.0) {}

  std::size_t bins() const noexcept { return counts.size(); }
  double bin_low(std::size_t i) const noexcept {
    return static_cast<double>(i) / static_cast<double>(bins());
  }
  double bin_high(std::size_t i) const noexcept {
    return static_cast<double>(i + 1) / static_cast<double>(bins());
  }
  double bin_center(std::size_t i) const noexcept {
    return (static_cast<double>(i) + 0.5) / static_cast<double>(bins());
  }

  void add(double gene) noexcept {
    auto i = static_cast<std::size_t>(gene * static_cast<double>(bins()));
    ++counts[std::min(i, bins() - 1)];
  }

  void merge(const GeneHistogram& other) {
    if (other.bins() != bins()) throw std::invalid_argument("histogram bin mismatch");
    for (std::size_t i = 0; i < bins(); ++i) counts[i] += other.counts[i];
  }

  std::uint64_t total() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  }

  /// Recomputes mass from counts; all-zero when empty.
  void normalize() {
    const auto n = total();
    for (std::size_t i = 0; i < bins(); ++i)
      mass[i] = n == 0 ? 0.0 : static_cast<double>(counts[i]) / static_cast<double>(n);
  }
};

inline GeneHistogram gene_histogram(std::span<const AgentState> census, Market mk,
                                    int bins = 50) {
  GeneHistogram h(mk, bins);
  for (const auto& a : census)
    if (a.market == mk) h.add(a.gene);
  h.normalize();
  return h;
}

/// (mass with g < 0.1 or g > 0.9) / (mass with 0.4 <= g <= 0.6 + 1e-9),
/// bins assigned by centre.
inline double ushape_score(const GeneHistogram& h) {
  double tails = 0.0;
  double middle = 0.0;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    const double c = h.bin_center(i);
    if (c < 0.1 || c > 0.9) tails += h.mass[i];
    if (c >= 0.4 && c <= 0.6) middle += h.mass[i];
  }
  return tails / (middle + 1e-9);
}

/// Centre of the most populated bin (lowest index on ties).
inline double histogram_mode(const GeneHistogram& h) {
  const auto it = std::max_element(h.mass.begin(), h.mass.end());
  return h.bin_center(static_cast<std::size_t>(it - h.mass.begin()));
}

/// Volatility of a price path of length >= 2. Uncentered:
/// sigma^2 = (1/dt) sum (P(t+1) - P(t))^2. Centered: the same about the
/// mean return.
inline double price_volatility(std::span<const double> prices,
                               VolatilityMode mode = VolatilityMode::uncentered) {
  if (prices.size() < 2) throw std::invalid_argument("price_volatility needs >= 2 prices");
  const auto dt = static_cast<double>(prices.size() - 1);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t t = 1; t < prices.size(); ++t) {
    const double r = prices[t] - prices[t - 1];
    sum += r;
    sum_sq += r * r;
  }
  double var = sum_sq / dt;
  if (mode == VolatilityMode::centered) var = std::max(0.0, var - (sum / dt) * (sum / dt));
  return std::sqrt(var);
}

/// Prices at the start of the window followed by the post-tick prices.
inline std::vector<double> price_series(std::span<const StepObservation> window, Market mk) {
  std::vector<double> out;
  if (window.empty()) return out;
  out.reserve(window.size() + 1);
  out.push_back(window.front().P_prev[index(mk)]);
  for (const auto& o : window) out.push_back(o.P[index(mk)]);
  return out;
}

/// sum |A(t)| / dt over the window; equals the uncentered squared volatility.
inline double mean_abs_excess_demand(std::span<const StepObservation> window, Market mk) {
  if (window.empty()) throw std::invalid_argument("empty window");
  double s = 0.0;
  for (const auto& o : window) s += std::abs(o.A[index(mk)]);
  return s / static_cast<double>(window.size());
}

inline double mean_population_B(std::span<const StepObservation> window) {
  if (window.empty()) throw std::invalid_argument("empty window");
  double s = 0.0;
  for (const auto& o : window) s += o.N_B();
  return s / static_cast<double>(window.size());
}

/// Mean wealth of the agents currently in `mk`; nullopt if nobody is there.
inline std::optional<double> mean_wealth(std::span<const AgentState> census, Market mk) {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& a : census) {
    if (a.market != mk) continue;
    s += a.wealth;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return s / static_cast<double>(n);
}

struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;  // sample sd / sqrt(n); 0 for n < 2
  std::size_t n = 0;
};

inline MeanAndError mean_and_error(std::span<const double> xs) {
  MeanAndError r;
  r.n = xs.size();
  if (xs.empty()) return r;
  r.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.std_error = std::sqrt(ss / static_cast<double>(xs.size() - 1) /
                            static_cast<double>(xs.size()));
  }
  return r;
}

/// Average ranks, ties sharing the mean rank.
inline std::vector<double> ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> r(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("pearson: bad sizes");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  return pearson(rx, ry);
}

/// Per-run statistics over the measurement window.
struct RunSummary {
  std::uint64_t run_index = 0;
  std::int64_t window = 0;
  double mean_N_A = 0.0;
  double mean_N_B = 0.0;
  std::array<double, 2> sigma_P{};        // per the run's VolatilityMode
  std::array<double, 2> mean_abs_A{};     // sum |A| / dt
  std::array<double, 2> mean_sq_return{}; // sum (dP)^2 / dt
  std::array<std::optional<double>, 2> mean_W{};  // time-averaged snapshot means
  std::array<GeneHistogram, 2> histogram;         // pooled over window snapshots
  std::int64_t trades = 0;
  double attainment_sum = 0.0;
  std::array<std::int64_t, 2> mutations{};  // whole run, by market of occurrence
  std::int64_t switches = 0;

  std::optional<double> mean_attainment() const {
    if (trades == 0) return std::nullopt;
    return attainment_sum / static_cast<double>(trades);
  }
};

/// Streaming observer that turns a measurement window into a RunSummary.
class RunAccumulator {
 public:
  explicit RunAccumulator(const ModelParams& params) : params_(params) {
    for (int k = 0; k < 2; ++k)
      summary_.histogram[k] = GeneHistogram(static_cast<Market>(k), params.hist_bins);
  }

  void operator()(const World& world, const StepObservation& obs) {
    ++summary_.window;
    summary_.mean_N_A += obs.N_A();
    summary_.mean_N_B += obs.N_B();
    for (int k = 0; k < 2; ++k) {
      const double r = obs.P[k] - obs.P_prev[k];
      sum_return_[k] += r;
      summary_.mean_sq_return[k] += r * r;
      summary_.mean_abs_A[k] += std::abs(obs.A[k]);
    }
    std::array<double, 2> wsum{};
    std::array<int, 2> wcount{};
    for (const auto& a : world.agents()) {
      const int k = index(a.market);
      wsum[k] += a.wealth;
      ++wcount[k];
      summary_.histogram[k].add(a.gene);
    }
    for (int k = 0; k < 2; ++k) {
      if (wcount[k] == 0) continue;
      wealth_sum_[k] += wsum[k] / wcount[k];
      ++wealth_snapshots_[k];
    }
    for (const auto& t : obs.settled_trades) {
      ++summary_.trades;
      summary_.attainment_sum += t.attainment;
    }
  }

  RunSummary finish(const World& world, std::uint64_t run_index) && {
    RunSummary s = std::move(summary_);
    s.run_index = run_index;
    const auto dt = static_cast<double>(s.window);
    if (s.window > 0) {
      s.mean_N_A /= dt;
      s.mean_N_B /= dt;
      for (int k = 0; k < 2; ++k) {
        s.mean_sq_return[k] /= dt;
        s.mean_abs_A[k] /= dt;
        double var = s.mean_sq_return[k];
        if (params_.volatility == VolatilityMode::centered)
          var = std::max(0.0, var - (sum_return_[k] / dt) * (sum_return_[k] / dt));
        s.sigma_P[k] = std::sqrt(var);
      }
    }
    for (int k = 0; k < 2; ++k) {
      if (wealth_snapshots_[k] > 0)
        s.mean_W[k] = wealth_sum_[k] / static_cast<double>(wealth_snapshots_[k]);
      s.histogram[k].normalize();
      s.mutations[k] = world.mutations(static_cast<Market>(k));
    }
    s.switches = world.switches();
    return s;
  }

 private:
  ModelParams params_;
  RunSummary summary_;
  std::array<double, 2> sum_return_{};
  std::array<double, 2> wealth_sum_{};
  std::array<std::int64_t, 2> wealth_snapshots_{};
};

inline RunSummary summarize_run(const RunPlan& plan) {
  RunAccumulator acc(plan.params);
  World w = run(plan, acc);
  return std::move(acc).finish(w, plan.run_index);
}

}  // namespace emg

namespace emg {

/// Ensemble statistics for one (beta, gamma_B, omega_th) grid cell.
struct SweepResult {
  double beta = 0.0;
  double gamma_B = 0.0;
  double omega_th = 0.0;
  double mean_N_B = 0.0;
  double sigma_P_A = 0.0;
  double sigma_P_B = 0.0;
  std::optional<double> mean_W_A;
  std::optional<double> mean_W_B;
  GeneHistogram histogram_A;
  GeneHistogram histogram_B;
  int n_runs = 0;
  std::uint64_t master_seed = 0;

  // Standard errors across runs, not serialized in the summary table.
  double se_N_B = 0.0;
  double se_sigma_P_A = 0.0;
  double se_sigma_P_B = 0.0;
};

/// Means over runs; wealth averages skip runs where the market was empty.
inline SweepResult aggregate(const ModelParams& params, std::span<const RunSummary> runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
  SweepResult r;
  r.beta = params.beta;
  r.gamma_B = params.gamma_B;
  r.omega_th = params.omega_th;
  r.n_runs = static_cast<int>(runs.size());
  r.master_seed = params.master_seed;
  r.histogram_A = GeneHistogram(Market::A, params.hist_bins);
  r.histogram_B = GeneHistogram(Market::B, params.hist_bins);

  std::vector<double> nb, sa, sb, wa, wb;
  for (const auto& s : runs) {
    nb.push_back(s.mean_N_B);
    sa.push_back(s.sigma_P[0]);
    sb.push_back(s.sigma_P[1]);
    if (s.mean_W[0]) wa.push_back(*s.mean_W[0]);
    if (s.mean_W[1]) wb.push_back(*s.mean_W[1]);
    r.histogram_A.merge(s.histogram[0]);
    r.histogram_B.merge(s.histogram[1]);
  }
  r.histogram_A.normalize();
  r.histogram_B.normalize();
  const auto n = mean_and_error(nb);
  const auto a = mean_and_error(sa);
  const auto b = mean_and_error(sb);
  r.mean_N_B = n.mean;
  r.se_N_B = n.std_error;
  r.sigma_P_A = a.mean;
  r.se_sigma_P_A = a.std_error;
  r.sigma_P_B = b.mean;
  r.se_sigma_P_B = b.std_error;
  if (!wa.empty()) r.mean_W_A = mean_and_error(wa).mean;
  if (!wb.empty()) r.mean_W_B = mean_and_error(wb).mean;
  return r;
}

}  // namespace emg
