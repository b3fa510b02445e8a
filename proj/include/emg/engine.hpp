#pragma once

// Tick loop over both markets, the relaxation/measurement schedule and the
// deterministic ensemble driver.

#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "emg/market.hpp"
#include "emg/params.hpp"
#include "emg/rng.hpp"

namespace emg {

struct StepObservation {
  std::int64_t tick = 0;
  std::array<int, 2> A{};          // excess demand per market
  std::array<double, 2> P{};       // price after the tick
  std::array<double, 2> P_prev{};  // price before the tick
  std::array<int, 2> N{};          // populations after switching
  std::vector<TradeOutcome> settled_trades;

  int A_A() const noexcept { return A[0]; }
  int A_B() const noexcept { return A[1]; }
  double P_A() const noexcept { return P[0]; }
  double P_B() const noexcept { return P[1]; }
  int N_A() const noexcept { return N[0]; }
  int N_B() const noexcept { return N[1]; }
};

/// Complete model state of one run.
class World {
 public:
  /// Initial conditions: zero prices, uniform genes, uniform random market
  /// assignment, random histories and tables, everyone flat.
  World(const ModelParams& params, std::uint64_t seed) : params_(params), rng_(seed) {
    params_.validate();
    agents_.resize(static_cast<std::size_t>(params_.N));
    for (auto& a : agents_) {
      a.gene = rng_.uniform();
      a.market = rng_.uniform() < 0.5 ? Market::A : Market::B;
    }
    markets_[0] = MarketState(params_.m, rng_);
    markets_[1] = MarketState(params_.m, rng_);
    init_buffers();
  }

  /// Explicit initial state, for tests and controlled experiments.
  World(const ModelParams& params, std::uint64_t seed, std::vector<AgentState> agents,
        std::array<MarketState, 2> markets)
      : params_(params), rng_(seed), agents_(std::move(agents)),
        markets_(std::move(markets)) {
    params_.validate();
    if (agents_.size() != static_cast<std::size_t>(params_.N))
      throw ParamError("N", "does not match the number of agents supplied");
    for (const auto& mk : markets_)
      if (mk.memory() != params_.m)
        throw ParamError("m", "does not match the supplied market memory");
    init_buffers();
  }

  /// Advances one tick: decisions against the pre-tick state, excess demand
  /// and price update per market, trades at the impact-weighted price,
  /// history/table learning, then exit and mutation checks for every agent
  /// that closed a round trip (exit first; a switching agent does not mutate).
  const StepObservation& step() {
    const std::array<int, 2> prediction{markets_[0].prediction(), markets_[1].prediction()};
    const std::size_t n = agents_.size();
    rng_.fill_uniform32(draws_);
    std::size_t n_active = 0;
    int total = 0;
    int in_b = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const AgentState& a = agents_[i];
      const int k = index(a.market);
      const int act = decide_action(a, prediction[k], draws_[i]);
      actions_[i] = static_cast<std::int8_t>(act);
      active_[n_active] = static_cast<std::int32_t>(i);
      n_active += act != 0;
      total += act;
      in_b += act * k;
    }
    const std::array<int, 2> excess{total - in_b, in_b};

    std::array<double, 2> p_tr{};
    for (int k = 0; k < 2; ++k) {
      obs_.P_prev[k] = markets_[k].price;
      update_price(markets_[k], excess[k]);
      obs_.P[k] = markets_[k].price;
      obs_.A[k] = excess[k];
      p_tr[k] = transaction_price(obs_.P_prev[k], obs_.P[k], params_.beta);
    }

    obs_.tick = tick_;
    obs_.settled_trades.clear();
    for (std::size_t j = 0; j < n_active; ++j) {
      const auto i = static_cast<std::size_t>(active_[j]);
      const int act = actions_[i];
      AgentState& a = agents_[i];
      const double price = p_tr[index(a.market)];
      if (act > 0) {
        open_position(a, price);
      } else {
        obs_.settled_trades.push_back(
            settle_round_trip(a, price, static_cast<std::int32_t>(i), tick_));
      }
    }

    for (int k = 0; k < 2; ++k)
      update_prediction_table(markets_[k], movement_bit(excess[k], rng_), params_.predictor);

    const std::size_t n_settled = obs_.settled_trades.size();
    for (std::size_t j = 0; j < n_settled; ++j) {
      const auto id = obs_.settled_trades[j].agent_id;
      AgentState& a = agents_[static_cast<std::size_t>(id)];
      const Market here = a.market;
      SwitchResult sw =
          maybe_switch_market(a, params_.omega_th, markets_[index(here)].price, tick_, id);
      if (sw.decision == SwitchDecision::switch_) {
        --population_[index(here)];
        ++population_[index(a.market)];
        ++switches_;
        if (sw.liquidation) obs_.settled_trades.push_back(*sw.liquidation);
        continue;
      }
      if (score(a, params_.gamma(here)) < params_.S_th) {
        mutate_strategy(a, params_.R, rng_.uniform());
        ++mutations_[index(here)];
      }
    }

    obs_.N = population_;
    ++tick_;
    return obs_;
  }

  const ModelParams& params() const noexcept { return params_; }
  std::int64_t tick() const noexcept { return tick_; }
  std::span<const AgentState> agents() const noexcept { return agents_; }
  const MarketState& market(Market mk) const noexcept { return markets_[index(mk)]; }
  int population(Market mk) const noexcept { return population_[index(mk)]; }
  /// Strategy mutations that happened in each market since tick 0.
  std::int64_t mutations(Market mk) const noexcept { return mutations_[index(mk)]; }
  std::int64_t switches() const noexcept { return switches_; }

 private:
  void init_buffers() {
    actions_.assign(agents_.size(), 0);
    active_.assign(agents_.size(), 0);
    draws_.assign(agents_.size(), 0.0);
    population_ = {0, 0};
    for (const auto& a : agents_) ++population_[index(a.market)];
    obs_.N = population_;
    obs_.P = {markets_[0].price, markets_[1].price};
    obs_.P_prev = obs_.P;
    obs_.settled_trades.reserve(agents_.size());
  }

  ModelParams params_;
  Rng rng_;
  std::vector<AgentState> agents_;
  std::array<MarketState, 2> markets_;
  std::vector<std::int8_t> actions_;
  std::vector<std::int32_t> active_;  // ids with a nonzero action this tick
  std::vector<double> draws_;
  std::array<int, 2> population_{};
  std::array<std::int64_t, 2> mutations_{};
  std::int64_t switches_ = 0;
  std::int64_t tick_ = 0;
  StepObservation obs_;
};

struct RunPlan {
  ModelParams params;
  std::uint64_t run_index = 0;
  std::uint64_t derived_seed = 0;

  static RunPlan make(const ModelParams& params, std::uint64_t run_index) {
    return {params, run_index, derive_seed(params.master_seed, run_index)};
  }
};

/// Runs t_relax silent ticks then t_meas ticks, calling
/// `observer(const World&, const StepObservation&)` after each measured tick.
/// Returns the final world.
template <typename Observer>
World run(const RunPlan& plan, Observer&& observer) {
  plan.params.validate();
  World world(plan.params, plan.derived_seed);
  for (std::int64_t t = 0; t < plan.params.t_relax; ++t) world.step();
  for (std::int64_t t = 0; t < plan.params.t_meas; ++t) {
    const StepObservation& obs = world.step();
    observer(std::as_const(world), obs);
  }
  return world;
}

struct RunRecord {
  std::vector<StepObservation> observations;  // measurement window only
  std::vector<AgentState> census;             // final agent states
};

inline RunRecord record_run(const RunPlan& plan) {
  RunRecord rec;
  rec.observations.reserve(static_cast<std::size_t>(plan.params.t_meas));
  World w = run(plan, [&](const World&, const StepObservation& obs) {
    rec.observations.push_back(obs);
  });
  rec.census.assign(w.agents().begin(), w.agents().end());
  return rec;
}

class EnsembleError : public std::runtime_error {
 public:
  EnsembleError(std::uint64_t run_index, const std::string& what)
      : std::runtime_error("run " + std::to_string(run_index) + ": " + what),
        run_index_(run_index) {}
  std::uint64_t run_index() const noexcept { return run_index_; }

 private:
  std::uint64_t run_index_;
};

/// Evaluates `job(i)` for i in [0, count) on up to `workers` threads and
/// returns the results in index order. The first failing index (lowest) is
/// rethrown as EnsembleError.
template <typename Job>
auto parallel_map(std::size_t count, unsigned workers, Job&& job)
    -> std::vector<decltype(job(std::size_t{}))> {
  using Result = decltype(job(std::size_t{}));
  std::vector<Result> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw EnsembleError(i, e.what());
    } catch (...) {
      throw EnsembleError(i, "unknown error");
    }
  }
  return results;
}

inline unsigned default_workers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace emg
