#pragma once

// Agent and market state plus the per-tick update rules of the two-market
// evolutionary minority game with market impact and per-market confidence.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "emg/params.hpp"
#include "emg/rng.hpp"

namespace emg {

enum class Position : std::uint8_t { flat, long_ };

struct AgentState {
  double gene = 0.5;  // probability of following the market prediction
  Market market = Market::A;
  Position position = Position::flat;
  double open_price = 0.0;  // meaningful only while long
  double s_plus = 0.0;      // gains since the strategy was adopted, >= 0
  double s_minus = 0.0;     // losses since the strategy was adopted, <= 0
  double omega = 0.0;       // realized attainment since entering the market
  double wealth = 0.0;      // all realized attainment
  std::int64_t t_in = 0;    // tick of market entry
};

struct TradeOutcome {
  std::int32_t agent_id = 0;
  double attainment = 0.0;  // sell transaction price - buy transaction price
  std::int64_t closed_at = 0;

  bool operator==(const TradeOutcome&) const = default;
};

/// One asset: price, the last m movement bits and the shared prediction table.
class MarketState {
 public:
  MarketState() = default;

  /// Random history and a prediction table drawn uniformly from {+1, -1}.
  MarketState(int m, Rng& rng) : m_(m), mask_((1u << m) - 1u), table_(1u << m) {
    for (auto& p : table_) p = static_cast<std::int8_t>(rng.sign());
    for (int i = 0; i < m; ++i) push_bit(rng.sign());
  }

  /// Explicit construction; `table` must hold 2^m entries in {+1, -1}.
  MarketState(int m, std::uint32_t history, std::vector<std::int8_t> table,
              double price = 0.0)
      : price(price), m_(m), mask_((1u << m) - 1u), history_(history & mask_),
        table_(std::move(table)) {
    if (table_.size() != (std::size_t{1} << m))
      throw std::invalid_argument("prediction table must have 2^m entries");
  }

  double price = 0.0;
  int last_A = 0;

  int memory() const noexcept { return m_; }
  /// Bit i (LSB = most recent) is 1 for an up move.
  std::uint32_t history() const noexcept { return history_; }
  int prediction() const noexcept { return table_[history_]; }
  int prediction(std::uint32_t h) const { return table_.at(h); }
  const std::vector<std::int8_t>& table() const noexcept { return table_; }

  void set_entry(std::uint32_t h, int value) {
    table_.at(h) = static_cast<std::int8_t>(value);
  }
  void push_bit(int move) noexcept {
    history_ = ((history_ << 1) | (move > 0 ? 1u : 0u)) & mask_;
  }

 private:
  int m_ = 1;
  std::uint32_t mask_ = 1;
  std::uint32_t history_ = 0;
  std::vector<std::int8_t> table_ = std::vector<std::int8_t>(2, 1);
};

/// Intended direction is the prediction with probability `gene`, its opposite
/// otherwise. A buy needs a flat position and a sell needs a long one, any
/// other combination is a hold.
inline int decide_action(const AgentState& agent, int prediction, double draw) noexcept {
  // Branch-free form of: up -> buy if flat; down -> sell if long.
  const int follow = draw < agent.gene;
  const int up = follow == (prediction > 0);
  return up - static_cast<int>(agent.position == Position::long_);
}

inline int decide_action(const AgentState& agent, const MarketState& market,
                         double draw) noexcept {
  return decide_action(agent, market.prediction(), draw);
}

/// Square-root price impact: P(t+1) = P(t) + sgn(A) sqrt|A|.
inline double price_impact(int excess_demand) noexcept {
  if (excess_demand == 0) return 0.0;
  const double root = std::sqrt(static_cast<double>(std::abs(excess_demand)));
  return excess_demand > 0 ? root : -root;
}

inline double update_price(MarketState& market, int excess_demand) noexcept {
  market.price += price_impact(excess_demand);
  market.last_A = excess_demand;
  return market.price;
}

inline double transaction_price(double p_now, double p_next, double beta) noexcept {
  return (1.0 - beta) * p_now + beta * p_next;
}

/// History bit for a realized excess demand; A == 0 draws a fair coin.
inline int movement_bit(int excess_demand, Rng& rng) {
  if (excess_demand > 0) return 1;
  if (excess_demand < 0) return -1;
  return rng.sign();
}

/// Writes the realized move into the entry for the current history, then
/// shifts the move into the history.
inline void update_prediction_table(MarketState& market, int realized_bit,
                                    Predictor predictor = Predictor::repeat_last) {
  const int entry = predictor == Predictor::repeat_last ? realized_bit : -realized_bit;
  market.set_entry(market.history(), entry);
  market.push_bit(realized_bit);
}

inline double score(const AgentState& agent, double gamma) noexcept {
  return agent.s_plus + gamma * agent.s_minus;
}

/// Closes a long position. Throws std::logic_error on a flat agent.
inline TradeOutcome settle_round_trip(AgentState& agent, double sell_price,
                                      std::int32_t agent_id = 0,
                                      std::int64_t tick = 0) {
  if (agent.position != Position::long_)
    throw std::logic_error("settle_round_trip on a flat agent");
  const double b = sell_price - agent.open_price;
  agent.wealth += b;
  agent.omega += b;
  if (b > 0.0)
    agent.s_plus += b;
  else
    agent.s_minus += b;
  agent.position = Position::flat;
  agent.open_price = 0.0;
  return {agent_id, b, tick};
}

inline void open_position(AgentState& agent, double buy_price) noexcept {
  agent.position = Position::long_;
  agent.open_price = buy_price;
}

/// Reflects a candidate gene back into [0, 1]; valid for |overshoot| <= 1.
inline double reflect_gene(double g) noexcept {
  if (g < 0.0) return -g;
  if (g > 1.0) return 2.0 - g;
  return g;
}

/// New gene uniform on [gene - R/2, gene + R/2], reflected into [0, 1].
/// The score is reset.
inline double mutate_strategy(AgentState& agent, double R, double draw) noexcept {
  agent.gene = std::clamp(reflect_gene(agent.gene - 0.5 * R + draw * R), 0.0, 1.0);
  agent.s_plus = 0.0;
  agent.s_minus = 0.0;
  return agent.gene;
}

enum class SwitchDecision : std::uint8_t { stay, switch_ };

struct SwitchResult {
  SwitchDecision decision = SwitchDecision::stay;
  std::optional<TradeOutcome> liquidation;  // set if a long position was closed
};

/// Exit rule: omega < omega_th moves the agent to the other market with a
/// fresh omega and score. An open position is sold at `current_price`
/// (no impact), using the pre-liquidation omega for the test.
inline SwitchResult maybe_switch_market(AgentState& agent, double omega_th,
                                        double current_price, std::int64_t tick,
                                        std::int32_t agent_id = 0) {
  if (!(agent.omega < omega_th)) return {};
  SwitchResult result{SwitchDecision::switch_, std::nullopt};
  if (agent.position == Position::long_)
    result.liquidation = settle_round_trip(agent, current_price, agent_id, tick);
  agent.market = other(agent.market);
  agent.omega = 0.0;
  agent.s_plus = 0.0;
  agent.s_minus = 0.0;
  agent.t_in = tick;
  return result;
}

}  // namespace emg
