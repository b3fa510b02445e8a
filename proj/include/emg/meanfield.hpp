#pragma once

// Mean-field bookkeeping for the two-market population gap and the sign of
// the round-trip attainment.
//
// The withdrawal cascade: agents holding bad strategies in market B (the
// market with the shifted confidence) withdraw to A. On arrival the cohort is
// re-split by the regime's bad-strategy fraction; the bad part withdraws back
// to B with probability rho_A', is re-split again there, and the part that
// withdraws with probability rho_B' returns to A as the next cohort. Updaters
// (rho_A, rho_B) stay put and leave the cascade. The gap grows by each cohort
// that reaches A, so
//
//   gap_n = gap_0 + N0 (1 - q^n) / (1 - q),
//   N0 = N_B(0) * bad * rho_B',   q = bad^2 * rho_A' * rho_B'.
//
// With `bidirectional` set, the mirror cascade started by A's bad holders is
// subtracted, so symmetric flows leave the gap unchanged.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace emg::meanfield {

/// Bad-strategy fraction below beta = 1/2 (majority rewarded) and above it
/// (minority rewarded).
inline constexpr double kBadFractionBelow = 1.0 / 2.0;
inline constexpr double kBadFractionAbove = 1.0 / 3.0;

enum class Regime { below, above };

struct FlowParams {
  double N = 1000.0;
  double rho_A = 0.5;
  double rho_A_prime = 0.5;
  double rho_B = 0.0;
  double rho_B_prime = 1.0;
  double bad_fraction = kBadFractionBelow;
  double initial_gap = 0.0;       // N_A(0) - N_B(0)
  std::optional<std::int64_t> n;  // rounds; nullopt means until converged
  bool bidirectional = false;

  /// First cohort reaching A.
  double N0() const noexcept { return 0.5 * (N - initial_gap) * bad_fraction * rho_B_prime; }
  /// First cohort of the mirror cascade reaching B.
  double N0_mirror() const noexcept {
    return 0.5 * (N + initial_gap) * bad_fraction * rho_A_prime;
  }
  /// Cohort-to-cohort contraction ratio.
  double q() const noexcept { return bad_fraction * bad_fraction * rho_A_prime * rho_B_prime; }

  void validate() const {
    auto prob = [](double p, const char* what) {
      if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error(std::string(what) + " must be in [0, 1]");
    };
    prob(rho_A, "rho_A");
    prob(rho_A_prime, "rho_A_prime");
    prob(rho_B, "rho_B");
    prob(rho_B_prime, "rho_B_prime");
    prob(bad_fraction, "bad_fraction");
    if (rho_A + rho_A_prime > 1.0 + 1e-12) throw std::domain_error("rho_A + rho_A_prime must be <= 1");
    if (rho_B + rho_B_prime > 1.0 + 1e-12) throw std::domain_error("rho_B + rho_B_prime must be <= 1");
    if (!(N > 0.0)) throw std::domain_error("N must be > 0");
    if (std::abs(initial_gap) > N) throw std::domain_error("|initial_gap| must be <= N");
    if (n && *n < 1) throw std::domain_error("n must be >= 1");
  }

  /// The two reference scenarios: below 1/2, rho_A = rho_A' = 1/2; above
  /// 1/2, rho_A = 2/3 and rho_A' = 1/3. In both, rho_B = 0 and rho_B' = 1.
  static FlowParams reference(Regime regime, double N) {
    FlowParams f;
    f.N = N;
    if (regime == Regime::below) {
      f.rho_A = 0.5;
      f.rho_A_prime = 0.5;
      f.bad_fraction = kBadFractionBelow;
    } else {
      f.rho_A = 2.0 / 3.0;
      f.rho_A_prime = 1.0 / 3.0;
      f.bad_fraction = kBadFractionAbove;
    }
    f.rho_B = 0.0;
    f.rho_B_prime = 1.0;
    return f;
  }
};

/// N0 (1 - q^n) / (1 - q); N0 / (1 - q) when n is empty. Rejects q outside [0, 1).
inline double population_gap_closed_form(double N0, double q,
                                         std::optional<std::int64_t> n = std::nullopt) {
  if (!(q >= 0.0 && q < 1.0)) throw std::domain_error("q must be in [0, 1)");
  if (n && *n < 1) throw std::domain_error("n must be >= 1");
  if (!n) return N0 / (1.0 - q);
  return N0 * (1.0 - std::pow(q, static_cast<double>(*n))) / (1.0 - q);
}

class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::int64_t kMaxRounds = 1'000'000;

/// Iterates the cascade round by round and returns N_A - N_B. With no round
/// count, stops once a round changes the gap by less than 1e-12.
inline double population_gap_recursion(const FlowParams& flow) {
  flow.validate();
  double gap = flow.initial_gap;
  double cohort = flow.N0();
  double mirror = flow.bidirectional ? flow.N0_mirror() : 0.0;
  const std::int64_t limit = flow.n.value_or(kMaxRounds);
  for (std::int64_t round = 0; round < limit; ++round) {
    gap += cohort - mirror;
    if (!flow.n && std::abs(cohort) < 1e-12 && std::abs(mirror) < 1e-12) return gap;
    // A's bad holders of the arriving cohort withdraw to B, B's withdraw back.
    cohort = cohort * flow.bad_fraction * flow.rho_A_prime * flow.bad_fraction * flow.rho_B_prime;
    mirror = mirror * flow.bad_fraction * flow.rho_B_prime * flow.bad_fraction * flow.rho_A_prime;
  }
  if (!flow.n) throw NonConvergence("population gap did not converge within 10^6 rounds");
  return gap;
}

struct GapPair {
  double N0;
  double q;
};

inline GapPair reference_pair(Regime regime, double N) {
  return regime == Regime::below ? GapPair{N / 4.0, 1.0 / 8.0} : GapPair{N / 6.0, 1.0 / 27.0};
}

/// True when the steady-state gap for `above` is strictly smaller than for `below`.
inline bool gap_consistency_check(GapPair below, GapPair above) {
  return population_gap_closed_form(above.N0, above.q) <
         population_gap_closed_form(below.N0, below.q);
}

inline bool gap_consistency_check(double N) {
  if (!(N > 0.0)) throw std::domain_error("N must be > 0");
  return gap_consistency_check(reference_pair(Regime::below, N),
                               reference_pair(Regime::above, N));
}

enum class Sign { negative, zero, positive };

inline const char* to_string(Sign s) noexcept {
  switch (s) {
    case Sign::negative: return "negative";
    case Sign::zero: return "zero";
    case Sign::positive: return "positive";
  }
  return "?";
}

/// Sign of (1 - 2 beta): the expected sign of a completed round trip.
inline Sign round_trip_sign(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::domain_error("beta must be in [0, 1]");
  const double s = 1.0 - 2.0 * beta;
  if (s > 0.0) return Sign::positive;
  if (s < 0.0) return Sign::negative;
  return Sign::zero;
}

}  // namespace emg::meanfield
