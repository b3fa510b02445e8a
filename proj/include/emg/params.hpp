#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace emg {

enum class Market : std::uint8_t { A = 0, B = 1 };

constexpr int index(Market m) noexcept { return static_cast<int>(m); }
constexpr Market other(Market m) noexcept {
  return m == Market::A ? Market::B : Market::A;
}
constexpr const char* name(Market m) noexcept {
  return m == Market::A ? "A" : "B";
}

/// How the shared prediction table learns from a realized price move.
enum class Predictor : std::uint8_t {
  repeat_last,  // predict the move that followed this history last time
  oppose_last,  // predict the opposite of it
};

/// Second moment used for the price "standard deviation".
enum class VolatilityMode : std::uint8_t {
  uncentered,  // sqrt(mean of squared one-step returns)
  centered,    // sample standard deviation of one-step returns
};

class ParamError : public std::invalid_argument {
 public:
  ParamError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Full experiment configuration. Defaults follow the reference setup
/// (N = 1000, S_th = -4, omega_th = -200, gamma_A = 1, 10^5 relaxation ticks,
/// 10^3 measured ticks, 100 runs).
struct ModelParams {
  int N = 1000;
  int m = 3;
  double R = 0.2;
  double beta = 0.2;
  double gamma_A = 1.0;
  double gamma_B = 1.0;
  double S_th = -4.0;
  double omega_th = -200.0;
  std::int64_t t_relax = 100000;
  std::int64_t t_meas = 1000;
  int n_runs = 100;
  std::uint64_t master_seed = 1;

  Predictor predictor = Predictor::repeat_last;
  VolatilityMode volatility = VolatilityMode::uncentered;
  int hist_bins = 50;

  double gamma(Market mk) const noexcept {
    return mk == Market::A ? gamma_A : gamma_B;
  }

  /// Throws ParamError naming the first offending field.
  void validate() const {
    if (N < 2) throw ParamError("N", "must be >= 2");
    if (m < 1 || m > 24) throw ParamError("m", "must be in [1, 24]");
    if (!(R > 0.0 && R <= 1.0)) throw ParamError("R", "must be in (0, 1]");
    if (!(beta >= 0.0 && beta <= 1.0))
      throw ParamError("beta", "must be in [0, 1]");
    if (!(gamma_A >= 0.0)) throw ParamError("gamma_A", "must be >= 0");
    if (!(gamma_B >= 0.0)) throw ParamError("gamma_B", "must be >= 0");
    if (S_th != S_th) throw ParamError("S_th", "must be a number");
    if (omega_th != omega_th) throw ParamError("omega_th", "must be a number");
    if (t_relax < 0) throw ParamError("t_relax", "must be >= 0");
    if (t_meas < 1) throw ParamError("t_meas", "must be >= 1");
    if (n_runs < 1) throw ParamError("n_runs", "must be >= 1");
    if (hist_bins < 1) throw ParamError("hist_bins", "must be >= 1");
  }

  bool operator==(const ModelParams&) const = default;
};

}  // namespace emg
