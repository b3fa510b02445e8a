#include <gtest/gtest.h>

#include <string>

#include "emg/config.hpp"
#include "emg/rng.hpp"

namespace emg {
namespace {

TEST(ParseConfig, OverridesKeepDefaultsElsewhere) {
  const auto p = parse_params("beta=0.8\ngamma_B=2.0");
  EXPECT_DOUBLE_EQ(p.beta, 0.8);
  EXPECT_DOUBLE_EQ(p.gamma_B, 2.0);
  EXPECT_EQ(p.N, 1000);
  EXPECT_DOUBLE_EQ(p.S_th, -4.0);
  EXPECT_DOUBLE_EQ(p.omega_th, -200.0);
  EXPECT_DOUBLE_EQ(p.gamma_A, 1.0);
}

TEST(ParseConfig, EmptyFileGivesDefaults) {
  EXPECT_EQ(parse_params(""), ModelParams{});
  EXPECT_EQ(parse_params("# only a comment\n\n   \n"), ModelParams{});
}

TEST(ParseConfig, DomainErrorNamesTheLine) {
  try {
    parse_config("beta=1.5");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
  try {
    parse_config("N = 100\n\n# note\nt_meas = 0\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 4);
  }
}

TEST(ParseConfig, RejectsMalformedInput) {
  EXPECT_THROW(parse_config("unknown_key = 3"), ConfigError);
  EXPECT_THROW(parse_config("beta"), ConfigError);
  EXPECT_THROW(parse_config("beta = abc"), ConfigError);
  EXPECT_THROW(parse_config("N = 10.5"), ConfigError);
  EXPECT_THROW(parse_config("beta = 0.1\nbeta = 0.2"), ConfigError);
  EXPECT_THROW(parse_config("predictor = guess"), ConfigError);
  EXPECT_THROW(parse_config("master_seed = -1"), ConfigError);
}

TEST(ParseConfig, CommentsWhitespaceAndEnums) {
  const auto p = parse_params(
      "  N = 50   # agents\n"
      "predictor = oppose_last\n"
      "volatility = centered\n"
      "master_seed = 18446744073709551615\n");
  EXPECT_EQ(p.N, 50);
  EXPECT_EQ(p.predictor, Predictor::oppose_last);
  EXPECT_EQ(p.volatility, VolatilityMode::centered);
  EXPECT_EQ(p.master_seed, 18446744073709551615ull);
}

TEST(ParseConfig, SweepAxes) {
  const auto parsed = parse_config("N = 100\naxis1 = beta: 0.2, 0.8\naxis2 = gamma_B: 0.1:0.3:0.1\n");
  const auto* spec = std::get_if<SweepSpec>(&parsed);
  ASSERT_NE(spec, nullptr);
  EXPECT_EQ(spec->base.N, 100);
  EXPECT_EQ(spec->axis1.name, "beta");
  EXPECT_EQ(spec->axis1.values, (std::vector<double>{0.2, 0.8}));
  ASSERT_TRUE(spec->axis2.has_value());
  ASSERT_EQ(spec->axis2->values.size(), 3u);
  EXPECT_NEAR(spec->axis2->values[2], 0.3, 1e-12);
  EXPECT_THROW(parse_params("axis1 = beta: 0.2"), ConfigError);
}

TEST(ParseConfig, RejectsBadAxes) {
  EXPECT_THROW(parse_config("axis1 = colour: 1, 2"), ConfigError);
  EXPECT_THROW(parse_config("axis1 = beta: 0.2, 1.2"), ConfigError);
  EXPECT_THROW(parse_config("axis1 = beta:"), ConfigError);
  EXPECT_THROW(parse_config("axis2 = beta: 0.2"), ConfigError);
  EXPECT_THROW(parse_config("axis1 = beta: 0.2\naxis2 = beta: 0.3"), ConfigError);
  try {
    parse_config("N = 10\naxis1 = gamma_B: 1, -1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Serialize, RoundTripsRandomParams) {
  Rng r(2024);
  for (int i = 0; i < 500; ++i) {
    ModelParams p;
    p.N = 2 + static_cast<int>(r.uniform() * 100000);
    p.m = 1 + static_cast<int>(r.uniform() * 24);
    p.R = 1.0 - r.uniform();
    p.beta = r.uniform();
    p.gamma_A = 10 * r.uniform();
    p.gamma_B = 1e-3 / (r.uniform() + 1e-9);
    p.S_th = -100 * r.uniform();
    p.omega_th = -1e8 * r.uniform();
    p.t_relax = static_cast<std::int64_t>(r.uniform() * 1e9);
    p.t_meas = 1 + static_cast<std::int64_t>(r.uniform() * 1e6);
    p.n_runs = 1 + static_cast<int>(r.uniform() * 1000);
    p.master_seed = r.bits();
    p.predictor = r.uniform() < 0.5 ? Predictor::repeat_last : Predictor::oppose_last;
    p.volatility = r.uniform() < 0.5 ? VolatilityMode::uncentered : VolatilityMode::centered;
    p.hist_bins = 1 + static_cast<int>(r.uniform() * 200);
    ASSERT_NO_THROW(p.validate());
    EXPECT_EQ(parse_params(serialize(p)), p) << serialize(p);
  }
}

TEST(ValueList, Ranges) {
  EXPECT_EQ(parse_value_list("1,2, 3"), (std::vector<double>{1, 2, 3}));
  const auto v = parse_value_list("0:1:0.25");
  ASSERT_EQ(v.size(), 5u);
  EXPECT_DOUBLE_EQ(v.back(), 1.0);
  EXPECT_THROW(parse_value_list("1,,2"), std::invalid_argument);
  EXPECT_THROW(parse_value_list("1:0:0.1"), std::invalid_argument);
  EXPECT_THROW(parse_value_list("0:1:0"), std::invalid_argument);
}

}  // namespace
}  // namespace emg
