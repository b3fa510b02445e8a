#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "emg/sweep.hpp"

namespace emg {
namespace {

SweepSpec tiny_spec() {
  auto parsed = parse_config(
      "N = 60\nt_relax = 300\nt_meas = 100\nn_runs = 3\nmaster_seed = 11\n"
      "axis1 = beta: 0.2, 0.8\naxis2 = gamma_B: 0.1, 2.0\n");
  return std::get<SweepSpec>(parsed);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("emg_test_" + name);
  std::filesystem::remove_all(d);
  return d;
}

TEST(Grid, AxisOneMajorOrder) {
  const auto cells = expand_grid(tiny_spec());
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_DOUBLE_EQ(cells[0].beta, 0.2);
  EXPECT_DOUBLE_EQ(cells[0].gamma_B, 0.1);
  EXPECT_DOUBLE_EQ(cells[1].beta, 0.2);
  EXPECT_DOUBLE_EQ(cells[1].gamma_B, 2.0);
  EXPECT_DOUBLE_EQ(cells[3].beta, 0.8);
  EXPECT_EQ(cells[3].N, 60);
}

TEST(Sweep, FourCellsGiveFourRowsAndHistograms) {
  const auto out = run_sweep(tiny_spec(), 2);
  ASSERT_TRUE(out.ok());
  const auto dir = fresh_dir("rows");
  write_sweep(out, dir);
  const auto text = slurp(dir / "summary.csv");
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, kSummaryHeader);
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    int commas = 0;
    for (char c : line) commas += c == ',';
    EXPECT_EQ(commas, 9);
  }
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  for (std::size_t c = 0; c < 4; ++c) {
    const auto h = slurp(dir / histogram_file_name(c));
    EXPECT_EQ(h.substr(0, h.find('\n')), kHistogramHeader);
  }
  EXPECT_EQ(histogram_file_name(3), "hist_003.csv");
}

TEST(Sweep, ByteIdenticalAcrossWorkerCountsAndReruns) {
  const auto a = fresh_dir("w1");
  const auto b = fresh_dir("w3");
  const auto c = fresh_dir("w1_again");
  write_sweep(run_sweep(tiny_spec(), 1), a);
  write_sweep(run_sweep(tiny_spec(), 3), b);
  write_sweep(run_sweep(tiny_spec(), 1), c);
  for (const char* f : {"summary.csv", "hist_000.csv", "hist_003.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(c / f)) << f;
  }
}

TEST(Csv, NineSignificantDigitsAndMissingValues) {
  EXPECT_EQ(fmt9(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(fmt9(2000.0 / 7.0), "285.714286");
  EXPECT_EQ(fmt9(std::optional<double>{}), "NA");
  SweepResult r;
  r.beta = 0.2;
  r.gamma_B = 1;
  r.omega_th = -200;
  r.mean_N_B = 375;
  r.mean_W_A = -1.5;
  r.n_runs = 20;
  r.master_seed = 1;
  std::ostringstream os;
  write_summary_row(os, r);
  EXPECT_EQ(os.str(), "0.2,1,-200,375,0,0,-1.5,NA,20,1\n");
}

TEST(Csv, HistogramRows) {
  SweepResult r;
  r.histogram_A = GeneHistogram(Market::A, 2);
  r.histogram_B = GeneHistogram(Market::B, 2);
  r.histogram_A.mass = {0.25, 0.75};
  r.histogram_B.mass = {1.0, 0.0};
  std::ostringstream os;
  write_histogram_csv(os, r);
  EXPECT_EQ(os.str(), "bin_low,bin_high,mass_A,mass_B\n0,0.5,0.25,1\n0.5,1,0.75,0\n");
}

TEST(Sweep, OutOfDomainCellIsRejectedBeforeRunning) {
  auto spec = tiny_spec();
  spec.axis1.values = {0.2};
  spec.axis2->values = {0.1};
  spec.axis2->name = "t_meas";
  spec.axis2->values = {100.0, 0.0};
  EXPECT_THROW(expand_grid(spec), ParamError);
}

}  // namespace
}  // namespace emg
