#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sshlind/fitting.hpp"

namespace {

using namespace sshlind;

ScalingSeries synth_exponential(double a, double b, const std::vector<int>& ns) {
  ScalingSeries s;
  for (int n : ns) s.points.push_back({n, a * std::exp(-b * n)});
  return s;
}

ScalingSeries synth_powerlaw(double a, double b, const std::vector<int>& ns) {
  ScalingSeries s;
  for (int n : ns) s.points.push_back({n, a * std::pow(n, -b)});
  return s;
}

TEST(Fit, ExactExponentialRecovery) {
  auto s = synth_exponential(3.0, 0.7, {2, 4, 6, 8, 10, 12});
  auto f = fit_exponential(s);
  EXPECT_EQ(f.kind, "exponential");
  EXPECT_EQ(f.n_points, 6);
  EXPECT_NEAR(f.amplitude, 3.0, 3.0 * 1e-10);
  EXPECT_NEAR(f.rate, 0.7, 1e-10);
  EXPECT_GT(f.r_squared, 1.0 - 1e-12);
  ASSERT_EQ(f.residuals.size(), 6u);
  for (double r : f.residuals) EXPECT_LT(std::abs(r), 1e-12);
}

TEST(Fit, ExactPowerlawRecovery) {
  auto s = synth_powerlaw(2.0, 3.0, {2, 3, 5, 8, 13, 21});
  auto f = fit_powerlaw(s);
  EXPECT_EQ(f.kind, "powerlaw");
  EXPECT_NEAR(f.amplitude, 2.0, 2.0 * 1e-10);
  EXPECT_NEAR(f.rate, 3.0, 1e-10);
  EXPECT_GT(f.r_squared, 1.0 - 1e-12);
}

TEST(Fit, Idempotence) {
  auto s = synth_exponential(1.7, 0.31, {3, 5, 7, 9, 11});
  auto f1 = fit_exponential(s);
  auto f2 = fit_exponential(synth_exponential(f1.amplitude, f1.rate, {3, 5, 7, 9, 11}));
  EXPECT_NEAR(f2.amplitude, f1.amplitude, 1e-9);
  EXPECT_NEAR(f2.rate, f1.rate, 1e-9);
}

TEST(Fit, InputValidation) {
  ScalingSeries two;
  two.points = {{2, 0.5}, {4, 0.25}};
  EXPECT_THROW(fit_exponential(two), std::invalid_argument);
  EXPECT_THROW(fit_powerlaw(two), std::invalid_argument);

  ScalingSeries bad;
  bad.points = {{2, 0.5}, {4, 0.0}, {6, 0.1}};
  EXPECT_THROW(fit_exponential(bad), std::invalid_argument);

  ScalingSeries repeated;
  repeated.points = {{3, 0.5}, {3, 0.4}, {3, 0.3}};
  EXPECT_THROW(fit_exponential(repeated), std::invalid_argument);

  EXPECT_THROW(detail::least_squares_line({1.0, 1.0, 1.0}, {0.0, 1.0, 2.0}),
               std::invalid_argument);
}

TEST(ModelSelection, DiscriminatesClosureLaws) {
  auto exp_sel = select_scaling_model(synth_exponential(2.0, 0.5, {4, 8, 12, 16, 20}));
  EXPECT_EQ(exp_sel.preferred, "exponential");
  EXPECT_FALSE(exp_sel.degenerate);
  EXPECT_GT(exp_sel.exponential.r_squared, exp_sel.powerlaw.r_squared);

  auto pow_sel = select_scaling_model(synth_powerlaw(2.0, 2.0, {4, 8, 12, 16, 20}));
  EXPECT_EQ(pow_sel.preferred, "powerlaw");
  EXPECT_FALSE(pow_sel.degenerate);

  ScalingSeries three;
  three.points = {{2, 0.5}, {4, 0.25}, {6, 0.125}};
  EXPECT_THROW(select_scaling_model(three), std::invalid_argument);
}

TEST(ModelSelection, ConstantSeriesIsDegenerate) {
  ScalingSeries s;
  for (int n : {2, 4, 6, 8}) s.points.push_back({n, 0.5});
  auto sel = select_scaling_model(s);
  EXPECT_TRUE(sel.degenerate);
  EXPECT_EQ(sel.exponential.r_squared, 1.0);
  EXPECT_EQ(sel.powerlaw.r_squared, 1.0);
  EXPECT_NEAR(sel.exponential.rate, 0.0, 1e-14);
}

TEST(GapScan, Validation) {
  auto base = make_model(0.5, 1.0, 4, {{BoundarySide::left, DissipatorKind::loss, 0.2}});
  EXPECT_THROW(gap_scan(base, {}), std::invalid_argument);
  EXPECT_THROW(gap_scan(base, {4, 6, 4}), std::invalid_argument);
  EXPECT_THROW(gap_scan(base, {0, 2}), std::invalid_argument);
}

TEST(GapScan, SortsUnorderedInput) {
  auto base = make_model(0.5, 1.0, 4, {{BoundarySide::left, DissipatorKind::loss, 0.2}});
  auto s = gap_scan(base, {8, 4, 6});
  ASSERT_EQ(s.points.size(), 3u);
  EXPECT_EQ(s.points[0].n_cells, 4);
  EXPECT_EQ(s.points[1].n_cells, 6);
  EXPECT_EQ(s.points[2].n_cells, 8);
  for (const auto& p : s.points) EXPECT_GT(p.gap, 0.0);
}

TEST(GapScan, FloorExcludesUnresolvableGaps) {
  auto base = make_model(0.5, 1.0, 4, {{BoundarySide::left, DissipatorKind::loss, 0.2}});
  auto s = gap_scan(base, {18, 20, 22});
  ASSERT_EQ(s.points.size(), 2u);
  ASSERT_EQ(s.excluded.size(), 1u);
  EXPECT_EQ(s.excluded[0].n_cells, 22);
  EXPECT_LE(s.excluded[0].gap, ScalingSeries::kGapFloor);

  auto filtered = filter_series(s, 19, 22);
  ASSERT_EQ(filtered.points.size(), 1u);
  EXPECT_EQ(filtered.points[0].n_cells, 20);
  EXPECT_EQ(filtered.excluded.size(), 1u);
}

TEST(GapScan, ThreadedMatchesSerial) {
  auto base = make_model(0.5, 1.0, 4, {{BoundarySide::left, DissipatorKind::loss, 0.2}});
  auto serial = gap_scan(base, {4, 6, 8, 10});
  auto threaded = gap_scan(base, {4, 6, 8, 10}, GapScanOptions{3});
  ASSERT_EQ(serial.points.size(), threaded.points.size());
  for (std::size_t k = 0; k < serial.points.size(); ++k) {
    EXPECT_EQ(serial.points[k].n_cells, threaded.points[k].n_cells);
    EXPECT_EQ(serial.points[k].gap, threaded.points[k].gap);
  }
}

// Weak boundary dissipation closes the gap as a exp(-b N) with
// b = 2 ln(t2 / t1).  The fit window must sit beyond the length where the
// edge branch undercuts the slowest bulk mode; that crossover moves to
// larger N as t1 approaches t2, hence the staggered windows.
TEST(GapScan, WeakCouplingClosureRate) {
  struct Probe {
    double t1;
    std::vector<int> ns;
  };
  for (const Probe& pr : {Probe{0.3, {4, 6, 8, 10}}, Probe{0.5, {6, 8, 10, 12, 14}},
                          Probe{0.7, {18, 20, 22, 24, 26, 28}}}) {
    auto base = make_model(pr.t1, 1.0, 4,
                           {{BoundarySide::left, DissipatorKind::loss, 0.2}});
    auto f = fit_exponential(gap_scan(base, pr.ns));
    const double want = 2.0 * std::log(1.0 / pr.t1);
    EXPECT_NEAR(f.rate, want, 0.02 * want) << "t1=" << pr.t1;
    EXPECT_GT(f.r_squared, 0.999) << "t1=" << pr.t1;
  }
}

}  // namespace
