#pragma once

// Finite-size scaling of the relaxation gap: scan the gap over chain lengths
// and discriminate exponential closure, gap ~ a exp(-b N), from algebraic
// closure, gap ~ a N^-b, by least squares in log space.

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <string>
#include <vector>

#include "sshlind/model.hpp"
#include "sshlind/thirdq.hpp"

namespace sshlind {

struct ScalingPoint {
  int n_cells = 0;
  double gap = 0.0;
};

struct ScalingSeries {
  std::vector<ScalingPoint> points;   // gap above the numerical floor
  std::vector<ScalingPoint> excluded; // gap at or below the floor, unusable in logs
  static constexpr double kGapFloor = 1e-12;
};

struct GapScanOptions {
  int threads = 1;
};

/// Relaxation gap of `base` rescaled to each chain length in `n_list`.
inline ScalingSeries gap_scan(const OpenChainModel& base, const std::vector<int>& n_list,
                              const GapScanOptions& opt = {}) {
  require_valid(base);
  if (n_list.empty()) throw std::invalid_argument("gap_scan: empty n_list");
  std::vector<int> ns = n_list;
  std::sort(ns.begin(), ns.end());
  if (std::adjacent_find(ns.begin(), ns.end()) != ns.end())
    throw std::invalid_argument("gap_scan: duplicate n_cells in n_list");
  if (ns.front() < 1) throw std::invalid_argument("gap_scan: n_cells < 1 in n_list");
  const int threads = std::max(1, opt.threads);
  std::vector<double> gaps(ns.size());
  std::size_t next = 0;
  while (next < ns.size()) {
    std::vector<std::future<double>> batch;
    for (int t = 0; t < threads && next < ns.size(); ++t, ++next) {
      OpenChainModel m = base.with_cells(ns[next]);
      batch.push_back(std::async(std::launch::async,
                                 [m]() { return liouvillian_gap(m); }));
    }
    for (std::size_t k = 0; k < batch.size(); ++k)
      gaps[next - batch.size() + k] = batch[k].get();
  }
  ScalingSeries s;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    ScalingPoint p{ns[k], gaps[k]};
    (p.gap > ScalingSeries::kGapFloor ? s.points : s.excluded).push_back(p);
  }
  return s;
}

inline ScalingSeries filter_series(const ScalingSeries& s, int n_min, int n_max) {
  ScalingSeries out;
  for (const auto& p : s.points)
    if (p.n_cells >= n_min && p.n_cells <= n_max) out.points.push_back(p);
  for (const auto& p : s.excluded)
    if (p.n_cells >= n_min && p.n_cells <= n_max) out.excluded.push_back(p);
  return out;
}

struct FitResult {
  std::string kind;        // "exponential" or "powerlaw"
  double amplitude = 0.0;  // a
  double rate = 0.0;       // b
  double r_squared = 0.0;  // in the linearized (log) space
  int n_points = 0;
  std::vector<double> residuals;  // log-space, one per usable point
};

namespace detail {

struct LineFit {
  double slope = 0.0, intercept = 0.0, r_squared = 0.0;
};

inline LineFit least_squares_line(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) sx += x[k], sy += y[k];
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("least_squares_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    double r = y[k] - (f.intercept + f.slope * x[k]);
    ss_res += r * r;
    ss_tot += (y[k] - my) * (y[k] - my);
  }
  f.r_squared = ss_tot < 1e-300 ? (ss_res < 1e-300 ? 1.0 : 0.0) : 1.0 - ss_res / ss_tot;
  return f;
}

inline void check_fit_input(const ScalingSeries& s, const char* who) {
  if (s.points.size() < 3)
    throw std::invalid_argument(std::string(who) + ": need at least 3 usable points, got " +
                                std::to_string(s.points.size()));
  for (const auto& p : s.points)
    if (!(p.gap > 0.0) || !std::isfinite(p.gap))
      throw std::invalid_argument(std::string(who) + ": gaps must be finite and positive");
}

}  // namespace detail

/// Fit gap(N) = a exp(-b N) by regressing ln gap on N.
inline FitResult fit_exponential(const ScalingSeries& s) {
  detail::check_fit_input(s, "fit_exponential");
  std::vector<double> x, y;
  for (const auto& p : s.points) {
    x.push_back(static_cast<double>(p.n_cells));
    y.push_back(std::log(p.gap));
  }
  auto line = detail::least_squares_line(x, y);
  FitResult f{"exponential", std::exp(line.intercept), -line.slope,
              line.r_squared, static_cast<int>(s.points.size()), {}};
  for (std::size_t k = 0; k < x.size(); ++k)
    f.residuals.push_back(y[k] - (line.intercept + line.slope * x[k]));
  return f;
}

/// Fit gap(N) = a N^-b by regressing ln gap on ln N.
inline FitResult fit_powerlaw(const ScalingSeries& s) {
  detail::check_fit_input(s, "fit_powerlaw");
  std::vector<double> x, y;
  for (const auto& p : s.points) {
    x.push_back(std::log(static_cast<double>(p.n_cells)));
    y.push_back(std::log(p.gap));
  }
  auto line = detail::least_squares_line(x, y);
  FitResult f{"powerlaw", std::exp(line.intercept), -line.slope,
              line.r_squared, static_cast<int>(s.points.size()), {}};
  for (std::size_t k = 0; k < x.size(); ++k)
    f.residuals.push_back(y[k] - (line.intercept + line.slope * x[k]));
  return f;
}

struct ModelSelection {
  FitResult exponential;
  FitResult powerlaw;
  std::string preferred;  // kind with the larger r-squared
  bool degenerate = false;  // r-squared too close to call
};

inline ModelSelection select_scaling_model(const ScalingSeries& s) {
  if (s.points.size() < 4)
    throw std::invalid_argument(
        "select_scaling_model: need at least 4 usable points to discriminate");
  ModelSelection sel;
  sel.exponential = fit_exponential(s);
  sel.powerlaw = fit_powerlaw(s);
  sel.degenerate = std::abs(sel.exponential.r_squared - sel.powerlaw.r_squared) < 1e-12;
  sel.preferred = sel.exponential.r_squared >= sel.powerlaw.r_squared
                      ? sel.exponential.kind
                      : sel.powerlaw.kind;
  return sel;
}

}  // namespace sshlind
