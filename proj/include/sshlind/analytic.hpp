#pragma once

// Closed-form results for the boundary-dissipated open chain: complex-momentum
// dispersion, the finite-size quantization residual, and dark / boundary
// bound-state predictions for a single dissipated boundary.
//
// A rapidity E maps to a complex momentum theta through the bulk dispersion
//     E = +- sqrt(t1^2 + t2^2 + 2 t1 t2 cos(theta)),
// and admissible theta solve
//     p1 sin(N theta) - p2 sin((N+1) theta) + p3 sin((N-1) theta) = 0,
//     p1 = i t2 (gl + gr) E - (t2^3 - t2 gl gr),  p2 = t1 t2^2,  p3 = t1 gl gr.
// The residual below evaluates the left-hand side with every term rescaled by
// exp(-N |Im theta|) so strongly bound states (large |Im theta|) stay inside
// floating-point range, and reports it relative to the largest term.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "sshlind/model.hpp"

namespace sshlind {

struct ThetaPoint {
  cplx theta;       // Re(theta) normalized to [0, 2*pi)
  int branch = +1;  // sign of the dispersion square root
};

inline cplx bulk_energy(cplx theta, double t1, double t2, int branch = +1) {
  cplx e2 = t1 * t1 + t2 * t2 + 2.0 * t1 * t2 * std::cos(theta);
  return static_cast<double>(branch) * std::sqrt(e2);
}

inline cplx bulk_energy(const ThetaPoint& p, double t1, double t2) {
  return bulk_energy(p.theta, t1, t2, p.branch);
}

namespace detail {

// sin(k * theta) * exp(-s), stable for large |Im theta|.
inline cplx scaled_sin(double k, cplx theta, double s) {
  const double a = k * theta.real();
  const double b = k * theta.imag();
  const double ep = std::exp(b - s);
  const double em = std::exp(-b - s);
  return {std::sin(a) * (ep + em) / 2.0, std::cos(a) * (ep - em) / 2.0};
}

}  // namespace detail

/// Quantization residual at a theta point, relative to the largest of the
/// three terms.  Zero (to numerical precision) exactly on admissible momenta.
inline cplx theta_residual(const ThetaPoint& p, double t1, double t2,
                           double gamma_l, double gamma_r, int n_cells) {
  const cplx e = bulk_energy(p, t1, t2);
  const cplx p1 = kI * t2 * (gamma_l + gamma_r) * e -
                  (t2 * t2 * t2 - t2 * gamma_l * gamma_r);
  const double p2 = t1 * t2 * t2;
  const double p3 = t1 * gamma_l * gamma_r;
  const double s = n_cells * std::abs(p.theta.imag());
  const cplx term1 = p1 * detail::scaled_sin(n_cells, p.theta, s);
  const cplx term2 = p2 * detail::scaled_sin(n_cells + 1, p.theta, s);
  const cplx term3 = p3 * detail::scaled_sin(n_cells - 1, p.theta, s);
  double denom = std::max({std::abs(term1), std::abs(term2), std::abs(term3), 1e-300});
  return (term1 - term2 + term3) / denom;
}

namespace detail {

inline cplx normalize_theta(cplx theta) {
  constexpr double two_pi = 2.0 * M_PI;
  double re = std::fmod(theta.real(), two_pi);
  if (re < 0) re += two_pi;
  return {re, theta.imag()};
}

inline int branch_for(cplx theta, cplx e, double t1, double t2) {
  return std::abs(bulk_energy(theta, t1, t2, +1) - e) <=
                 std::abs(bulk_energy(theta, t1, t2, -1) - e)
             ? +1
             : -1;
}

}  // namespace detail

/// Invert the dispersion: theta = arccos((E^2 - t1^2 - t2^2) / (2 t1 t2)),
/// principal branch, with the square-root sign chosen to reproduce E.
inline ThetaPoint energy_to_theta(cplx e, double t1, double t2) {
  if (t1 == 0.0 || t2 == 0.0)
    throw std::invalid_argument("energy_to_theta: needs t1, t2 != 0");
  cplx z = (e * e - t1 * t1 - t2 * t2) / (2.0 * t1 * t2);
  cplx theta = detail::normalize_theta(std::acos(z));
  return ThetaPoint{theta, detail::branch_for(theta, e, t1, t2)};
}

/// As above, but the branch is picked from {theta, 2pi-theta, conj(theta),
/// 2pi-conj(theta)} by smallest quantization residual among candidates that
/// reproduce E.
inline ThetaPoint energy_to_theta(cplx e, double t1, double t2, double gamma_l,
                                  double gamma_r, int n_cells) {
  ThetaPoint base = energy_to_theta(e, t1, t2);
  constexpr double two_pi = 2.0 * M_PI;
  const cplx t0 = base.theta;
  const cplx candidates[4] = {t0, two_pi - t0, std::conj(t0),
                              two_pi - std::conj(t0)};
  ThetaPoint best = base;
  double best_res = std::numeric_limits<double>::infinity();
  const double e_scale = std::max(1.0, std::abs(e));
  for (const cplx& c : candidates) {
    ThetaPoint p{detail::normalize_theta(c), 0};
    p.branch = detail::branch_for(p.theta, e, t1, t2);
    if (std::abs(bulk_energy(p, t1, t2) - e) > 1e-8 * e_scale) continue;
    double r = std::abs(theta_residual(p, t1, t2, gamma_l, gamma_r, n_cells));
    if (r < best_res) {
      best_res = r;
      best = p;
    }
  }
  return best;
}

enum class StateKind { dark, bound };

struct BoundStatePrediction {
  bool exists = false;
  double x = 0.0;                     // localization factor e^{Im theta}, > 1
  cplx energy = 0.0;
  StateKind kind = StateKind::bound;
  BoundarySide localized_side = BoundarySide::right;
  double cell_decay_ratio = 0.0;      // amplitude ratio per cell toward the bulk
  bool gamma_independent = false;
  bool marginal = false;              // t1 at the phase boundary
};

/// Dark state of a chain dissipated on one boundary only.  Exists for
/// 0 < t1 <= t2, carries exactly zero rapidity independently of the
/// dissipation strength, and is localized at the opposite boundary with
/// amplitude decaying by t1/t2 per unit cell toward the bulk.
inline BoundStatePrediction dark_state_prediction(double t1, double t2,
                                                  double gamma,
                                                  BoundarySide dissipated_side) {
  if (!(t2 > 0.0) || !(t1 >= 0.0) || !(gamma >= 0.0))
    throw std::invalid_argument("dark_state_prediction: bad parameters");
  BoundStatePrediction p;
  p.kind = StateKind::dark;
  p.localized_side = opposite(dissipated_side);
  p.marginal = std::abs(t1 - t2) <= 1e-9 * t2;
  if (!(t1 > 0.0) || t1 > t2) return p;
  p.exists = true;
  p.x = t2 / t1;  // theta = pi + i ln(x)
  p.energy = 0.0;
  p.cell_decay_ratio = t1 / t2;
  p.gamma_independent = true;
  return p;
}

inline BoundStatePrediction dark_state_prediction(const OpenChainModel& m) {
  require_valid(m);
  const double gl = m.gamma(BoundarySide::left);
  const double gr = m.gamma(BoundarySide::right);
  if (gl > 0.0 && gr > 0.0)
    throw std::invalid_argument(
        "dark_state_prediction: requires a single dissipated boundary");
  if (gl == 0.0 && gr == 0.0)
    throw std::invalid_argument("dark_state_prediction: no dissipated boundary");
  BoundarySide side = gl > 0.0 ? BoundarySide::left : BoundarySide::right;
  return dark_state_prediction(m.t1, m.t2, std::max(gl, gr), side);
}

/// Dissipation-induced boundary bound states for a single dissipated
/// boundary, from the purely evanescent branch theta = pi + i ln(x):
///   x+- = (1 + g^2 +- sqrt(1 + g^4 + g^2 (2 - 4 u^2))) / (2 u),
/// in units of t2 (u = t1/t2, g = gamma/t2).  Only normalizable solutions
/// (real x > 1) are returned; in the nontrivial region that is x+.
inline std::vector<BoundStatePrediction> boundary_bound_state_prediction(
    double t1, double t2, double gamma) {
  if (!(t2 > 0.0) || !(t1 > 0.0) || !(gamma >= 0.0))
    throw std::invalid_argument("boundary_bound_state_prediction: bad parameters");
  const double u = t1 / t2;
  const double g = gamma / t2;
  std::vector<BoundStatePrediction> out;
  const double disc = 1.0 + g * g * g * g + g * g * (2.0 - 4.0 * u * u);
  if (disc < 0.0) return out;  // solutions leave the evanescent branch
  const double root = std::sqrt(disc);
  for (double x : {(1.0 + g * g + root) / (2.0 * u),
                   (1.0 + g * g - root) / (2.0 * u)}) {
    if (!(x > 1.0 + 1e-12)) continue;
    BoundStatePrediction p;
    p.exists = true;
    p.kind = StateKind::bound;
    p.x = x;
    cplx e2 = t2 * t2 * (1.0 + u * u - u * (x + 1.0 / x));
    cplx e = std::sqrt(e2);
    if (e.imag() < 0.0) e = -e;
    p.energy = e;
    p.cell_decay_ratio = 1.0 / x;
    out.push_back(p);
  }
  return out;
}

}  // namespace sshlind
