#pragma once

// Gaussian relaxation dynamics of the dissipative chain in the unit Majorana
// basis: correlation matrix Gamma_jk = i<b_j b_k> - (i/2) delta_jk (real,
// antisymmetric, 4N x 4N), with
//     d Gamma / dt = Xb Gamma + Gamma Xb^T + Yb,
//     Xb = -2i Hb - 2 Re(M),   Yb = 2 Im(M).
//
// Xb is similar to diag(iP, iP') through a fixed unitary, with P the reduced
// matrix of thirdq.hpp and P' its sign-flipped twin (same spectrum).  The
// propagator is therefore assembled from the 2N-dimensional eigenproblem of P
// instead of the doubled 4N one, which keeps the eigenbasis well conditioned
// despite every Xb eigenvalue being twice degenerate.  Time evolution uses
// variation of constants in that eigenbasis,
//     Gamma'(t) = exp((r_j+r_k) t) o Gamma0' + t phi((r_j+r_k) t) o Yb',
// phi(z) = (e^z - 1)/z, which stays well defined when eigenvalue pair sums
// underflow (near-dark regimes) where an explicit steady-state subtraction
// would not.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "sshlind/model.hpp"
#include "sshlind/thirdq.hpp"

namespace sshlind {

struct CorrelationMatrix {
  Eigen::MatrixXd gamma;  // 4N x 4N real antisymmetric
  double time = 0.0;
};

struct DynamicsMatrices {
  Eigen::MatrixXd x_bar;  // 4N x 4N real, strictly stable when dissipation is on
  Eigen::MatrixXd y_bar;  // 4N x 4N real antisymmetric
};

inline DynamicsMatrices build_dynamics_matrices(const OpenChainModel& m) {
  require_valid(m);
  const int nm = m.majorana_modes();
  Eigen::MatrixXd xb = Eigen::MatrixXd::Zero(nm, nm);
  Eigen::MatrixXd site = site_hopping_matrix(m);
  const int ns = m.sites();
  for (int r = 0; r < ns; ++r) {
    for (int c = r + 1; c < ns; ++c) {
      double t = site(r, c);
      if (t == 0.0) continue;
      xb(2 * r, 2 * c + 1) += t;
      xb(2 * c + 1, 2 * r) += -t;
      xb(2 * r + 1, 2 * c) += -t;
      xb(2 * c, 2 * r + 1) += t;
    }
  }
  BathMatrix bath = build_bath_matrix(m);
  xb -= 2.0 * bath.m_r;
  return DynamicsMatrices{std::move(xb), 2.0 * bath.m_i};
}

namespace detail {

// (e^z - 1) / z with a series switch near zero.
inline cplx phi1(cplx z) {
  if (std::abs(z) < 1e-6) return 1.0 + z / 2.0 + z * z / 6.0;
  return (std::exp(z) - 1.0) / z;
}

}  // namespace detail

/// Shared eigenbasis for propagation and steady-state solves.
class EvolutionPlan {
 public:
  explicit EvolutionPlan(const OpenChainModel& model) : model_(model) {
    DynamicsMatrices dm = build_dynamics_matrices(model);
    x_bar_ = std::move(dm.x_bar);
    y_bar_ = std::move(dm.y_bar);
    build_structured_basis(model);
    if (!usable_) build_direct_basis();
    if (usable_) y_prime_ = v_inv_ * y_bar_.cast<cplx>() * v_inv_.transpose();
  }

  const Eigen::MatrixXd& x_bar() const { return x_bar_; }
  const Eigen::MatrixXd& y_bar() const { return y_bar_; }
  const Eigen::VectorXcd& rates() const { return rates_; }
  bool usable() const { return usable_; }
  double basis_residual() const { return basis_residual_; }

  Eigen::MatrixXd propagate(const Eigen::MatrixXd& gamma0, double t) const {
    if (!usable_)
      throw SolverError("EvolutionPlan: eigenbasis unusable, residual " +
                        std::to_string(basis_residual_));
    const int nm = static_cast<int>(x_bar_.rows());
    Eigen::MatrixXcd g0p = v_inv_ * gamma0.cast<cplx>() * v_inv_.transpose();
    Eigen::MatrixXcd gp(nm, nm);
    for (int j = 0; j < nm; ++j)
      for (int k = 0; k < nm; ++k) {
        cplx z = (rates_(j) + rates_(k)) * t;
        gp(j, k) = std::exp(z) * g0p(j, k) + t * detail::phi1(z) * y_prime_(j, k);
      }
    Eigen::MatrixXd g = (v_ * gp * v_.transpose()).real();
    return 0.5 * (g - g.transpose().eval());
  }

  /// Occupation pair entries Gamma(2s, 2s+1) for every requested time without
  /// forming the full matrices: one ns x nm product per time step instead of
  /// three nm x nm ones.  Row k of the result is the profile at times[k].
  Eigen::MatrixXd pair_trajectory(const Eigen::MatrixXd& gamma0,
                                  const std::vector<double>& times) const {
    if (!usable_)
      throw SolverError("EvolutionPlan: eigenbasis unusable, residual " +
                        std::to_string(basis_residual_));
    const int nm = static_cast<int>(x_bar_.rows());
    const int ns = nm / 2;
    Eigen::MatrixXcd g0p = v_inv_ * gamma0.cast<cplx>() * v_inv_.transpose();
    Eigen::MatrixXcd v_even(ns, nm), v_odd(ns, nm);
    for (int s = 0; s < ns; ++s) {
      v_even.row(s) = v_.row(2 * s);
      v_odd.row(s) = v_.row(2 * s + 1);
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(times.size()), ns);
    Eigen::MatrixXcd m(nm, nm);
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      const double t = times[ti];
      for (int j = 0; j < nm; ++j)
        for (int k = 0; k < nm; ++k) {
          cplx z = (rates_(j) + rates_(k)) * t;
          m(j, k) = std::exp(z) * g0p(j, k) + t * detail::phi1(z) * y_prime_(j, k);
        }
      Eigen::MatrixXcd a = v_even * m;
      for (int s = 0; s < ns; ++s)
        out(static_cast<Eigen::Index>(ti), s) =
            a.row(s).cwiseProduct(v_odd.row(s)).sum().real();
    }
    return out;
  }

  /// Steady solution of Xb G + G Xb^T + Yb = 0 in the eigenbasis; entries with
  /// |r_j + r_k| at the numerical floor are zeroed and reported.
  Eigen::MatrixXd steady(double* min_pair = nullptr, bool* gated = nullptr) const {
    if (!usable_)
      throw SolverError("EvolutionPlan: eigenbasis unusable for steady state");
    const int nm = static_cast<int>(x_bar_.rows());
    double scale = 0.0;
    for (int j = 0; j < nm; ++j) scale = std::max(scale, std::abs(rates_(j)));
    const double floor_ = 1e-14 * std::max(scale, 1.0);
    double mp = std::numeric_limits<double>::infinity();
    bool any_gated = false;
    Eigen::MatrixXcd gp(nm, nm);
    for (int j = 0; j < nm; ++j)
      for (int k = 0; k < nm; ++k) {
        cplx z = rates_(j) + rates_(k);
        mp = std::min(mp, std::abs(z));
        if (std::abs(z) <= floor_) {
          gp(j, k) = 0.0;
          any_gated = true;
        } else {
          gp(j, k) = -y_prime_(j, k) / z;
        }
      }
    if (min_pair) *min_pair = mp;
    if (gated) *gated = any_gated;
    Eigen::MatrixXd g = (v_ * gp * v_.transpose()).real();
    return 0.5 * (g - g.transpose().eval());
  }

 private:
  void build_structured_basis(const OpenChainModel& model) {
    ReducedMatrix rm = build_reduced_matrix(model);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(rm.p);
    if (solver.info() != Eigen::Success) return;
    const int ns = model.sites();
    const int nm = 2 * ns;
    const Eigen::MatrixXcd& u = solver.eigenvectors();
    Eigen::MatrixXcd u_inv = u.inverse();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    v_.setZero(nm, nm);
    v_inv_.setZero(nm, nm);
    rates_.resize(nm);
    for (int k = 0; k < ns; ++k) {
      const double sig = (k % 2 == 0) ? 1.0 : -1.0;
      for (int j = 0; j < ns; ++j) {
        // V = conj(S) blockdiag(U, sigma U)
        v_(2 * k, j) = inv_sqrt2 * u(k, j);
        v_(2 * k + 1, j) = kI * inv_sqrt2 * u(k, j);
        v_(2 * k, ns + j) = inv_sqrt2 * sig * u(k, j);
        v_(2 * k + 1, ns + j) = -kI * inv_sqrt2 * sig * u(k, j);
        // V^-1 = blockdiag(U^-1, U^-1 sigma) S^T
        v_inv_(j, 2 * k) = inv_sqrt2 * u_inv(j, k);
        v_inv_(j, 2 * k + 1) = -kI * inv_sqrt2 * u_inv(j, k);
        v_inv_(ns + j, 2 * k) = inv_sqrt2 * u_inv(j, k) * sig;
        v_inv_(ns + j, 2 * k + 1) = kI * inv_sqrt2 * u_inv(j, k) * sig;
      }
    }
    for (int j = 0; j < ns; ++j) {
      rates_(j) = kI * solver.eigenvalues()(j);
      rates_(ns + j) = kI * solver.eigenvalues()(j);
    }
    check_basis();
  }

  void build_direct_basis() {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(x_bar_);
    if (solver.info() != Eigen::Success) return;
    v_ = solver.eigenvectors();
    rates_ = solver.eigenvalues();
    v_inv_ = v_.inverse();
    check_basis();
  }

  void check_basis() {
    double scale = std::max(1.0, x_bar_.cwiseAbs().maxCoeff());
    Eigen::MatrixXcd lhs = x_bar_.cast<cplx>() * v_;
    for (int j = 0; j < v_.cols(); ++j) lhs.col(j) -= rates_(j) * v_.col(j);
    double eig_res = lhs.cwiseAbs().maxCoeff() / scale;
    double inv_res =
        (v_ * v_inv_ - Eigen::MatrixXcd::Identity(v_.rows(), v_.cols()))
            .cwiseAbs()
            .maxCoeff();
    basis_residual_ = std::max(eig_res, inv_res);
    usable_ = basis_residual_ < 1e-8;
  }

  OpenChainModel model_;
  Eigen::MatrixXd x_bar_, y_bar_;
  Eigen::MatrixXcd v_, v_inv_, y_prime_;
  Eigen::VectorXcd rates_;
  double basis_residual_ = std::numeric_limits<double>::infinity();
  bool usable_ = false;
};

/// Correlation matrix of |1...1><1...1| (every site occupied).
inline CorrelationMatrix initial_fully_occupied(int n_cells) {
  if (n_cells < 1) throw std::invalid_argument("initial_fully_occupied: n_cells < 1");
  const int nm = 4 * n_cells;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(nm, nm);
  for (int s = 0; s < 2 * n_cells; ++s) {
    g(2 * s, 2 * s + 1) = 0.5;
    g(2 * s + 1, 2 * s) = -0.5;
  }
  return CorrelationMatrix{std::move(g), 0.0};
}

/// Chain-averaged particle density of a correlation matrix.
inline double density(const CorrelationMatrix& c) {
  const int ns = static_cast<int>(c.gamma.rows()) / 2;
  double acc = 0.0;
  for (int s = 0; s < ns; ++s) acc += c.gamma(2 * s, 2 * s + 1);
  return 0.5 + acc / ns;
}

/// Per-site densities n_s = 1/2 + Gamma(2s, 2s+1).
inline Eigen::VectorXd site_density_profile(const CorrelationMatrix& c) {
  const int ns = static_cast<int>(c.gamma.rows()) / 2;
  Eigen::VectorXd n(ns);
  for (int s = 0; s < ns; ++s) n(s) = 0.5 + c.gamma(2 * s, 2 * s + 1);
  return n;
}

struct SteadyStateResult {
  CorrelationMatrix state;
  double residual = 0.0;       // max-norm of Xb G + G Xb^T + Yb
  double min_mode_pair = 0.0;  // smallest |r_j + r_k| encountered
  bool ill_conditioned = false;
  bool used_dense_fallback = false;
};

namespace detail {

inline double lyapunov_residual(const Eigen::MatrixXd& xb, const Eigen::MatrixXd& yb,
                                const Eigen::MatrixXd& g) {
  return (xb * g + g * xb.transpose() + yb).cwiseAbs().maxCoeff();
}

// Dense Kronecker solve of Xb G + G Xb^T = -Yb (column-major vectorization).
inline Eigen::MatrixXd lyapunov_dense(const Eigen::MatrixXd& xb,
                                      const Eigen::MatrixXd& yb) {
  const int n = static_cast<int>(xb.rows());
  if (n > 80)
    throw SolverError("lyapunov_dense: dimension " + std::to_string(n) +
                      " exceeds the dense-solver cap of 80 Majorana modes");
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        big(j * n + i, j * n + k) += xb(i, k);       // (I (x) Xb)
        big(j * n + i, k * n + i) += xb(j, k);       // (Xb (x) I)
      }
  Eigen::VectorXd rhs(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) rhs(j * n + i) = -yb(i, j);
  Eigen::VectorXd sol = big.partialPivLu().solve(rhs);
  Eigen::MatrixXd g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = sol(j * n + i);
  return 0.5 * (g - g.transpose().eval());
}

}  // namespace detail

/// Unique steady state for a dissipated chain.  Reports conditioning
/// diagnostics instead of returning silent garbage when eigenvalue pair sums
/// hit the numerical floor (exponentially small gap).
inline SteadyStateResult steady_state(const OpenChainModel& model) {
  require_valid(model);
  if (model.gamma(BoundarySide::left) == 0.0 &&
      model.gamma(BoundarySide::right) == 0.0)
    throw std::invalid_argument(
        "steady_state: model has no dissipation, relaxation matrix is not "
        "strictly stable");
  EvolutionPlan plan(model);
  SteadyStateResult r;
  if (plan.usable()) {
    double min_pair = 0.0;
    bool gated = false;
    r.state.gamma = plan.steady(&min_pair, &gated);
    r.min_mode_pair = min_pair;
    r.ill_conditioned = gated;
    r.residual = detail::lyapunov_residual(plan.x_bar(), plan.y_bar(), r.state.gamma);
  } else {
    r.ill_conditioned = true;
    r.residual = std::numeric_limits<double>::infinity();
  }
  if (!(r.residual < 1e-10) && model.majorana_modes() <= 80) {
    DynamicsMatrices dm = build_dynamics_matrices(model);
    r.state.gamma = detail::lyapunov_dense(dm.x_bar, dm.y_bar);
    r.residual = detail::lyapunov_residual(dm.x_bar, dm.y_bar, r.state.gamma);
    r.used_dense_fallback = true;
  }
  r.state.time = std::numeric_limits<double>::infinity();
  return r;
}

/// Propagate a correlation matrix to each requested time (t >= 0, ascending
/// recommended).  t = 0 returns the initial matrix bitwise.  Falls back to
/// scaling-and-squaring exponentials when the eigenbasis is unusable.
inline std::vector<CorrelationMatrix> evolve(const CorrelationMatrix& gamma0,
                                             const OpenChainModel& model,
                                             const std::vector<double>& times) {
  require_valid(model);
  if (gamma0.gamma.rows() != model.majorana_modes())
    throw std::invalid_argument("evolve: correlation matrix size mismatch");
  for (double t : times)
    if (!(t >= 0.0) || !std::isfinite(t))
      throw std::invalid_argument("evolve: times must be finite and >= 0");
  EvolutionPlan plan(model);
  std::vector<CorrelationMatrix> out;
  out.reserve(times.size());
  if (plan.usable()) {
    for (double t : times) {
      if (t == 0.0) {
        out.push_back({gamma0.gamma, 0.0});
        continue;
      }
      out.push_back({plan.propagate(gamma0.gamma, t), t});
    }
    return out;
  }
  // eigenbasis rejected: exponential propagation against an explicit steady state
  DynamicsMatrices dm = build_dynamics_matrices(model);
  Eigen::MatrixXd gs = detail::lyapunov_dense(dm.x_bar, dm.y_bar);
  for (double t : times) {
    if (t == 0.0) {
      out.push_back({gamma0.gamma, 0.0});
      continue;
    }
    Eigen::MatrixXd prop = (dm.x_bar * t).exp();
    Eigen::MatrixXd g = prop * (gamma0.gamma - gs) * prop.transpose() + gs;
    out.push_back({0.5 * (g - g.transpose().eval()), t});
  }
  return out;
}

/// Logarithmically spaced time grid, endpoints included.
inline std::vector<double> log_time_grid(double t_min, double t_max, int points) {
  if (!(t_min > 0.0) || !(t_max > t_min) || points < 2)
    throw std::invalid_argument("log_time_grid: bad grid parameters");
  std::vector<double> t(points);
  const double l0 = std::log(t_min), l1 = std::log(t_max);
  for (int k = 0; k < points; ++k)
    t[k] = std::exp(l0 + (l1 - l0) * k / (points - 1));
  return t;
}

inline std::vector<double> linear_time_grid(double t_min, double t_max, int points) {
  if (!(t_max >= t_min) || points < 1)
    throw std::invalid_argument("linear_time_grid: bad grid parameters");
  std::vector<double> t(points);
  for (int k = 0; k < points; ++k)
    t[k] = points == 1 ? t_min : t_min + (t_max - t_min) * k / (points - 1);
  return t;
}

struct DensityTrajectory {
  std::vector<double> times;
  std::vector<double> density;  // chain average per time
  Eigen::MatrixXd profiles;     // row per time, column per site
};

/// Per-site and chain-averaged densities along the evolution.  Uses the
/// reduced pair extraction when the eigenbasis is usable, full propagation
/// otherwise.
inline DensityTrajectory density_trajectory(const CorrelationMatrix& gamma0,
                                            const OpenChainModel& model,
                                            const std::vector<double>& times) {
  require_valid(model);
  if (gamma0.gamma.rows() != model.majorana_modes())
    throw std::invalid_argument("density_trajectory: correlation matrix size mismatch");
  for (double t : times)
    if (!(t >= 0.0) || !std::isfinite(t))
      throw std::invalid_argument("density_trajectory: times must be finite and >= 0");
  DensityTrajectory out;
  out.times = times;
  EvolutionPlan plan(model);
  if (plan.usable()) {
    out.profiles = plan.pair_trajectory(gamma0.gamma, times).array() + 0.5;
  } else {
    std::vector<CorrelationMatrix> states = evolve(gamma0, model, times);
    const int ns = model.sites();
    out.profiles.resize(static_cast<Eigen::Index>(times.size()), ns);
    for (std::size_t k = 0; k < times.size(); ++k)
      out.profiles.row(static_cast<Eigen::Index>(k)) =
          site_density_profile(states[k]).transpose();
  }
  for (Eigen::Index k = 0; k < out.profiles.rows(); ++k)
    out.density.push_back(out.profiles.row(k).mean());
  return out;
}

struct DualityReport {
  std::vector<double> times;
  std::vector<double> density_direct;      // strengths (gl, gr)
  std::vector<double> density_reciprocal;  // strengths (1/gl, 1/gr)
  std::vector<double> abs_diff;
  double max_diff = 0.0;
  double late_time_max_diff = 0.0;  // max over the second half of the grid
};

/// Compare the density relaxation of a model against its strength-reciprocal
/// partner (each nonzero boundary strength g replaced by 1/g), starting from
/// the fully occupied state.
inline DualityReport duality_report(const OpenChainModel& model,
                                    const std::vector<double>& times) {
  require_valid(model);
  OpenChainModel dual = model;
  for (auto& d : dual.dissipators) {
    if (d.strength > 0.0) d.strength = 1.0 / d.strength;
  }
  CorrelationMatrix g0 = initial_fully_occupied(model.n_cells);
  DensityTrajectory a = density_trajectory(g0, model, times);
  DensityTrajectory b = density_trajectory(g0, dual, times);
  DualityReport r;
  r.times = times;
  r.density_direct = a.density;
  r.density_reciprocal = b.density;
  for (std::size_t k = 0; k < times.size(); ++k)
    r.abs_diff.push_back(std::abs(a.density[k] - b.density[k]));
  for (std::size_t k = 0; k < times.size(); ++k) {
    r.max_diff = std::max(r.max_diff, r.abs_diff[k]);
    if (k >= times.size() / 2)
      r.late_time_max_diff = std::max(r.late_time_max_diff, r.abs_diff[k]);
  }
  return r;
}

}  // namespace sshlind
