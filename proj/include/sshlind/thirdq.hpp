#pragma once

// Third-quantized spectral toolkit: shape matrix, reduced matrix, rapidities,
// full Liouvillian spectrum assembly, gap, and stripe decomposition.
//
// The 4N x 4N shape matrix X = -2iH + 2 M_R has eigenvalues alpha_j with
// Re(alpha_j) >= 0; the rapidities E_j = 2 i alpha_j are the eigenvalues of
// the 2N x 2N reduced matrix P(t1, t2, gl, gr), each counted twice.  Every
// Liouvillian eigenvalue is lambda = i sum_j v_j E_j with v_j in {0, 1} over
// the 4N rapidities.  We enumerate over the 2N distinct values with
// v in {0, 1, 2} and combinatorial weight C(2, v) per value.

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sshlind/model.hpp"

namespace sshlind {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeMatrix {
  Eigen::MatrixXcd x;  // 4N x 4N; real-valued for real hoppings
};

inline ShapeMatrix build_shape_matrix(const OpenChainModel& m) {
  MajoranaHamiltonian h = build_majorana_hamiltonian(m);
  BathMatrix bath = build_bath_matrix(m);
  // Re(m) equals twice the doubled-basis M_R (see model.hpp conventions).
  return ShapeMatrix{-2.0 * kI * h.h + bath.m_r.cast<cplx>()};
}

/// 8N x 8N antisymmetric structure matrix of the quadratic Liouvillian in the
/// doubled Majorana basis; kept as a cross-check (its spectrum is
/// {alpha_j} U {-alpha_j}).
inline Eigen::MatrixXcd build_structure_matrix(const OpenChainModel& model) {
  MajoranaHamiltonian mh = build_majorana_hamiltonian(model);
  BathMatrix bath = build_bath_matrix(model);
  const int nm = model.majorana_modes();
  // bridge the stored unit-basis kernel back to the doubled basis
  Eigen::MatrixXcd md(nm, nm);
  for (int r = 0; r < nm; ++r)
    for (int c = 0; c < nm; ++c) md(r, c) = 0.5 * bath.m(r ^ 1, c ^ 1);
  Eigen::MatrixXcd mi = md.imag().cast<cplx>();
  Eigen::MatrixXcd a(2 * nm, 2 * nm);
  a.topLeftCorner(nm, nm) = -2.0 * kI * mh.h + 2.0 * kI * mi;
  a.topRightCorner(nm, nm) = 2.0 * kI * md;
  a.bottomLeftCorner(nm, nm) = -2.0 * kI * md.transpose();
  a.bottomRightCorner(nm, nm) = -2.0 * kI * mh.h - 2.0 * kI * mi;
  return a;
}

/// Complex symmetric tridiagonal reduced matrix: off-diagonals alternate
/// t1, t2, t1, ...; imaginary boundary potentials i*gl and i*gr sit in the
/// first and last diagonal entries.
struct ReducedMatrix {
  Eigen::MatrixXcd p;
  double t1 = 0, t2 = 0, gamma_l = 0, gamma_r = 0;
};

inline ReducedMatrix build_reduced_matrix(double t1, double t2, double gamma_l,
                                          double gamma_r, int n_cells) {
  if (n_cells < 1) throw std::invalid_argument("build_reduced_matrix: n_cells < 1");
  const int ns = 2 * n_cells;
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(ns, ns);
  for (int k = 0; k + 1 < ns; ++k) {
    double t = (k % 2 == 0) ? t1 : t2;
    p(k, k + 1) = t;
    p(k + 1, k) = t;
  }
  p(0, 0) = kI * gamma_l;
  p(ns - 1, ns - 1) = kI * gamma_r;
  return ReducedMatrix{std::move(p), t1, t2, gamma_l, gamma_r};
}

inline ReducedMatrix build_reduced_matrix(const OpenChainModel& m) {
  require_valid(m);
  return build_reduced_matrix(m.t1, m.t2, m.gamma(BoundarySide::left),
                              m.gamma(BoundarySide::right), m.n_cells);
}

struct RapidityEntry {
  cplx value;               // eigenvalue E of P (multiplicity 2 in the full set)
  Eigen::VectorXcd vector;  // unit-norm eigenvector, largest component real positive
  bool bound = false;
  double ipr = 0.0;
  double boundary_weight = 0.0;
};

// A mode counts as boundary-bound when its inverse participation ratio
// exceeds ipr_threshold and its weight inside the two boundary zones exceeds
// boundary_weight_threshold.  The IPR default 0.2 separates modes pinned to a
// few boundary sites (>= ~0.23 even when a degenerate pair hybridizes across
// both ends) from extended ones (<= ~0.17 already at 6 cells, falling off as
// 1/chain length).  Too few cells leave no bulk to distinguish from; the
// defaults are meaningful from about 3 cells up.
struct BoundStateCriteria {
  double ipr_threshold = 0.2;
  double boundary_weight_threshold = 0.5;
  int boundary_sites = 4;  // zone size at each end

  static BoundStateCriteria defaults(int) { return BoundStateCriteria{}; }
};

struct RapiditySpectrum {
  std::vector<RapidityEntry> distinct;  // 2N entries sorted by (Re, Im)
  int n_cells = 0;
  double t1 = 0, t2 = 0, gamma_l = 0, gamma_r = 0;

  /// Full rapidity multiset (4N values, each distinct value twice).
  std::vector<cplx> values() const {
    std::vector<cplx> v;
    v.reserve(2 * distinct.size());
    for (const auto& e : distinct) {
      v.push_back(e.value);
      v.push_back(e.value);
    }
    return v;
  }

  std::vector<const RapidityEntry*> bound_entries() const {
    std::vector<const RapidityEntry*> out;
    for (const auto& e : distinct)
      if (e.bound) out.push_back(&e);
    return out;
  }
};

inline RapiditySpectrum classify_bound_states(RapiditySpectrum spectrum,
                                              const BoundStateCriteria& criteria) {
  const int ns = 2 * spectrum.n_cells;
  const int zone = std::min(criteria.boundary_sites, ns);
  for (auto& e : spectrum.distinct) {
    double ipr = 0.0;
    for (int k = 0; k < ns; ++k) ipr += std::pow(std::norm(e.vector(k)), 2);
    double w = 0.0;
    for (int k = 0; k < ns; ++k)
      if (k < zone || k >= ns - zone) w += std::norm(e.vector(k));
    e.ipr = ipr;
    e.boundary_weight = w;
    e.bound = ipr > criteria.ipr_threshold &&
              w > criteria.boundary_weight_threshold;
  }
  return spectrum;
}

inline RapiditySpectrum classify_bound_states(RapiditySpectrum spectrum) {
  BoundStateCriteria c = BoundStateCriteria::defaults(spectrum.n_cells);
  return classify_bound_states(std::move(spectrum), c);
}

/// Diagonalize the reduced matrix.  Entries come back sorted by (Re, Im),
/// phase-fixed, and classified with the default bound-state criteria.
inline RapiditySpectrum rapidity_spectrum(const OpenChainModel& model) {
  require_valid(model);
  ReducedMatrix rm = build_reduced_matrix(model);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(rm.p);
  if (solver.info() != Eigen::Success)
    throw SolverError("rapidity_spectrum: eigensolver failed for t1=" +
                      std::to_string(rm.t1) + " t2=" + std::to_string(rm.t2) +
                      " gamma_l=" + std::to_string(rm.gamma_l) +
                      " gamma_r=" + std::to_string(rm.gamma_r) +
                      " n_cells=" + std::to_string(model.n_cells));
  RapiditySpectrum s;
  s.n_cells = model.n_cells;
  s.t1 = rm.t1;
  s.t2 = rm.t2;
  s.gamma_l = rm.gamma_l;
  s.gamma_r = rm.gamma_r;
  const int ns = model.sites();
  s.distinct.resize(ns);
  for (int k = 0; k < ns; ++k) {
    RapidityEntry e;
    e.value = solver.eigenvalues()(k);
    e.vector = solver.eigenvectors().col(k);
    e.vector.normalize();
    int imax = 0;
    for (int j = 1; j < ns; ++j)
      if (std::abs(e.vector(j)) > std::abs(e.vector(imax))) imax = j;
    cplx pivot = e.vector(imax);
    if (std::abs(pivot) > 0) e.vector *= std::abs(pivot) / pivot;
    s.distinct[k] = std::move(e);
  }
  std::sort(s.distinct.begin(), s.distinct.end(),
            [](const RapidityEntry& a, const RapidityEntry& b) {
              if (a.value.real() != b.value.real())
                return a.value.real() < b.value.real();
              return a.value.imag() < b.value.imag();
            });
  return classify_bound_states(std::move(s));
}

/// Cross-check path: rapidities from the 4N shape-matrix eigenvalues,
/// E = 2 i alpha.
inline std::vector<cplx> rapidities_from_shape_matrix(const OpenChainModel& model) {
  ShapeMatrix x = build_shape_matrix(model);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(x.x);
  if (solver.info() != Eigen::Success)
    throw SolverError("rapidities_from_shape_matrix: eigensolver failed");
  std::vector<cplx> out(solver.eigenvalues().size());
  for (int k = 0; k < solver.eigenvalues().size(); ++k)
    out[k] = 2.0 * kI * solver.eigenvalues()(k);
  return out;
}

struct LiouvillianEntry {
  cplx value;
  std::uint64_t multiplicity = 1;      // number of v in {0,1}^{4N} configurations
  int stripe_index = 0;                // included bound rapidities, counted with v
  std::vector<std::uint8_t> signature; // copies of each distinct rapidity included
};

struct LiouvillianSpectrum {
  std::vector<LiouvillianEntry> entries;
  int n_cells = 0;
  std::uint64_t total_multiplicity = 0;  // 2^{4N} when fully enumerated
  bool truncated = false;                // true when a max_terms cap was applied

  /// Values expanded by multiplicity (use only for small n_cells).
  std::vector<cplx> expanded_values() const {
    std::vector<cplx> v;
    for (const auto& e : entries)
      for (std::uint64_t k = 0; k < e.multiplicity; ++k) v.push_back(e.value);
    return v;
  }
};

struct EnumerationOptions {
  long long max_configs = 2'000'000;  // cap on enumerated v-configurations
  int max_terms = -1;                 // <0: full enumeration
  bool store_signatures = true;
};

namespace detail {

inline void enumerate_spectrum(const RapiditySpectrum& rs,
                               const EnumerationOptions& opt,
                               LiouvillianSpectrum& out) {
  const int nd = static_cast<int>(rs.distinct.size());
  std::vector<std::uint8_t> digits(nd, 0);
  cplx sum = 0.0;
  std::uint64_t mult = 1;
  int stripe = 0, terms = 0;

  // depth-first over v in {0,1,2}^{nd}, weight C(2, v) per digit
  auto emit = [&]() {
    LiouvillianEntry e;
    e.value = kI * sum;
    e.multiplicity = mult;
    e.stripe_index = stripe;
    if (opt.store_signatures) e.signature = digits;
    out.entries.push_back(std::move(e));
    out.total_multiplicity += mult;
  };
  auto rec = [&](auto&& self, int j) -> void {
    if (j == nd) {
      emit();
      return;
    }
    const RapidityEntry& r = rs.distinct[j];
    for (int v = 0; v <= 2; ++v) {
      if (opt.max_terms >= 0 && terms + v > opt.max_terms) break;
      digits[j] = static_cast<std::uint8_t>(v);
      if (v) sum += static_cast<double>(v) * r.value;
      std::uint64_t m0 = mult;
      if (v == 1) mult *= 2;
      int s0 = stripe;
      if (r.bound) stripe += v;
      terms += v;
      self(self, j + 1);
      terms -= v;
      stripe = s0;
      mult = m0;
      if (v) sum -= static_cast<double>(v) * r.value;
    }
    digits[j] = 0;
  };
  rec(rec, 0);
}

}  // namespace detail

inline LiouvillianSpectrum liouvillian_spectrum(const RapiditySpectrum& rs,
                                                const EnumerationOptions& opt = {}) {
  const int nd = static_cast<int>(rs.distinct.size());
  if (opt.max_terms < 0) {
    long double configs = std::pow(3.0L, nd);
    if (configs > static_cast<long double>(opt.max_configs)) {
      int cap = 0;  // largest full-enumeration size within budget
      while (std::pow(3.0L, 2 * (cap + 1)) <= static_cast<long double>(opt.max_configs))
        ++cap;
      throw BudgetError(
          "liouvillian_spectrum: full enumeration needs 3^" + std::to_string(nd) +
          " configurations, over the budget of " + std::to_string(opt.max_configs) +
          "; full enumeration is limited to n_cells <= " + std::to_string(cap) +
          ", pass max_terms to restrict the sum depth instead");
    }
  }
  LiouvillianSpectrum out;
  out.n_cells = rs.n_cells;
  out.truncated = opt.max_terms >= 0;
  detail::enumerate_spectrum(rs, opt, out);
  return out;
}

inline LiouvillianSpectrum liouvillian_spectrum(const RapiditySpectrum& rs,
                                                int max_terms) {
  EnumerationOptions opt;
  opt.max_terms = max_terms;
  return liouvillian_spectrum(rs, opt);
}

/// Spectral gap from the single-particle picture: the smallest Im(E) over
/// rapidities with Im(E) above the numerical-zero floor (relative 1e-12).
/// Returns 0 when no rapidity decays.
inline double liouvillian_gap(const RapiditySpectrum& rs) {
  double imax = 0.0;
  for (const auto& e : rs.distinct) imax = std::max(imax, std::abs(e.value.imag()));
  const double floor_ = 1e-12 * imax;
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& e : rs.distinct)
    if (e.value.imag() > floor_) gap = std::min(gap, e.value.imag());
  return std::isfinite(gap) ? gap : 0.0;
}

inline double liouvillian_gap(const OpenChainModel& model) {
  return liouvillian_gap(rapidity_spectrum(model));
}

/// Gap read off a fully enumerated spectrum: -max Re(lambda) over eigenvalues
/// with Re(lambda) below the numerical-zero floor.  Cross-check for
/// liouvillian_gap on small systems.
inline double gap_from_spectrum(const LiouvillianSpectrum& ls) {
  double scale = 0.0;
  for (const auto& e : ls.entries) scale = std::max(scale, std::abs(e.value.real()));
  if (scale == 0.0) return 0.0;
  const double floor_ = 1e-12 * scale;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& e : ls.entries)
    if (e.value.real() < -floor_) best = std::max(best, e.value.real());
  return std::isfinite(best) ? -best : 0.0;
}

struct Stripe {
  int index = 0;             // number of bound rapidities included
  std::uint64_t count = 0;   // total multiplicity in the stripe
  double min_re = 0, max_re = 0;
};

/// Partition an enumerated spectrum by the number of included bound
/// rapidities.  Stripe 0 is the rightmost (least negative) one.
inline std::vector<Stripe> stripe_decompose(const LiouvillianSpectrum& ls) {
  std::map<int, Stripe> acc;
  for (const auto& e : ls.entries) {
    auto [it, fresh] = acc.try_emplace(e.stripe_index);
    Stripe& s = it->second;
    if (fresh) {
      s.index = e.stripe_index;
      s.min_re = s.max_re = e.value.real();
    }
    s.count += e.multiplicity;
    s.min_re = std::min(s.min_re, e.value.real());
    s.max_re = std::max(s.max_re, e.value.real());
  }
  std::vector<Stripe> out;
  out.reserve(acc.size());
  for (auto& [k, s] : acc) out.push_back(s);
  return out;
}

}  // namespace sshlind
