#pragma once

// Boundary-dissipated SSH chain: model description plus Majorana-basis builders.
//
// Conventions used throughout the library
// ----------------------------------------
// A chain of n_cells unit cells has 2N sites indexed 0..2N-1; cell j holds
// sites 2j (sublattice A) and 2j+1 (sublattice B).  Intra-cell bonds carry t1,
// inter-cell bonds t2.  Single-particle loss or gain may act on site 0
// ("left") and/or site 2N-1 ("right").
//
// The master equation is taken with the rate normalization
//     d rho / dt = -i[H, rho] + sum_mu (2 L_mu rho L_mu^+ - {L_mu^+ L_mu, rho}),
// i.e. a bare factor 2 on the jump term and no 1/2 on the anticommutator.
//
// Two Majorana bases appear:
//  * doubled basis   a_{2s} = c_s + c_s^+,  a_{2s+1} = i(c_s - c_s^+),
//    {a_i, a_j} = 2 delta_ij.  MajoranaHamiltonian::h is the antisymmetric
//    kernel of H = sum_{jk} a_j h_{jk} a_k in this basis.
//  * unit basis      b_{2s} = i(c_s - c_s^+)/sqrt(2),  b_{2s+1} = (c_s + c_s^+)/sqrt(2),
//    {b_i, b_j} = delta_ij.  BathMatrix::m is the dissipation kernel
//    M = sum_mu l_mu l_mu^+ for L_mu = sum_j l_{mu,j} b_j, which makes a loss
//    (gain) of strength g occupy a boundary 2x2 block [[g/2, -+ i g/2],
//    [+- i g/2, g/2]].  The relaxation matrices in dynamics.hpp live in this
//    basis as well.
// The bases are related by b = P a / sqrt(2) with P the within-pair swap, so
// the two kernels differ by that swap and a factor 2.  Re(m) is block-diagonal
// and swap-invariant, which is what lets the shape matrix in thirdq.hpp be
// assembled as X = -2i h + Re(m).

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sshlind {

using cplx = std::complex<double>;
inline constexpr cplx kI{0.0, 1.0};

enum class BoundarySide { left, right };
enum class DissipatorKind { loss, gain };

inline BoundarySide opposite(BoundarySide s) {
  return s == BoundarySide::left ? BoundarySide::right : BoundarySide::left;
}

inline const char* to_string(BoundarySide s) {
  return s == BoundarySide::left ? "left" : "right";
}
inline const char* to_string(DissipatorKind k) {
  return k == DissipatorKind::loss ? "loss" : "gain";
}

/// A single-site boundary dissipator L = sqrt(strength) c (loss) or
/// sqrt(strength) c^+ (gain).
struct DissipatorSpec {
  BoundarySide side = BoundarySide::left;
  DissipatorKind kind = DissipatorKind::loss;
  double strength = 0.0;
};

struct OpenChainModel {
  double t1 = 1.0;
  double t2 = 1.0;
  int n_cells = 1;
  std::vector<DissipatorSpec> dissipators;

  int sites() const { return 2 * n_cells; }
  int majorana_modes() const { return 4 * n_cells; }

  const DissipatorSpec* dissipator(BoundarySide side) const {
    for (const auto& d : dissipators)
      if (d.side == side) return &d;
    return nullptr;
  }

  /// Dissipation strength on a boundary; 0 when absent.
  double gamma(BoundarySide side) const {
    const DissipatorSpec* d = dissipator(side);
    return d ? d->strength : 0.0;
  }

  OpenChainModel with_cells(int n) const {
    OpenChainModel m = *this;
    m.n_cells = n;
    return m;
  }
};

inline OpenChainModel make_model(double t1, double t2, int n_cells,
                                 std::vector<DissipatorSpec> dissipators = {}) {
  return OpenChainModel{t1, t2, n_cells, std::move(dissipators)};
}

struct ModelDiagnostics {
  std::vector<std::string> messages;
  bool ok() const { return messages.empty(); }
};

inline ModelDiagnostics validate_model(const OpenChainModel& m) {
  ModelDiagnostics d;
  if (!(m.n_cells >= 1)) d.messages.push_back("n_cells must be at least 1");
  if (!(m.t1 >= 0.0)) d.messages.push_back("t1 must be non-negative");
  if (!(m.t2 > 0.0)) d.messages.push_back("t2 must be positive");
  if (!std::isfinite(m.t1) || !std::isfinite(m.t2))
    d.messages.push_back("hopping amplitudes must be finite");
  bool seen_left = false, seen_right = false;
  for (const auto& ds : m.dissipators) {
    if (!(ds.strength >= 0.0) || !std::isfinite(ds.strength))
      d.messages.push_back("dissipator strength must be finite and non-negative");
    bool& seen = ds.side == BoundarySide::left ? seen_left : seen_right;
    if (seen)
      d.messages.push_back(std::string("duplicate dissipator on the ") +
                           to_string(ds.side) + " boundary");
    seen = true;
  }
  return d;
}

inline void require_valid(const OpenChainModel& m) {
  ModelDiagnostics d = validate_model(m);
  if (d.ok()) return;
  std::string msg = "invalid model:";
  for (const auto& s : d.messages) msg += " " + s + ";";
  throw std::invalid_argument(msg);
}

/// 2N x 2N single-particle hopping matrix of the open chain
/// (tridiagonal, alternating t1, t2, zero diagonal).
inline Eigen::MatrixXd site_hopping_matrix(const OpenChainModel& m) {
  require_valid(m);
  const int ns = m.sites();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(ns, ns);
  for (int k = 0; k + 1 < ns; ++k) {
    double t = (k % 2 == 0) ? m.t1 : m.t2;
    h(k, k + 1) = t;
    h(k + 1, k) = t;
  }
  return h;
}

/// Antisymmetric kernel of H in the doubled Majorana basis.
struct MajoranaHamiltonian {
  Eigen::MatrixXcd h;  // 4N x 4N, purely imaginary entries, h^T = -h
};

inline MajoranaHamiltonian build_majorana_hamiltonian(const OpenChainModel& m) {
  require_valid(m);
  const int nm = m.majorana_modes();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(nm, nm);
  Eigen::MatrixXd site = site_hopping_matrix(m);
  const int ns = m.sites();
  for (int r = 0; r < ns; ++r) {
    for (int c = r; c < ns; ++c) {
      double t = site(r, c);
      if (t == 0.0) continue;
      // t c_r^+ c_c + h.c.  ->  -(i t / 2) a_{2r} a_{2c+1} + (i t / 2) a_{2r+1} a_{2c}
      h(2 * r, 2 * c + 1) += -kI * t / 4.0;
      h(2 * c + 1, 2 * r) += kI * t / 4.0;
      h(2 * r + 1, 2 * c) += kI * t / 4.0;
      h(2 * c, 2 * r + 1) += -kI * t / 4.0;
    }
  }
  return MajoranaHamiltonian{std::move(h)};
}

/// Inverse of build_majorana_hamiltonian for number-conserving quadratic
/// forms; reproduces the site-basis hopping matrix exactly.
inline Eigen::MatrixXd reconstruct_site_matrix(const MajoranaHamiltonian& mh) {
  const int nm = static_cast<int>(mh.h.rows());
  const int ns = nm / 2;
  Eigen::MatrixXd site(ns, ns);
  for (int r = 0; r < ns; ++r)
    for (int c = 0; c < ns; ++c)
      site(r, c) = std::real(4.0 * kI * mh.h(2 * r, 2 * c + 1));
  return site;
}

/// Dissipation kernel M = sum_mu l_mu l_mu^+ in the unit Majorana basis.
struct BathMatrix {
  Eigen::MatrixXcd m;   // 4N x 4N, Hermitian, supported on boundary 2x2 blocks
  Eigen::MatrixXd m_r;  // Re(m), symmetric positive semidefinite
  Eigen::MatrixXd m_i;  // Im(m), antisymmetric
};

inline BathMatrix build_bath_matrix(const OpenChainModel& model) {
  require_valid(model);
  const int nm = model.majorana_modes();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(nm, nm);
  for (const auto& d : model.dissipators) {
    if (d.strength == 0.0) continue;
    const int s = d.side == BoundarySide::left ? 0 : model.sites() - 1;
    const double g = d.strength;
    const double sign = d.kind == DissipatorKind::loss ? -1.0 : 1.0;
    m(2 * s, 2 * s) += g / 2.0;
    m(2 * s + 1, 2 * s + 1) += g / 2.0;
    m(2 * s, 2 * s + 1) += sign * kI * g / 2.0;
    m(2 * s + 1, 2 * s) += -sign * kI * g / 2.0;
  }
  BathMatrix b;
  b.m_r = m.real();
  b.m_i = m.imag();
  b.m = std::move(m);
  return b;
}

}  // namespace sshlind
