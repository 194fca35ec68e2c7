#pragma once

// Brute-force many-body cross-check.  Builds the full 4^(2N) x 4^(2N)
// superoperator of the master equation
//     d rho / dt = -i [H, rho] + sum_mu (2 L rho L+ - {L+ L, rho})
// in the row-major vectorization vec(rho)_{iD+j} = rho_ij, so that
// vec(A rho B) = (A kron B^T) vec(rho).  Exponential in the chain length;
// intended for chains of at most a few cells as an independent oracle for the
// quadratic machinery, never for production runs.

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sshlind/dynamics.hpp"
#include "sshlind/model.hpp"

namespace sshlind {
namespace oracle {

inline constexpr int kMaxCells = 3;

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline void check_cells(int n_cells, const char* who) {
  if (n_cells < 1 || n_cells > kMaxCells)
    throw std::invalid_argument(std::string(who) + ": n_cells must be in [1, " +
                                std::to_string(kMaxCells) +
                                "], the superoperator dimension is 16^n_cells");
}

/// Jordan-Wigner annihilation operators c_s, site 0 on the leftmost tensor
/// factor: c_s = Z^(x s) (x) a (x) 1^(x rest).
inline std::vector<Eigen::MatrixXcd> fock_annihilation_ops(int n_sites) {
  Eigen::MatrixXcd a2(2, 2), z2(2, 2), id2 = Eigen::MatrixXcd::Identity(2, 2);
  a2 << 0, 1, 0, 0;
  z2 << 1, 0, 0, -1;
  std::vector<Eigen::MatrixXcd> ops;
  ops.reserve(n_sites);
  for (int s = 0; s < n_sites; ++s) {
    Eigen::MatrixXcd op = Eigen::MatrixXcd::Identity(1, 1);
    for (int f = 0; f < n_sites; ++f)
      op = kron(op, f < s ? z2 : (f == s ? a2 : id2));
    ops.push_back(std::move(op));
  }
  return ops;
}

inline Eigen::MatrixXcd many_body_hamiltonian(const OpenChainModel& m) {
  check_cells(m.n_cells, "many_body_hamiltonian");
  const int ns = m.sites();
  auto c = fock_annihilation_ops(ns);
  Eigen::MatrixXd site = site_hopping_matrix(m);
  const Eigen::Index dim = c[0].rows();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int r = 0; r < ns; ++r)
    for (int col = r + 1; col < ns; ++col) {
      double t = site(r, col);
      if (t == 0.0) continue;
      Eigen::MatrixXcd hop = t * c[r].adjoint() * c[col];
      h += hop + hop.adjoint();
    }
  return h;
}

inline std::vector<Eigen::MatrixXcd> jump_operators(const OpenChainModel& m) {
  check_cells(m.n_cells, "jump_operators");
  auto c = fock_annihilation_ops(m.sites());
  std::vector<Eigen::MatrixXcd> ls;
  for (const auto& d : m.dissipators) {
    if (d.strength == 0.0) continue;
    int s = d.side == BoundarySide::left ? 0 : m.sites() - 1;
    double w = std::sqrt(d.strength);
    ls.push_back(d.kind == DissipatorKind::loss ? Eigen::MatrixXcd(w * c[s])
                                                : Eigen::MatrixXcd(w * c[s].adjoint()));
  }
  return ls;
}

inline Eigen::MatrixXcd full_liouvillian_matrix(const OpenChainModel& m) {
  require_valid(m);
  check_cells(m.n_cells, "full_liouvillian_matrix");
  Eigen::MatrixXcd h = many_body_hamiltonian(m);
  const Eigen::Index dim = h.rows();
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
  Eigen::MatrixXcd sup = -kI * (kron(h, id) - kron(id, h.transpose()));
  for (const auto& l : jump_operators(m)) {
    Eigen::MatrixXcd ldl = l.adjoint() * l;
    sup += 2.0 * kron(l, l.conjugate());
    sup -= kron(ldl, id);
    sup -= kron(id, ldl.transpose());
  }
  return sup;
}

inline Eigen::VectorXcd ed_spectrum(const OpenChainModel& m) {
  Eigen::MatrixXcd sup = full_liouvillian_matrix(m);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(sup, false);
  if (solver.info() != Eigen::Success)
    throw SolverError("ed_spectrum: dense eigensolver failed");
  return solver.eigenvalues();
}

inline Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho) {
  const Eigen::Index d = rho.rows();
  Eigen::VectorXcd v(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) v(i * d + j) = rho(i, j);
  return v;
}

inline Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
  Eigen::MatrixXcd rho(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) rho(i, j) = v(i * d + j);
  return rho;
}

/// rho = |1...1><1...1|, every site occupied.
inline Eigen::MatrixXcd fully_occupied_density(int n_cells) {
  check_cells(n_cells, "fully_occupied_density");
  const Eigen::Index dim = Eigen::Index(1) << (2 * n_cells);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  rho(dim - 1, dim - 1) = 1.0;
  return rho;
}

inline Eigen::VectorXd site_densities(const Eigen::MatrixXcd& rho,
                                      const std::vector<Eigen::MatrixXcd>& c) {
  Eigen::VectorXd n(static_cast<Eigen::Index>(c.size()));
  for (std::size_t s = 0; s < c.size(); ++s)
    n(static_cast<Eigen::Index>(s)) = (c[s].adjoint() * c[s] * rho).trace().real();
  return n;
}

struct EdTrajectory {
  std::vector<double> times;
  std::vector<double> density;            // chain average
  std::vector<Eigen::VectorXd> profiles;  // per-site
  std::vector<Eigen::MatrixXcd> states;
};

inline EdTrajectory ed_evolve(const Eigen::MatrixXcd& rho0, const OpenChainModel& m,
                              const std::vector<double>& times) {
  Eigen::MatrixXcd sup = full_liouvillian_matrix(m);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(sup, true);
  if (solver.info() != Eigen::Success)
    throw SolverError("ed_evolve: dense eigensolver failed");
  Eigen::MatrixXcd v = solver.eigenvectors();
  Eigen::VectorXcd coeff = v.partialPivLu().solve(vectorize(rho0));
  auto c = fock_annihilation_ops(m.sites());
  EdTrajectory out;
  out.times = times;
  for (double t : times) {
    Eigen::VectorXcd w = coeff;
    for (Eigen::Index j = 0; j < w.size(); ++j)
      w(j) *= std::exp(solver.eigenvalues()(j) * t);
    Eigen::MatrixXcd rho = unvectorize(v * w);
    rho = 0.5 * (rho + rho.adjoint().eval());
    Eigen::VectorXd prof = site_densities(rho, c);
    out.profiles.push_back(prof);
    out.density.push_back(prof.mean());
    out.states.push_back(std::move(rho));
  }
  return out;
}

/// Null right eigenvector of the superoperator, Hermitized and trace-normalized.
inline Eigen::MatrixXcd steady_density_matrix(const OpenChainModel& m) {
  Eigen::MatrixXcd sup = full_liouvillian_matrix(m);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(sup, true);
  if (solver.info() != Eigen::Success)
    throw SolverError("steady_density_matrix: dense eigensolver failed");
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < solver.eigenvalues().size(); ++j)
    if (std::abs(solver.eigenvalues()(j)) < std::abs(solver.eigenvalues()(best)))
      best = j;
  Eigen::MatrixXcd rho = unvectorize(solver.eigenvectors().col(best));
  rho = 0.5 * (rho + rho.adjoint().eval());
  cplx tr = rho.trace();
  if (std::abs(tr) < 1e-12)
    throw SolverError("steady_density_matrix: null vector is traceless");
  return rho / tr;
}

/// Gamma_jk = i tr(b_j b_k rho) - (i/2) delta_jk in the unit Majorana basis
/// b_2s = i (c_s - c_s+) / sqrt 2, b_2s+1 = (c_s + c_s+) / sqrt 2.
inline Eigen::MatrixXd correlation_matrix_from_density(const Eigen::MatrixXcd& rho,
                                                       int n_cells) {
  check_cells(n_cells, "correlation_matrix_from_density");
  const int ns = 2 * n_cells;
  auto c = fock_annihilation_ops(ns);
  std::vector<Eigen::MatrixXcd> b;
  b.reserve(2 * ns);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int s = 0; s < ns; ++s) {
    b.push_back(kI * inv_sqrt2 * (c[s] - c[s].adjoint()));
    b.push_back(inv_sqrt2 * (c[s] + c[s].adjoint()));
  }
  Eigen::MatrixXd g(2 * ns, 2 * ns);
  for (int j = 0; j < 2 * ns; ++j)
    for (int k = 0; k < 2 * ns; ++k) {
      cplx val = kI * (b[j] * b[k] * rho).trace();
      if (j == k) val -= kI * 0.5;
      g(j, k) = val.real();
    }
  return 0.5 * (g - g.transpose().eval());
}

}  // namespace oracle
}  // namespace sshlind
