#pragma once

// Multiset comparison helpers for complex spectra.

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <vector>

namespace sshlind {

/// Greedy nearest-neighbour pairing after sorting by modulus (largest first).
/// Robust against roundoff-induced ordering swaps near degeneracies; returns
/// the largest paired distance.  O(n^2), intended for spectra up to a few
/// thousand values.
inline double greedy_match_max_distance(std::vector<std::complex<double>> a,
                                        std::vector<std::complex<double>> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("greedy_match_max_distance: size mismatch");
  auto by_modulus = [](const std::complex<double>& x, const std::complex<double>& y) {
    double ax = std::abs(x), ay = std::abs(y);
    if (ax != ay) return ax > ay;
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  };
  std::sort(a.begin(), a.end(), by_modulus);
  std::sort(b.begin(), b.end(), by_modulus);
  std::vector<char> used(b.size(), 0);
  double worst = 0.0;
  for (const auto& va : a) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      double d = std::abs(va - b[j]);
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    used[best_j] = 1;
    worst = std::max(worst, best);
  }
  return worst;
}

/// Pair after lexicographic (Re, Im) sort.  Only meaningful when the two
/// lists are expected to agree essentially exactly (identical construction);
/// scales to very large multisets.
inline double sorted_pair_max_distance(std::vector<std::complex<double>> a,
                                       std::vector<std::complex<double>> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("sorted_pair_max_distance: size mismatch");
  auto lex = [](const std::complex<double>& x, const std::complex<double>& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  };
  std::sort(a.begin(), a.end(), lex);
  std::sort(b.begin(), b.end(), lex);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

}  // namespace sshlind
