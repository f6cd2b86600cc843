#pragma once

// Random generators and brute-force oracles shared by the test binaries.
// Nothing here calls into the code paths it is used to check.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "oamplex/oam_state.hpp"

namespace oamplex::testing {

inline std::vector<Term> random_terms(std::mt19937_64& rng, int ell_min, int ell_max, int max_terms) {
  std::uniform_int_distribution<int> count(1, max_terms);
  std::uniform_int_distribution<int> pick(ell_min, ell_max);
  std::normal_distribution<double> gauss;
  std::vector<Term> terms;
  const int want = count(rng);
  std::vector<int> used;
  while (static_cast<int>(terms.size()) < want && static_cast<int>(used.size()) < ell_max - ell_min + 1) {
    const int ell = pick(rng);
    if (std::find(used.begin(), used.end(), ell) != used.end()) continue;
    used.push_back(ell);
    terms.push_back({ell, Complex(gauss(rng), gauss(rng))});
  }
  return terms;
}

inline Superposition random_superposition(std::mt19937_64& rng, int ell_min = -6, int ell_max = 6, int max_terms = 5) {
  return make_superposition(random_terms(rng, ell_min, ell_max, max_terms));
}

inline std::vector<int> range_basis(int lo, int hi) {
  std::vector<int> out;
  for (int ell = lo; ell <= hi; ++ell) out.push_back(ell);
  return out;
}

// Ginibre construction: G G^dagger / Tr, full rank with probability 1.
inline DensityMatrix random_density(std::mt19937_64& rng, const BasisSpec& basis, int rank = -1) {
  const auto d = static_cast<Eigen::Index>(basis.size());
  const Eigen::Index k = rank < 0 ? d : rank;
  std::normal_distribution<double> gauss;
  ComplexMatrix g(d, k);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < k; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(basis, rho);
}

// The 4x4 matrix for the two multiplexed states on basis [-4, -2, 1, 3].
inline ComplexMatrix multiplexed_reference() {
  const double s3 = std::sqrt(3.0);
  ComplexMatrix m(4, 4);
  m << 2, 2, 0, 0,
       2, 2, 0, 0,
       0, 0, 1, s3,
       0, 0, s3, 3;
  return m / 8.0;
}

// <phi|rho|phi> by explicit double sum.
inline double brute_expectation(const std::vector<Complex>& phi, const ComplexMatrix& rho) {
  Complex acc;
  for (std::size_t i = 0; i < phi.size(); ++i)
    for (std::size_t j = 0; j < phi.size(); ++j)
      acc += std::conj(phi[i]) * rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * phi[j];
  return acc.real();
}

inline double frobenius(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).norm(); }

}  // namespace oamplex::testing
