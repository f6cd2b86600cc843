#pragma once

// OAM superpositions and density matrices over an explicit mode basis.
//
// A Superposition is a sparse map from the OAM index ell to a complex
// amplitude. Matrices only exist once a BasisSpec fixes the row/column order.

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oamplex {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using AmplitudeMap = std::map<int, Complex>;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;

struct Term {
  int ell = 0;
  Complex amplitude;
};

class Superposition {
 public:
  // Wraps an amplitude map that is already unit norm. Exact zeros are
  // dropped; the global phase is left alone. Used by the linear optical
  // elements, which must not re-canonicalize phase.
  struct PreservePhase {};
  Superposition(AmplitudeMap amplitudes, PreservePhase);

  const AmplitudeMap& terms() const noexcept { return amplitudes_; }
  Complex amplitude(int ell) const;
  std::size_t size() const noexcept { return amplitudes_.size(); }
  double norm_squared() const;

  friend bool operator==(const Superposition&, const Superposition&) = default;

 private:
  AmplitudeMap amplitudes_;
};

// Normalizes, sorts by ascending ell and rotates the global phase so the
// first nonzero amplitude is real and positive.
Superposition make_superposition(std::span<const Term> terms);
Superposition make_superposition(std::initializer_list<Term> terms);

struct ParityParts {
  AmplitudeMap even;
  AmplitudeMap odd;
  double even_weight = 0.0;
  double odd_weight = 0.0;
};

ParityParts parity_decompose(const Superposition& s);

// ell -> k * ell for k >= 1.
Superposition hilbert_hotel(const Superposition& s, int k);

bool is_even(int ell) noexcept;

class BasisSpec {
 public:
  explicit BasisSpec(std::vector<int> indices);

  const std::vector<int>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  int operator[](std::size_t i) const { return indices_[i]; }
  std::optional<std::size_t> position(int ell) const;
  bool contains(int ell) const { return position(ell).has_value(); }

  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;

 private:
  std::vector<int> indices_;
};

// Hermitian, PSD, unit-trace matrix with rows/columns ordered by a BasisSpec.
// The constructor enforces those invariants and throws InvalidDensityMatrix.
class DensityMatrix {
 public:
  DensityMatrix(BasisSpec basis, ComplexMatrix elements);

  const BasisSpec& basis() const noexcept { return basis_; }
  const ComplexMatrix& elements() const noexcept { return elements_; }
  std::size_t dimension() const noexcept { return basis_.size(); }
  Complex operator()(std::size_t i, std::size_t j) const { return elements_(i, j); }

 private:
  BasisSpec basis_;
  ComplexMatrix elements_;
};

DensityMatrix pure_density(const Superposition& s, const BasisSpec& basis);

struct WeightedDensity {
  double weight = 0.0;
  DensityMatrix rho;
};

DensityMatrix incoherent_mix(std::span<const WeightedDensity> parts);

double purity(const DensityMatrix& rho);

DensityMatrix maximally_mixed(const BasisSpec& basis);

}  // namespace oamplex
