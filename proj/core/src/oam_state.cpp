#include "oamplex/oam_state.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>

#include "oamplex/error.hpp"

namespace oamplex {

namespace {

double sum_norm(const AmplitudeMap& amps) {
  double total = 0.0;
  for (const auto& [ell, a] : amps) total += std::norm(a);
  return total;
}

AmplitudeMap drop_zeros(AmplitudeMap amps) {
  std::erase_if(amps, [](const auto& kv) { return kv.second == Complex{}; });
  return amps;
}

}  // namespace

Superposition::Superposition(AmplitudeMap amplitudes, PreservePhase)
    : amplitudes_(drop_zeros(std::move(amplitudes))) {
  if (amplitudes_.empty()) throw Error(ErrorCode::ZeroNorm, "superposition has no nonzero amplitude");
  const double n2 = sum_norm(amplitudes_);
  if (std::abs(n2 - 1.0) > kNormTolerance) {
    std::ostringstream msg;
    msg << "superposition is not normalized (norm^2 = " << n2 << ")";
    throw Error(ErrorCode::ZeroNorm, msg.str());
  }
}

Complex Superposition::amplitude(int ell) const {
  const auto it = amplitudes_.find(ell);
  return it == amplitudes_.end() ? Complex{} : it->second;
}

double Superposition::norm_squared() const { return sum_norm(amplitudes_); }

Superposition make_superposition(std::span<const Term> terms) {
  if (terms.empty()) throw Error(ErrorCode::EmptyState, "superposition needs at least one term");

  AmplitudeMap amps;
  for (const Term& t : terms) {
    if (!amps.emplace(t.ell, t.amplitude).second) {
      throw Error(ErrorCode::DuplicateIndex, "duplicate OAM index " + std::to_string(t.ell));
    }
  }
  amps = drop_zeros(std::move(amps));
  const double n2 = sum_norm(amps);
  if (amps.empty() || !(n2 > 0.0)) throw Error(ErrorCode::ZeroNorm, "all amplitudes are zero");

  const Complex first = amps.begin()->second;
  const Complex phase = std::conj(first) / std::abs(first);
  const double scale = 1.0 / std::sqrt(n2);
  for (auto& [ell, a] : amps) a *= phase * scale;
  // Kill the rounding residue left in the imaginary part of the reference term.
  amps.begin()->second = Complex(std::abs(amps.begin()->second), 0.0);
  return Superposition(std::move(amps), Superposition::PreservePhase{});
}

Superposition make_superposition(std::initializer_list<Term> terms) {
  return make_superposition(std::span<const Term>(terms.begin(), terms.size()));
}

bool is_even(int ell) noexcept { return ell % 2 == 0; }

ParityParts parity_decompose(const Superposition& s) {
  ParityParts parts;
  for (const auto& [ell, a] : s.terms()) {
    if (is_even(ell)) {
      parts.even.emplace(ell, a);
      parts.even_weight += std::norm(a);
    } else {
      parts.odd.emplace(ell, a);
      parts.odd_weight += std::norm(a);
    }
  }
  return parts;
}

Superposition hilbert_hotel(const Superposition& s, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidMultiplier, "Hilbert hotel multiplier must be >= 1, got " + std::to_string(k));
  AmplitudeMap out;
  for (const auto& [ell, a] : s.terms()) out.emplace(k * ell, a);
  return Superposition(std::move(out), Superposition::PreservePhase{});
}

BasisSpec::BasisSpec(std::vector<int> indices) : indices_(std::move(indices)) {
  if (indices_.empty()) throw Error(ErrorCode::InvalidBasis, "basis must contain at least one index");
  std::set<int> seen;
  for (int ell : indices_) {
    if (!seen.insert(ell).second) {
      throw Error(ErrorCode::InvalidBasis, "basis index " + std::to_string(ell) + " is repeated");
    }
  }
}

std::optional<std::size_t> BasisSpec::position(int ell) const {
  const auto it = std::find(indices_.begin(), indices_.end(), ell);
  if (it == indices_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - indices_.begin());
}

DensityMatrix::DensityMatrix(BasisSpec basis, ComplexMatrix elements)
    : basis_(std::move(basis)), elements_(std::move(elements)) {
  const auto d = static_cast<Eigen::Index>(basis_.size());
  if (elements_.rows() != d || elements_.cols() != d) {
    throw Error(ErrorCode::InvalidDensityMatrix, "matrix shape does not match basis size");
  }
  if (!elements_.allFinite()) throw Error(ErrorCode::InvalidDensityMatrix, "matrix has non-finite entries");

  const double asym = (elements_ - elements_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTolerance) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian (max |rho - rho^dagger| = " << asym << ")";
    throw Error(ErrorCode::InvalidDensityMatrix, msg.str());
  }
  const double tr = elements_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTolerance) {
    std::ostringstream msg;
    msg << "trace is " << tr << ", expected 1";
    throw Error(ErrorCode::InvalidDensityMatrix, msg.str());
  }
  const ComplexMatrix herm = 0.5 * (elements_ + elements_.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(herm, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -kPsdTolerance) {
    std::ostringstream msg;
    msg << "matrix is not positive semidefinite (min eigenvalue " << eig.eigenvalues().minCoeff() << ")";
    throw Error(ErrorCode::InvalidDensityMatrix, msg.str());
  }
}

DensityMatrix pure_density(const Superposition& s, const BasisSpec& basis) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (const auto& [ell, a] : s.terms()) {
    const auto pos = basis.position(ell);
    if (!pos) throw Error(ErrorCode::BasisMismatch, "OAM index " + std::to_string(ell) + " is not in the basis");
    v(static_cast<Eigen::Index>(*pos)) = a;
  }
  ComplexMatrix rho = v * v.adjoint();
  return DensityMatrix(basis, std::move(rho));
}

DensityMatrix incoherent_mix(std::span<const WeightedDensity> parts) {
  if (parts.empty()) throw Error(ErrorCode::WeightError, "mixture needs at least one component");
  const BasisSpec& basis = parts.front().rho.basis();
  const auto d = static_cast<Eigen::Index>(basis.size());
  ComplexMatrix acc = ComplexMatrix::Zero(d, d);
  double total = 0.0;
  for (const auto& part : parts) {
    if (part.rho.basis() != basis) throw Error(ErrorCode::BasisMismatch, "mixture components use different bases");
    if (!(part.weight >= 0.0)) throw Error(ErrorCode::NegativeWeight, "mixture weights must be nonnegative");
    acc += part.weight * part.rho.elements();
    total += part.weight;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::WeightError, "mixture weights sum to zero");
  acc /= total;
  return DensityMatrix(basis, std::move(acc));
}

double purity(const DensityMatrix& rho) {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return rho.elements().cwiseAbs2().sum();
}

DensityMatrix maximally_mixed(const BasisSpec& basis) {
  const auto d = static_cast<Eigen::Index>(basis.size());
  return DensityMatrix(basis, ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

}  // namespace oamplex
