#pragma once

// Projective-measurement tomography over an OAM basis.
//
// Projectors are unit-norm states, so for a pair (i, j):
//   P+/-  = (rho_ii + rho_jj)/2 +/- Re rho_ij   for (|i> +/- |j>)/sqrt2
//   P'+/- = (rho_ii + rho_jj)/2 -/+ Im rho_ij   for (|i> +/- i|j>)/sqrt2
// and the differential estimators divide by 2.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oamplex/oam_state.hpp"

namespace oamplex {

enum class ProjectorKind { Diagonal, RealPair, ImagPair };

struct ProjectorLabel {
  ProjectorKind kind = ProjectorKind::Diagonal;
  std::size_t i = 0;
  std::size_t j = 0;  // == i for Diagonal
  int sign = +1;      // +1 / -1; +1 for Diagonal

  friend bool operator==(const ProjectorLabel&, const ProjectorLabel&) = default;
  friend auto operator<=>(const ProjectorLabel&, const ProjectorLabel&) = default;
};

// "D(i)", "R(i,j,+)", "I(i,j,-)".
std::string to_string(const ProjectorLabel& label);
ProjectorLabel parse_projector_label(const std::string& text);

struct Projector {
  Superposition state;
  ProjectorLabel label;
};

// d diagonal projectors, then for each i < j the four pair projectors.
std::vector<Projector> projector_set(const BasisSpec& basis);

double ideal_probability(const DensityMatrix& rho, const Projector& projector);

struct CountRecord {
  ProjectorLabel label;
  double probability = 0.0;  // expected P
  std::uint64_t counts = 0;
  double exposure = 0.0;     // expected counts at P = 1
  std::uint64_t seed = 0;

  friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

struct ProjectorProbability {
  Projector projector;
  double probability = 0.0;
};

std::vector<ProjectorProbability> ideal_probabilities(const DensityMatrix& rho, std::span<const Projector> projectors);

// Stream for projector k is seeded from (seed, k) only, so results do not
// depend on evaluation order.
std::uint64_t stream_seed(std::uint64_t seed, std::size_t projector_index);

std::vector<CountRecord> simulate_counts(std::span<const ProjectorProbability> probabilities, double exposure,
                                         std::uint64_t seed);

struct LinearEstimate {
  BasisSpec basis;
  ComplexMatrix rho;               // Hermitian, unit trace, possibly not PSD
  Eigen::MatrixXd std_error_real;  // standard error of Re rho_ij
  Eigen::MatrixXd std_error_imag;  // standard error of Im rho_ij
};

struct EstimatedProbability {
  ProjectorLabel label;
  double probability = 0.0;
  double variance = 0.0;
};

LinearEstimate reconstruct_linear(std::span<const CountRecord> records, const BasisSpec& basis);
LinearEstimate reconstruct_from_probabilities(std::span<const EstimatedProbability> estimates, const BasisSpec& basis);

// Eigenvalue clipping plus trace renormalization.
DensityMatrix project_physical(const BasisSpec& basis, const ComplexMatrix& hermitian);

// F = Tr sqrt( sqrt(rho) sigma sqrt(rho) ); equals |<psi|chi>| for pure states.
double fidelity(const DensityMatrix& target, const DensityMatrix& measured);
double fidelity_squared(const DensityMatrix& target, const DensityMatrix& measured);

// Hermitian square root with eigenvalues below `floor` (relative to the
// largest) treated as zero. Throws NotPSD for eigenvalues below -1e-10.
ComplexMatrix hermitian_sqrt(const ComplexMatrix& m);

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

struct TomographyOptions {
  std::optional<double> exposure;  // nullopt: exact probabilities
  std::uint64_t seed = 0;
};

struct TomographyResult {
  LinearEstimate linear;
  DensityMatrix rho_physical;
  double fidelity = 0.0;
  double fidelity_squared = 0.0;
  std::vector<CountRecord> records;  // empty for exact probabilities
};

TomographyResult run_tomography(const DensityMatrix& rho_true, const DensityMatrix& rho_ideal,
                                const TomographyOptions& options);

}  // namespace oamplex
