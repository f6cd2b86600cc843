#include "oamplex/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <regex>
#include <sstream>

#include "oamplex/error.hpp"

namespace oamplex {

namespace {

// Eigenvalues of a unit-trace PSD matrix below this are rounding noise; they
// are zeroed before square roots so they cannot leak in as ~1e-8 terms.
constexpr double kSqrtFloor = 1e-14;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Eigen::VectorXcd state_vector(const Superposition& s, const BasisSpec& basis) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (const auto& [ell, a] : s.terms()) {
    const auto pos = basis.position(ell);
    if (!pos) throw Error(ErrorCode::BasisMismatch, "projector mode " + std::to_string(ell) + " is outside the basis");
    v(static_cast<Eigen::Index>(*pos)) = a;
  }
  return v;
}

std::vector<ProjectorLabel> expected_labels(std::size_t d) {
  std::vector<ProjectorLabel> labels;
  for (std::size_t i = 0; i < d; ++i) labels.push_back({ProjectorKind::Diagonal, i, i, +1});
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      labels.push_back({ProjectorKind::RealPair, i, j, +1});
      labels.push_back({ProjectorKind::RealPair, i, j, -1});
      labels.push_back({ProjectorKind::ImagPair, i, j, +1});
      labels.push_back({ProjectorKind::ImagPair, i, j, -1});
    }
  }
  return labels;
}

}  // namespace

std::string to_string(const ProjectorLabel& label) {
  const char sign = label.sign > 0 ? '+' : '-';
  switch (label.kind) {
    case ProjectorKind::Diagonal: return "D(" + std::to_string(label.i) + ")";
    case ProjectorKind::RealPair:
      return "R(" + std::to_string(label.i) + "," + std::to_string(label.j) + "," + sign + ")";
    case ProjectorKind::ImagPair:
      return "I(" + std::to_string(label.i) + "," + std::to_string(label.j) + "," + sign + ")";
  }
  return "?";
}

ProjectorLabel parse_projector_label(const std::string& text) {
  static const std::regex diag(R"(D\((\d+)\))");
  static const std::regex pair(R"(([RI])\((\d+),(\d+),([+-])\))");
  std::smatch m;
  if (std::regex_match(text, m, diag)) {
    const auto i = static_cast<std::size_t>(std::stoul(m[1]));
    return {ProjectorKind::Diagonal, i, i, +1};
  }
  if (std::regex_match(text, m, pair)) {
    const auto kind = m[1] == "R" ? ProjectorKind::RealPair : ProjectorKind::ImagPair;
    const auto i = static_cast<std::size_t>(std::stoul(m[2]));
    const auto j = static_cast<std::size_t>(std::stoul(m[3]));
    if (i >= j) throw Error(ErrorCode::ValidationError, "pair label needs i < j: " + text);
    return {kind, i, j, m[4] == "+" ? +1 : -1};
  }
  throw Error(ErrorCode::ValidationError, "malformed projector label '" + text + "'");
}

std::vector<Projector> projector_set(const BasisSpec& basis) {
  const std::size_t d = basis.size();
  if (d < 2) throw Error(ErrorCode::BasisTooSmall, "tomography needs a basis of at least 2 modes");
  std::vector<Projector> out;
  out.reserve(d + 2 * d * (d - 1));
  for (const auto& label : expected_labels(d)) {
    const int li = basis[label.i];
    const int lj = basis[label.j];
    switch (label.kind) {
      case ProjectorKind::Diagonal:
        out.push_back({make_superposition({{li, 1.0}}), label});
        break;
      case ProjectorKind::RealPair:
        out.push_back({make_superposition({{li, 1.0}, {lj, Complex(label.sign, 0.0)}}), label});
        break;
      case ProjectorKind::ImagPair:
        out.push_back({make_superposition({{li, 1.0}, {lj, Complex(0.0, label.sign)}}), label});
        break;
    }
  }
  return out;
}

double ideal_probability(const DensityMatrix& rho, const Projector& projector) {
  const Eigen::VectorXcd phi = state_vector(projector.state, rho.basis());
  const double p = phi.dot(rho.elements() * phi).real();  // dot conjugates the left operand
  return std::clamp(p, 0.0, 1.0);
}

std::vector<ProjectorProbability> ideal_probabilities(const DensityMatrix& rho, std::span<const Projector> projectors) {
  std::vector<ProjectorProbability> out;
  out.reserve(projectors.size());
  for (const auto& p : projectors) out.push_back({p, ideal_probability(rho, p)});
  return out;
}

std::uint64_t stream_seed(std::uint64_t seed, std::size_t projector_index) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(projector_index));
}

std::vector<CountRecord> simulate_counts(std::span<const ProjectorProbability> probabilities, double exposure,
                                         std::uint64_t seed) {
  if (!(exposure > 0.0) || !std::isfinite(exposure)) {
    throw Error(ErrorCode::InvalidExposure, "exposure must be a positive finite number");
  }
  std::vector<CountRecord> out;
  out.reserve(probabilities.size());
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    const double p = probabilities[k].probability;
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::ValidationError, "probability outside [0, 1]");
    CountRecord rec{probabilities[k].projector.label, p, 0, exposure, seed};
    const double mean = exposure * p;
    if (mean > 0.0) {
      std::mt19937_64 engine(stream_seed(seed, k));
      std::poisson_distribution<std::uint64_t> poisson(mean);
      rec.counts = poisson(engine);
    }
    out.push_back(rec);
  }
  return out;
}

LinearEstimate reconstruct_from_probabilities(std::span<const EstimatedProbability> estimates, const BasisSpec& basis) {
  const std::size_t d = basis.size();
  if (d < 2) throw Error(ErrorCode::BasisTooSmall, "tomography needs a basis of at least 2 modes");

  std::map<ProjectorLabel, const EstimatedProbability*> by_label;
  for (const auto& e : estimates) {
    if (e.label.i >= d || e.label.j >= d) throw Error(ErrorCode::BasisMismatch, "record " + to_string(e.label) + " is outside the basis");
    if (!by_label.emplace(e.label, &e).second) {
      throw Error(ErrorCode::ValidationError, "duplicate record " + to_string(e.label));
    }
  }
  for (const auto& label : expected_labels(d)) {
    if (!by_label.contains(label)) throw Error(ErrorCode::IncompleteSet, "missing projector " + to_string(label));
  }
  auto get = [&](ProjectorKind kind, std::size_t i, std::size_t j, int sign) -> const EstimatedProbability& {
    return *by_label.at(ProjectorLabel{kind, i, j, sign});
  };

  const auto n = static_cast<Eigen::Index>(d);
  LinearEstimate est{basis, ComplexMatrix::Zero(n, n), Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};

  double diag_sum = 0.0;
  for (std::size_t i = 0; i < d; ++i) diag_sum += get(ProjectorKind::Diagonal, i, i, 1).probability;
  if (!(diag_sum > 0.0)) throw Error(ErrorCode::DegenerateInput, "diagonal projectors recorded no signal");

  for (std::size_t i = 0; i < d; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    est.rho(ii, ii) = get(ProjectorKind::Diagonal, i, i, 1).probability / diag_sum;
    // Delta method for P_i / sum_k P_k.
    double var = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const auto& pk = get(ProjectorKind::Diagonal, k, k, 1);
      const double grad = ((k == i ? diag_sum : 0.0) - get(ProjectorKind::Diagonal, i, i, 1).probability) /
                          (diag_sum * diag_sum);
      var += grad * grad * pk.variance;
    }
    est.std_error_real(ii, ii) = std::sqrt(var);
  }

  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const auto& rp = get(ProjectorKind::RealPair, i, j, +1);
      const auto& rm = get(ProjectorKind::RealPair, i, j, -1);
      const auto& ip = get(ProjectorKind::ImagPair, i, j, +1);
      const auto& im = get(ProjectorKind::ImagPair, i, j, -1);
      const double re = 0.5 * (rp.probability - rm.probability);
      const double imag = 0.5 * (im.probability - ip.probability);
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      est.rho(ii, jj) = Complex(re, imag);
      est.rho(jj, ii) = Complex(re, -imag);
      const double se_re = 0.5 * std::sqrt(rp.variance + rm.variance);
      const double se_im = 0.5 * std::sqrt(ip.variance + im.variance);
      est.std_error_real(ii, jj) = est.std_error_real(jj, ii) = se_re;
      est.std_error_imag(ii, jj) = est.std_error_imag(jj, ii) = se_im;
    }
  }
  return est;
}

LinearEstimate reconstruct_linear(std::span<const CountRecord> records, const BasisSpec& basis) {
  std::vector<EstimatedProbability> estimates;
  estimates.reserve(records.size());
  for (const auto& r : records) {
    if (!(r.exposure > 0.0)) throw Error(ErrorCode::ZeroExposure, "record " + to_string(r.label) + " has no exposure");
    const double counts = static_cast<double>(r.counts);
    estimates.push_back({r.label, counts / r.exposure, counts / (r.exposure * r.exposure)});
  }
  return reconstruct_from_probabilities(estimates, basis);
}

DensityMatrix project_physical(const BasisSpec& basis, const ComplexMatrix& hermitian) {
  const auto d = static_cast<Eigen::Index>(basis.size());
  if (hermitian.rows() != d || hermitian.cols() != d) throw Error(ErrorCode::BasisMismatch, "matrix shape does not match basis");
  if ((hermitian - hermitian.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error(ErrorCode::DegenerateInput, "input matrix is not Hermitian");
  }
  const double tr = hermitian.trace().real();
  if (!(std::abs(tr - 1.0) <= 0.5)) throw Error(ErrorCode::DegenerateInput, "input trace is not within 0.5 of 1");

  const ComplexMatrix h = 0.5 * (hermitian + hermitian.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
  Eigen::VectorXd lambda = eig.eigenvalues();
  if (lambda.minCoeff() >= -kPsdTolerance && std::abs(tr - 1.0) <= kTraceTolerance) {
    return DensityMatrix(basis, h);
  }
  lambda = lambda.cwiseMax(0.0);
  const double total = lambda.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::DegenerateInput, "no positive eigenvalues remain after clipping");
  lambda /= total;
  ComplexMatrix rho = eig.eigenvectors() * lambda.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(basis, std::move(rho));
}

ComplexMatrix hermitian_sqrt(const ComplexMatrix& m) {
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
  Eigen::VectorXd lambda = eig.eigenvalues();
  if (lambda.minCoeff() < -kPsdTolerance) {
    std::ostringstream msg;
    msg << "matrix is not positive semidefinite (min eigenvalue " << lambda.minCoeff() << ")";
    throw Error(ErrorCode::NotPSD, msg.str());
  }
  for (auto& l : lambda) l = l > kSqrtFloor ? std::sqrt(l) : 0.0;
  return eig.eigenvectors() * lambda.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
}

double fidelity(const DensityMatrix& target, const DensityMatrix& measured) {
  if (target.basis() != measured.basis()) throw Error(ErrorCode::BasisMismatch, "fidelity needs matrices on the same basis");
  // Tr sqrt(sqrt(rho) sigma sqrt(rho)) is the trace norm of sqrt(rho) sqrt(sigma);
  // the SVD route avoids taking square roots of rounding noise.
  const ComplexMatrix product = hermitian_sqrt(target.elements()) * hermitian_sqrt(measured.elements());
  Eigen::JacobiSVD<ComplexMatrix> svd(product);
  return std::clamp(svd.singularValues().sum(), 0.0, 1.0);
}

double fidelity_squared(const DensityMatrix& target, const DensityMatrix& measured) {
  const double f = fidelity(target, measured);
  return f * f;
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  const ComplexMatrix diff = a - b;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

TomographyResult run_tomography(const DensityMatrix& rho_true, const DensityMatrix& rho_ideal,
                                const TomographyOptions& options) {
  if (rho_true.basis() != rho_ideal.basis()) throw Error(ErrorCode::BasisMismatch, "true and ideal states use different bases");
  const BasisSpec& basis = rho_true.basis();
  const auto projectors = projector_set(basis);
  const auto probabilities = ideal_probabilities(rho_true, projectors);

  std::vector<CountRecord> records;
  LinearEstimate linear = [&] {
    if (!options.exposure) {
      std::vector<EstimatedProbability> exact;
      exact.reserve(probabilities.size());
      for (const auto& p : probabilities) exact.push_back({p.projector.label, p.probability, 0.0});
      return reconstruct_from_probabilities(exact, basis);
    }
    records = simulate_counts(probabilities, *options.exposure, options.seed);
    return reconstruct_linear(records, basis);
  }();

  DensityMatrix physical = project_physical(basis, linear.rho);
  const double f = fidelity(rho_ideal, physical);
  return TomographyResult{std::move(linear), std::move(physical), f, f * f, std::move(records)};
}

}  // namespace oamplex
