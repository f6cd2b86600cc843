#include "oamplex/duplexer.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "oamplex/error.hpp"

namespace oamplex {

namespace {

constexpr double kWeightTolerance = 1e-12;
constexpr double kEmptyPortWeight = 1e-13;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Superposition parity_flip(const Superposition& s) {
  AmplitudeMap out;
  for (const auto& [ell, a] : s.terms()) out.emplace(-ell, a);
  return Superposition(std::move(out), Superposition::PreservePhase{});
}

Superposition rotate(const Superposition& s, double theta) {
  AmplitudeMap out;
  for (const auto& [ell, a] : s.terms()) out.emplace(ell, a * std::polar(1.0, ell * theta));
  return Superposition(std::move(out), Superposition::PreservePhase{});
}

Superposition dove_prism(const Superposition& s, double theta) { return rotate(parity_flip(s), 2.0 * theta); }

Superposition apply_element(const ElementOp& op, const Superposition& s) {
  return std::visit(Overloaded{
                        [&](const element::Identity&) { return s; },
                        [&](const element::ParityFlip&) { return parity_flip(s); },
                        [&](const element::Rotation& r) { return rotate(s, r.theta); },
                        [&](const element::DovePrism& p) { return dove_prism(s, p.theta); },
                    },
                    op);
}

Superposition apply_chain(std::span<const ElementOp> chain, const Superposition& s) {
  Superposition out = s;
  for (const auto& op : chain) out = apply_element(op, out);
  return out;
}

void ImperfectionModel::validate() const {
  if (!std::isfinite(path_phase_error) || !std::isfinite(prism_angle_error)) {
    throw Error(ErrorCode::InvalidImperfection, "imperfection angles must be finite");
  }
  if (!(splitting_imbalance >= 0.0 && splitting_imbalance < 1.0)) {
    throw Error(ErrorCode::InvalidImperfection, "splitting imbalance must lie in [0, 1)");
  }
}

std::vector<ElementOp> arm_chain(int arm, const ImperfectionModel& imp) {
  const double prism_angle = arm == 1 ? 0.0 : std::numbers::pi / 2 + imp.prism_angle_error;
  return {element::DovePrism{prism_angle}, element::ParityFlip{}};
}

PortTransfer transfer_matrices(const BasisSpec& basis, Port input, const ImperfectionModel& imp) {
  imp.validate();
  const auto d = static_cast<Eigen::Index>(basis.size());

  auto arm_matrix = [&](int arm) {
    const auto chain = arm_chain(arm, imp);
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto out = apply_chain(chain, make_superposition({{basis[static_cast<std::size_t>(j)], 1.0}}));
      for (const auto& [ell, a] : out.terms()) {
        const auto row = basis.position(ell);
        if (!row) {
          throw Error(ErrorCode::BasisMismatch,
                      "interferometer arm maps OAM " + std::to_string(basis[static_cast<std::size_t>(j)]) +
                          " to " + std::to_string(ell) + ", which is outside the basis");
        }
        m(static_cast<Eigen::Index>(*row), j) = a;
      }
    }
    return m;
  };

  const double t = std::sqrt(0.5 * (1.0 + imp.splitting_imbalance));
  const Complex r(0.0, std::sqrt(0.5 * (1.0 - imp.splitting_imbalance)));
  const ComplexMatrix arm1 = arm_matrix(1);
  const ComplexMatrix arm2 = std::polar(1.0, imp.path_phase_error) * arm_matrix(2);

  // First splitter: A transmits into arm 1 and reflects into arm 2; B the
  // other way round. Second splitter: the bright port collects r*arm1 + t*arm2,
  // the dark port t*arm1 + r*arm2.
  const Complex in1 = input == Port::A ? Complex(t) : r;
  const Complex in2 = input == Port::A ? r : Complex(t);
  PortTransfer out;
  out.bright = r * in1 * arm1 + t * in2 * arm2;
  out.dark = t * in1 * arm1 + r * in2 * arm2;
  return out;
}

PortOutput duplex(std::span<const SourceInput> sources, const ImperfectionModel& imp) {
  if (sources.empty()) throw Error(ErrorCode::WeightError, "duplexer needs at least one source");
  const BasisSpec& basis = sources.front().rho.basis();
  double total = 0.0;
  for (const auto& src : sources) {
    if (src.rho.basis() != basis) throw Error(ErrorCode::BasisMismatch, "duplexer sources use different bases");
    if (!(src.weight >= 0.0)) throw Error(ErrorCode::WeightError, "source weights must be nonnegative");
    total += src.weight;
  }
  if (std::abs(total - 1.0) > kWeightTolerance) {
    std::ostringstream msg;
    msg << "source weights must sum to 1 (got " << total << ")";
    throw Error(ErrorCode::WeightError, msg.str());
  }

  const auto d = static_cast<Eigen::Index>(basis.size());
  ComplexMatrix bright = ComplexMatrix::Zero(d, d);
  ComplexMatrix dark = ComplexMatrix::Zero(d, d);
  std::optional<PortTransfer> transfer_a;
  std::optional<PortTransfer> transfer_b;
  for (const auto& src : sources) {
    if (src.weight == 0.0) continue;
    auto& transfer = src.port == Port::A ? transfer_a : transfer_b;
    if (!transfer) transfer = transfer_matrices(basis, src.port, imp);
    bright += src.weight * transfer->bright * src.rho.elements() * transfer->bright.adjoint();
    dark += src.weight * transfer->dark * src.rho.elements() * transfer->dark.adjoint();
  }

  auto finish = [&](ComplexMatrix m) {
    PortState state;
    state.weight = m.trace().real();
    if (state.weight > kEmptyPortWeight) {
      m /= state.weight;
      m = 0.5 * (m + m.adjoint()).eval();
      state.rho = DensityMatrix(basis, std::move(m));
    } else {
      state.weight = 0.0;
    }
    return state;
  };
  return PortOutput{finish(std::move(bright)), finish(std::move(dark))};
}

PortOutput duplex(const DensityMatrix& input_a, const DensityMatrix& input_b, PortWeights weights,
                  const ImperfectionModel& imp) {
  const SourceInput sources[] = {{Port::A, weights.a, input_a}, {Port::B, weights.b, input_b}};
  return duplex(sources, imp);
}

double dark_port_ratio(const PortOutput& out) {
  if (!(out.bright.weight > 0.0)) throw Error(ErrorCode::BrightPortEmpty, "bright port carries no power");
  return out.dark.weight / out.bright.weight;
}

}  // namespace oamplex
