#pragma once

// Two-input / two-output Mach-Zehnder interferometer with a Dove prism in each
// arm. With the prisms at pi/2 relative orientation the arms differ by an
// image rotation of pi, so input A's even-ell part and input B's odd-ell part
// leave through the bright port.
//
// Beam-splitter convention: transmitted amplitude sqrt(T) (real), reflected
// amplitude i*sqrt(R), with T = (1 + eta) / 2 and R = (1 - eta) / 2.

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "oamplex/oam_state.hpp"

namespace oamplex {

Superposition parity_flip(const Superposition& s);
Superposition rotate(const Superposition& s, double theta);
// Parity flip followed by an image rotation of twice the prism angle.
Superposition dove_prism(const Superposition& s, double theta);

namespace element {
struct Identity {};
struct ParityFlip {};
struct Rotation {
  double theta = 0.0;
};
struct DovePrism {
  double theta = 0.0;
};
}  // namespace element

using ElementOp = std::variant<element::Identity, element::ParityFlip, element::Rotation, element::DovePrism>;

Superposition apply_element(const ElementOp& op, const Superposition& s);
// Applies ops in order (front first).
Superposition apply_chain(std::span<const ElementOp> chain, const Superposition& s);

struct ImperfectionModel {
  double path_phase_error = 0.0;    // epsilon, rad
  double prism_angle_error = 0.0;   // delta, rad
  double splitting_imbalance = 0.0; // eta in [0, 1)

  void validate() const;
  friend bool operator==(const ImperfectionModel&, const ImperfectionModel&) = default;
};

enum class Port { A, B };

// Net optical path of each arm: a Dove prism plus the mirror reflections,
// which together contribute an even number of parity flips.
std::vector<ElementOp> arm_chain(int arm, const ImperfectionModel& imp);

struct PortTransfer {
  ComplexMatrix bright;
  ComplexMatrix dark;
};

// Linear maps taking a field injected at `input` to the field amplitudes at
// the bright and dark outputs, expressed on `basis`. Throws BasisMismatch if
// an arm maps a basis mode outside the basis.
PortTransfer transfer_matrices(const BasisSpec& basis, Port input, const ImperfectionModel& imp);

struct SourceInput {
  Port port = Port::A;
  double weight = 0.0;
  DensityMatrix rho;
};

struct PortState {
  double weight = 0.0;
  std::optional<DensityMatrix> rho;  // empty when weight == 0
};

struct PortOutput {
  PortState bright;
  PortState dark;
};

// Mutually incoherent sources: each is pushed through the device with vacuum
// at the other input and the outputs are weight-summed.
PortOutput duplex(std::span<const SourceInput> sources, const ImperfectionModel& imp);

struct PortWeights {
  double a = 0.5;
  double b = 0.5;
};

PortOutput duplex(const DensityMatrix& input_a, const DensityMatrix& input_b, PortWeights weights,
                  const ImperfectionModel& imp);

double dark_port_ratio(const PortOutput& out);

}  // namespace oamplex
