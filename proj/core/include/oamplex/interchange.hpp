#pragma once

// Text interchange formats.
//
// DensityMatrix:  {"basis": [ints], "re": [[..]], "im": [[..]]}  (row-major,
//                 full round-trip precision). Port files add "weight".
// Count records:  [{"label", "P", "counts", "N", "seed"}, ...]
// Tomography:     {"rho_linear": DM-shaped, "rho_physical": DM, "fidelity",
//                  "fidelity_squared", "std_error_re", "std_error_im"}

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oamplex/duplexer.hpp"
#include "oamplex/oam_state.hpp"
#include "oamplex/tomography.hpp"

namespace oamplex {

std::string density_to_text(const DensityMatrix& rho);
DensityMatrix density_from_text(std::string_view text);

// Port output with its power fraction. An empty port is written with zero
// matrices and weight 0.
std::string port_state_to_text(const BasisSpec& basis, const PortState& port);

std::string count_records_to_text(std::span<const CountRecord> records);
std::vector<CountRecord> count_records_from_text(std::string_view text);

std::string tomography_result_to_text(const TomographyResult& result);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace oamplex
