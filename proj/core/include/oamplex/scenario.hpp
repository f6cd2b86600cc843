#pragma once

// Scenario configuration and the simulate / tomography / render pipelines
// driven by the oamplex command-line tool.
//
// Config text is JSON with strictly validated keys:
//
//   {
//     "sources": [{"port": "A", "weight": 0.5, "wavelength_nm": 532,
//                  "terms": [[-2, 1.0, 0.0], [-4, 1.0, 0.0]]}, ...],
//     "imperfections": {"epsilon_rad": 0, "delta_rad": 0, "eta": 0},
//     "basis": [-4, -2, 1, 3],
//     "measurement": {"exposure": 100000, "seed": 7},   // or "infinite"
//     "outputs": {"directory": "out", "emit_images": true,
//                 "grid": {"n": 512, "extent": 8}}
//   }

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oamplex/duplexer.hpp"
#include "oamplex/field_render.hpp"
#include "oamplex/oam_state.hpp"

namespace oamplex {

struct RawTerm {
  int ell = 0;
  double re = 0.0;
  double im = 0.0;
  friend bool operator==(const RawTerm&, const RawTerm&) = default;
};

struct SourceConfig {
  Port port = Port::A;
  double weight = 0.0;
  std::vector<RawTerm> terms;
  double wavelength_nm = 0.0;  // metadata only
  friend bool operator==(const SourceConfig&, const SourceConfig&) = default;
};

struct MeasurementConfig {
  std::optional<double> exposure;  // nullopt: infinite statistics
  std::uint64_t seed = 0;
  friend bool operator==(const MeasurementConfig&, const MeasurementConfig&) = default;
};

struct OutputConfig {
  std::string directory = "out";
  bool emit_images = false;
  int grid_n = 512;
  double grid_extent = 8.0;
  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct ScenarioConfig {
  std::vector<SourceConfig> sources;
  ImperfectionModel imperfections;
  std::vector<int> basis;
  std::optional<MeasurementConfig> measurement;
  OutputConfig outputs;
  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Throws SyntaxError ("line L, column C: ...") or ValidationError
// ("<field>: <invariant>").
ScenarioConfig parse_config(std::string_view text);
std::string config_to_text(const ScenarioConfig& cfg);

Superposition source_state(const SourceConfig& src);
GridSpec grid_of(const ScenarioConfig& cfg);

enum class Command { Simulate, Tomography, Render };

struct RunOptions {
  Command command = Command::Tomography;
  std::optional<std::filesystem::path> out_dir;  // overrides outputs.directory
  std::optional<std::uint64_t> seed;             // overrides measurement.seed
  bool exact = false;                            // infinite statistics
};

struct ScenarioResult {
  DensityMatrix ideal;
  PortOutput ports;
  std::optional<double> dark_bright_ratio;
  std::optional<double> fidelity;
  std::optional<double> fidelity_squared;
  std::vector<std::filesystem::path> written;
};

// Writes ideal_rho.json, bright_rho.json, dark_rho.json and report.json;
// tomography adds reconstructed_rho.json, tomography.json and counts.json
// (finite exposure only); images go to bright.pgm / dark.pgm.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options);

// Compares two density-matrix interchange files; returns a JSON report.
std::string compare_density_files(const std::filesystem::path& target, const std::filesystem::path& measured);

}  // namespace oamplex
