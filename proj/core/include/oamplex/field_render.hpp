#pragma once

// Transverse fields for OAM states on a square grid, using LG p = 0 radial
// profiles with a common waist, plus intensity analysis and PGM export.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oamplex/oam_state.hpp"

namespace oamplex {

struct GridSpec {
  int n = 512;          // pixels per side, even, >= 64
  double extent = 8.0;  // half-width in units of the waist
  double waist = 1.0;

  void validate() const;
  double pixel_pitch() const { return 2.0 * extent * waist / n; }
  double pixel_area() const { return pixel_pitch() * pixel_pitch(); }
  // Pixel centres; (0, 0) falls between the four central pixels. Row 0 is +y.
  double x(int col) const { return (col - 0.5 * n + 0.5) * pixel_pitch(); }
  double y(int row) const { return (0.5 * n - 0.5 - row) * pixel_pitch(); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct GridField {
  GridSpec grid;
  std::vector<Complex> values;  // row-major, n * n

  Complex at(int row, int col) const { return values[static_cast<std::size_t>(row) * grid.n + col]; }
};

struct IntensityImage {
  GridSpec grid;
  std::vector<double> values;  // row-major, n * n

  double at(int row, int col) const { return values[static_cast<std::size_t>(row) * grid.n + col]; }
};

// LG_{0,ell}, normalized to unit norm on the grid.
GridField lg_mode(int ell, const GridSpec& grid);

// Inner product <a|b> = sum conj(a) b dA.
Complex overlap(const GridField& a, const GridField& b);

// I(r) = sum_ij rho_ij u_i(r) conj(u_j(r)), clipped at zero.
IntensityImage render_state(const DensityMatrix& rho, const GridSpec& grid);
IntensityImage render_state(const Superposition& s, const GridSpec& grid);

// Number of azimuthal lobes in the annulus r_lo <= r < r_hi (physical units).
int angular_lobe_count(const IntensityImage& image, std::pair<double, double> radius_band);

// Azimuthal profile used by angular_lobe_count: 360 bins, 5-bin circular
// moving average already applied.
std::vector<double> azimuthal_profile(const IntensityImage& image, std::pair<double, double> radius_band);

double port_power(const IntensityImage& image);

IntensityImage scaled(IntensityImage image, double factor);
IntensityImage normalized_to_peak(IntensityImage image);

// Binary PGM: "P5\n{n} {n}\n255\n" then n*n bytes, value round(255 I / I_max).
std::string encode_pgm(const IntensityImage& image);
void write_pgm(const std::filesystem::path& path, const IntensityImage& image);
// Reads a P5 image back as intensities in [0, 1] on the supplied grid.
IntensityImage decode_pgm(std::string_view bytes, GridSpec grid);

}  // namespace oamplex
