#include "oamplex/field_render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "oamplex/error.hpp"

namespace oamplex {

namespace {

constexpr int kAngularBins = 360;
constexpr int kSmoothingWidth = 5;
constexpr double kLobeThreshold = 0.05;
constexpr int kSubAngles = 4;

// Runs fn(row) for every row. Rows are split into contiguous blocks across
// threads; each pixel is written by exactly one thread, so the result does not
// depend on the partitioning.
template <class Fn>
void for_each_row(int rows, Fn&& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(std::max(1, rows / 32))));
  if (workers <= 1) {
    for (int r = 0; r < rows; ++r) fn(r);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const int block = (rows + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int begin = w * block;
    const int end = std::min(rows, begin + block);
    pool.emplace_back([&fn, begin, end] {
      for (int r = begin; r < end; ++r) fn(r);
    });
  }
}

std::size_t pixel_count(const GridSpec& g) { return static_cast<std::size_t>(g.n) * static_cast<std::size_t>(g.n); }

// Row sums first, then rows in order: fixed summation order.
template <class Fn>
double grid_sum(const GridSpec& g, Fn&& pixel_value) {
  std::vector<double> rows(static_cast<std::size_t>(g.n), 0.0);
  for_each_row(g.n, [&](int r) {
    double acc = 0.0;
    for (int c = 0; c < g.n; ++c) acc += pixel_value(r, c);
    rows[static_cast<std::size_t>(r)] = acc;
  });
  double total = 0.0;
  for (double v : rows) total += v;
  return total;
}

std::vector<GridField> basis_modes(const BasisSpec& basis, const GridSpec& grid) {
  std::vector<GridField> modes;
  modes.reserve(basis.size());
  for (int ell : basis.indices()) modes.push_back(lg_mode(ell, grid));
  return modes;
}

double bilinear(const IntensityImage& img, double x, double y) {
  const GridSpec& g = img.grid;
  const double pitch = g.pixel_pitch();
  const double fc = x / pitch + 0.5 * g.n - 0.5;
  const double fr = 0.5 * g.n - 0.5 - y / pitch;
  const int c0 = std::clamp(static_cast<int>(std::floor(fc)), 0, g.n - 2);
  const int r0 = std::clamp(static_cast<int>(std::floor(fr)), 0, g.n - 2);
  const double tc = std::clamp(fc - c0, 0.0, 1.0);
  const double tr = std::clamp(fr - r0, 0.0, 1.0);
  const double top = (1 - tc) * img.at(r0, c0) + tc * img.at(r0, c0 + 1);
  const double bottom = (1 - tc) * img.at(r0 + 1, c0) + tc * img.at(r0 + 1, c0 + 1);
  return (1 - tr) * top + tr * bottom;
}

}  // namespace

void GridSpec::validate() const {
  if (n < 64 || n % 2 != 0) throw Error(ErrorCode::InvalidGrid, "grid size must be even and >= 64, got " + std::to_string(n));
  if (!(extent > 0.0) || !std::isfinite(extent)) throw Error(ErrorCode::InvalidGrid, "grid extent must be positive");
  if (!(waist > 0.0) || !std::isfinite(waist)) throw Error(ErrorCode::InvalidGrid, "beam waist must be positive");
}

GridField lg_mode(int ell, const GridSpec& grid) {
  grid.validate();
  GridField field{grid, std::vector<Complex>(pixel_count(grid))};
  const int order = std::abs(ell);
  const double sign = ell < 0 ? -1.0 : 1.0;
  const double radial_scale = std::numbers::sqrt2 / grid.waist;
  const double inv_w2 = 1.0 / (grid.waist * grid.waist);

  for_each_row(grid.n, [&](int r) {
    const double y = grid.y(r);
    for (int c = 0; c < grid.n; ++c) {
      const double x = grid.x(c);
      // (r sqrt2 / w0)^|ell| e^{i ell phi} == (sqrt2 / w0)^|ell| (x + i sgn(ell) y)^|ell|
      const Complex z(radial_scale * x, radial_scale * sign * y);
      Complex p(1.0, 0.0);
      for (int k = 0; k < order; ++k) p *= z;
      field.values[static_cast<std::size_t>(r) * grid.n + c] = p * std::exp(-(x * x + y * y) * inv_w2);
    }
  });

  const double norm2 = grid_sum(grid, [&](int r, int c) { return std::norm(field.at(r, c)); }) * grid.pixel_area();
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& v : field.values) v *= scale;
  return field;
}

Complex overlap(const GridField& a, const GridField& b) {
  if (a.grid != b.grid) throw Error(ErrorCode::InvalidGrid, "fields live on different grids");
  const GridSpec& g = a.grid;
  const double re = grid_sum(g, [&](int r, int c) { return (std::conj(a.at(r, c)) * b.at(r, c)).real(); });
  const double im = grid_sum(g, [&](int r, int c) { return (std::conj(a.at(r, c)) * b.at(r, c)).imag(); });
  return Complex(re, im) * g.pixel_area();
}

IntensityImage render_state(const DensityMatrix& rho, const GridSpec& grid) {
  grid.validate();
  const auto modes = basis_modes(rho.basis(), grid);
  const auto d = static_cast<Eigen::Index>(rho.dimension());
  const ComplexMatrix& m = rho.elements();
  IntensityImage image{grid, std::vector<double>(pixel_count(grid))};

  for_each_row(grid.n, [&](int r) {
    std::vector<Complex> u(static_cast<std::size_t>(d));
    for (int c = 0; c < grid.n; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * grid.n + c;
      for (Eigen::Index i = 0; i < d; ++i) u[static_cast<std::size_t>(i)] = modes[static_cast<std::size_t>(i)].values[idx];
      double value = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) {
        const Complex ui = u[static_cast<std::size_t>(i)];
        value += m(i, i).real() * std::norm(ui);
        for (Eigen::Index j = i + 1; j < d; ++j) {
          value += 2.0 * (m(i, j) * ui * std::conj(u[static_cast<std::size_t>(j)])).real();
        }
      }
      image.values[idx] = std::max(0.0, value);
    }
  });
  return image;
}

IntensityImage render_state(const Superposition& s, const GridSpec& grid) {
  std::vector<int> indices;
  for (const auto& [ell, a] : s.terms()) indices.push_back(ell);
  return render_state(pure_density(s, BasisSpec(std::move(indices))), grid);
}

std::vector<double> azimuthal_profile(const IntensityImage& image, std::pair<double, double> radius_band) {
  const auto [r_lo, r_hi] = radius_band;
  const GridSpec& g = image.grid;
  const double limit = g.extent * g.waist - g.pixel_pitch();
  if (!(r_lo >= 0.0) || !(r_hi > r_lo)) throw Error(ErrorCode::EmptyBand, "radius band must satisfy 0 <= r_lo < r_hi");
  if (r_hi > limit) throw Error(ErrorCode::EmptyBand, "radius band extends beyond the grid");

  const double dr = 0.5 * g.pixel_pitch();
  const int radial_samples = std::max(1, static_cast<int>(std::ceil((r_hi - r_lo) / dr)));
  const double step = (r_hi - r_lo) / radial_samples;
  const double bin_width = 2.0 * std::numbers::pi / kAngularBins;

  std::vector<double> raw(kAngularBins, 0.0);
  for (int b = 0; b < kAngularBins; ++b) {
    double acc = 0.0;
    for (int s = 0; s < kSubAngles; ++s) {
      const double phi = (b + (s + 0.5) / kSubAngles) * bin_width;
      const double cp = std::cos(phi);
      const double sp = std::sin(phi);
      for (int k = 0; k < radial_samples; ++k) {
        const double rad = r_lo + (k + 0.5) * step;
        acc += bilinear(image, rad * cp, rad * sp) * rad;
      }
    }
    raw[static_cast<std::size_t>(b)] = acc * step * bin_width / kSubAngles;
  }

  std::vector<double> smooth(kAngularBins, 0.0);
  constexpr int half = kSmoothingWidth / 2;
  for (int b = 0; b < kAngularBins; ++b) {
    double acc = 0.0;
    for (int k = -half; k <= half; ++k) acc += raw[static_cast<std::size_t>((b + k + kAngularBins) % kAngularBins)];
    smooth[static_cast<std::size_t>(b)] = acc / kSmoothingWidth;
  }
  return smooth;
}

int angular_lobe_count(const IntensityImage& image, std::pair<double, double> radius_band) {
  const auto profile = azimuthal_profile(image, radius_band);
  const auto [lo_it, hi_it] = std::minmax_element(profile.begin(), profile.end());
  const double floor = *lo_it;
  const double peak = *hi_it;
  if (!(peak > 0.0)) return 0;

  // A maximum counts only if it rises at least 5% of the peak above the
  // profile floor; a ring with no azimuthal modulation therefore has 0 lobes.
  // Runs of equal values (a maximum centred on a bin edge) count once.
  int lobes = 0;
  const int n = static_cast<int>(profile.size());
  auto at = [&](int b) { return profile[static_cast<std::size_t>(((b % n) + n) % n)]; };
  for (int b = 0; b < n; ++b) {
    const double v = at(b);
    if (!(v > at(b - 1))) continue;
    int end = b;
    while (end - b < n - 1 && at(end + 1) == v) ++end;
    if (v > at(end + 1) && v - floor >= kLobeThreshold * peak) ++lobes;
  }
  return lobes;
}

double port_power(const IntensityImage& image) {
  return grid_sum(image.grid, [&](int r, int c) { return image.at(r, c); }) * image.grid.pixel_area();
}

IntensityImage scaled(IntensityImage image, double factor) {
  for (auto& v : image.values) v *= factor;
  return image;
}

IntensityImage normalized_to_peak(IntensityImage image) {
  const double peak = image.values.empty() ? 0.0 : *std::max_element(image.values.begin(), image.values.end());
  if (peak > 0.0) {
    for (auto& v : image.values) v /= peak;
  }
  return image;
}

std::string encode_pgm(const IntensityImage& image) {
  const int n = image.grid.n;
  std::string out = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
  const double peak = image.values.empty() ? 0.0 : *std::max_element(image.values.begin(), image.values.end());
  out.reserve(out.size() + image.values.size());
  for (double v : image.values) {
    const double level = peak > 0.0 ? std::round(255.0 * std::clamp(v / peak, 0.0, 1.0)) : 0.0;
    out.push_back(static_cast<char>(static_cast<unsigned char>(level)));
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, const IntensityImage& image) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  const std::string bytes = encode_pgm(image);
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

IntensityImage decode_pgm(std::string_view bytes, GridSpec grid) {
  std::istringstream in{std::string(bytes)};
  std::string magic;
  int w = 0;
  int h = 0;
  int maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (!in || magic != "P5" || maxval <= 0 || maxval > 255) throw Error(ErrorCode::IoError, "not an 8-bit binary PGM");
  in.get();  // single whitespace after maxval
  if (w != h || w != grid.n) throw Error(ErrorCode::IoError, "PGM size does not match grid");
  const auto header = static_cast<std::size_t>(in.tellg());
  if (bytes.size() < header + pixel_count(grid)) throw Error(ErrorCode::IoError, "PGM pixel data truncated");
  IntensityImage image{grid, std::vector<double>(pixel_count(grid))};
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    image.values[i] = static_cast<unsigned char>(bytes[header + i]) / static_cast<double>(maxval);
  }
  return image;
}

}  // namespace oamplex
