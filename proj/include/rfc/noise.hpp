#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfc {

enum class NoiseKind : std::uint8_t { DiscretizedWN = 0, RegularizedWN = 1 };

// One realization of the random field on a rectangular grid of unit cells.
// Cell (i,j) covers [i,i+1)x[j,j+1) relative to `origin`; the stored value is
// the field at the cell center, treated as the cell average.
struct NoiseField {
  std::vector<double> values;  // row-major, index j*width+i
  int width = 0;
  int height = 0;
  double spacing = 1.0;
  int origin_x = 0;
  int origin_y = 0;
  NoiseKind kind = NoiseKind::DiscretizedWN;
  std::uint64_t seed = 0;

  double at(int i, int j) const {
    return values[static_cast<std::size_t>(j) * width + i];
  }
  bool in_range(int i, int j) const {
    return i >= 0 && i < width && j >= 0 && j < height;
  }
};

struct Cell {
  int x, y;
  friend bool operator==(Cell a, Cell b) { return a.x == b.x && a.y == b.y; }
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

// i.i.d. standard normals, one per unit cell.
NoiseField sample_discretized_wn(int width, int height, std::uint64_t seed);

// Stationary Gaussian field with spectral density supported on the closed
// disc |k| <= sqrt(4*pi). Synthesized on an internal half-spacing grid
// (oversampling factor 2, since sqrt(4*pi) exceeds the unit-grid Nyquist
// frequency pi), then restricted to unit-grid sample points and rescaled to
// exact unit pointwise variance.
NoiseField sample_regularized_wn(int width, int height, std::uint64_t seed);

// Spectral indicator actually applied for a (width x height) request:
// entry (jx, jy) of the internal N x N frequency grid, row-major. Exposed for
// the spectral-support test.
std::vector<std::uint8_t> regularized_spectral_mask(int width, int height,
                                                    int& n_out);

// Sum of cell value x cell area over `cells`; equals the integral of the
// field over the cell union.
double field_integral(const NoiseField& field, std::span<const Cell> cells);

// Exact covariance of the regularized field at lag r, by 2D quadrature of the
// inverse transform of the spectral density (used as a test oracle, exported
// here so the CLI noise-check can report it too).
double regularized_covariance_quadrature(double rx, double ry);

// Flat binary dump: 32-byte header (magic "RFNOISE1", u32 kind, u32 width,
// u32 height, u64 seed, f32 spacing), then width*height little-endian f64,
// row-major. CSV export is one "i,j,value" line per cell.
void save_noise(const NoiseField& field, const std::string& path);
NoiseField load_noise(const std::string& path);
void export_noise_csv(const NoiseField& field, const std::string& path);

}  // namespace rfc
