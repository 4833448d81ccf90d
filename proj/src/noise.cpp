#include "rfc/noise.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>

#include "rfc/rng.hpp"

namespace rfc {

namespace {

constexpr double kCutoff = 3.5449077018110318;  // sqrt(4*pi)

// Stream tags keep the two noise kinds on disjoint RNG streams.
constexpr std::uint64_t kStreamDiscretized = 0x6477ee00;
constexpr std::uint64_t kStreamRegularized = 0x72656700;

struct PlanCache {
  std::mutex mu;
  std::map<int, fftw_plan> plans;

  fftw_plan get(int n) {
    std::scoped_lock lock(mu);
    auto it = plans.find(n);
    if (it != plans.end()) return it->second;
    fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
    fftw_plan p = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans.emplace(n, p);
    return p;
  }
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

int internal_size(int width, int height) {
  // Oversampling factor 2: the cutoff sqrt(4*pi) ~ 3.545 exceeds the unit-grid
  // Nyquist frequency pi, but fits below the half-spacing Nyquist 2*pi.
  return 2 * std::max(width, height);
}

}  // namespace

NoiseField sample_discretized_wn(int width, int height, std::uint64_t seed) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("sample_discretized_wn: zero extent");
  NoiseField f;
  f.width = width;
  f.height = height;
  f.kind = NoiseKind::DiscretizedWN;
  f.seed = seed;
  f.origin_x = width / 2;
  f.origin_y = height / 2;
  f.values.resize(static_cast<std::size_t>(width) * height);
  const std::uint64_t key = derive_key(seed, kStreamDiscretized);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    f.values[i] = rng_normal(key, i);
  return f;
}

std::vector<std::uint8_t> regularized_spectral_mask(int width, int height,
                                                    int& n_out) {
  const int n = internal_size(width, height);
  n_out = n;
  const double period = 0.5 * n;  // physical period in lattice units
  const double dk = 2.0 * std::numbers::pi / period;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) * n, 0);
  for (int jy = 0; jy < n; ++jy) {
    const int fy = jy < n / 2 ? jy : jy - n;
    for (int jx = 0; jx < n; ++jx) {
      const int fx = jx < n / 2 ? jx : jx - n;
      const double k = dk * std::hypot(fx, fy);
      mask[static_cast<std::size_t>(jy) * n + jx] = (k <= kCutoff) ? 1 : 0;
    }
  }
  return mask;
}

NoiseField sample_regularized_wn(int width, int height, std::uint64_t seed) {
  if (width < 2 || height < 2)
    throw std::invalid_argument(
        "sample_regularized_wn: extent too small for the internal transform");

  int n = 0;
  const std::vector<std::uint8_t> mask =
      regularized_spectral_mask(width, height, n);
  std::size_t n_modes = 0;
  for (auto m : mask) n_modes += m;

  const std::uint64_t key = derive_key(seed, kStreamRegularized);
  fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
  for (std::size_t idx = 0; idx < static_cast<std::size_t>(n) * n; ++idx) {
    if (mask[idx]) {
      double a, b;
      rng_normal2(key, idx, a, b);
      buf[idx][0] = a * std::numbers::sqrt2 / 2.0;
      buf[idx][1] = b * std::numbers::sqrt2 / 2.0;
    } else {
      // Energy outside the disc is identically zero before the transform.
      buf[idx][0] = 0.0;
      buf[idx][1] = 0.0;
    }
  }

  fftw_execute_dft(plan_cache().get(n), buf, buf);

  // The real part of the synthesized field has pointwise variance
  // n_modes / 2 (i.i.d. unit-variance complex modes, no Hermitian pairing);
  // rescale so the theoretical variance is exactly 1.
  const double amp = std::sqrt(2.0 / static_cast<double>(n_modes));

  NoiseField f;
  f.width = width;
  f.height = height;
  f.kind = NoiseKind::RegularizedWN;
  f.seed = seed;
  f.origin_x = width / 2;
  f.origin_y = height / 2;
  f.values.resize(static_cast<std::size_t>(width) * height);
  for (int j = 0; j < height; ++j)
    for (int i = 0; i < width; ++i)
      f.values[static_cast<std::size_t>(j) * width + i] =
          amp * buf[static_cast<std::size_t>(2 * j) * n + 2 * i][0];
  fftw_free(buf);
  return f;
}

double field_integral(const NoiseField& field, std::span<const Cell> cells) {
  const double area = field.spacing * field.spacing;
  double s = 0.0;
  for (const Cell& c : cells) {
    if (!field.in_range(c.x, c.y))
      throw std::invalid_argument("field_integral: cell out of range");
    s += field.at(c.x, c.y) * area;
  }
  return s;
}

double regularized_covariance_quadrature(double rx, double ry) {
  // c(r) = (1/(2*pi)^2) \int_{|k|<=K} cos(k.r) dk, in polar coordinates.
  const double r = std::hypot(rx, ry);
  const int nk = 600, nt = 600;
  const double dk = kCutoff / nk;
  const double dt = 2.0 * std::numbers::pi / nt;
  double s = 0.0;
  for (int a = 0; a < nk; ++a) {
    const double k = (a + 0.5) * dk;
    double row = 0.0;
    for (int b = 0; b < nt; ++b) {
      const double t = (b + 0.5) * dt;
      row += std::cos(k * r * std::cos(t));
    }
    s += k * row;
  }
  s *= dk * dt;
  return s / (4.0 * std::numbers::pi * std::numbers::pi);
}

namespace {
constexpr char kMagic[8] = {'R', 'F', 'N', 'O', 'I', 'S', 'E', '1'};
}

void save_noise(const NoiseField& field, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("save_noise: cannot open " + path);
  char header[32] = {};
  std::memcpy(header, kMagic, 8);
  const std::uint32_t kind = static_cast<std::uint32_t>(field.kind);
  const std::uint32_t w = field.width, h = field.height;
  const float spacing = static_cast<float>(field.spacing);
  std::memcpy(header + 8, &kind, 4);
  std::memcpy(header + 12, &w, 4);
  std::memcpy(header + 16, &h, 4);
  std::memcpy(header + 20, &field.seed, 8);
  std::memcpy(header + 28, &spacing, 4);
  std::fwrite(header, 1, 32, fp);
  std::fwrite(field.values.data(), 8, field.values.size(), fp);
  std::fclose(fp);
}

NoiseField load_noise(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw std::runtime_error("load_noise: cannot open " + path);
  char header[32];
  if (std::fread(header, 1, 32, fp) != 32 ||
      std::memcmp(header, kMagic, 8) != 0) {
    std::fclose(fp);
    throw std::runtime_error("load_noise: bad header in " + path);
  }
  std::uint32_t kind, w, h;
  float spacing;
  NoiseField f;
  std::memcpy(&kind, header + 8, 4);
  std::memcpy(&w, header + 12, 4);
  std::memcpy(&h, header + 16, 4);
  std::memcpy(&f.seed, header + 20, 8);
  std::memcpy(&spacing, header + 28, 4);
  f.kind = static_cast<NoiseKind>(kind);
  f.width = static_cast<int>(w);
  f.height = static_cast<int>(h);
  f.origin_x = f.width / 2;
  f.origin_y = f.height / 2;
  f.spacing = spacing;
  f.values.resize(static_cast<std::size_t>(f.width) * f.height);
  const std::size_t got = std::fread(f.values.data(), 8, f.values.size(), fp);
  std::fclose(fp);
  if (got != f.values.size())
    throw std::runtime_error("load_noise: truncated file " + path);
  return f;
}

void export_noise_csv(const NoiseField& field, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("export_noise_csv: cannot open " + path);
  std::fprintf(fp, "i,j,value\n");
  for (int j = 0; j < field.height; ++j)
    for (int i = 0; i < field.width; ++i)
      std::fprintf(fp, "%d,%d,%.17g\n", i, j, field.at(i, j));
  std::fclose(fp);
}

}  // namespace rfc
