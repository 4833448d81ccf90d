#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "rfc/kernels.hpp"
#include "rfc/rng.hpp"

using namespace rfc;

TEST_CASE("rng: determinism and stream independence") {
  CHECK(rng_word(42, 0) == rng_word(42, 0));
  CHECK(rng_word(42, 0) != rng_word(42, 1));
  CHECK(rng_word(42, 7) != rng_word(43, 7));
  CHECK(derive_key(1, 2) != derive_key(2, 1));
  CHECK(derive_key(1, 2) == derive_key(1, 2));
}

TEST_CASE("rng: uniform range (0,1], never zero") {
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const double u = rng_uniform(123, i);
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("rng: normal moments") {
  const int n = 200000;
  double s = 0.0, s2 = 0.0, s3 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng_normal(777, i);
    s += z;
    s2 += z * z;
    s3 += z * z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
  CHECK(std::abs(s3 / n) < 0.05);
}

TEST_CASE("rng: order independence (counter addressing)") {
  // Drawing the same indices in a different order gives the same values.
  std::vector<double> a, b;
  for (int i = 0; i < 64; ++i) a.push_back(rng_uniform(5, i));
  for (int i = 63; i >= 0; --i) b.push_back(rng_uniform(5, i));
  for (int i = 0; i < 64; ++i) CHECK(a[i] == b[63 - i]);
}

TEST_CASE("rng: normal2 matches normal on the cosine branch") {
  double z0, z1;
  rng_normal2(99, 12, z0, z1);
  CHECK(z0 == rng_normal(99, 12));
  CHECK(std::isfinite(z1));
}

TEST_CASE("kernels: dispatched variants agree with scalar references") {
  // Sizes straddle SIMD widths and remainders.
  for (int n : {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 33, 1000, 1001}) {
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = rng_normal(1000 + n, i);
      y[i] = rng_normal(2000 + n, i);
    }
    CHECK(kernels::sum(x) == doctest::Approx(kernels::scalar::sum(x))
                                 .epsilon(1e-12));
    CHECK(kernels::sum_abs(x) ==
          doctest::Approx(kernels::scalar::sum_abs(x)).epsilon(1e-12));
    CHECK(kernels::max_abs(x) == kernels::scalar::max_abs(x));
    CHECK(kernels::dot(x, y) ==
          doctest::Approx(kernels::scalar::dot(x, y)).epsilon(1e-12));
    CHECK(kernels::sum_sq(x) ==
          doctest::Approx(kernels::scalar::sum_sq(x)).epsilon(1e-12));

    std::vector<double> xs = x, xd = x;
    kernels::scalar::scale(xs, 1.75);
    kernels::scale(xd, 1.75);
    for (int i = 0; i < n; ++i) CHECK(xd[i] == xs[i]);
  }
}

TEST_CASE("kernels: exact values on handmade input") {
  const std::vector<double> x = {1.0, -2.0, 3.0, -4.0};
  const std::vector<double> y = {2.0, 2.0, 2.0, 2.0};
  CHECK(kernels::sum(x) == -2.0);
  CHECK(kernels::sum_abs(x) == 10.0);
  CHECK(kernels::max_abs(x) == 4.0);
  CHECK(kernels::dot(x, y) == -4.0);
  CHECK(kernels::sum_sq(x) == 30.0);
  CHECK((kernels::active_backend() == "avx2" ||
         kernels::active_backend() == "scalar"));
}
