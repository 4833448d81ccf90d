#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace rfc::kernels {

// Data-parallel reduction kernels used in the Monte-Carlo and field-integral
// inner loops. Each has a scalar reference implementation and an AVX2 variant;
// the active one is selected once at startup from CPU capabilities. On a given
// machine the dispatch is fixed, so results are run-to-run reproducible.

double sum(std::span<const double> x);
double sum_abs(std::span<const double> x);
double max_abs(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
double sum_sq(std::span<const double> x);
void scale(std::span<double> x, double a);

// Reference implementations, kept for equivalence tests.
namespace scalar {
double sum(std::span<const double> x);
double sum_abs(std::span<const double> x);
double max_abs(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
double sum_sq(std::span<const double> x);
void scale(std::span<double> x, double a);
}  // namespace scalar

// "avx2" or "scalar".
std::string_view active_backend();

}  // namespace rfc::kernels
