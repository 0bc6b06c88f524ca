#pragma once

#include <cstddef>

// Vector kernels behind the numeric inner loops (coordinate descent, RBF
// distances, boosting scans, standardization moments). Each kernel has a
// scalar reference implementation and an AVX2+FMA variant; the variant is
// selected once at runtime from CPU capabilities. set_force_scalar(true)
// pins the reference path, which the equivalence tests use to compare both
// implementations on the same machine.
//
// Results are deterministic for a fixed machine and force flag; the SIMD
// variants may round differently from the scalar ones (lane-wise partial
// sums), which is why metric accumulators deliberately do not use them.

namespace epf::kernels {

void set_force_scalar(bool v);
bool force_scalar();
bool avx2_available();
const char* active_backend();  // "avx2" or "scalar"

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double sum_sq(const double* a, std::size_t n);
double sum_abs(const double* a, std::size_t n);
// Squared Euclidean distance sum((a-b)^2).
double sq_dist(const double* a, const double* b, std::size_t n);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);

namespace detail {
double dot_scalar(const double* a, const double* b, std::size_t n);
double sum_scalar(const double* a, std::size_t n);
double sum_sq_scalar(const double* a, std::size_t n);
double sum_abs_scalar(const double* a, std::size_t n);
double sq_dist_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
}  // namespace detail

}  // namespace epf::kernels
