#include <doctest.h>

#include <cmath>
#include <vector>

#include "epf/kernels.hpp"
#include "epf/rng.hpp"

using namespace epf;

namespace {

// Restores the dispatch flag even when an assertion throws.
struct ForceScalar {
  explicit ForceScalar(bool v) { kernels::set_force_scalar(v); }
  ~ForceScalar() { kernels::set_force_scalar(false); }
};

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

}  // namespace

TEST_CASE("scalar kernels match hand values") {
  const std::vector<double> a{1.0, -2.0, 3.0};
  const std::vector<double> b{4.0, 5.0, -6.0};
  CHECK(kernels::detail::dot_scalar(a.data(), b.data(), 3) == doctest::Approx(-24.0));
  CHECK(kernels::detail::sum_scalar(a.data(), 3) == doctest::Approx(2.0));
  CHECK(kernels::detail::sum_sq_scalar(a.data(), 3) == doctest::Approx(14.0));
  CHECK(kernels::detail::sum_abs_scalar(a.data(), 3) == doctest::Approx(6.0));
  CHECK(kernels::detail::sq_dist_scalar(a.data(), b.data(), 3) == doctest::Approx(139.0));
  std::vector<double> y{1.0, 1.0, 1.0};
  kernels::detail::axpy_scalar(2.0, a.data(), y.data(), 3);
  CHECK(y[0] == doctest::Approx(3.0));
  CHECK(y[1] == doctest::Approx(-3.0));
  CHECK(y[2] == doctest::Approx(7.0));
}

TEST_CASE("dispatched kernels agree with the scalar reference") {
  if (!kernels::avx2_available()) {
    MESSAGE("no AVX2 on this machine; dispatch is scalar either way");
  }
  Rng rng(20240511);
  // Lengths straddle the vector width, including empty and tail-only sizes.
  for (const std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 13u, 64u, 257u, 5000u}) {
    const auto a = random_vec(rng, n, 10.0);
    const auto b = random_vec(rng, n, 10.0);
    const double tol = 1e-12 * (1.0 + static_cast<double>(n));

    const double dot_simd = kernels::dot(a.data(), b.data(), n);
    const double sum_simd = kernels::sum(a.data(), n);
    const double sum_sq_simd = kernels::sum_sq(a.data(), n);
    const double sum_abs_simd = kernels::sum_abs(a.data(), n);
    const double sq_dist_simd = kernels::sq_dist(a.data(), b.data(), n);
    auto y_simd = b;
    kernels::axpy(0.37, a.data(), y_simd.data(), n);

    ForceScalar guard(true);
    CHECK(kernels::active_backend() == std::string("scalar"));
    const double scale = 1.0 + kernels::detail::sum_abs_scalar(a.data(), n) * 10.0;
    CHECK(std::abs(dot_simd - kernels::dot(a.data(), b.data(), n)) <= tol * scale);
    CHECK(std::abs(sum_simd - kernels::sum(a.data(), n)) <= tol * scale);
    CHECK(std::abs(sum_sq_simd - kernels::sum_sq(a.data(), n)) <= tol * scale * scale);
    CHECK(std::abs(sum_abs_simd - kernels::sum_abs(a.data(), n)) <= tol * scale);
    CHECK(std::abs(sq_dist_simd - kernels::sq_dist(a.data(), b.data(), n)) <= tol * scale * scale);
    auto y_ref = b;
    kernels::axpy(0.37, a.data(), y_ref.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(y_simd[i] == y_ref[i]);  // per-element op, bit-identical
    }
  }
}

TEST_CASE("force flag pins the reference backend") {
  CHECK(!kernels::force_scalar());
  {
    ForceScalar guard(true);
    CHECK(kernels::force_scalar());
    CHECK(kernels::active_backend() == std::string("scalar"));
  }
  CHECK(!kernels::force_scalar());
  if (kernels::avx2_available()) {
    CHECK(kernels::active_backend() == std::string("avx2"));
  }
}
