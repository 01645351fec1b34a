// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "sectorial/errors.hpp"
#include "sectorial/numkernel.hpp"
#include "support/random.hpp"

using namespace sectorial;
using sectorial::testing::MatrixSampler;
using sectorial::testing::max_abs_diff;
using Catch::Approx;

namespace {

ComplexMatrix reconstruct(const HermitianEigen& e) {
  const std::size_t n = e.values.size();
  ComplexMatrix vl = e.vectors;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) vl(i, j) *= e.values[j];
  return vl * e.vectors.adjoint();
}

}  // namespace

TEST_CASE("eig_hermitian on small closed-form cases", "[numkernel][eig]") {
  const cplx d[] = {3.0, 1.0, 2.0};
  auto e = eig_hermitian(ComplexMatrix::diagonal(d));
  CHECK(e.values[0] == Approx(1.0));
  CHECK(e.values[1] == Approx(2.0));
  CHECK(e.values[2] == Approx(3.0));

  e = eig_hermitian(ComplexMatrix::identity(4));
  for (double v : e.values) CHECK(v == Approx(1.0));
  CHECK(max_abs_diff(e.vectors.adjoint() * e.vectors, ComplexMatrix::identity(4)) <= 1e-10);

  const ComplexMatrix h{{2.0, kI}, {-kI, 2.0}};
  e = eig_hermitian(h);
  CHECK(e.values[0] == Approx(1.0).margin(1e-14));
  CHECK(e.values[1] == Approx(3.0).margin(1e-14));
  CHECK(max_abs_diff(h * e.vectors, reconstruct(e) * e.vectors) <= 1e-12);
}

TEST_CASE("eig_hermitian rejects non-Hermitian input", "[numkernel][eig]") {
  const ComplexMatrix a{{1.0, 2.0}, {0.0, 1.0}};
  try {
    (void)eig_hermitian(a);
    FAIL("expected NotHermitian");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotHermitian);
  }
}

TEST_CASE("eig_hermitian reconstructs random Hermitian matrices and agrees with Jacobi", "[numkernel][eig][property]") {
  MatrixSampler rng(11);
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 16u, 33u, 64u}) {
    const ComplexMatrix h = rng.hermitian(n);
    const auto e = eig_hermitian(h);
    const double hn = spectral_norm(h);
    CHECK(max_abs_diff(h, reconstruct(e)) <= 1e-9 * hn);
    CHECK(max_abs_diff(e.vectors.adjoint() * e.vectors, ComplexMatrix::identity(n)) <= 1e-10);
    for (std::size_t i = 1; i < n; ++i) CHECK(e.values[i - 1] <= e.values[i]);

    const auto ref = eig_hermitian_jacobi(h);
    CHECK(max_abs_diff(h, reconstruct(ref)) <= 1e-9 * hn);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(e.values[i] - ref.values[i]) <= 1e-11 * hn);

    const auto values_only = eigvals_hermitian(h);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(e.values[i] - values_only[i]) <= 1e-12 * hn);
  }
}

TEST_CASE("eig_general examples", "[numkernel][eig]") {
  const cplx d[] = {1.0, cplx{10.0, 1.0}};
  auto v = eig_general(ComplexMatrix::diagonal(d));
  REQUIRE(v.size() == 2);
  CHECK(std::abs(v[0] - 1.0) <= 1e-12);
  CHECK(std::abs(v[1] - cplx{10.0, 1.0}) <= 1e-12);

  v = eig_general(ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}});
  CHECK(std::abs(v[0]) <= 1e-8);
  CHECK(std::abs(v[1]) <= 1e-8);

  v = eig_general(ComplexMatrix{{1.0, 2.0}, {0.0, 3.0}});
  CHECK(std::abs(v[0] - 1.0) <= 1e-12);
  CHECK(std::abs(v[1] - 3.0) <= 1e-12);
}

TEST_CASE("eig_general on random matrices preserves trace and recovers planted spectra", "[numkernel][eig][property]") {
  MatrixSampler rng(5);
  for (std::size_t n : {2u, 4u, 9u, 16u, 30u}) {
    const ComplexMatrix a = rng.gaussian_matrix(n);
    const auto v = eig_general(a);
    cplx trace = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += a(i, i);
    for (const auto& z : v) sum += z;
    CHECK(std::abs(trace - sum) <= 1e-10 * n * spectral_norm(a));

    // Similarity transform of a known diagonal.
    CVector planted(n);
    for (std::size_t i = 0; i < n; ++i) planted[i] = cplx{static_cast<double>(i) + 1.0, 0.5 * static_cast<double>(i % 3)};
    const ComplexMatrix s = rng.gaussian_matrix(n) + 3.0 * ComplexMatrix::identity(n);
    const ComplexMatrix b = s * ComplexMatrix::diagonal(planted) * inverse(s);
    const auto w = eig_general(b);
    for (const auto& p : planted) {
      double best = 1e300;
      for (const auto& z : w) best = std::min(best, std::abs(z - p));
      CHECK(best <= 1e-8 * n);
    }
  }
}

TEST_CASE("solve examples and residual bound", "[numkernel][solve]") {
  const cplx b[] = {1.0, cplx{2.0, -1.0}};
  auto x = solve(ComplexMatrix::identity(2), std::span<const cplx>(b));
  CHECK(std::abs(x[0] - b[0]) == 0.0);
  CHECK(std::abs(x[1] - b[1]) == 0.0);

  const cplx one[] = {1.0};
  x = solve(ComplexMatrix{{2.0}}, std::span<const cplx>(one));
  CHECK(x[0].real() == 0.5);

  const cplx ones[] = {1.0, 1.0};
  x = solve(ComplexMatrix{{1.0, 1.0}, {0.0, 1.0}}, std::span<const cplx>(ones));
  CHECK(std::abs(x[0]) <= 1e-15);
  CHECK(std::abs(x[1] - 1.0) <= 1e-15);

  MatrixSampler rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 40));
    const ComplexMatrix a = rng.gaussian_matrix(n);
    const ComplexMatrix rhs = rng.gaussian_matrix(n);
    const ComplexMatrix sol = solve(a, rhs);
    const double resid = spectral_norm(a * sol - rhs);
    CHECK(resid <= 1e-10 * spectral_norm(a) * spectral_norm(sol));
  }
}

TEST_CASE("solve reports singular systems", "[numkernel][solve]") {
  const ComplexMatrix a{{1.0, 2.0}, {2.0, 4.0}};
  try {
    (void)inverse(a);
    FAIL("expected Singular");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Singular);
  }
}

TEST_CASE("spectral_norm examples and submultiplicativity", "[numkernel][norm]") {
  CHECK(spectral_norm(ComplexMatrix::identity(3)) == Approx(1.0).epsilon(1e-12));
  CHECK(spectral_norm(ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}) == Approx(1.0).epsilon(1e-12));
  const cplx d[] = {1.0, cplx{10.0, 1.0}};
  CHECK(spectral_norm(ComplexMatrix::diagonal(d)) == Approx(std::sqrt(101.0)).epsilon(1e-12));

  MatrixSampler rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 12));
    const ComplexMatrix a = rng.gaussian_matrix(n), b = rng.gaussian_matrix(n);
    CHECK(spectral_norm(a * b) <= spectral_norm(a) * spectral_norm(b) + 1e-10);
    // Jacobi oracle for sqrt(lambda_max(A*A))
    const auto ref = eig_hermitian_jacobi(gram(a));
    CHECK(spectral_norm(a) == Approx(std::sqrt(ref.values.back())).epsilon(1e-10));
  }
}

TEST_CASE("expm examples", "[numkernel][expm]") {
  CHECK(max_abs_diff(expm(ComplexMatrix(3)), ComplexMatrix::identity(3)) == 0.0);
  CHECK(std::abs(expm(ComplexMatrix{{1.0}})(0, 0) - std::numbers::e) <= 1e-15);
  for (double t : {0.5, 3.0, 40.0}) {
    const ComplexMatrix n{{0.0, -t}, {0.0, 0.0}};
    const ComplexMatrix expected{{1.0, -t}, {0.0, 1.0}};
    CHECK(max_abs_diff(expm(n), expected) <= 1e-13 * (1.0 + t));
  }
  try {
    (void)expm(ComplexMatrix{{2e4}});
    FAIL("expected Overflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Overflow);
  }
}

TEST_CASE("expm against the eigen-oracle and on commuting pairs", "[numkernel][expm][property]") {
  MatrixSampler rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 10));
    CVector d(n), e(n), ed(n);
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = cplx{rng.uniform(-4.0, 2.0), rng.uniform(-6.0, 6.0)};
      e[i] = cplx{rng.uniform(-2.0, 2.0), rng.uniform(-3.0, 3.0)};
      ed[i] = std::exp(d[i]);
    }
    const ComplexMatrix s = rng.gaussian_matrix(n) + 4.0 * ComplexMatrix::identity(n);
    const ComplexMatrix si = inverse(s);
    const ComplexMatrix a = s * ComplexMatrix::diagonal(d) * si;
    const ComplexMatrix oracle = s * ComplexMatrix::diagonal(ed) * si;
    CHECK(spectral_norm(expm(a) - oracle) <= 1e-9 * spectral_norm(oracle));

    const ComplexMatrix da = ComplexMatrix::diagonal(d), db = ComplexMatrix::diagonal(e);
    const ComplexMatrix lhs = expm(da + db), rhs = expm(da) * expm(db);
    CHECK(spectral_norm(lhs - rhs) <= 1e-9 * std::max(1.0, spectral_norm(lhs)));
  }
}

TEST_CASE("parallel and serial matrix products agree exactly", "[numkernel][parallel]") {
  MatrixSampler rng(29);
  const ComplexMatrix a = rng.gaussian_matrix(70), b = rng.gaussian_matrix(70);
  CHECK(max_abs_diff(multiply(a, b, Exec::Serial), multiply(a, b, Exec::Parallel)) == 0.0);
}

TEST_CASE("tolerance registry round trips names", "[numkernel][config]") {
  Tolerances t;
  for (const auto& name : Tolerances::names()) CHECK(t.get(name) == default_tolerances().get(name));
  t.set("n_dirs", 1440);
  CHECK(t.n_dirs == 1440);
  CHECK_THROWS_AS(t.set("nope", 1.0), Error);
}
