// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "sectorial/errors.hpp"
#include "sectorial/sectorial_calculus.hpp"
#include "support/random.hpp"

using namespace sectorial;
using sectorial::testing::MatrixSampler;
using sectorial::testing::max_abs_diff;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

struct Diagonalizable {
  ComplexMatrix b, v, v_inv;
  CVector eigenvalues;
};

// B = V D V^{-1} with V close to the identity, so N(B) stays in the right half-plane.
Diagonalizable planted(MatrixSampler& s, std::size_t n, double max_arg) {
  for (;;) {
    Diagonalizable d;
    d.v = ComplexMatrix::identity(n);
    ComplexMatrix g = s.gaussian_matrix(n);
    g *= 0.15 / std::sqrt(static_cast<double>(n));
    d.v += g;
    d.v_inv = inverse(d.v);
    for (std::size_t i = 0; i < n; ++i) d.eigenvalues.push_back(std::polar(s.uniform(0.5, 3.0), s.uniform(-max_arg, max_arg)));
    d.b = d.v * ComplexMatrix::diagonal(d.eigenvalues) * d.v_inv;
    if (coercivity_constant(d.b) > 0.05) return d;
  }
}

ComplexMatrix oracle(const Diagonalizable& d, const std::function<cplx(cplx)>& f) {
  CVector fd;
  for (cplx l : d.eigenvalues) fd.push_back(f(l));
  return d.v * ComplexMatrix::diagonal(fd) * d.v_inv;
}

ComplexMatrix diag(std::initializer_list<cplx> values) {
  const CVector v(values);
  return ComplexMatrix::diagonal(v);
}

}  // namespace

TEST_CASE("certify examples", "[calculus]") {
  MatrixSampler s(301);
  const ComplexMatrix g = s.gaussian_matrix(4);
  ComplexMatrix spd = g.adjoint() * g;
  for (std::size_t i = 0; i < 4; ++i) spd(i, i) += 0.3;
  auto c = certify(spd);
  CHECK(c.theta.theta <= 1e-7);
  CHECK(c.min_re > 0.0);

  c = certify(diag({1.0, std::polar(1.0, kPi / 4)}));
  CHECK(c.theta.theta == Approx(kPi / 4).margin(1e-12));

  c = certify(ComplexMatrix{{1.0, 2.0}, {0.0, 1.0}});
  CHECK(c.theta.theta == Approx(kPi / 2).margin(1e-12));
  CHECK(c.min_re == Approx(0.0).margin(1e-12));

  c = certify(ComplexMatrix{{1.0, 2.0}, {0.0, 1.0}}, 0.5);
  CHECK(c.shift == 0.5);
  CHECK(c.min_re == Approx(0.5).margin(1e-12));
  CHECK(c.theta.theta < kPi / 2);

  CHECK_THROWS_AS(certify(diag({-1.0, 1.0})), Error);
  // Range touching the imaginary axis away from 0: accretive only.
  c = certify(diag({kI, 1.0}));
  CHECK(c.theta.theta == Approx(kPi / 2));
}

TEST_CASE("resolvent examples", "[calculus]") {
  auto s = certify(diag({1.0}));
  auto r = resolvent(s, -1.0);
  CHECK(r.norm == Approx(0.5));
  CHECK(r.distance == Approx(1.0));
  CHECK(r.pass);

  s = certify(diag({1.0, std::polar(1.0, kPi / 4)}));
  r = resolvent(s, -1.0);
  CHECK(r.norm == Approx(1.0 / std::abs(std::polar(1.0, kPi / 4) + 1.0)));
  CHECK(r.norm == Approx(0.541).margin(1e-3));
  CHECK(r.distance == Approx(1.0));
  for (double t : {0.01, 1.0, 100.0}) {
    const auto a = resolvent_angular(s, -t, kPi / 2);
    CHECK(a.bound == Approx(std::sqrt(2.0)));
    CHECK(a.pass);
  }
  CHECK_THROWS_AS(resolvent(s, 2.0), Error);
  CHECK_THROWS_AS(resolvent(s, std::polar(1.0, 0.5)), Error);
  CHECK_THROWS_AS(resolvent_angular(s, -1.0, 0.5), Error);
}

TEST_CASE("resolvent bound on random sectorial matrices", "[calculus][property]") {
  MatrixSampler s(307);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sm = certify(s.coercive(static_cast<std::size_t>(s.integer(1, 16)), 2.0));
    for (int k = 0; k < 30; ++k) {
      const double phi = s.uniform(sm.theta.theta + 1e-3, kPi) * (s.integer(0, 1) ? 1.0 : -1.0);
      const cplx lambda = std::polar(std::pow(10.0, s.uniform(-2.0, 2.0)), phi);
      CHECK(resolvent(sm, lambda).pass);
      for (double vt : {sm.theta.theta + 0.1, kPi / 2}) {
        if (vt <= sm.theta.theta || std::abs(phi) <= vt) continue;
        CHECK(resolvent_angular(sm, lambda, vt).pass);
      }
    }
  }
}

TEST_CASE("semigroup examples", "[calculus]") {
  auto s = certify(ComplexMatrix{{1.0, 1.0}, {0.0, 1.0}});
  auto r = semigroup(s, 0.0);
  CHECK(max_abs_diff(r.value, ComplexMatrix::identity(2)) <= 1e-15);
  CHECK(r.norm == Approx(1.0));
  for (double t : {0.1, 1.0, 3.0, 10.0}) {
    r = semigroup(s, t);
    const double expected = std::exp(-t) * spectral_norm(ComplexMatrix{{1.0, -t}, {0.0, 1.0}});
    CHECK(r.norm == Approx(expected).epsilon(1e-10));
    CHECK(r.norm <= 1.0 + 1e-10);
    CHECK(r.pass);
  }
  s = certify(diag({1.0, std::polar(1.0, kPi / 4)}));
  for (double rr : {0.1, 1.0, 5.0}) {
    r = semigroup(s, std::polar(rr, kPi / 4));
    CHECK(r.in_contraction_sector);
    CHECK(r.norm <= 1.0 + 1e-10);
  }
}

TEST_CASE("semigroup property and contraction", "[calculus][property]") {
  MatrixSampler s(311);
  for (int trial = 0; trial < 10; ++trial) {
    const auto sm = certify(s.coercive(static_cast<std::size_t>(s.integer(1, 10)), 1.5));
    const double open = kPi / 2 - sm.theta.theta;
    for (int k = 0; k < 10; ++k) {
      const cplx z1 = std::polar(s.uniform(0.0, 2.0), s.uniform(-open, open));
      const cplx z2 = std::polar(s.uniform(0.0, 2.0), open * (k % 2 ? 1.0 : -1.0));
      const auto a = semigroup(sm, z1), b = semigroup(sm, z2), ab = semigroup(sm, z1 + z2);
      CHECK(a.pass);
      CHECK(b.pass);
      CHECK(max_abs_diff(ab.value, a.value * b.value) <= 1e-9);
    }
  }
}

TEST_CASE("approximant examples and sandwich", "[calculus]") {
  auto s = certify(diag({1.0}));
  for (double eps : {0.5, 1e-3}) CHECK(std::abs(approximant(s, eps).b(0, 0) - 1.0) <= 1e-15);
  s = certify(diag({2.0}));
  auto a = approximant(s, 0.5);
  CHECK(a.b(0, 0).real() == Approx(1.25));
  CHECK(a.min_re >= 0.5);

  MatrixSampler sm(313);
  const ComplexMatrix g = sm.gaussian_matrix(5);
  ComplexMatrix h = g.adjoint() * g;
  const auto ev = eigvals_hermitian(h);
  a = approximant(certify(h), 0.1);
  CHECK(hermitian_defect(a.b) <= 1e-12);
  const auto eva = eigvals_hermitian(ComplexMatrix(operator_parts(a.b).re_part));
  for (std::size_t i = 0; i < ev.size(); ++i) CHECK(eva[i] == Approx((ev[i] + 0.1) / (1 + 0.1 * ev[i])).margin(1e-10));

  for (int trial = 0; trial < 10; ++trial) {
    const auto base = certify(sm.coercive(static_cast<std::size_t>(sm.integer(1, 12)), 2.0), 0.0);
    for (double eps : {1e-1, 1e-3, 1e-6}) {
      const auto be = approximant(base, eps);
      CHECK(be.theta.theta <= base.theta.theta + 1e-8);
      CHECK(be.min_re >= eps - 1e-10);
    }
  }
  // Merely accretive input.
  const auto acc = certify(ComplexMatrix{{1.0, 2.0}, {0.0, 1.0}});
  const auto be = approximant(acc, 1e-3);
  CHECK(be.min_re >= 1e-3 - 1e-10);
  CHECK_THROWS_AS(approximant(acc, 0.0), Error);
}

TEST_CASE("gauss_legendre rule", "[calculus]") {
  std::vector<double> x, w;
  gauss_legendre(200, x, w);
  double sum = 0.0, m2 = 0.0, m10 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sum += w[k];
    m2 += w[k] * x[k] * x[k];
    m10 += w[k] * std::pow(x[k], 10);
  }
  CHECK(sum == Approx(2.0).epsilon(1e-14));
  CHECK(m2 == Approx(2.0 / 3).epsilon(1e-13));
  CHECK(m10 == Approx(2.0 / 11).epsilon(1e-13));
  gauss_legendre(5, x, w);
  CHECK(x[2] == Approx(0.0).margin(1e-15));
  CHECK(w[2] == Approx(128.0 / 225).epsilon(1e-14));
}

TEST_CASE("named functions and envelopes", "[calculus]") {
  for (const auto& name : named_function_list()) {
    const auto f = named_function(name);
    REQUIRE(f.extended());
    const double top = std::min(f.max_angle, kPi) - 1e-3;
    for (double nu : {0.1, 0.5, 1.0, 1.5, 2.5, 3.0}) {
      if (nu >= top) continue;
      CHECK(envelope_ratio(f, nu) <= 1.0 + 1e-12);
    }
  }
  const auto r = named_function("res:-1+2i");
  CHECK(std::abs(r.eval(0.0) - (-1.0 / cplx{-1.0, 2.0})) <= 1e-15);
  CHECK(std::abs(named_function("res:-2").eval(0.0) - 0.5) <= 1e-15);
  CHECK(std::abs(named_function("res:-3i").eval(0.0) - 1.0 / (3.0 * kI)) <= 1e-15);
  CHECK(envelope_ratio(named_function("res:-0.5+0.5i"), 1.0) <= 1.0);
  CHECK_THROWS_AS(named_function("nope"), Error);
  CHECK_THROWS_AS(named_function("res:abc"), Error);
  CHECK_THROWS_AS(named_function("res:0"), Error);
  const auto p = product(named_function("rat1"), named_function("sqrtres"));
  CHECK(envelope_ratio(p, 1.0) <= 1.0);
  CHECK_THROWS_AS(product(named_function("exp"), named_function("rat1")), Error);
}

TEST_CASE("dunford_riesz examples", "[calculus]") {
  const auto rat1 = named_function("rat1");
  auto s = certify(diag({1.0}));
  CHECK(std::abs(dunford_riesz(rat1, s, 1.0)(0, 0) - 0.25) <= 1e-10);
  s = certify(diag({1.0, 2.0}));
  CHECK(max_abs_diff(dunford_riesz(rat1, s, 1.0), diag({0.25, 2.0 / 9})) <= 1e-10);
  s = certify(diag({4.0}));
  CHECK(std::abs(dunford_riesz(named_function("sqrtres"), s, 1.0)(0, 0) - 0.4) <= 1e-10);

  const auto tight = certify(diag({1.0, std::polar(1.0, 1.0)}));
  CHECK_THROWS_AS(dunford_riesz(rat1, tight, 1.05), Error);
  try {
    dunford_riesz(rat1, tight, 1.05);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ContourTooTight);
  }
  // The pole sits on the contour sector: the envelope is unbounded.
  const auto res = named_function("res:-1+1i");
  try {
    dunford_riesz(res, certify(diag({1.0})), 3 * kPi / 4);
    FAIL("expected TruncationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TruncationError);
  }
  CHECK_THROWS_AS(dunford_riesz(polynomial({0.0, 1.0}), s, 1.0), Error);
  CHECK_THROWS_AS(dunford_riesz(rat1, certify(ComplexMatrix{{1.0, 2.0}, {0.0, 1.0}}), 1.0), Error);
}

TEST_CASE("extended calculus against the eigen oracle", "[calculus][oracle]") {
  MatrixSampler s(317);
  const std::vector<std::string> names{"rat1", "cayley", "sqrtres", "exp", "res:-1", "res:-0.5+2i"};
  for (int trial = 0; trial < 6; ++trial) {
    const auto d = planted(s, static_cast<std::size_t>(s.integer(1, 8)), 0.6);
    const auto sm = certify(d.b);
    for (const auto& name : names) {
      const auto f = named_function(name);
      const double nu = sm.theta.theta + std::min(0.5 * (std::min(f.max_angle, kPi) - sm.theta.theta), 1.0);
      const ComplexMatrix got = evaluate(f, sm, nu);
      CHECK(spectral_norm(got - oracle(d, f.eval)) <= 1e-8);
      if (f.direct) CHECK(spectral_norm(got - f.direct(d.b)) <= 1e-8);
    }
  }
}

TEST_CASE("Dunford-Riesz is multiplicative", "[calculus][property]") {
  MatrixSampler s(331);
  const auto rat1 = named_function("rat1");
  const auto sq = named_function("sqrtres");
  const auto prod = product(rat1, sq);
  for (int trial = 0; trial < 4; ++trial) {
    const auto d = planted(s, static_cast<std::size_t>(s.integer(2, 6)), 0.8);
    const auto sm = certify(d.b);
    const double nu = sm.theta.theta + 0.5;
    const ComplexMatrix fg = dunford_riesz(prod, sm, nu);
    CHECK(spectral_norm(fg - dunford_riesz(rat1, sm, nu) * dunford_riesz(sq, sm, nu)) <= 1e-7);
  }
}

TEST_CASE("serial and parallel contour sums agree", "[calculus][parallel]") {
  MatrixSampler s(337);
  const auto d = planted(s, 5, 0.5);
  const auto sm = certify(d.b);
  const auto f = named_function("sqrtres");
  const ComplexMatrix a = dunford_riesz(f, sm, sm.theta.theta + 0.6, Exec::Serial);
  const ComplexMatrix b = dunford_riesz(f, sm, sm.theta.theta + 0.6, Exec::Parallel);
  CHECK(max_abs_diff(a, b) == 0.0);
}

TEST_CASE("calculus_convergence examples", "[calculus]") {
  const auto rat1 = named_function("rat1");
  const std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  auto steps = calculus_convergence(rat1, certify(diag({1.0})), 1.0, eps);
  for (const auto& st : steps) CHECK(st.difference <= 1e-9);

  steps = calculus_convergence(rat1, certify(diag({1.0, 4.0})), 1.0, eps);
  for (std::size_t k = 1; k < steps.size(); ++k) CHECK(steps[k].difference <= steps[k - 1].difference + 1e-12);
  CHECK(steps.back().difference <= 1e-4);
  // Oracle on mapped eigenvalues.
  const double mapped = std::abs(rat1.eval((4.0 + 0.1) / (1 + 0.4)) - rat1.eval(4.0));
  CHECK(steps.front().difference == Approx(std::max(mapped, 0.0)).epsilon(1e-6));

  steps = calculus_convergence(rat1, certify(ComplexMatrix{{1.0, 1.0}, {0.0, 2.0}}), 1.2, eps);
  for (std::size_t k = 1; k < steps.size(); ++k) CHECK(steps[k].difference <= steps[k - 1].difference + 1e-12);
  CHECK(steps.back().difference <= 1e-4);
}

TEST_CASE("crouzeix_ratio examples", "[calculus]") {
  MatrixSampler s(347);
  const ComplexMatrix u = s.unitary(4);
  const ComplexMatrix normal = u * diag({1.0, cplx{2.0, 1.0}, cplx{0.5, -0.3}, 3.0}) * u.adjoint();
  for (const auto& f : {named_function("rat1"), named_function("cayley"), polynomial({1.0, -2.0, 0.5})}) {
    CHECK(crouzeix_ratio(normal, f).ratio <= 1.0 + 1e-9);
  }

  const auto w = crouzeix_ratio(ComplexMatrix{{1.0, 2.0}, {0.0, 1.0}}, polynomial({-1.0, 1.0}));
  CHECK(w.matrix_norm == Approx(2.0));
  CHECK(w.ratio >= 2.0 - 1e-3);
  CHECK(w.ratio <= 2.0 + 1e-3);
  CHECK(w.pass);

  RegionSpec sector{RegionSpec::Kind::Sector, kPi / 4 + 0.1};
  const auto r = crouzeix_ratio(diag({1.0, std::polar(1.0, kPi / 4)}), named_function("rat1"), sector);
  CHECK(r.ratio <= 1.0 + std::sqrt(2.0));
  CHECK(r.sup == Approx(1.0 / (4 * std::cos((kPi / 4 + 0.1) / 2) * std::cos((kPi / 4 + 0.1) / 2))).epsilon(1e-9));

  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix b = s.gaussian_matrix(static_cast<std::size_t>(s.integer(2, 6)));
    std::vector<cplx> c;
    for (int k = 0; k < s.integer(1, 4); ++k) c.push_back(s.gaussian());
    CHECK(crouzeix_ratio(b, polynomial(c)).pass);
  }
}

TEST_CASE("von Neumann inequality", "[calculus]") {
  MatrixSampler s(349);
  const auto cayley = named_function("cayley");
  for (int trial = 0; trial < 10; ++trial) {
    const auto sm = certify(s.coercive(static_cast<std::size_t>(s.integer(1, 8)), 3.0));
    const auto r = von_neumann_check(sm, cayley);
    CHECK(r.matrix_norm <= 1.0 + 1e-9);
    CHECK(r.pass);
    CHECK(von_neumann_check(sm, named_function("exp")).pass);
  }
  const auto c = von_neumann_check(certify(diag({1.0, 2.0})), constant_function(cplx{0.3, 0.4}));
  CHECK(c.ratio == Approx(1.0).epsilon(1e-15));
  const auto jordan = certify(ComplexMatrix{{1.0, 1.0}, {0.0, 1.0}});
  const auto e = von_neumann_check(jordan, named_function("exp"));
  CHECK(e.matrix_norm <= 1.0);
  CHECK(e.pass);
  CHECK_THROWS_AS(von_neumann_check(jordan, polynomial({0.0, 1.0})), Error);
}
