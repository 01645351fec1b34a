// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "sectorial/coefficient_field.hpp"
#include "sectorial/errors.hpp"
#include "support/random.hpp"
#include "support/sphere_oracle.hpp"

using namespace sectorial;
using sectorial::testing::MatrixSampler;
using sectorial::testing::minimize_on_sphere;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
const ComplexMatrix kHermCell{{2.0, kI}, {-kI, 2.0}};
const double kQ = 4.0 + 2.0 * std::sqrt(2.0);

ComplexMatrix random_cell(MatrixSampler& s, std::size_t d, double im_scale) { return s.coefficient(d, im_scale); }

double oracle_delta(const ComplexMatrix& mu, double p, std::uint64_t seed) {
  auto f = [&](std::span<const cplx> xi) { return p_form_value(mu, p, xi).real(); };
  return minimize_on_sphere(f, mu.rows(), 100000, seed).refined_min;
}

double oracle_p_angle(const ComplexMatrix& mu, double p, std::uint64_t seed) {
  auto f = [&](std::span<const cplx> xi) { return -std::abs(std::arg(p_form_value(mu, p, xi))); };
  return -minimize_on_sphere(f, mu.rows(), 100000, seed, 16).refined_min;
}

}  // namespace

TEST_CASE("analyze_cell examples", "[coefficient_field]") {
  auto c = analyze_cell(ComplexMatrix::identity(2));
  CHECK(c.m_x == Approx(1.0));
  CHECK(c.re_norm == Approx(1.0));
  CHECK(c.im_norm == Approx(0.0).margin(1e-15));
  CHECK(c.omega_x.theta == Approx(0.0).margin(1e-15));

  c = analyze_cell(kHermCell);
  CHECK(c.m_x == Approx(1.0));
  CHECK(c.re_norm == Approx(2.0));
  CHECK(c.im_norm == Approx(1.0));
  CHECK(c.omega_x.theta == Approx(0.0).margin(1e-12));

  c = analyze_cell(cplx{1.0, 1.0} * ComplexMatrix::identity(3));
  CHECK(c.m_x == Approx(1.0));
  CHECK(c.im_norm == Approx(1.0));
  CHECK(c.omega_x.theta == Approx(kPi / 4));

  CHECK_THROWS_AS(analyze_cell(ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}), Error);

  MatrixSampler s(101);
  for (int trial = 0; trial < 20; ++trial) {
    c = analyze_cell(random_cell(s, static_cast<std::size_t>(s.integer(1, 3)), 2.0));
    CHECK(std::tan(c.omega_x.theta) <= c.nimop / c.m_x + 1e-9);
  }
}

TEST_CASE("field_alpha examples", "[coefficient_field]") {
  const ComplexMatrix d10{{1.0, 0.0}, {0.0, cplx{10.0, 1.0}}};
  CHECK(make_uniform_field(d10).alpha.theta == Approx(kPi / 4));
  CHECK(field_alpha(make_uniform_field(d10)).theta == Approx(kPi / 4));
  CHECK(make_field({2}, {kHermCell, 3.0 * ComplexMatrix::identity(2)}).alpha.theta == Approx(0.0).margin(1e-12));
  const auto f = make_field({1, 2}, {cplx{1.0, 1.0} * ComplexMatrix::identity(2), 2.0 * ComplexMatrix::identity(2)});
  CHECK(f.alpha.theta == Approx(kPi / 4));
  CHECK(f.m_bullet == Approx(1.0));

  CHECK_THROWS_AS(make_field({3}, {kHermCell}), Error);
  CHECK_THROWS_AS(make_field({2}, {kHermCell, ComplexMatrix::identity(3)}), Error);
}

TEST_CASE("field construction is order independent", "[coefficient_field][parallel]") {
  MatrixSampler s(103);
  std::vector<ComplexMatrix> mus;
  for (int k = 0; k < 24; ++k) mus.push_back(random_cell(s, 2, 1.0));
  const auto a = make_field({4, 6}, mus, Exec::Serial);
  const auto b = make_field({4, 6}, mus, Exec::Parallel);
  CHECK(a.m_bullet == b.m_bullet);
  CHECK(a.eta == b.eta);
  CHECK(a.omega_mu.theta == b.omega_mu.theta);
  CHECK(a.alpha.theta == b.alpha.theta);
}

TEST_CASE("psi and its inverse", "[coefficient_field]") {
  CHECK(static_cast<double>(psi(4.0L)) == Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK(static_cast<double>(psi(10.0L)) == Approx(0.75).epsilon(1e-15));
  CHECK(std::abs(static_cast<double>(psi_inverse(1.0L)) - kQ) <= 1e-12);
  for (int k = 0; k <= 60; ++k) {
    const long double eta = std::pow(10.0L, -3.0L + 6.0L * k / 60.0L);
    const long double s = psi_inverse(eta);
    CHECK(s > 2.0L);
    CHECK(std::abs(static_cast<double>(psi(s) - eta)) <= 1e-12);
  }
  CHECK_THROWS_AS(psi(2.0L), Error);
  CHECK_THROWS_AS(psi_inverse(0.0L), Error);
  // sigma_p = 1/Psi(p) and sigma at the critical exponent of eta = 1.
  for (double p : {2.5, 3.0, 7.0, 40.0}) CHECK(sigma(p) == Approx(1.0 / static_cast<double>(psi(p))));
  CHECK(sigma(kQ) == Approx(1.0).epsilon(1e-14));
  CHECK(sigma(2.0) == 0.0);
  CHECK(sigma(1.5) == Approx(sigma(3.0)));
  const auto pe = PExponent::make(3.0);
  CHECK(1.0 / pe.p + 1.0 / pe.p_conj == Approx(1.0));
  CHECK_THROWS_AS(PExponent::make(1.0), Error);
}

TEST_CASE("eta and q examples", "[coefficient_field]") {
  auto f = make_uniform_field(kHermCell);
  CHECK(f.eta == Approx(1.0));
  CHECK(f.q_crit == Approx(kQ).epsilon(1e-14));
  CHECK(f.q_crit > 2.0);

  f = make_uniform_field(ComplexMatrix{{2.0, 0.5}, {0.5, 3.0}});
  CHECK(f.eta == 0.0);
  CHECK(std::isinf(f.q_crit));
  CHECK(std::isinf(f.q_bullet));

  const ComplexMatrix second = 4.0 * ComplexMatrix::identity(2) + ComplexMatrix{{0.0, kI}, {-kI, 0.0}};
  f = make_field({2}, {kHermCell, second});
  CHECK(f.cells[1].m_x == Approx(3.0));
  CHECK(f.cells[1].im_norm == Approx(1.0));
  CHECK(f.eta == Approx(1.0));

  MatrixSampler s(107);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ComplexMatrix> mus;
    for (int k = 0; k < 6; ++k) mus.push_back(random_cell(s, 2, 2.0));
    f = make_field({2, 3}, mus);
    CHECK(f.eta_bullet >= f.eta);
    CHECK(f.q_bullet <= f.q_crit);
    CHECK(f.q_crit > 2.0);
  }
}

TEST_CASE("delta_p examples against the sphere oracle", "[coefficient_field][oracle]") {
  MatrixSampler s(109);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix mu = random_cell(s, 2, 1.0);
    CHECK(delta_p(mu, 2.0) == Approx(coercivity_constant(mu)).margin(1e-12));
  }
  CHECK(delta_p(ComplexMatrix::identity(2), 4.0) == Approx(0.5).margin(1e-14));
  for (double p : {1.3, 3.0, 6.0}) {
    CHECK(delta_p(ComplexMatrix::identity(3), p) == Approx(2.0 / std::max(p, p / (p - 1.0))).margin(1e-14));
  }
  CHECK(oracle_delta(ComplexMatrix::identity(2), 4.0, 1) == Approx(0.5).margin(1e-4));

  const double dq = delta_p(kHermCell, kQ);
  CHECK(dq >= -1e-9);
  const double oracle = oracle_delta(kHermCell, kQ, 2);
  CHECK(std::abs(dq - oracle) <= 1e-4);
  CHECK(dq <= oracle + 1e-10);

  CHECK_THROWS_AS(delta_p(kHermCell, 1.0), Error);
}

TEST_CASE("delta_p invariants", "[coefficient_field][property]") {
  MatrixSampler s(113);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix mu = random_cell(s, static_cast<std::size_t>(s.integer(1, 3)), 2.0);
    for (double p : {2.5, 3.0, 5.0}) CHECK(delta_p(mu, p) == Approx(delta_p(mu, p / (p - 1.0))).margin(1e-10));

    // Real coefficients are p-elliptic for every p.
    const ComplexMatrix real = s.real_coercive(3);
    for (double p : {1.1, 2.0, 10.0, 100.0}) CHECK(delta_p(real, p) > 0.0);

    // Convex combination of the p and p' forms.
    const double p = s.uniform(1.2, 8.0);
    CVector xi(mu.rows());
    for (auto& z : xi) z = s.gaussian();
    const cplx lhs = quadratic_form(mu, xi, xi);
    const cplx form2 = p_form_value(mu, 2.0, xi);
    const cplx combo = 0.5 * p_form_value(mu, p, xi) + 0.5 * p_form_value(mu, p / (p - 1.0), xi);
    CHECK(std::abs(form2 - combo) <= 1e-12 * std::max(1.0, std::abs(form2)));
    CHECK(std::abs(form2 - lhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }

  // Eigen value against the oracle on random cells.
  for (int trial = 0; trial < 4; ++trial) {
    const ComplexMatrix mu = random_cell(s, 2, 1.5);
    const double p = s.uniform(1.5, 5.0);
    const double exact = delta_p(mu, p);
    const double oracle = oracle_delta(mu, p, 200 + trial);
    CHECK(std::abs(exact - oracle) <= 1e-4);
    CHECK(exact <= oracle + 1e-10);
  }
}

TEST_CASE("p-ellipticity window", "[coefficient_field][property]") {
  MatrixSampler s(127);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<ComplexMatrix> mus;
    for (int k = 0; k < 4; ++k) mus.push_back(random_cell(s, 2, 3.0));
    const auto f = make_field({2, 2}, mus);
    const double gap = std::abs(0.5 - 1.0 / f.q_crit);
    for (int k = 1; k < 10; ++k) {
      // p with |1/2 - 1/p| = gap * k/10
      const double inv = 0.5 + gap * k / 10.0 * (k % 2 == 0 ? 1.0 : -1.0);
      const double p = 1.0 / inv;
      for (const auto& c : f.cells) CHECK(delta_p(c.mu, p) > 0.0);
      CHECK(in_window(p, f.q_crit));
      double min_delta = 1e300;
      for (const auto& c : f.cells) min_delta = std::min(min_delta, delta_p(c.mu, p));
      CHECK(min_delta >= delta_p_lower_bound(f, p) - 1e-9);
    }
  }
}

TEST_CASE("delta_p_lower_bound examples", "[coefficient_field]") {
  auto f = make_field({2}, {kHermCell, 3.0 * ComplexMatrix::identity(2)});
  CHECK(delta_p_lower_bound(f, 2.0) == Approx(f.m_bullet / 2));
  f = make_uniform_field(ComplexMatrix{{2.0, 0.5}, {0.5, 3.0}});
  CHECK(delta_p_lower_bound(f, 7.0) == Approx(f.m_bullet / 7.0));
  f = make_uniform_field(kHermCell);
  const double b = delta_p_lower_bound(f, 4.0);
  CHECK(b == Approx((std::sqrt(3.0) - 1.0) / 4.0).epsilon(1e-12));
  CHECK(delta_p(kHermCell, 4.0) >= b);
  CHECK(delta_p_lower_bound(f, 4.0 / 3.0) == Approx(b).epsilon(1e-12));
  CHECK_THROWS_AS(delta_p_lower_bound(f, 7.0), Error);
  CHECK_THROWS_AS(delta_p_lower_bound(f, 1.1), Error);
}

TEST_CASE("p_range_angle examples", "[coefficient_field][oracle]") {
  MatrixSampler s(131);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix mu = random_cell(s, 2, 1.0);
    CHECK(p_range_angle(mu, 2.0).theta == Approx(optimal_angle(mu).theta).margin(1e-12));
  }
  CHECK(p_range_angle(ComplexMatrix{{1.0}}, 4.0).theta == Approx(kPi / 6).margin(1e-12));
  CHECK(p_range_angle(ComplexMatrix::identity(2), 4.0).theta == Approx(kPi / 6).margin(1e-12));
  CHECK(oracle_p_angle(ComplexMatrix::identity(2), 4.0, 3) == Approx(kPi / 6).margin(1e-6));

  // N_4(1) is the disk with centre 1 and radius 1/2.
  for (int k = 0; k < 64; ++k) {
    const double phi = 2 * kPi * k / 64;
    const cplx xi[] = {cplx{std::cos(phi), std::sin(phi)}};
    CHECK(std::abs(p_form_value(ComplexMatrix{{1.0}}, 4.0, xi) - 1.0) == Approx(0.5).margin(1e-14));
  }

  CHECK_THROWS_AS(p_range_angle(ComplexMatrix{{kI, 0.0}, {0.0, 1.0}}, 2.0), Error);
  // Delta_p <= 0 beyond the window of a strongly complex cell.
  const ComplexMatrix complex_cell = ComplexMatrix::identity(2) + kI * ComplexMatrix{{0.0, 3.0}, {3.0, 0.0}};
  try {
    p_range_angle(complex_cell, 50.0);
    FAIL("expected NotPElliptic");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPElliptic);
  }
}

TEST_CASE("p_range_angle against the oracle and the estimates", "[coefficient_field][property]") {
  MatrixSampler s(137);
  for (int trial = 0; trial < 4; ++trial) {
    const ComplexMatrix mu = random_cell(s, 2, 1.0);
    const auto f = make_uniform_field(mu);
    const double p = 2.0 + (std::min(f.q_crit, 8.0) - 2.0) * s.uniform(0.1, 0.8);
    const double exact = p_range_angle(mu, p).theta;
    CHECK(optimal_angle(mu).theta <= exact + 1e-9);
    CHECK(oracle_p_angle(mu, p, 300 + trial) == Approx(exact).margin(1e-6));
  }
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<ComplexMatrix> mus;
    for (int k = 0; k < 3; ++k) mus.push_back(random_cell(s, 2, 2.0));
    const auto f = make_field({3}, mus);
    for (int k = 1; k < 8; ++k) {
      const double qq = std::min(f.q_crit, 50.0);
      double p = 2.0 + (qq - 2.0) * k / 8.0;
      if (k % 2 == 1) p = p / (p - 1.0);
      const double a = alpha_p_complex(f, p).theta;
      for (const auto& c : f.cells) CHECK(p_range_angle(c.mu, p).theta <= a + 1e-8);
    }
  }
}

TEST_CASE("alpha_p_real examples", "[coefficient_field]") {
  MatrixSampler s(139);
  for (int k = 0; k < 5; ++k) {
    const auto w = SectorAngle::make(s.uniform(0.0, 1.5), AngleRole::Optimal);
    CHECK(alpha_p_real(w, 2.0).theta == Approx(w.theta).margin(1e-14));
  }
  const auto zero = SectorAngle::make(0.0, AngleRole::Optimal);
  CHECK(alpha_p_real(zero, 4.0).theta == Approx(kPi / 6).margin(1e-14));
  CHECK(alpha_p_real(zero, 4.0).theta == Approx(p_range_angle(ComplexMatrix::identity(2), 4.0).theta).margin(1e-12));
  CHECK(alpha_p_real(zero, 1e12).theta == Approx(kPi / 2).margin(1e-5));
  // The literal reading gives tan(alpha_2) = omega instead of omega.
  const auto w = SectorAngle::make(0.5, AngleRole::Optimal);
  CHECK(std::tan(alpha_p_real(w, 2.0, LpWinkelForm::LiteralOmegaSquared).theta) == Approx(0.5));
  CHECK_THROWS_AS(alpha_p_real(SectorAngle::make(kPi / 2, AngleRole::Optimal), 3.0), Error);

  // For real coefficients the formula bounds the p-numerical range angle.
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix mu = s.real_coercive(2);
    const auto om = optimal_angle(mu);
    for (double p : {1.5, 3.0, 6.0}) CHECK(p_range_angle(mu, p).theta <= alpha_p_real(om, p).theta + 1e-9);
  }
}

TEST_CASE("alpha_p_complex and uniform examples", "[coefficient_field]") {
  auto f = make_uniform_field(kHermCell);
  CHECK(std::tan(alpha_p_complex(f, 4.0).theta) == Approx(std::sqrt(3.0) + 1.0).epsilon(1e-12));
  CHECK(alpha_p_complex(f, 4.0).theta == Approx(1.2199).margin(1e-4));
  CHECK(p_range_angle(kHermCell, 4.0).theta <= alpha_p_complex(f, 4.0).theta + 1e-8);
  CHECK(alpha_p_complex(f, 2.0).theta == Approx(f.omega_mu.theta).margin(1e-12));
  CHECK(alpha_p_uniform(f, 4.0).theta == Approx(alpha_p_complex(f, 4.0).theta).margin(1e-14));
  CHECK_THROWS_AS(alpha_p_complex(f, 7.0), Error);

  f = make_uniform_field(cplx{1.0, 1.0} * ComplexMatrix::identity(2));
  CHECK(alpha_p_complex(f, 2.0).theta == Approx(kPi / 4));
  CHECK(alpha_p_uniform(f, 2.0).theta == Approx(kPi / 4));

  f = make_field({2}, {ComplexMatrix::identity(2), kHermCell});
  CHECK(alpha_p_uniform(f, 3.0).theta >= alpha_p_complex(f, 3.0).theta - 1e-9);

  MatrixSampler s(149);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<ComplexMatrix> mus;
    for (int k = 0; k < 4; ++k) mus.push_back(random_cell(s, 2, 2.0));
    f = make_field({4}, mus);
    const double p = 2.0 + (std::min(f.q_bullet, 20.0) - 2.0) * s.uniform(0.0, 0.95);
    CHECK(alpha_p_complex(f, p).theta <= alpha_p_uniform(f, p).theta + 1e-9);
  }
}

TEST_CASE("hinf_angle_bound examples", "[coefficient_field]") {
  const auto w = SectorAngle::make(0.3, AngleRole::Optimal);
  CHECK(hinf_angle_bound(w, 2.0).theta == Approx(0.3));
  CHECK(hinf_angle_bound(SectorAngle::make(0.0, AngleRole::Optimal), 4.0).theta == Approx(kPi / 4));
  CHECK(hinf_angle_bound(w, 1e9).theta == Approx(kPi / 2).margin(1e-8));
  CHECK(hinf_angle_bound(w, 1.0 + 1e-9).theta == Approx(kPi / 2).margin(1e-8));
  for (double p : {1.01, 1.5, 3.0, 100.0}) CHECK(hinf_angle_bound(w, p).theta < kPi / 2);
  CHECK(hinf_angle_bound(w, 3.0).role == AngleRole::Hinf);
}
