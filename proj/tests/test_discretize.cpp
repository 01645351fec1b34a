// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "sectorial/discretize.hpp"
#include "sectorial/errors.hpp"
#include "support/random.hpp"

using namespace sectorial;
using sectorial::testing::MatrixSampler;
using sectorial::testing::max_abs_diff;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

CoefficientField random_field(MatrixSampler& s, std::size_t fx, std::size_t fy, double im_scale) {
  std::vector<ComplexMatrix> mus;
  for (std::size_t k = 0; k < fx * fy; ++k) mus.push_back(s.coefficient(2, im_scale));
  return make_field({fx, fy}, mus);
}

BoundaryMarking random_marking(MatrixSampler& s, const Mesh2D& mesh) {
  static const std::vector<std::string> names{"left", "right", "top", "bottom"};
  std::vector<std::string> pick;
  for (const auto& n : names)
    if (s.integer(0, 1) == 1) pick.push_back(n);
  return BoundaryMarking::sides(mesh, pick);
}

}  // namespace

TEST_CASE("build_mesh examples", "[discretize]") {
  auto m = build_mesh(1, 1, 1.0, 1.0);
  CHECK(m.triangles.size() == 2);
  CHECK(m.vertices.size() == 4);
  m = build_mesh(2, 2, 1.0, 1.0);
  CHECK(m.triangles.size() == 8);
  CHECK(m.vertices.size() == 9);
  m = build_mesh(3, 1, 3.0, 1.0);
  CHECK(m.triangles.size() == 6);
  for (std::size_t t = 0; t < m.triangles.size(); ++t) CHECK(m.triangle_area(t) == Approx(0.5));
  m = build_mesh(5, 3, 2.0, 0.7);
  double total = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    CHECK(m.triangle_area(t) > 0.0);
    total += m.triangle_area(t);
  }
  CHECK(total == Approx(1.4));
  CHECK(m.boundary_edge_count() == 16);
  CHECK(m.boundary_edge(0) == std::array<std::size_t, 2>{0, 1});
  CHECK(m.boundary_edge(10) == std::array<std::size_t, 2>{0, 6});
  CHECK_THROWS_AS(build_mesh(0, 1), Error);
  CHECK_THROWS_AS(build_mesh(1, 1, -1.0, 1.0), Error);
}

TEST_CASE("boundary marking", "[discretize]") {
  const auto m = build_mesh(3, 2);
  CHECK(BoundaryMarking::none(m).free_nodes(m).size() == 12);
  CHECK(BoundaryMarking::full(m).free_nodes(m).size() == 2);
  CHECK(BoundaryMarking::sides(m, {"left"}).free_nodes(m).size() == 9);
  CHECK(BoundaryMarking::sides(m, {"left", "bottom"}).free_nodes(m).size() == 6);
  CHECK(BoundaryMarking::edges(m, {0}).free_nodes(m).size() == 10);
  CHECK_THROWS_AS(BoundaryMarking::sides(m, {"north"}), Error);
  CHECK_THROWS_AS(BoundaryMarking::edges(m, {10}), Error);
}

TEST_CASE("assemble examples", "[discretize]") {
  const auto mesh = build_mesh(2, 2);
  const auto id = make_uniform_field(ComplexMatrix::identity(2));
  auto fm = assemble(id, mesh, BoundaryMarking::full(mesh));
  REQUIRE(fm.k.rows() == 1);
  CHECK(fm.k(0, 0).real() == Approx(4.0).epsilon(1e-14));
  CHECK(fm.k(0, 0).imag() == 0.0);
  // Hat function at the centre: six triangles of area 1/8 around it.
  CHECK(fm.m(0, 0).real() == Approx(6 * (1.0 / 8) / 6).epsilon(1e-14));

  const auto mesh4 = build_mesh(4, 3, 1.3, 0.8);
  const auto marking = BoundaryMarking::sides(mesh4, {"left"});
  const auto base = assemble(id, mesh4, marking);
  const auto scaled = assemble(make_uniform_field(3.5 * ComplexMatrix::identity(2)), mesh4, marking);
  CHECK(max_abs_diff(scaled.k, 3.5 * base.k) <= 1e-12);

  MatrixSampler s(201);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<ComplexMatrix> herm;
    for (int k = 0; k < 4; ++k) {
      ComplexMatrix h = s.hermitian(2);
      const double shift = 0.5 - eigvals_hermitian(h).front();
      for (int i = 0; i < 2; ++i) h(i, i) += shift;
      herm.push_back(h);
    }
    const auto sq = build_mesh(4, 4);
    fm = assemble(make_field({2, 2}, herm), sq, BoundaryMarking::sides(sq, {"left"}));
    CHECK(hermitian_defect(fm.k) <= 1e-12);
  }

  // K(mu)* = K(mu*).
  const auto f = random_field(s, 2, 2, 1.0);
  std::vector<ComplexMatrix> adj;
  for (const auto& c : f.cells) adj.push_back(c.mu.adjoint());
  const auto mesh44 = build_mesh(4, 4);
  const auto mk = BoundaryMarking::sides(mesh44, {"top", "right"});
  const auto a = assemble(f, mesh44, mk);
  const auto b = assemble(make_field({2, 2}, adj), mesh44, mk);
  CHECK(max_abs_diff(a.k.adjoint(), b.k) <= 1e-12);
  CHECK(hermitian_defect(a.m) <= 1e-15);
  CHECK(eigvals_hermitian(a.m).front() > 0.0);
  for (double w : a.lumped_mass) CHECK(w > 0.0);

  CHECK_THROWS_AS(assemble(f, build_mesh(3, 4), mk), Error);
  CHECK_THROWS_AS(assemble(id, build_mesh(1, 1), BoundaryMarking::full(build_mesh(1, 1))), Error);
  CHECK_THROWS_AS(assemble(make_uniform_field(ComplexMatrix::identity(3)), mesh, BoundaryMarking::full(mesh)), Error);
}

TEST_CASE("serial and parallel assembly agree", "[discretize][parallel]") {
  MatrixSampler s(211);
  const auto f = random_field(s, 4, 4, 1.5);
  const auto mesh = build_mesh(8, 8);
  const auto mk = BoundaryMarking::sides(mesh, {"left", "top"});
  const auto a = assemble(f, mesh, mk, Exec::Serial);
  const auto b = assemble(f, mesh, mk, Exec::Parallel);
  CHECK(max_abs_diff(a.k, b.k) <= 1e-13);
  CHECK(max_abs_diff(a.m, b.m) <= 1e-13);
}

TEST_CASE("generalized_range_angle examples", "[discretize]") {
  const auto mesh = build_mesh(8, 8);
  const auto full = BoundaryMarking::full(mesh);
  auto fm = assemble(make_uniform_field(ComplexMatrix::identity(2)), mesh, full);
  CHECK(generalized_range_angle(fm).theta <= 1e-8);

  for (double a : {0.25, 0.5, 1.0}) {
    const ComplexMatrix mu{{1.0, -a}, {a, 1.0}};
    fm = assemble(make_uniform_field(mu), mesh, full);
    CHECK(generalized_range_angle(fm).theta <= 1e-8);
    CHECK(optimal_angle(mu).theta == Approx(std::atan(a)).margin(1e-12));
  }

  fm = assemble(make_uniform_field(cplx{1.0, 1.0} * ComplexMatrix::identity(2)), mesh,
                BoundaryMarking::sides(mesh, {"left"}));
  CHECK(generalized_range_angle(fm).theta == Approx(kPi / 4).margin(1e-10));
}

TEST_CASE("Galerkin angle equals the angle of K", "[discretize][property]") {
  MatrixSampler s(223);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_field(s, 2, 2, 1.0);
    const auto mesh = build_mesh(6, 6);
    const auto fm = assemble(f, mesh, BoundaryMarking::sides(mesh, {"bottom"}));
    CHECK(generalized_range_angle(fm).theta == Approx(optimal_angle(fm.k).theta).margin(1e-9));
  }
}

TEST_CASE("sector inclusion on random fields", "[discretize][property]") {
  MatrixSampler s(227);
  for (int trial = 0; trial < 8; ++trial) {
    const auto f = random_field(s, 2, 4, 2.0);
    const auto mesh = build_mesh(8, 8);
    const auto marking = random_marking(s, mesh);
    const auto fm = assemble(f, mesh, marking);
    const double angle = generalized_range_angle(fm).theta;
    CHECK(angle <= f.omega_mu.theta + 1e-8);
    CHECK(sector_inclusion_check(fm, f.omega_mu).pass);
    CHECK(sector_inclusion_check(fm, f.alpha).pass);

    // Shifted pencils stay inside the same sector.
    for (double delta : {0.1, 1.0, 10.0}) {
      FormMatrices shifted = fm;
      shifted.k += delta * fm.m;
      CHECK(generalized_range_angle(shifted).theta <= std::max(angle, 0.0) + 1e-9);
    }
  }
}

TEST_CASE("sector inclusion negative control", "[discretize]") {
  MatrixSampler s(229);
  const auto f = random_field(s, 2, 2, 1.0);
  const auto mesh = build_mesh(4, 4);
  const auto fm = assemble(f, mesh, BoundaryMarking::sides(mesh, {"left", "right"}));
  const auto rep = sector_inclusion_check(fm, SectorAngle::make(0.0, AngleRole::Free));
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_excess_angle > 0.0);
  REQUIRE(rep.witness.has_value());
  REQUIRE(rep.witness_value.has_value());
  CHECK(std::abs(std::arg(*rep.witness_value)) == Approx(rep.angle).margin(1e-8));
}

TEST_CASE("refinement does not shrink the subspace angle", "[discretize][property]") {
  MatrixSampler s(233);
  for (int trial = 0; trial < 4; ++trial) {
    const auto f = random_field(s, 2, 2, 1.5);
    const auto coarse = build_mesh(4, 4);
    const auto fine = build_mesh(8, 8);
    const std::vector<std::string> sides{"left", "top"};
    const double a = generalized_range_angle(assemble(f, coarse, BoundaryMarking::sides(coarse, sides))).theta;
    const double b = generalized_range_angle(assemble(f, fine, BoundaryMarking::sides(fine, sides))).theta;
    CHECK(a <= b + 1e-9);
  }
}
