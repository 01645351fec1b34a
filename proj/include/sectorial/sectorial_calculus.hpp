// SPDX-License-Identifier: Apache-2.0

// Matrices as sectorial operators: certification, resolvent and semigroup
// bounds, Cayley approximants, the Dunford-Riesz calculus, and the
// Crouzeix-Delyon and von Neumann ratios.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sectorial/matrix_range.hpp"

namespace sectorial {

struct SectorialMatrix {
  ComplexMatrix b;  // includes the shift
  SectorAngle theta;
  double min_re = 0.0;
  double shift = 0.0;
};

/// Certifies B + shift I as accretive with its optimal sector angle, or pi/2
/// when the range touches the imaginary axis. Throws NotAccretive.
SectorialMatrix certify(const ComplexMatrix& b, double shift = 0.0, const Tolerances& tol = default_tolerances());

struct ResolventReport {
  ComplexMatrix resolvent;
  double norm = 0.0;
  double distance = 0.0;  // dist(lambda, Sigma_theta)
  double product = 0.0;   // norm * distance
  bool pass = true;       // product <= 1 + slack
};

/// (B - lambda)^{-1}; throws InsideSector if lambda lies in Sigma_theta.
ResolventReport resolvent(const SectorialMatrix& s, cplx lambda, double slack = 1e-9);

struct AngularResolventReport {
  double scaled_norm = 0.0;  // ||lambda (B - lambda)^{-1}||
  double bound = 0.0;        // 1 / sin(vartheta - theta)
  bool pass = true;
};

/// For lambda outside Sigma_vartheta with vartheta > theta. Throws DomainError
/// if vartheta <= theta and InsideSector if lambda lies in Sigma_vartheta.
AngularResolventReport resolvent_angular(const SectorialMatrix& s, cplx lambda, double vartheta,
                                         double slack = 1e-9);

struct SemigroupReport {
  ComplexMatrix value;  // expm(-z B)
  double norm = 0.0;
  bool in_contraction_sector = false;  // z in Sigma_{pi/2 - theta}
  bool pass = true;
};

SemigroupReport semigroup(const SectorialMatrix& s, cplx z, double slack = 1e-10,
                          const Tolerances& tol = default_tolerances());

/// B_eps = (B + eps I)(I + eps B)^{-1}, certified.
SectorialMatrix approximant(const SectorialMatrix& s, double eps, const Tolerances& tol = default_tolerances());

// ---------------------------------------------------------------------------
// Functions

/// Holomorphic function on an open sector with finite limits at 0 and
/// infinity. f0 = f - f(inf) - (f(0) - f(inf))/(1 + z) satisfies
/// |f0(z)| <= c(nu) min(|z|^s, |z|^-s) on Sigma_nu.
struct CalcFunction {
  std::string name;
  std::function<cplx(cplx)> eval;
  double max_angle = 0.0;  // holomorphic on the open sector of this angle
  std::optional<cplx> at_zero;
  std::optional<cplx> at_infinity;
  double s = 0.0;
  std::function<double(double)> envelope_c;  // nu -> c; empty when f is not in the extended class
  /// Exact evaluation on a matrix, when one exists.
  std::function<ComplexMatrix(const ComplexMatrix&)> direct;
  /// Bounded on the open right half-plane.
  bool half_plane_bounded = false;

  bool extended() const { return at_zero && at_infinity && envelope_c; }
  cplx f0(cplx z) const;
};

/// "rat1", "cayley", "sqrtres", "exp", or "res:<lambda>" with lambda written
/// as a, bi, a+bi or a-bi. Throws ValidationError for unknown names.
CalcFunction named_function(const std::string& name);
std::vector<std::string> named_function_list();

/// Polynomial with coefficients c_0 + c_1 z + ...; direct evaluation only.
CalcFunction polynomial(std::vector<cplx> coeffs);
CalcFunction constant_function(cplx c);

/// Product of two functions that vanish at 0 and infinity.
CalcFunction product(const CalcFunction& f, const CalcFunction& g);

/// Largest observed |f0(z)| / (c min(|z|^s, |z|^-s)) on the rays arg z = 0, +-nu.
double envelope_ratio(const CalcFunction& f, double nu, int samples = 400);

struct ContourPlan {
  double nu_prime = 0.0;
  double r_inner = 0.0;
  double r_outer = 0.0;
  int panels = 0;
  int nodes_per_panel = 0;
  double tail_bound = 0.0;
};

/// Quadrature plan for the H-infinity_0 part. Throws ContourTooTight and TruncationError.
ContourPlan plan_contour(const CalcFunction& f, const SectorialMatrix& s, double nu,
                         const Tolerances& tol = default_tolerances());

/// Dunford-Riesz integral of f0 over the boundary of Sigma_{nu'}, nu' = (theta + nu)/2.
ComplexMatrix dunford_riesz(const CalcFunction& f, const SectorialMatrix& s, double nu, Exec exec = Exec::Parallel,
                            const Tolerances& tol = default_tolerances());

/// f(B) = f(inf) I + (f(0) - f(inf))(I + B)^{-1} + DR(f0).
ComplexMatrix evaluate(const CalcFunction& f, const SectorialMatrix& s, double nu, Exec exec = Exec::Parallel,
                       const Tolerances& tol = default_tolerances());

struct ConvergenceStep {
  double eps;
  double difference;  // ||f(B_eps) - f(B)||
};

std::vector<ConvergenceStep> calculus_convergence(const CalcFunction& f, const SectorialMatrix& s, double nu,
                                                  const std::vector<double>& eps_sequence,
                                                  const Tolerances& tol = default_tolerances());

// ---------------------------------------------------------------------------
// Norm inequalities

struct RegionSpec {
  enum class Kind { RangeHull, Sector } kind = Kind::RangeHull;
  double sector_angle = 0.0;  // for Kind::Sector
};

struct RatioReport {
  double matrix_norm = 0.0;  // ||f(B)||
  double sup = 0.0;          // sup of |f| over the region
  double ratio = 0.0;
  bool pass = true;
};

/// Maximum of |f| along a closed polygon, by dense sampling plus golden-section refinement.
double sup_on_polygon(const std::function<cplx(cplx)>& f, const std::vector<cplx>& vertices, int samples);

/// sup of |f| over Sigma_angle via its two boundary rays and the limits at 0 and infinity.
double sup_on_sector(const CalcFunction& f, double angle, int samples);

/// ||f(B)|| / sup |f|; passes when the ratio is at most 1 + sqrt 2 + 1e-6.
RatioReport crouzeix_ratio(const ComplexMatrix& b, const CalcFunction& f, const RegionSpec& region = {},
                           const Tolerances& tol = default_tolerances());

/// ||f(B)|| / sup over Re z > 0 of |f|; passes when at most 1 + 1e-9.
RatioReport von_neumann_check(const SectorialMatrix& s, const CalcFunction& f,
                              const Tolerances& tol = default_tolerances());

/// ||f(B)|| using the direct evaluator when present, otherwise the extended calculus.
ComplexMatrix apply_function(const CalcFunction& f, const SectorialMatrix& s, const Tolerances& tol = default_tolerances());

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace sectorial
