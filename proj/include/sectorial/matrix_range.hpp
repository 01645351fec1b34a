// SPDX-License-Identifier: Apache-2.0

// Numerical range geometry of a single matrix: operator parts, coercivity,
// the optimal sector angle, the two classical angle estimates, the half-moon
// enclosure and a sharpness test.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sectorial/numkernel.hpp"

namespace sectorial {

enum class AngleRole {
  Optimal,     // omega: smallest sector containing a numerical range
  Estimate,    // alpha: coercivity-based estimate
  Comparison,  // alpha-bar: norm-based estimate
  Spectral,    // phi
  Hinf,        // psi
  Free,        // vartheta
  PRange,      // omega_p of a p-numerical range
  Uniform,     // alpha_p from uniform data
};

std::string_view to_string(AngleRole role);

/// Half-opening angle of the closed sector {|arg z| <= theta} u {0}.
struct SectorAngle {
  double theta = 0.0;
  AngleRole role = AngleRole::Free;
  /// Angular resolution when the value comes from sampled directions; zero
  /// for closed-form or exact eigenvalue results.
  double discretization = 0.0;

  /// Throws DomainError unless 0 <= theta < pi.
  static SectorAngle make(double theta, AngleRole role, double discretization = 0.0);
  static SectorAngle from_tangent(double tan_theta, AngleRole role);

  double degrees() const;
  double tangent() const;
  bool contains(cplx z, double slack = 0.0) const;
};

/// Angular distance from z to the sector; 0 inside. Used for witnesses.
double excess_angle(cplx z, double theta);
/// Euclidean distance from z to the closed sector of half-angle theta.
double distance_to_sector(cplx z, double theta);

struct HermitianParts {
  ComplexMatrix re_part;  // (L + L*) / 2
  ComplexMatrix im_part;  // (L - L*) / (2i)
};

struct CoercivityData {
  double m = 0.0;                    // lambda_min(ReOp L)
  double numerical_radius_im = 0.0;  // n(ImOp L) = ||ImOp L||
  double numerical_radius = 0.0;     // n(L)
};

/// Sampled support-function description of N(L).
struct RangeBoundary {
  std::vector<double> directions;     // phi_k in [0, 2 pi)
  std::vector<double> support_values; // lambda_max(ReOp(e^{-i phi_k} L))
  std::vector<cplx> boundary_points;  // v_k* L v_k for the top eigenvector v_k

  /// Largest violation of the outer half-plane description by z (0 if inside).
  double outer_excess(cplx z) const;
};

HermitianParts operator_parts(const ComplexMatrix& l);

double coercivity_constant(const ComplexMatrix& l, const Tolerances& tol = default_tolerances());

CoercivityData coercivity_data(const ComplexMatrix& l, const Tolerances& tol = default_tolerances());

/// Numerical radius: maximum of the support function over directions,
/// refined by golden-section search around the best sampled direction.
double numerical_radius(const ComplexMatrix& l, const Tolerances& tol = default_tolerances());

RangeBoundary range_boundary(const ComplexMatrix& l, int n_dirs, Exec exec = Exec::Parallel,
                             const Tolerances& tol = default_tolerances());

/// Optimal sector angle omega(L).
///
/// tan(omega) = sup |x* ImOp(L) x| / x* ReOp(L) x, evaluated exactly as the
/// spectral radius of D^{-1/2} U* ImOp(L) U D^{-1/2} on the range of ReOp(L).
/// Throws NotSectorialValued if N(L) leaves the closed right half-plane or
/// touches the imaginary axis away from zero.
SectorAngle optimal_angle(const ComplexMatrix& l, const Tolerances& tol = default_tolerances());

/// The same angle from sampled boundary points, refined by golden-section
/// search near the direction with the largest |arg|. Independent of
/// optimal_angle; used for cross-checks.
SectorAngle optimal_angle_sampled(const ComplexMatrix& l, int n_dirs, Exec exec = Exec::Parallel,
                                  const Tolerances& tol = default_tolerances());

/// tan(alpha) = n(ImOp L) / m.
SectorAngle angle_estimate_lemma(const ComplexMatrix& l, const Tolerances& tol = default_tolerances());

/// tan(alpha-bar) = sqrt(||L||^2 / m^2 - 1).
SectorAngle angle_estimate_norm(const ComplexMatrix& l, const Tolerances& tol = default_tolerances());

struct HalfMoonRegion {
  double re_min = 0.0;  // m
  double re_max = 0.0;  // n(ReOp L)
  double im_max = 0.0;  // n(ImOp L)
  double radius = 0.0;  // n(L)

  /// Amount by which z violates the rectangle or the disk (0 if inside).
  double excess(cplx z) const;
};

HalfMoonRegion halfmoon_region(const ComplexMatrix& l, const Tolerances& tol = default_tolerances());

struct SharpnessReport {
  bool is_sharp_candidate = false;
  std::optional<cplx> witness;  // the eigenvalue equal to m +/- i n(ImOp L)
  cplx corner;                  // m + i n(ImOp L)
  std::string verdict;          // "sharp" or "inconclusive"
};

/// Certifies sharpness of the coercivity estimate when m +/- i n(ImOp L) is an
/// eigenvalue. A negative outcome is inconclusive, not a proof of non-sharpness.
SharpnessReport sharpness_check(const ComplexMatrix& l, const Tolerances& tol = default_tolerances());

}  // namespace sectorial
