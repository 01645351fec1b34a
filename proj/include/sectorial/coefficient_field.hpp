// SPDX-License-Identifier: Apache-2.0

// Coefficient fields mu: Omega -> C^{d x d}, piecewise constant on a grid,
// and the p-dependent ellipticity and angle quantities built on them.

#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "sectorial/matrix_range.hpp"

namespace sectorial {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct CoefficientCell {
  std::size_t d = 0;
  ComplexMatrix mu;
  double m_x = 0.0;       // lambda_min(ReOp mu)
  double re_norm = 0.0;   // ||Re mu|| as a real matrix, entrywise real part
  double im_norm = 0.0;   // ||Im mu|| as a real matrix
  SectorAngle omega_x;    // optimal angle of mu
  double nimop = 0.0;     // n(ImOp mu)
};

/// Throws NotCoercive if lambda_min(ReOp mu) <= 0.
CoefficientCell analyze_cell(const ComplexMatrix& mu, const Tolerances& tol = default_tolerances());

struct CoefficientField {
  std::vector<std::size_t> grid_dims;
  std::vector<CoefficientCell> cells;
  double m_bullet = 0.0;
  SectorAngle omega_mu;
  SectorAngle alpha;
  double eta = 0.0;
  double q_crit = kInfinity;  // +inf for real fields
  double eta_bullet = 0.0;
  double q_bullet = kInfinity;

  std::size_t d() const { return cells.empty() ? 0 : cells.front().d; }
  double max_re_norm() const;
  double max_im_norm() const;
};

/// Builds a field from cell matrices in row-major grid order (x fastest).
/// Throws GridMismatch on inconsistent sizes or dimensions.
CoefficientField make_field(std::vector<std::size_t> grid_dims, const std::vector<ComplexMatrix>& mus,
                            Exec exec = Exec::Parallel, const Tolerances& tol = default_tolerances());

/// Single-cell field.
CoefficientField make_uniform_field(const ComplexMatrix& mu, const Tolerances& tol = default_tolerances());

/// tan(alpha) = max over cells of n(ImOp mu)/m_x.
SectorAngle field_alpha(const CoefficientField& field);

// ---------------------------------------------------------------------------
// Exponents

/// (p-2)/(2 sqrt(p-1)) for p >= 2, sigma_{p'} for p < 2, +inf at p = inf.
double sigma(double p);
double conjugate_exponent(double p);

struct PExponent {
  double p = 2.0;
  double p_conj = 2.0;
  double sigma_p = 0.0;

  /// Throws DomainError unless 1 < p < inf.
  static PExponent make(double p);
};

/// Psi(s) = 2 sqrt(s-1)/(s-2) for s > 2. Long double keeps the round trip
/// through psi_inverse at the 1e-12 level for large eta.
long double psi(long double s);
/// The root s > 2 of eta^2 (s-2)^2 = 4(s-1).
long double psi_inverse(long double eta);

struct EtaQ {
  double eta = 0.0;
  long double q = std::numeric_limits<long double>::infinity();
};

EtaQ eta_and_q(const CoefficientField& field);
EtaQ eta_and_q_uniform(const CoefficientField& field);

/// True when p lies strictly inside the window (q', q).
bool in_window(double p, double q);

// ---------------------------------------------------------------------------
// p-ellipticity

/// Real symmetric 2d x 2d matrices A, B with Re(mu xi, J_p xi) = x'Ax and
/// Im(mu xi, J_p xi) = x'Bx for xi = a + ib, x = (a, b).
struct PFormPair {
  ComplexMatrix re_form;
  ComplexMatrix im_form;
};
PFormPair p_form_matrices(const ComplexMatrix& mu, double p);

/// (mu xi, J_p xi) evaluated directly for a single vector.
cplx p_form_value(const ComplexMatrix& mu, double p, std::span<const cplx> xi);

/// Delta_p(mu) = min over |xi| = 1 of Re(mu xi, J_p xi).
double delta_p(const ComplexMatrix& mu, double p, const Tolerances& tol = default_tolerances());

/// (1 ^ (sigma_q - sigma_p)/sigma_p) m_bullet / p, reflected for p < 2.
/// Throws OutOfRange outside (q', q).
double delta_p_lower_bound(const CoefficientField& field, double p);

/// Smallest sector containing the p-numerical range of mu.
/// Throws NotCoercive if m <= 0 and NotPElliptic if Delta_p <= 0.
SectorAngle p_range_angle(const ComplexMatrix& mu, double p, const Tolerances& tol = default_tolerances());

// ---------------------------------------------------------------------------
// Angle formulas

enum class LpWinkelForm { Tangent, LiteralOmegaSquared };

/// tan(alpha_p) = sqrt((p-2)^2 + p^2 tan^2(omega)) / (2 sqrt(p-1)).
SectorAngle alpha_p_real(const SectorAngle& omega_mu, double p, LpWinkelForm form = LpWinkelForm::Tangent);

/// Cellwise estimate; throws OutOfRange outside (q', q).
SectorAngle alpha_p_complex(const CoefficientField& field, double p);

/// Same estimate from uniform data; throws OutOfRange outside (q_bullet', q_bullet).
SectorAngle alpha_p_uniform(const CoefficientField& field, double p);

/// psi_p = (pi/2)|1 - 2/p| + omega (1 - |1 - 2/p|).
SectorAngle hinf_angle_bound(const SectorAngle& omega, double p);

}  // namespace sectorial
