// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sectorial {

/// Every numerical threshold used by the library, in one place.
///
/// Defaults reproduce the documented contracts; the CLI exposes them through
/// --tol-override name=value.
struct Tolerances {
  // numkernel
  double hermitian_check = 1e-12;     // max |H - H*| entry for Hermitian input
  double unitary_check = 1e-10;       // V*V = I
  int jacobi_max_sweeps = 100;
  int ql_max_iterations = 60;         // per eigenvalue
  int qr_max_iterations = 60;         // per eigenvalue (general QR)
  double eig_general_residual = 1e-8; // sigma_min(A - lambda I) <= this * ||A||
  double singular_pivot = 1e-14;      // relative pivot threshold in LU
  double expm_norm_cap = 1e4;

  // matrix-range
  int n_dirs = 720;
  double angle_refine = 1e-10;
  double sector_slack = 1e-9;
  double eigenvalue_match = 1e-8;     // sharpness witness

  // calculus
  double contour_margin = 0.05;       // minimum nu' - theta (radians)
  double truncation = 1e-10;          // ray tail bound
  int quad_nodes = 200;               // Gauss-Legendre nodes per ray panel
  double crouzeix_slack = 1e-6;
  int sup_samples = 2048;

  // pform
  double quad_tol_factor = 1.0;       // tol_quad = factor * h (radians)
  double cross_check_factor = 10.0;   // dual-gradient cross-check: factor * h

  /// Sets a field by name. Throws Error(ValidationError) on an unknown name.
  void set(std::string_view name, double value);
  static std::vector<std::string> names();
  double get(std::string_view name) const;
};

const Tolerances& default_tolerances();

}  // namespace sectorial
