// SPDX-License-Identifier: Apache-2.0

// Quadrature checks of the p-form identities on smooth sampled functions.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "sectorial/coefficient_field.hpp"
#include "sectorial/discretize.hpp"

namespace sectorial {

using Gradient = std::array<cplx, 2>;

/// Smooth function on [0,1]^2 evaluated with its exact gradient.
struct TrigPolynomial {
  struct Mode {
    int kx = 0, ky = 0;
    cplx a;
  };
  cplx constant;
  std::vector<Mode> modes;

  cplx operator()(double x, double y) const;
  Gradient gradient(double x, double y) const;
};

/// c (1 + sum a_k e^{i 2 pi (kx x + ky y)}) with |k|_inf <= max_freq and
/// min_mod <= |u| <= max_mod everywhere.
TrigPolynomial random_band_limited(std::uint64_t seed, int max_freq = 1, double min_mod = 0.2, double max_mod = 5.0);

/// Node samples of u on [0,1]^2, cells x cells subcells of width h.
struct GridFunction {
  std::size_t cells = 0;
  double h = 0.0;
  std::vector<cplx> values;  // (cells+1)^2, row-major in y

  std::size_t side() const { return cells + 1; }
  cplx at(std::size_t i, std::size_t j) const { return values[j * side() + i]; }

  /// Throws GridTooCoarse below 32 cells and DomainError on non-finite samples.
  static GridFunction sample(const std::function<cplx(double, double)>& u, std::size_t cells);
  static GridFunction sample(const TrigPolynomial& u, std::size_t cells);
};

struct CutoffSpec {
  double k = 2.0;
  PExponent p;

  /// Throws DomainError unless K > 1.
  static CutoffSpec make(double k, double p);
};

/// max(1/K, min(|z|, K)).
double cutoff_modulus(cplx z, double k);

/// Central differences inside, one-sided differences on the boundary.
std::vector<Gradient> grid_gradient(const std::vector<cplx>& values, std::size_t cells, double h);

struct DualGradient {
  std::vector<Gradient> gradient;  // chain-rule formula at every node
  double discrepancy = 0.0;        // relative L1 gap to differencing |u|_K^{p-2} u
  double tolerance = 0.0;
};

/// Gradient of |u|_K^{p-2} u from the chain rule, cross-checked against direct
/// differencing. Throws GridTooCoarse if the gap exceeds cross_check_factor * h.
DualGradient p_dual_gradient(const GridFunction& u, const CutoffSpec& spec, Exec exec = Exec::Parallel,
                             const Tolerances& tol = default_tolerances());

struct FormIntegralReport {
  cplx value;
  double arg = 0.0;
  SectorAngle theta;       // max over cells of the p-range angle
  double tol_quad = 0.0;
  bool pass = true;        // |arg| <= theta + tol_quad
};

/// Node quadrature of (mu grad u, grad(|u|_K^{p-2} u)), both gradients by
/// finite differences. The field grid is mapped onto [0,1]^2. Throws NotPElliptic.
FormIntegralReport form_integral(const CoefficientField& field, const GridFunction& u, const CutoffSpec& spec,
                                 Exec exec = Exec::Parallel, const Tolerances& tol = default_tolerances());

/// Same quadrature with the cutoff factor dropped: integral of (mu grad u, grad u).
cplx energy_integral(const CoefficientField& field, const GridFunction& u, Exec exec = Exec::Parallel);

struct ConvergenceReport {
  std::vector<std::size_t> cells;
  std::vector<cplx> values;
  std::vector<double> ratios;  // |I_k - I_{k+1}| / |I_{k+1} - I_{k+2}|
};

/// form_integral on successive halvings of h starting at base_cells.
ConvergenceReport form_convergence(const CoefficientField& field, const TrigPolynomial& u, const CutoffSpec& spec,
                                   std::size_t base_cells, int levels, Exec exec = Exec::Parallel,
                                   const Tolerances& tol = default_tolerances());

/// Exploratory discrete analogue of the L^p duality pairing with A_h = W^{-1} K,
/// W the lumped mass: sum_k w_k (A_h u)_k conj(u_k) |u_k|^{p-2} / sum_k w_k |u_k|^p.
/// Throws ZeroVector.
cplx discrete_lp_pairing(const FormMatrices& fm, const CVector& u, double p);

}  // namespace sectorial
