// SPDX-License-Identifier: Apache-2.0

#include "sectorial/coefficient_field.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <string>

#include "sectorial/errors.hpp"

namespace sectorial {
namespace {

constexpr double kPi = std::numbers::pi;

void require_exponent(double p, const char* what) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw Error(ErrorCode::DomainError, std::string(what) + ": exponent must lie in (1, inf)");
}

ComplexMatrix real_matrix(const ComplexMatrix& a, bool imaginary) {
  ComplexMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = imaginary ? a(i, j).imag() : a(i, j).real();
  return r;
}

}  // namespace

CoefficientCell analyze_cell(const ComplexMatrix& mu, const Tolerances& tol) {
  require_square_finite(mu, "analyze_cell");
  CoefficientCell c;
  c.d = mu.rows();
  c.mu = mu;
  const HermitianParts parts = operator_parts(mu);
  const auto re_values = eigvals_hermitian(parts.re_part, tol);
  c.m_x = re_values.front();
  if (!(c.m_x > 0.0))
    throw Error(ErrorCode::NotCoercive, "cell coercivity constant " + std::to_string(c.m_x) + " <= 0");
  c.re_norm = spectral_norm(real_matrix(mu, false));
  c.im_norm = spectral_norm(real_matrix(mu, true));
  const auto im_values = eigvals_hermitian(parts.im_part, tol);
  c.nimop = std::max(std::abs(im_values.front()), std::abs(im_values.back()));
  c.omega_x = optimal_angle(mu, tol);
  return c;
}

double CoefficientField::max_re_norm() const {
  double r = 0.0;
  for (const auto& c : cells) r = std::max(r, c.re_norm);
  return r;
}

double CoefficientField::max_im_norm() const {
  double r = 0.0;
  for (const auto& c : cells) r = std::max(r, c.im_norm);
  return r;
}

CoefficientField make_field(std::vector<std::size_t> grid_dims, const std::vector<ComplexMatrix>& mus, Exec exec,
                            const Tolerances& tol) {
  std::size_t count = grid_dims.empty() ? 0 : 1;
  for (std::size_t n : grid_dims) count *= n;
  if (count == 0 || count != mus.size())
    throw Error(ErrorCode::GridMismatch, "field has " + std::to_string(mus.size()) + " cells, grid expects " +
                                             std::to_string(count));
  const std::size_t d = mus.front().rows();
  if (d < 1 || d > 3) throw Error(ErrorCode::GridMismatch, "cell dimension must be 1, 2 or 3");
  for (const auto& m : mus)
    if (m.rows() != d || m.cols() != d) throw Error(ErrorCode::GridMismatch, "cells have differing dimensions");

  CoefficientField f;
  f.grid_dims = std::move(grid_dims);
  f.cells.resize(count);
  const long n = static_cast<long>(count);
  if (exec == Exec::Parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) {
      try {
        f.cells[k] = analyze_cell(mus[k], tol);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (long k = 0; k < n; ++k) f.cells[k] = analyze_cell(mus[k], tol);
  }

  f.m_bullet = f.cells.front().m_x;
  double omega = 0.0;
  for (const auto& c : f.cells) {
    f.m_bullet = std::min(f.m_bullet, c.m_x);
    omega = std::max(omega, c.omega_x.theta);
  }
  f.omega_mu = SectorAngle::make(omega, AngleRole::Optimal);
  f.alpha = field_alpha(f);
  const EtaQ local = eta_and_q(f);
  const EtaQ uniform = eta_and_q_uniform(f);
  f.eta = local.eta;
  f.q_crit = static_cast<double>(local.q);
  f.eta_bullet = uniform.eta;
  f.q_bullet = static_cast<double>(uniform.q);
  return f;
}

CoefficientField make_uniform_field(const ComplexMatrix& mu, const Tolerances& tol) {
  return make_field({1}, {mu}, Exec::Serial, tol);
}

SectorAngle field_alpha(const CoefficientField& field) {
  double t = 0.0;
  for (const auto& c : field.cells) {
    if (!(c.m_x > 0.0)) throw Error(ErrorCode::NotCoercive, "field is not uniformly coercive");
    t = std::max(t, c.nimop / c.m_x);
  }
  return SectorAngle::from_tangent(t, AngleRole::Estimate);
}

double conjugate_exponent(double p) {
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

double sigma(double p) {
  if (std::isinf(p)) return kInfinity;
  if (!(p > 1.0)) throw Error(ErrorCode::DomainError, "sigma: exponent must exceed 1");
  const double s = p >= 2.0 ? p : conjugate_exponent(p);
  return (s - 2.0) / (2.0 * std::sqrt(s - 1.0));
}

PExponent PExponent::make(double p) {
  require_exponent(p, "PExponent");
  return {p, conjugate_exponent(p), sigma(p)};
}

long double psi(long double s) {
  if (!(s > 2.0L)) throw Error(ErrorCode::DomainError, "psi: argument must exceed 2");
  if (std::isinf(s)) return 0.0L;
  return 2.0L * std::sqrt(s - 1.0L) / (s - 2.0L);
}

long double psi_inverse(long double eta) {
  if (!(eta > 0.0L)) throw Error(ErrorCode::DomainError, "psi_inverse: argument must be positive");
  const long double e2 = eta * eta;
  return 2.0L + 2.0L * (1.0L + std::sqrt(1.0L + e2)) / e2;
}

EtaQ eta_and_q(const CoefficientField& field) {
  EtaQ r;
  for (const auto& c : field.cells) {
    if (!(c.m_x > 0.0)) throw Error(ErrorCode::NotCoercive, "field is not uniformly coercive");
    r.eta = std::max(r.eta, c.im_norm / c.m_x);
  }
  if (r.eta > 0.0) r.q = psi_inverse(r.eta);
  return r;
}

EtaQ eta_and_q_uniform(const CoefficientField& field) {
  if (!(field.m_bullet > 0.0)) throw Error(ErrorCode::NotCoercive, "field is not uniformly coercive");
  EtaQ r;
  r.eta = field.max_im_norm() / field.m_bullet;
  if (r.eta > 0.0) r.q = psi_inverse(r.eta);
  return r;
}

bool in_window(double p, double q) {
  if (!(p > 1.0) || !std::isfinite(p)) return false;
  if (std::isinf(q)) return true;
  return p > conjugate_exponent(q) && p < q;
}

PFormPair p_form_matrices(const ComplexMatrix& mu, double p) {
  require_exponent(p, "p_form_matrices");
  require_square_finite(mu, "p_form_matrices");
  const std::size_t d = mu.rows();
  const double jr = 2.0 / conjugate_exponent(p);  // weight on Re xi
  const double ji = 2.0 / p;                      // weight on Im xi
  // Real representation of xi -> mu xi on (a, b): [[P, -Q], [Q, P]];
  // rotated by (u_r, u_i) -> (u_i, -u_r): [[Q, P], [-P, Q]].
  ComplexMatrix a(2 * d), b(2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double pr = mu(i, j).real(), qi = mu(i, j).imag();
      a(i, j) = jr * pr;
      a(i, d + j) = -jr * qi;
      a(d + i, j) = ji * qi;
      a(d + i, d + j) = ji * pr;
      b(i, j) = jr * qi;
      b(i, d + j) = jr * pr;
      b(d + i, j) = -ji * pr;
      b(d + i, d + j) = ji * qi;
    }
  }
  PFormPair out{ComplexMatrix(2 * d), ComplexMatrix(2 * d)};
  for (std::size_t i = 0; i < 2 * d; ++i) {
    for (std::size_t j = 0; j < 2 * d; ++j) {
      out.re_form(i, j) = 0.5 * (a(i, j).real() + a(j, i).real());
      out.im_form(i, j) = 0.5 * (b(i, j).real() + b(j, i).real());
    }
  }
  return out;
}

cplx p_form_value(const ComplexMatrix& mu, double p, std::span<const cplx> xi) {
  require_exponent(p, "p_form_value");
  const double jr = 2.0 / conjugate_exponent(p), ji = 2.0 / p;
  const CVector mx = mu * xi;
  cplx s = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    const cplx jx{jr * xi[k].real(), ji * xi[k].imag()};
    s += mx[k] * std::conj(jx);
  }
  return s;
}

double delta_p(const ComplexMatrix& mu, double p, const Tolerances& tol) {
  return eigvals_hermitian(p_form_matrices(mu, p).re_form, tol).front();
}

double delta_p_lower_bound(const CoefficientField& field, double p) {
  require_exponent(p, "delta_p_lower_bound");
  if (!in_window(p, field.q_crit))
    throw Error(ErrorCode::OutOfRange, "exponent " + std::to_string(p) + " outside the window (q', q)");
  const double sp = sigma(p);
  const double sq = sigma(field.q_crit);
  const double factor = sp == 0.0 ? 1.0 : std::min(1.0, (sq - sp) / sp);
  return factor * field.m_bullet / std::max(p, conjugate_exponent(p));
}

SectorAngle p_range_angle(const ComplexMatrix& mu, double p, const Tolerances& tol) {
  const double m = coercivity_constant(mu, tol);
  if (!(m > 0.0)) throw Error(ErrorCode::NotCoercive, "coercivity constant " + std::to_string(m) + " <= 0");
  const PFormPair forms = p_form_matrices(mu, p);
  const double dp = eigvals_hermitian(forms.re_form, tol).front();
  if (!(dp > 0.0)) throw Error(ErrorCode::NotPElliptic, "Delta_p = " + std::to_string(dp) + " <= 0");
  // The complex range of A + iB is the convex hull of the real joint range.
  const SectorAngle w = optimal_angle(forms.re_form + kI * forms.im_form, tol);
  return SectorAngle::make(w.theta, AngleRole::PRange);
}

SectorAngle alpha_p_real(const SectorAngle& omega_mu, double p, LpWinkelForm form) {
  require_exponent(p, "alpha_p_real");
  if (!(omega_mu.theta < kPi / 2)) throw Error(ErrorCode::DomainError, "alpha_p_real: omega must be < pi/2");
  const double w = form == LpWinkelForm::Tangent ? std::tan(omega_mu.theta) : omega_mu.theta;
  const double t = std::sqrt((p - 2.0) * (p - 2.0) + p * p * w * w) / (2.0 * std::sqrt(p - 1.0));
  return SectorAngle::from_tangent(t, AngleRole::Estimate);
}

SectorAngle alpha_p_complex(const CoefficientField& field, double p) {
  require_exponent(p, "alpha_p_complex");
  if (!in_window(p, field.q_crit))
    throw Error(ErrorCode::OutOfRange, "exponent " + std::to_string(p) + " outside the window (q', q)");
  const double sp = sigma(p);
  double t = 0.0;
  for (const auto& c : field.cells) {
    const double den = c.m_x - sp * c.im_norm;
    if (!(den > 0.0)) throw Error(ErrorCode::OutOfRange, "non-positive denominator in the angle estimate");
    t = std::max(t, (std::tan(c.omega_x.theta) * c.m_x + sp * c.re_norm) / den);
  }
  return SectorAngle::from_tangent(t, AngleRole::Estimate);
}

SectorAngle alpha_p_uniform(const CoefficientField& field, double p) {
  require_exponent(p, "alpha_p_uniform");
  if (!in_window(p, field.q_bullet))
    throw Error(ErrorCode::OutOfRange, "exponent " + std::to_string(p) + " outside the window (q', q)");
  const double sp = sigma(p);
  const double den = field.m_bullet - sp * field.max_im_norm();
  if (!(den > 0.0)) throw Error(ErrorCode::OutOfRange, "non-positive denominator in the angle estimate");
  const double t = (std::tan(field.omega_mu.theta) * field.m_bullet + sp * field.max_re_norm()) / den;
  return SectorAngle::from_tangent(t, AngleRole::Uniform);
}

SectorAngle hinf_angle_bound(const SectorAngle& omega, double p) {
  require_exponent(p, "hinf_angle_bound");
  if (!(omega.theta < kPi / 2)) throw Error(ErrorCode::DomainError, "hinf_angle_bound: omega must be < pi/2");
  const double g = std::abs(1.0 - 2.0 / p);
  return SectorAngle::make(kPi / 2 * g + omega.theta * (1.0 - g), AngleRole::Hinf);
}

}  // namespace sectorial
