// SPDX-License-Identifier: Apache-2.0

#include "sectorial/matrix_range.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "sectorial/errors.hpp"

namespace sectorial {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGolden = 0.6180339887498949;

// Relative threshold below which an eigenvalue of ReOp L counts as zero.
constexpr double kKernelRel = 1e-12;

double matrix_scale(const ComplexMatrix& l) {
  return std::max(max_abs(l) * static_cast<double>(l.rows()), 1e-300);
}

ComplexMatrix direction_operator(const HermitianParts& parts, double phi) {
  // ReOp(e^{-i phi} L) = cos(phi) ReOp L + sin(phi) ImOp L
  ComplexMatrix h = std::cos(phi) * parts.re_part;
  h += std::sin(phi) * parts.im_part;
  return h;
}

// Maximizes f on [a, b] by golden-section search; returns the argmax.
double golden_max(const std::function<double(double)>& f, double a, double b, double xtol) {
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

struct BoundarySample {
  double support;
  cplx point;
};

BoundarySample sample_direction(const ComplexMatrix& l, const HermitianParts& parts, double phi,
                                const Tolerances& tol) {
  const TopEigen top = top_eigenpair(direction_operator(parts, phi), tol);
  return {top.value, quadratic_form(l, top.vector, top.vector)};
}

double spectral_radius_hermitian(const ComplexMatrix& h) {
  ComplexMatrix sym = h + h.adjoint();
  sym *= 0.5;
  for (std::size_t i = 0; i < sym.rows(); ++i) sym(i, i) = sym(i, i).real();
  const auto ev = eigvals_hermitian(sym);
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

}  // namespace

std::string_view to_string(AngleRole role) {
  switch (role) {
    case AngleRole::Optimal: return "omega";
    case AngleRole::Estimate: return "alpha";
    case AngleRole::Comparison: return "alpha_bar";
    case AngleRole::Spectral: return "phi";
    case AngleRole::Hinf: return "psi";
    case AngleRole::Free: return "vartheta";
    case AngleRole::PRange: return "omega_p";
    case AngleRole::Uniform: return "alpha_p_uniform";
  }
  return "angle";
}

SectorAngle SectorAngle::make(double theta, AngleRole role, double discretization) {
  if (!(theta >= 0.0 && theta < kPi))
    throw Error(ErrorCode::DomainError, "sector angle " + std::to_string(theta) + " outside [0, pi)");
  return {theta, role, discretization};
}

SectorAngle SectorAngle::from_tangent(double tan_theta, AngleRole role) {
  if (!(tan_theta >= 0.0)) throw Error(ErrorCode::DomainError, "negative or NaN sector tangent");
  return make(std::atan(tan_theta), role);
}

double SectorAngle::degrees() const { return theta * 180.0 / kPi; }
double SectorAngle::tangent() const { return std::tan(theta); }

bool SectorAngle::contains(cplx z, double slack) const {
  return z == cplx{} || std::abs(std::arg(z)) <= theta + slack;
}

double excess_angle(cplx z, double theta) {
  if (z == cplx{}) return 0.0;
  return std::max(0.0, std::abs(std::arg(z)) - theta);
}

double distance_to_sector(cplx z, double theta) {
  const double phi = std::abs(std::arg(z));
  if (z == cplx{} || phi <= theta) return 0.0;
  if (phi - theta >= kPi / 2) return std::abs(z);
  return std::abs(z) * std::sin(phi - theta);
}

double RangeBoundary::outer_excess(cplx z) const {
  double worst = 0.0;
  for (std::size_t k = 0; k < directions.size(); ++k) {
    const double proj = std::cos(directions[k]) * z.real() + std::sin(directions[k]) * z.imag();
    worst = std::max(worst, proj - support_values[k]);
  }
  return worst;
}

HermitianParts operator_parts(const ComplexMatrix& l) {
  require_square_finite(l, "operator_parts");
  const std::size_t n = l.rows();
  HermitianParts p{ComplexMatrix(n), ComplexMatrix(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const cplx a = l(i, j), b = std::conj(l(j, i));
      p.re_part(i, j) = 0.5 * (a + b);
      p.im_part(i, j) = (a - b) / (2.0 * kI);
    }
    p.re_part(i, i) = p.re_part(i, i).real();
    p.im_part(i, i) = p.im_part(i, i).real();
  }
  return p;
}

double coercivity_constant(const ComplexMatrix& l, const Tolerances& tol) {
  return eigvals_hermitian(operator_parts(l).re_part, tol).front();
}

double numerical_radius(const ComplexMatrix& l, const Tolerances& tol) {
  const HermitianParts parts = operator_parts(l);
  const int n_dirs = std::max(tol.n_dirs, 8);
  auto support = [&](double phi) { return eigvals_hermitian(direction_operator(parts, phi), tol).back(); };
  double best = -1e300, best_phi = 0.0;
  for (int k = 0; k < n_dirs; ++k) {
    const double phi = 2.0 * kPi * k / n_dirs;
    const double h = support(phi);
    if (h > best) {
      best = h;
      best_phi = phi;
    }
  }
  const double step = 2.0 * kPi / n_dirs;
  const double phi = golden_max(support, best_phi - step, best_phi + step, tol.angle_refine);
  return std::max({best, support(phi), 0.0});
}

CoercivityData coercivity_data(const ComplexMatrix& l, const Tolerances& tol) {
  const HermitianParts parts = operator_parts(l);
  CoercivityData d;
  d.m = eigvals_hermitian(parts.re_part, tol).front();
  d.numerical_radius_im = spectral_radius_hermitian(parts.im_part);
  d.numerical_radius = numerical_radius(l, tol);
  return d;
}

RangeBoundary range_boundary(const ComplexMatrix& l, int n_dirs, Exec exec, const Tolerances& tol) {
  if (n_dirs < 8) throw Error(ErrorCode::DomainError, "range_boundary: n_dirs must be >= 8");
  require_square_finite(l, "range_boundary");
  const HermitianParts parts = operator_parts(l);
  RangeBoundary out;
  out.directions.resize(n_dirs);
  out.support_values.resize(n_dirs);
  out.boundary_points.resize(n_dirs);
  for (int k = 0; k < n_dirs; ++k) out.directions[k] = 2.0 * kPi * k / n_dirs;

  auto kernel = [&](int k) {
    const BoundarySample s = sample_direction(l, parts, out.directions[k], tol);
    out.support_values[k] = s.support;
    out.boundary_points[k] = s.point;
  };
  if (exec == Exec::Parallel) {
    // Exceptions cannot cross the parallel region; capture the first one.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < n_dirs; ++k) {
      try {
        kernel(k);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (int k = 0; k < n_dirs; ++k) kernel(k);
  }
  return out;
}

SectorAngle optimal_angle(const ComplexMatrix& l, const Tolerances& tol) {
  require_square_finite(l, "optimal_angle");
  const HermitianParts parts = operator_parts(l);
  const double eps_k = kKernelRel * matrix_scale(l);
  const auto re_values = eigvals_hermitian(parts.re_part, tol);
  if (re_values.front() < -eps_k)
    throw Error(ErrorCode::NotSectorialValued,
                "numerical range reaches Re z = " + std::to_string(re_values.front()) + " < 0");

  double tan_omega = 0.0;
  if (re_values.front() > eps_k) {
    // ReOp L = C C*; W = C^{-1} ImOp(L) C^{-*}.
    const ComplexMatrix c = cholesky(parts.re_part);
    const ComplexMatrix y = solve_lower(c, parts.im_part);
    const ComplexMatrix w = solve_lower(c, y.adjoint()).adjoint();
    tan_omega = spectral_radius_hermitian(w);
  } else {
    const HermitianEigen e = eig_hermitian(parts.re_part, tol);
    const ComplexMatrix it = e.vectors.adjoint() * parts.im_part * e.vectors;
    std::vector<std::size_t> pos, ker;
    for (std::size_t i = 0; i < e.values.size(); ++i) (e.values[i] > eps_k ? pos : ker).push_back(i);
    double ker_block = 0.0, coupling = 0.0;
    for (std::size_t a : ker) {
      for (std::size_t b : ker) ker_block = std::max(ker_block, std::abs(it(a, b)));
      for (std::size_t b : pos) coupling = std::max(coupling, std::abs(it(a, b)));
    }
    if (ker_block > eps_k)
      throw Error(ErrorCode::NotSectorialValued, "numerical range meets the imaginary axis away from 0");
    if (coupling > eps_k) {
      tan_omega = HUGE_VAL;
    } else if (!pos.empty()) {
      ComplexMatrix w(pos.size());
      for (std::size_t a = 0; a < pos.size(); ++a)
        for (std::size_t b = 0; b < pos.size(); ++b)
          w(a, b) = it(pos[a], pos[b]) / std::sqrt(e.values[pos[a]] * e.values[pos[b]]);
      tan_omega = spectral_radius_hermitian(w);
    }
  }
  return SectorAngle::make(std::atan(tan_omega), AngleRole::Optimal);
}

SectorAngle optimal_angle_sampled(const ComplexMatrix& l, int n_dirs, Exec exec, const Tolerances& tol) {
  const RangeBoundary rb = range_boundary(l, n_dirs, exec, tol);
  const double eps = kKernelRel * matrix_scale(l) * 100.0;
  double best = 0.0;
  int best_k = 0;
  for (int k = 0; k < n_dirs; ++k) {
    const cplx z = rb.boundary_points[k];
    if (z.real() < -eps || (z.real() <= eps && std::abs(z.imag()) > eps))
      throw Error(ErrorCode::NotSectorialValued, "sampled numerical range leaves the open right half-plane");
    const double g = std::abs(z) <= eps ? 0.0 : std::abs(std::arg(z));
    if (g > best) {
      best = g;
      best_k = k;
    }
  }
  const HermitianParts parts = operator_parts(l);
  auto g = [&](double phi) {
    const cplx z = sample_direction(l, parts, phi, tol).point;
    return std::abs(z) <= eps ? 0.0 : std::abs(std::arg(z));
  };
  const double step = 2.0 * kPi / n_dirs;
  const double phi = golden_max(g, rb.directions[best_k] - step, rb.directions[best_k] + step, tol.angle_refine);
  best = std::max(best, g(phi));
  return SectorAngle::make(std::min(best, kPi / 2), AngleRole::Optimal, step);
}

SectorAngle angle_estimate_lemma(const ComplexMatrix& l, const Tolerances& tol) {
  const HermitianParts parts = operator_parts(l);
  const double m = eigvals_hermitian(parts.re_part, tol).front();
  if (!(m > 0.0)) throw Error(ErrorCode::NotCoercive, "coercivity constant m = " + std::to_string(m));
  return SectorAngle::from_tangent(spectral_radius_hermitian(parts.im_part) / m, AngleRole::Estimate);
}

SectorAngle angle_estimate_norm(const ComplexMatrix& l, const Tolerances& tol) {
  const double m = coercivity_constant(l, tol);
  if (!(m > 0.0)) throw Error(ErrorCode::NotCoercive, "coercivity constant m = " + std::to_string(m));
  const double ratio = spectral_norm(l) / m;
  return SectorAngle::from_tangent(std::sqrt(std::max(ratio * ratio - 1.0, 0.0)), AngleRole::Comparison);
}

double HalfMoonRegion::excess(cplx z) const {
  return std::max({0.0, re_min - z.real(), z.real() - re_max, std::abs(z.imag()) - im_max, std::abs(z) - radius});
}

HalfMoonRegion halfmoon_region(const ComplexMatrix& l, const Tolerances& tol) {
  const HermitianParts parts = operator_parts(l);
  const auto re_values = eigvals_hermitian(parts.re_part, tol);
  if (!(re_values.front() > 0.0))
    throw Error(ErrorCode::NotCoercive, "coercivity constant m = " + std::to_string(re_values.front()));
  HalfMoonRegion r;
  r.re_min = re_values.front();
  r.re_max = std::max(std::abs(re_values.front()), std::abs(re_values.back()));
  r.im_max = spectral_radius_hermitian(parts.im_part);
  r.radius = numerical_radius(l, tol);
  return r;
}

SharpnessReport sharpness_check(const ComplexMatrix& l, const Tolerances& tol) {
  const HermitianParts parts = operator_parts(l);
  const double m = eigvals_hermitian(parts.re_part, tol).front();
  if (!(m > 0.0)) throw Error(ErrorCode::NotCoercive, "coercivity constant m = " + std::to_string(m));
  SharpnessReport r;
  r.corner = cplx{m, spectral_radius_hermitian(parts.im_part)};
  const double scale = std::max(1.0, spectral_norm(l));
  for (const cplx& lambda : eig_general(l, tol)) {
    if (std::abs(lambda - r.corner) <= tol.eigenvalue_match * scale ||
        std::abs(lambda - std::conj(r.corner)) <= tol.eigenvalue_match * scale) {
      r.is_sharp_candidate = true;
      r.witness = lambda;
      break;
    }
  }
  r.verdict = r.is_sharp_candidate ? "sharp" : "inconclusive";
  return r;
}

}  // namespace sectorial
