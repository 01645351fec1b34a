// SPDX-License-Identifier: Apache-2.0

#include "sectorial/pform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sectorial/errors.hpp"

namespace sectorial {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMinCells = 32;

// Neumaier compensated sum.
class Accumulator {
 public:
  void add(cplx v) {
    add_part(re_, re_c_, v.real());
    add_part(im_, im_c_, v.imag());
  }
  cplx value() const { return {re_ + re_c_, im_ + im_c_}; }

 private:
  static void add_part(double& sum, double& comp, double v) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0;
};

// Row sums in parallel, rows combined in index order.
template <class RowFn>
cplx ordered_sum(std::size_t rows, Exec exec, RowFn row) {
  std::vector<cplx> partial(rows);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(rows); ++j) partial[j] = row(static_cast<std::size_t>(j));
  } else {
    for (std::size_t j = 0; j < rows; ++j) partial[j] = row(j);
  }
  Accumulator acc;
  for (cplx v : partial) acc.add(v);
  return acc.value();
}

cplx dual_value(cplx u, const CutoffSpec& spec) { return std::pow(cutoff_modulus(u, spec.k), spec.p.p - 2.0) * u; }

Gradient dual_formula(cplx u, const Gradient& du, const CutoffSpec& spec) {
  const double p = spec.p.p, m = std::abs(u);
  const double factor = std::pow(cutoff_modulus(u, spec.k), p - 2.0);
  Gradient g{factor * du[0], factor * du[1]};
  if (m > 1.0 / spec.k && m < spec.k) {
    for (int a = 0; a < 2; ++a) g[a] += (p - 2.0) * u * std::pow(m, p - 4.0) * std::real(u * std::conj(du[a]));
  }
  return g;
}

std::size_t field_index(const CoefficientField& field, double x, double y) {
  if (field.cells.size() == 1) return 0;
  const std::size_t fx = field.grid_dims[0], fy = field.grid_dims[1];
  const auto ix = std::min(static_cast<std::size_t>(x * static_cast<double>(fx)), fx - 1);
  const auto iy = std::min(static_cast<std::size_t>(y * static_cast<double>(fy)), fy - 1);
  return iy * fx + ix;
}

void require_plane_field(const CoefficientField& field) {
  if (field.d() != 2) throw Error(ErrorCode::GridMismatch, "p-form quadrature needs a 2-dimensional field");
  if (field.cells.size() != 1 && field.grid_dims.size() != 2)
    throw Error(ErrorCode::GridMismatch, "field grid must be two-dimensional");
}

// (mu a, b) = sum_r (mu a)_r conj(b_r)
cplx pairing(const ComplexMatrix& mu, const Gradient& a, const Gradient& b) {
  cplx s = 0.0;
  for (int r = 0; r < 2; ++r) s += (mu(r, 0) * a[0] + mu(r, 1) * a[1]) * std::conj(b[r]);
  return s;
}

cplx node_quadrature(const CoefficientField& field, std::size_t cells, double h, const std::vector<Gradient>& du,
                     const std::vector<Gradient>& dg, Exec exec) {
  const std::size_t side = cells + 1;
  const cplx sum = ordered_sum(side, exec, [&](std::size_t j) {
    Accumulator acc;
    for (std::size_t i = 0; i < side; ++i) {
      const std::size_t k = j * side + i;
      const auto& mu = field.cells[field_index(field, i * h, j * h)].mu;
      acc.add(pairing(mu, du[k], dg[k]));
    }
    return acc.value();
  });
  return h * h * sum;
}

}  // namespace

cplx TrigPolynomial::operator()(double x, double y) const {
  cplx s = 1.0;
  for (const auto& m : modes) s += m.a * std::polar(1.0, kTwoPi * (m.kx * x + m.ky * y));
  return constant * s;
}

Gradient TrigPolynomial::gradient(double x, double y) const {
  Gradient g{0.0, 0.0};
  for (const auto& m : modes) {
    const cplx e = cplx{0.0, kTwoPi} * m.a * std::polar(1.0, kTwoPi * (m.kx * x + m.ky * y));
    g[0] += static_cast<double>(m.kx) * e;
    g[1] += static_cast<double>(m.ky) * e;
  }
  return {constant * g[0], constant * g[1]};
}

TrigPolynomial random_band_limited(std::uint64_t seed, int max_freq, double min_mod, double max_mod) {
  if (max_freq < 1 || !(min_mod > 0.0) || !(max_mod > 2.0 * min_mod))
    throw Error(ErrorCode::DomainError, "band-limited corpus needs max_freq >= 1 and 0 < 2 min_mod < max_mod");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  TrigPolynomial u;
  // |u| lies in [c (1 - r), c (1 + r)] when the mode amplitudes sum to r.
  const double c_lo = 2.0 * min_mod, c_hi = 0.5 * (max_mod + min_mod);
  const double c = c_lo + (c_hi - c_lo) * unit(rng);
  const double r_max = std::min(1.0 - min_mod / c, max_mod / c - 1.0);
  const double r = r_max * (0.5 + 0.5 * unit(rng));
  u.constant = std::polar(c, kTwoPi * unit(rng));

  double total = 0.0;
  for (int kx = -max_freq; kx <= max_freq; ++kx) {
    for (int ky = -max_freq; ky <= max_freq; ++ky) {
      if (kx == 0 && ky == 0) continue;
      const double decay = 1.0 / (1.0 + kx * kx + ky * ky);
      const cplx a{normal(rng) * decay, normal(rng) * decay};
      u.modes.push_back({kx, ky, a});
      total += std::abs(a);
    }
  }
  for (auto& m : u.modes) m.a *= r / total;
  return u;
}

GridFunction GridFunction::sample(const std::function<cplx(double, double)>& u, std::size_t cells) {
  if (cells < kMinCells)
    throw Error(ErrorCode::GridTooCoarse, "grid needs at least " + std::to_string(kMinCells) + " cells per side");
  GridFunction g;
  g.cells = cells;
  g.h = 1.0 / static_cast<double>(cells);
  const std::size_t side = cells + 1;
  g.values.resize(side * side);
  for (std::size_t j = 0; j < side; ++j) {
    for (std::size_t i = 0; i < side; ++i) {
      const cplx v = u(i * g.h, j * g.h);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw Error(ErrorCode::DomainError, "non-finite sample at node (" + std::to_string(i) + ", " +
                                                std::to_string(j) + ")");
      g.values[j * side + i] = v;
    }
  }
  return g;
}

GridFunction GridFunction::sample(const TrigPolynomial& u, std::size_t cells) {
  return sample([&u](double x, double y) { return u(x, y); }, cells);
}

CutoffSpec CutoffSpec::make(double k, double p) {
  if (!(k > 1.0) || !std::isfinite(k)) throw Error(ErrorCode::DomainError, "cutoff level must satisfy K > 1");
  return {k, PExponent::make(p)};
}

double cutoff_modulus(cplx z, double k) {
  if (!(k > 1.0)) throw Error(ErrorCode::DomainError, "cutoff level must satisfy K > 1");
  return std::max(1.0 / k, std::min(std::abs(z), k));
}

std::vector<Gradient> grid_gradient(const std::vector<cplx>& values, std::size_t cells, double h) {
  const std::size_t side = cells + 1;
  auto v = [&](std::size_t i, std::size_t j) { return values[j * side + i]; };
  auto diff = [&](std::size_t k, std::size_t n, auto at) -> cplx {
    if (k == 0) return (at(1) - at(0)) / h;
    if (k == n - 1) return (at(n - 1) - at(n - 2)) / h;
    return (at(k + 1) - at(k - 1)) / (2.0 * h);
  };
  std::vector<Gradient> g(side * side);
  for (std::size_t j = 0; j < side; ++j) {
    for (std::size_t i = 0; i < side; ++i) {
      g[j * side + i] = {diff(i, side, [&](std::size_t a) { return v(a, j); }),
                         diff(j, side, [&](std::size_t b) { return v(i, b); })};
    }
  }
  return g;
}

DualGradient p_dual_gradient(const GridFunction& u, const CutoffSpec& spec, Exec exec, const Tolerances& tol) {
  const std::size_t side = u.side(), n = side * side;
  const auto du = grid_gradient(u.values, u.cells, u.h);
  std::vector<cplx> composite(n);
  for (std::size_t k = 0; k < n; ++k) composite[k] = dual_value(u.values[k], spec);
  const auto direct = grid_gradient(composite, u.cells, u.h);

  DualGradient out;
  out.gradient.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.gradient[k] = dual_formula(u.values[k], du[k], spec);

  const cplx sums = ordered_sum(side, exec, [&](std::size_t j) {
    Accumulator acc;
    for (std::size_t i = 0; i < side; ++i) {
      const std::size_t k = j * side + i;
      const double gap = std::abs(out.gradient[k][0] - direct[k][0]) + std::abs(out.gradient[k][1] - direct[k][1]);
      const double size = std::abs(out.gradient[k][0]) + std::abs(out.gradient[k][1]);
      acc.add({gap, size});
    }
    return acc.value();
  });
  out.discrepancy = sums.imag() > 0.0 ? sums.real() / sums.imag() : sums.real();
  out.tolerance = tol.cross_check_factor * u.h;
  if (out.discrepancy > out.tolerance)
    throw Error(ErrorCode::GridTooCoarse, "chain rule and direct differencing differ by " +
                                              std::to_string(out.discrepancy) + " (limit " +
                                              std::to_string(out.tolerance) + ")");
  return out;
}

FormIntegralReport form_integral(const CoefficientField& field, const GridFunction& u, const CutoffSpec& spec,
                                 Exec exec, const Tolerances& tol) {
  require_plane_field(field);
  double theta = 0.0;
  for (const auto& c : field.cells) theta = std::max(theta, p_range_angle(c.mu, spec.p.p, tol).theta);

  const std::size_t n = u.values.size();
  std::vector<cplx> composite(n);
  for (std::size_t k = 0; k < n; ++k) composite[k] = dual_value(u.values[k], spec);
  const auto du = grid_gradient(u.values, u.cells, u.h);
  const auto dg = grid_gradient(composite, u.cells, u.h);

  FormIntegralReport r;
  r.value = node_quadrature(field, u.cells, u.h, du, dg, exec);
  r.arg = std::abs(r.value) > 0.0 ? std::arg(r.value) : 0.0;
  r.theta = SectorAngle::make(theta, AngleRole::PRange);
  r.tol_quad = tol.quad_tol_factor * u.h;
  r.pass = std::abs(r.arg) <= theta + r.tol_quad;
  return r;
}

cplx energy_integral(const CoefficientField& field, const GridFunction& u, Exec exec) {
  require_plane_field(field);
  const auto du = grid_gradient(u.values, u.cells, u.h);
  return node_quadrature(field, u.cells, u.h, du, du, exec);
}

ConvergenceReport form_convergence(const CoefficientField& field, const TrigPolynomial& u, const CutoffSpec& spec,
                                   std::size_t base_cells, int levels, Exec exec, const Tolerances& tol) {
  if (levels < 3) throw Error(ErrorCode::DomainError, "convergence study needs at least three levels");
  ConvergenceReport rep;
  std::size_t cells = base_cells;
  for (int l = 0; l < levels; ++l, cells *= 2) {
    rep.cells.push_back(cells);
    rep.values.push_back(form_integral(field, GridFunction::sample(u, cells), spec, exec, tol).value);
  }
  for (std::size_t k = 0; k + 2 < rep.values.size(); ++k) {
    const double num = std::abs(rep.values[k] - rep.values[k + 1]);
    const double den = std::abs(rep.values[k + 1] - rep.values[k + 2]);
    rep.ratios.push_back(den > 0.0 ? num / den : HUGE_VAL);
  }
  return rep;
}

cplx discrete_lp_pairing(const FormMatrices& fm, const CVector& u, double p) {
  const PExponent pe = PExponent::make(p);
  const std::size_t n = fm.k.rows();
  if (u.size() != n) throw Error(ErrorCode::GridMismatch, "vector length does not match the pencil");
  double norm = 0.0;
  for (std::size_t k = 0; k < n; ++k) norm += fm.lumped_mass[k] * std::pow(std::abs(u[k]), pe.p);
  if (!(norm > 0.0)) throw Error(ErrorCode::ZeroVector, "pairing needs a nonzero vector");
  const CVector ku = fm.k * std::span<const cplx>(u);
  Accumulator acc;
  for (std::size_t k = 0; k < n; ++k) {
    const double m = std::abs(u[k]);
    if (m == 0.0) continue;
    // w_k (W^{-1} K u)_k = (K u)_k
    acc.add(ku[k] * std::conj(u[k]) * std::pow(m, pe.p - 2.0));
  }
  return acc.value() / norm;
}

}  // namespace sectorial
