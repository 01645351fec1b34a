// SPDX-License-Identifier: Apache-2.0

#include "sectorial/sectorial_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sectorial/errors.hpp"

namespace sectorial {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGolden = 0.6180339887498949;
constexpr double kMaxLogRadius = 80.0;

double matrix_scale(const ComplexMatrix& b) { return std::max(max_abs(b) * static_cast<double>(b.rows()), 1e-300); }

bool in_sector(cplx z, double theta) { return z == cplx{} || std::abs(std::arg(z)) <= theta; }

ComplexMatrix shifted(const ComplexMatrix& b, cplx s) {
  ComplexMatrix r = b;
  for (std::size_t i = 0; i < r.rows(); ++i) r(i, i) += s;
  return r;
}

double golden_max(const std::function<double(double)>& f, double a, double b, double xtol) {
  double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol) {
    if (fc >= fd) {
      b = d, d = c, fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  return std::max(fc, fd);
}

double default_nu(const CalcFunction& f, const SectorialMatrix& s) {
  const double room = std::min(f.max_angle, kPi) - s.theta.theta;
  return s.theta.theta + std::min(0.5 * room, 1.0);
}

cplx parse_complex(const std::string& text) {
  // a, bi, a+bi, a-bi
  if (text.empty()) throw Error(ErrorCode::ValidationError, "empty complex literal");
  auto number = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ValidationError, "bad complex literal '" + text + "'");
    }
    if (used != t.size()) throw Error(ErrorCode::ValidationError, "bad complex literal '" + text + "'");
    return v;
  };
  if (text.back() != 'i') return number(text);
  const std::string body = text.substr(0, text.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_part = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return number(t);
  };
  if (split == std::string::npos) return {0.0, imag_part(body)};
  return {number(body.substr(0, split)), imag_part(body.substr(split))};
}

}  // namespace

// ---------------------------------------------------------------------------

SectorialMatrix certify(const ComplexMatrix& b, double shift, const Tolerances& tol) {
  require_square_finite(b, "certify");
  if (!(shift >= 0.0)) throw Error(ErrorCode::DomainError, "certify: shift must be >= 0");
  SectorialMatrix s;
  s.b = shifted(b, shift);
  s.shift = shift;
  s.min_re = coercivity_constant(s.b, tol);
  if (s.min_re < -1e-12 * matrix_scale(s.b))
    throw Error(ErrorCode::NotAccretive, "min Re N(B) = " + std::to_string(s.min_re) + " < 0");
  try {
    s.theta = optimal_angle(s.b, tol);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotSectorialValued) throw;
    s.theta = SectorAngle::make(kPi / 2, AngleRole::Optimal);
  }
  return s;
}

ResolventReport resolvent(const SectorialMatrix& s, cplx lambda, double slack) {
  if (in_sector(lambda, s.theta.theta))
    throw Error(ErrorCode::InsideSector, "lambda lies in the sector of the operator");
  ResolventReport r;
  r.resolvent = inverse(shifted(s.b, -lambda));
  r.norm = spectral_norm(r.resolvent);
  r.distance = distance_to_sector(lambda, s.theta.theta);
  r.product = r.norm * r.distance;
  r.pass = r.product <= 1.0 + slack;
  return r;
}

AngularResolventReport resolvent_angular(const SectorialMatrix& s, cplx lambda, double vartheta, double slack) {
  if (!(vartheta > s.theta.theta) || !(vartheta <= kPi))
    throw Error(ErrorCode::DomainError, "vartheta must lie in (theta, pi]");
  if (in_sector(lambda, vartheta)) throw Error(ErrorCode::InsideSector, "lambda lies in Sigma_vartheta");
  AngularResolventReport r;
  r.scaled_norm = std::abs(lambda) * spectral_norm(inverse(shifted(s.b, -lambda)));
  r.bound = 1.0 / std::sin(vartheta - s.theta.theta);
  r.pass = r.scaled_norm <= r.bound * (1.0 + slack);
  return r;
}

SemigroupReport semigroup(const SectorialMatrix& s, cplx z, double slack, const Tolerances& tol) {
  SemigroupReport r;
  r.value = expm(-z * s.b, tol);
  r.norm = spectral_norm(r.value);
  r.in_contraction_sector = in_sector(z, kPi / 2 - s.theta.theta + 1e-15);
  r.pass = !r.in_contraction_sector || r.norm <= 1.0 + slack;
  return r;
}

SectorialMatrix approximant(const SectorialMatrix& s, double eps, const Tolerances& tol) {
  if (!(eps > 0.0)) throw Error(ErrorCode::DomainError, "approximant: eps must be positive");
  const std::size_t n = s.b.rows();
  ComplexMatrix den = ComplexMatrix::identity(n);
  den += eps * s.b;
  const ComplexMatrix be = shifted(s.b, eps) * inverse(den, tol);
  return certify(be, 0.0, tol);
}

// ---------------------------------------------------------------------------

cplx CalcFunction::f0(cplx z) const {
  const cplx zero = at_zero.value_or(0.0), inf = at_infinity.value_or(0.0);
  return eval(z) - inf - (zero - inf) / (1.0 + z);
}

CalcFunction named_function(const std::string& name) {
  CalcFunction f;
  f.name = name;
  if (name == "rat1") {
    f.eval = [](cplx z) { return z / ((1.0 + z) * (1.0 + z)); };
    f.max_angle = kPi;
    f.at_zero = 0.0;
    f.at_infinity = 0.0;
    f.s = 1.0;
    f.envelope_c = [](double nu) { return 1.0 / std::pow(std::cos(nu / 2), 2); };
    f.direct = [](const ComplexMatrix& b) {
      const ComplexMatrix r = inverse(shifted(b, 1.0));
      return b * r * r;
    };
    f.half_plane_bounded = true;
  } else if (name == "cayley") {
    f.eval = [](cplx z) { return (1.0 - z) / (1.0 + z); };
    f.max_angle = kPi;
    f.at_zero = 1.0;
    f.at_infinity = -1.0;
    f.s = 1.0;
    f.envelope_c = [](double) { return 0.0; };
    f.direct = [](const ComplexMatrix& b) {
      ComplexMatrix num = -1.0 * b;
      for (std::size_t i = 0; i < num.rows(); ++i) num(i, i) += 1.0;
      return num * inverse(shifted(b, 1.0));
    };
    f.half_plane_bounded = true;
  } else if (name == "sqrtres") {
    f.eval = [](cplx z) { return std::sqrt(z) / (1.0 + z); };
    f.max_angle = kPi;
    f.at_zero = 0.0;
    f.at_infinity = 0.0;
    f.s = 0.5;
    f.envelope_c = [](double nu) { return 1.0 / std::cos(nu / 2); };
    f.half_plane_bounded = true;
  } else if (name == "exp") {
    f.eval = [](cplx z) { return std::exp(-z); };
    f.max_angle = kPi / 2;
    f.at_zero = 1.0;
    f.at_infinity = 0.0;
    f.s = 1.0;
    f.envelope_c = [](double nu) {
      const double h = 1.0 / std::cos(nu / 2);
      return std::max(std::numbers::e / 2 + h, 1.0 / (std::numbers::e * std::cos(nu)) + h);
    };
    f.direct = [](const ComplexMatrix& b) { return expm(-1.0 * b); };
    f.half_plane_bounded = true;
  } else if (name.rfind("res:", 0) == 0) {
    const cplx lambda = parse_complex(name.substr(4));
    if (lambda == cplx{}) throw Error(ErrorCode::ValidationError, "res: pole must be nonzero");
    f.eval = [lambda](cplx z) { return 1.0 / (z - lambda); };
    f.max_angle = std::abs(std::arg(lambda));
    f.at_zero = -1.0 / lambda;
    f.at_infinity = 0.0;
    f.s = 1.0;
    f.envelope_c = [lambda](double nu) {
      const double d = distance_to_sector(lambda, nu);
      const double a = std::abs(lambda);
      return std::abs(lambda + 1.0) * (d + a) / (a * d * std::cos(nu / 2));
    };
    f.direct = [lambda](const ComplexMatrix& b) { return inverse(shifted(b, -lambda)); };
    f.half_plane_bounded = lambda.real() < 0.0;
  } else {
    throw Error(ErrorCode::ValidationError, "unknown function '" + name + "'");
  }
  return f;
}

std::vector<std::string> named_function_list() { return {"rat1", "cayley", "sqrtres", "exp", "res:-1"}; }

CalcFunction polynomial(std::vector<cplx> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  CalcFunction f;
  std::ostringstream name;
  name << "poly" << coeffs.size() - 1;
  f.name = name.str();
  f.eval = [coeffs](cplx z) {
    cplx acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * z + coeffs[k];
    return acc;
  };
  f.max_angle = kPi;
  f.direct = [coeffs](const ComplexMatrix& b) {
    const std::size_t n = b.rows();
    ComplexMatrix acc(n);
    for (std::size_t k = coeffs.size(); k-- > 0;) {
      acc = acc * b;
      for (std::size_t i = 0; i < n; ++i) acc(i, i) += coeffs[k];
    }
    return acc;
  };
  f.half_plane_bounded = coeffs.size() == 1;
  return f;
}

CalcFunction constant_function(cplx c) {
  CalcFunction f = polynomial({c});
  f.name = "const";
  f.at_zero = c;
  f.at_infinity = c;
  f.s = 1.0;
  f.envelope_c = [](double) { return 0.0; };
  return f;
}

CalcFunction product(const CalcFunction& f, const CalcFunction& g) {
  auto vanishing = [](const CalcFunction& h) {
    return h.extended() && std::abs(*h.at_zero) == 0.0 && std::abs(*h.at_infinity) == 0.0;
  };
  if (!vanishing(f) || !vanishing(g))
    throw Error(ErrorCode::DomainError, "product needs functions vanishing at 0 and infinity");
  CalcFunction p;
  p.name = f.name + "*" + g.name;
  p.eval = [a = f.eval, b = g.eval](cplx z) { return a(z) * b(z); };
  p.max_angle = std::min(f.max_angle, g.max_angle);
  p.at_zero = 0.0;
  p.at_infinity = 0.0;
  p.s = f.s + g.s;
  p.envelope_c = [a = f.envelope_c, b = g.envelope_c](double nu) { return a(nu) * b(nu); };
  if (f.direct && g.direct)
    p.direct = [a = f.direct, b = g.direct](const ComplexMatrix& m) { return a(m) * b(m); };
  p.half_plane_bounded = f.half_plane_bounded && g.half_plane_bounded;
  return p;
}

double envelope_ratio(const CalcFunction& f, double nu, int samples) {
  if (!f.extended()) throw Error(ErrorCode::DomainError, "function has no envelope");
  const double c = f.envelope_c(nu);
  double worst = 0.0;
  for (double phi : {0.0, nu, -nu}) {
    for (int k = 0; k < samples; ++k) {
      const double r = std::pow(10.0, -8.0 + 16.0 * k / (samples - 1));
      const cplx z = std::polar(r, phi);
      const double env = c * std::min(std::pow(r, f.s), std::pow(r, -f.s));
      const double v = std::abs(f.f0(z));
      if (v <= 1e-14 * (1.0 + std::abs(f.eval(z)))) continue;
      worst = std::max(worst, env > 0.0 ? v / env : HUGE_VAL);
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

ContourPlan plan_contour(const CalcFunction& f, const SectorialMatrix& s, double nu, const Tolerances& tol) {
  if (!f.extended()) throw Error(ErrorCode::DomainError, "function '" + f.name + "' is outside the extended class");
  if (!(nu > s.theta.theta) || nu > f.max_angle || nu > kPi)
    throw Error(ErrorCode::DomainError, "contour angle must lie in (theta, max angle of f)");
  if (!(s.min_re > 0.0)) throw Error(ErrorCode::NotAccretive, "contour calculus needs min Re N(B) > 0");
  ContourPlan p;
  p.nu_prime = 0.5 * (s.theta.theta + nu);
  const double gap = p.nu_prime - s.theta.theta;
  if (gap < tol.contour_margin)
    throw Error(ErrorCode::ContourTooTight, "contour angle is " + std::to_string(gap) + " rad from the sector");
  p.nodes_per_panel = tol.quad_nodes;
  const double c = f.envelope_c(nu);
  if (!std::isfinite(c) || c < 0.0) throw Error(ErrorCode::TruncationError, "invalid envelope constant");
  if (c == 0.0) return p;  // f0 vanishes identically

  const double budget = 0.5 * tol.truncation;
  const double sin_gap = std::sin(std::min(gap, kPi / 2));
  // Outer tail over both rays: c R^{-s} / (pi s sin(gap)).
  const double log_r_outer = std::log(c / (kPi * f.s * sin_gap * budget)) / f.s;
  // Inner tail: c r0^{s+1} / (pi (s+1) (min_re - r0)).
  double r0 = 0.5 * s.min_re;
  auto inner = [&](double r) { return c * std::pow(r, f.s + 1.0) / (kPi * (f.s + 1.0) * (s.min_re - r)); };
  while (inner(r0) > budget && r0 > 0.0) r0 *= 0.5;
  if (!std::isfinite(log_r_outer) || log_r_outer > kMaxLogRadius || !(r0 > 0.0) || std::log(r0) < -kMaxLogRadius)
    throw Error(ErrorCode::TruncationError, "ray truncation cannot meet the tail budget");
  p.r_inner = r0;
  p.r_outer = std::max(std::exp(log_r_outer), 2.0 * r0);
  p.panels = std::max(1, static_cast<int>(std::ceil(std::log(p.r_outer / p.r_inner))));
  p.tail_bound = c * std::pow(p.r_outer, -f.s) / (kPi * f.s * sin_gap) + inner(r0);
  return p;
}

ComplexMatrix dunford_riesz(const CalcFunction& f, const SectorialMatrix& s, double nu, Exec exec,
                            const Tolerances& tol) {
  const ContourPlan plan = plan_contour(f, s, nu, tol);
  const std::size_t n = s.b.rows();
  ComplexMatrix total(n);
  if (plan.panels == 0) return total;

  std::vector<double> x, w;
  gauss_legendre(plan.nodes_per_panel, x, w);
  const double t0 = std::log(plan.r_inner);
  const double width = (std::log(plan.r_outer) - t0) / plan.panels;
  const cplx out_dir = std::polar(1.0, -plan.nu_prime);  // outgoing ray
  const cplx in_dir = std::polar(1.0, plan.nu_prime);    // incoming ray
  const cplx prefactor = 1.0 / (2.0 * kPi * kI);

  // Panel k of the outgoing ray is task k; of the incoming ray, task panels + k.
  const int tasks = 2 * plan.panels;
  std::vector<ComplexMatrix> partial(tasks);
  auto run = [&](int task) {
    const bool outgoing = task < plan.panels;
    const int k = outgoing ? task : task - plan.panels;
    const cplx dir = outgoing ? out_dir : in_dir;
    const double sign = outgoing ? 1.0 : -1.0;
    ComplexMatrix acc(n);
    for (int q = 0; q < plan.nodes_per_panel; ++q) {
      const double t = t0 + width * (k + 0.5 * (x[q] + 1.0));
      const double r = std::exp(t);
      const cplx z = r * dir;
      const cplx weight = sign * prefactor * f.f0(z) * dir * (r * 0.5 * width * w[q]);
      ComplexMatrix zb = -1.0 * s.b;
      for (std::size_t i = 0; i < n; ++i) zb(i, i) += z;
      acc += weight * inverse(zb, tol);
    }
    partial[task] = std::move(acc);
  };
  if (exec == Exec::Parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int task = 0; task < tasks; ++task) {
      try {
        run(task);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (int task = 0; task < tasks; ++task) run(task);
  }
  for (const auto& m : partial) total += m;
  return total;
}

ComplexMatrix evaluate(const CalcFunction& f, const SectorialMatrix& s, double nu, Exec exec, const Tolerances& tol) {
  if (!f.extended()) throw Error(ErrorCode::DomainError, "function '" + f.name + "' is outside the extended class");
  const std::size_t n = s.b.rows();
  ComplexMatrix out = dunford_riesz(f, s, nu, exec, tol);
  const cplx inf = *f.at_infinity, zero = *f.at_zero;
  for (std::size_t i = 0; i < n; ++i) out(i, i) += inf;
  if (zero != inf) out += (zero - inf) * inverse(shifted(s.b, 1.0), tol);
  return out;
}

std::vector<ConvergenceStep> calculus_convergence(const CalcFunction& f, const SectorialMatrix& s, double nu,
                                                  const std::vector<double>& eps_sequence, const Tolerances& tol) {
  const ComplexMatrix fb = evaluate(f, s, nu, Exec::Parallel, tol);
  std::vector<ConvergenceStep> out;
  for (double eps : eps_sequence) {
    const SectorialMatrix se = approximant(s, eps, tol);
    // The approximant's sector never exceeds that of B, so nu stays admissible.
    SectorialMatrix se_in = se;
    se_in.theta = SectorAngle::make(std::min(se.theta.theta, s.theta.theta), AngleRole::Optimal);
    out.push_back({eps, spectral_norm(evaluate(f, se_in, nu, Exec::Parallel, tol) - fb)});
  }
  return out;
}

// ---------------------------------------------------------------------------

double sup_on_polygon(const std::function<cplx(cplx)>& f, const std::vector<cplx>& vertices, int samples) {
  if (vertices.empty()) throw Error(ErrorCode::DegenerateRange, "empty polygon");
  const std::size_t m = vertices.size();
  std::vector<double> cum(m + 1, 0.0);
  for (std::size_t k = 0; k < m; ++k) cum[k + 1] = cum[k] + std::abs(vertices[(k + 1) % m] - vertices[k]);
  const double perimeter = cum[m];
  double best = 0.0;
  for (const cplx& v : vertices) best = std::max(best, std::abs(f(v)));
  if (perimeter == 0.0) return best;
  auto point = [&](double arc) {
    arc = std::fmod(std::fmod(arc, perimeter) + perimeter, perimeter);
    const std::size_t k = std::min<std::size_t>(
        static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), arc) - cum.begin()) - 1, m - 1);
    const double len = cum[k + 1] - cum[k];
    const double t = len > 0.0 ? (arc - cum[k]) / len : 0.0;
    return vertices[k] + t * (vertices[(k + 1) % m] - vertices[k]);
  };
  auto g = [&](double arc) { return std::abs(f(point(arc))); };
  const double step = perimeter / samples;
  double best_arc = 0.0, best_sample = -1.0;
  for (int k = 0; k < samples; ++k) {
    const double v = g(k * step);
    if (v > best_sample) best_sample = v, best_arc = k * step;
  }
  best = std::max(best, best_sample);
  best = std::max(best, golden_max(g, best_arc - step, best_arc + step, 1e-12 * perimeter));
  return best;
}

double sup_on_sector(const CalcFunction& f, double angle, int samples) {
  double best = 0.0;
  if (f.at_zero) best = std::max(best, std::abs(*f.at_zero));
  if (f.at_infinity) best = std::max(best, std::abs(*f.at_infinity));
  for (double phi : {angle, -angle}) {
    auto g = [&](double lr) { return std::abs(f.eval(std::polar(std::exp(lr), phi))); };
    const double lo = std::log(1e-8), hi = std::log(1e8);
    const double step = (hi - lo) / (samples - 1);
    double best_lr = lo, best_v = -1.0;
    for (int k = 0; k < samples; ++k) {
      const double v = g(lo + k * step);
      if (v > best_v) best_v = v, best_lr = lo + k * step;
    }
    best = std::max({best, best_v, golden_max(g, best_lr - step, best_lr + step, 1e-12)});
  }
  return best;
}

ComplexMatrix apply_function(const CalcFunction& f, const SectorialMatrix& s, const Tolerances& tol) {
  if (f.direct) return f.direct(s.b);
  return evaluate(f, s, default_nu(f, s), Exec::Parallel, tol);
}

RatioReport crouzeix_ratio(const ComplexMatrix& b, const CalcFunction& f, const RegionSpec& region,
                           const Tolerances& tol) {
  require_square_finite(b, "crouzeix_ratio");
  RatioReport r;
  if (f.direct) {
    r.matrix_norm = spectral_norm(f.direct(b));
  } else {
    r.matrix_norm = spectral_norm(apply_function(f, certify(b, 0.0, tol), tol));
  }
  if (region.kind == RegionSpec::Kind::Sector) {
    r.sup = sup_on_sector(f, region.sector_angle, tol.sup_samples);
  } else {
    const RangeBoundary rb = range_boundary(b, tol.n_dirs, Exec::Parallel, tol);
    r.sup = sup_on_polygon(f.eval, rb.boundary_points, tol.sup_samples);
  }
  if (!(r.sup > 0.0)) {
    if (r.matrix_norm == 0.0) return r;
    throw Error(ErrorCode::DegenerateRange, "sup of |f| over the region vanishes");
  }
  r.ratio = r.matrix_norm / r.sup;
  r.pass = r.ratio <= 1.0 + std::numbers::sqrt2 + tol.crouzeix_slack;
  return r;
}

RatioReport von_neumann_check(const SectorialMatrix& s, const CalcFunction& f, const Tolerances& tol) {
  if (!f.half_plane_bounded) throw Error(ErrorCode::DomainError, "function is not bounded on the right half-plane");
  RatioReport r;
  r.matrix_norm = spectral_norm(apply_function(f, s, tol));
  r.sup = sup_on_sector(f, kPi / 2, tol.sup_samples);
  if (!(r.sup > 0.0)) {
    r.pass = r.matrix_norm == 0.0;
    return r;
  }
  r.ratio = r.matrix_norm / r.sup;
  r.pass = r.ratio <= 1.0 + 1e-9;
  return r;
}

}  // namespace sectorial
