// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>

#include "acceptance.hpp"
#include "io.hpp"
#include "sectorial/coefficient_field.hpp"
#include "sectorial/discretize.hpp"
#include "sectorial/matrix_range.hpp"
#include "sectorial/pform.hpp"
#include "sectorial/sectorial_calculus.hpp"

namespace sectorctl {

using namespace sectorial;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kFemCsvDirections = 96;

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

[[noreturn]] void invalid(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ValidationError, where + ": " + what);
}

struct Settings {
  Tolerances tol = default_tolerances();
  std::uint64_t seed = 20240601;
  std::string csv_out;
  std::string json_out;
  std::vector<std::string> overrides;
  int n_dirs = 0;  // 0 keeps the tolerance default

  void apply() {
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos || eq == 0) invalid("--tol-override", "expected name=value, got '" + o + "'");
      const std::string name = o.substr(0, eq), text = o.substr(eq + 1);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != text.size() || !std::isfinite(v))
        invalid("--tol-override " + name, "'" + text + "' is not a finite number");
      tol.set(name, v);
    }
    if (n_dirs > 0) tol.n_dirs = n_dirs;
  }

  Json to_json() const {
    Json j;
    j["seed"] = seed;
    Json t = Json::object();
    for (const auto& name : Tolerances::names()) t[name] = tol.get(name);
    j["tolerances"] = t;
    return j;
  }
};

struct Report {
  std::string command;
  Json scenario = Json::object();
  Json results = Json::object();
  Json notes = Json::array();
  Json checks = Json::array();
  std::vector<CsvRow> csv;

  void check(const std::string& name, bool pass, Json detail = nullptr) {
    Json c;
    c["name"] = name;
    c["pass"] = pass;
    c["detail"] = std::move(detail);
    checks.push_back(std::move(c));
  }

  void note(const std::string& subject, const std::string& text) {
    Json n;
    n["subject"] = subject;
    n["note"] = text;
    notes.push_back(std::move(n));
  }

  std::size_t failed() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const Json& c) { return !c["pass"].get<bool>(); }));
  }
};

/// Stores f() under key, or null and a note when the quantity is undefined for this input.
template <class F>
void attempt(Report& r, Json& target, const std::string& key, F&& f) {
  try {
    target[key] = f();
  } catch (const Error& e) {
    target[key] = nullptr;
    r.note(key, e.what());
  }
}

Json angle_json(const SectorAngle& a) {
  Json j = angle_to_json(a.theta);
  j["role"] = std::string(to_string(a.role));
  if (a.discretization > 0.0) j["discretization"] = a.discretization;
  return j;
}

Json vector_json(const CVector& v) {
  Json re = Json::array(), im = Json::array();
  for (const auto& z : v) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  Json j;
  j["re"] = re;
  j["im"] = im;
  return j;
}

std::string base_dir_of(const std::string& path) {
  return std::filesystem::path(path).parent_path().string();
}

const Json& required(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) invalid(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) invalid(where, std::string("missing field '") + key + "'");
  return *it;
}

double number_or(const Json& j, const char* key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const Json& v = j[key];
  if (!v.is_number() || !std::isfinite(v.get<double>())) invalid(where + "." + key, "expected a finite number");
  return v.get<double>();
}

long long integer_or(const Json& j, const char* key, long long fallback, long long lo, long long hi,
                     const std::string& where) {
  if (!j.contains(key)) return fallback;
  const Json& v = j[key];
  if (!v.is_number_integer() || v.get<long long>() < lo || v.get<long long>() > hi)
    invalid(where + "." + key, fmt("expected an integer in [%lld, %lld]", lo, hi));
  return v.get<long long>();
}

std::vector<double> numbers_or(const Json& j, const char* key, std::vector<double> fallback,
                               const std::string& where) {
  if (!j.contains(key)) return fallback;
  const Json& v = j[key];
  const std::string w = where + "." + key;
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array() || v.empty()) invalid(w, "expected a number or a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_number() || !std::isfinite(v[k].get<double>()))
      invalid(w + "[" + std::to_string(k) + "]", "expected a finite number");
    out.push_back(v[k].get<double>());
  }
  return out;
}

int emit(Report& r, const Settings& s, std::ostream& out) {
  Json doc;
  doc["tool"] = "sectorctl";
  doc["command"] = r.command;
  doc["settings"] = s.to_json();
  doc["scenario"] = r.scenario;
  doc["results"] = r.results;
  doc["notes"] = r.notes;
  doc["checks"] = r.checks;
  const std::size_t failed = r.failed();
  Json summary;
  summary["checks"] = r.checks.size();
  summary["failed"] = failed;
  doc["summary"] = summary;
  doc["pass"] = failed == 0;

  const std::string text = write_json(doc);
  if (s.json_out.empty()) {
    out << text;
  } else {
    write_text_file(s.json_out, text);
    out << "sectorctl " << r.command << ": " << r.checks.size() << " checks, " << failed << " failed\n";
  }
  if (!s.csv_out.empty()) write_text_file(s.csv_out, write_csv(r.csv));
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

double max_modulus(const std::vector<CsvRow>& rows) {
  double m = 0.0;
  for (const auto& row : rows) m = std::max(m, std::abs(row.z));
  return m;
}

// ---------------------------------------------------------------------------
// analyze-matrix

int analyze_matrix(const std::string& path, const Settings& s, std::ostream& out) {
  const ComplexMatrix l = parse_matrix(read_json_file(path), path);
  Report r;
  r.command = "analyze-matrix";
  r.scenario["matrix_file"] = path;
  r.scenario["matrix"] = matrix_to_json(l);

  std::optional<double> omega, omega_sampled, alpha, alpha_bar, spectral;
  Json& res = r.results;
  res["n"] = l.rows();
  attempt(r, res, "omega", [&] {
    const SectorAngle a = optimal_angle(l, s.tol);
    omega = a.theta;
    return angle_json(a);
  });
  attempt(r, res, "omega_sampled", [&] {
    const SectorAngle a = optimal_angle_sampled(l, s.tol.n_dirs, Exec::Parallel, s.tol);
    omega_sampled = a.theta;
    return angle_json(a);
  });
  attempt(r, res, "alpha", [&] {
    const SectorAngle a = angle_estimate_lemma(l, s.tol);
    alpha = a.theta;
    return angle_json(a);
  });
  attempt(r, res, "alpha_bar", [&] {
    const SectorAngle a = angle_estimate_norm(l, s.tol);
    alpha_bar = a.theta;
    return angle_json(a);
  });
  attempt(r, res, "coercivity", [&] {
    const CoercivityData c = coercivity_data(l, s.tol);
    Json j;
    j["m"] = c.m;
    j["numerical_radius_im"] = c.numerical_radius_im;
    j["numerical_radius"] = c.numerical_radius;
    return j;
  });
  attempt(r, res, "spectrum", [&] {
    const auto ev = eig_general(l, s.tol);
    Json list = Json::array();
    double worst = 0.0;
    for (const auto& z : ev) {
      list.push_back(complex_to_json(z));
      if (std::abs(z) > 0.0) worst = std::max(worst, std::abs(std::arg(z)));
    }
    spectral = worst;
    Json j;
    j["eigenvalues"] = list;
    j["spectral_angle"] = angle_to_json(worst);
    return j;
  });
  attempt(r, res, "halfmoon", [&] {
    const HalfMoonRegion h = halfmoon_region(l, s.tol);
    Json j;
    j["re_min"] = h.re_min;
    j["re_max"] = h.re_max;
    j["im_max"] = h.im_max;
    j["radius"] = h.radius;
    return j;
  });
  attempt(r, res, "sharpness", [&] {
    const SharpnessReport sh = sharpness_check(l, s.tol);
    Json j;
    j["verdict"] = sh.verdict;
    j["corner"] = complex_to_json(sh.corner);
    j["witness"] = sh.witness ? complex_to_json(*sh.witness) : Json(nullptr);
    return j;
  });

  const double slack = s.tol.sector_slack;
  if (omega && alpha) r.check("omega <= alpha", *omega <= *alpha + slack, *alpha - *omega);
  if (alpha && alpha_bar) r.check("alpha <= alpha_bar", *alpha <= *alpha_bar + slack, *alpha_bar - *alpha);
  if (omega && spectral)
    r.check("spectral angle <= omega", *spectral <= *omega + s.tol.eigenvalue_match, *omega - *spectral);
  if (omega && omega_sampled)
    r.check("sampled range inside sector omega", *omega_sampled <= *omega + slack, *omega - *omega_sampled);

  if (!s.csv_out.empty()) {
    const RangeBoundary rb = range_boundary(l, s.tol.n_dirs, Exec::Parallel, s.tol);
    for (const auto& z : rb.boundary_points) r.csv.push_back({"boundary", z});
    const double radius = 1.1 * max_modulus(r.csv);
    if (omega) append_sector_rays(r.csv, "omega", *omega, radius);
    if (alpha) append_sector_rays(r.csv, "alpha", *alpha, radius);
    if (alpha_bar) append_sector_rays(r.csv, "alpha_bar", *alpha_bar, radius);
  }
  return emit(r, s, out);
}

// ---------------------------------------------------------------------------
// analyze-field

Json conjugate_sentinel(double q) {
  if (std::isinf(q)) return 1.0;
  return real_or_sentinel(q / (q - 1.0));
}

int analyze_field(const std::string& path, const std::vector<double>& ps, const Settings& s, std::ostream& out) {
  const Json fj = read_json_file(path);
  Report r;
  r.command = "analyze-field";
  r.scenario["field_file"] = path;
  r.scenario["field"] = fj;
  r.scenario["p"] = ps;
  std::vector<PExponent> exps;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    try {
      exps.push_back(PExponent::make(ps[k]));
    } catch (const Error& e) {
      invalid("--p[" + std::to_string(k) + "]", bare_message(e));
    }
  }
  const CoefficientField field = parse_field(fj, path, s.tol);
  const bool real = field.max_im_norm() == 0.0;

  Json& res = r.results;
  res["d"] = field.d();
  res["grid"] = field.grid_dims;
  res["cells"] = field.cells.size();
  res["real"] = real;
  res["m_bullet"] = field.m_bullet;
  res["omega_mu"] = angle_json(field.omega_mu);
  res["alpha"] = angle_json(field.alpha);
  res["eta"] = real_or_sentinel(field.eta);
  res["q"] = real_or_sentinel(field.q_crit);
  res["q_conj"] = conjugate_sentinel(field.q_crit);
  res["eta_bullet"] = real_or_sentinel(field.eta_bullet);
  res["q_bullet"] = real_or_sentinel(field.q_bullet);
  res["q_bullet_conj"] = conjugate_sentinel(field.q_bullet);

  Json rows = Json::array();
  for (const auto& pe : exps) {
    const double p = pe.p;
    const std::string tag = fmt("[p=%g]", p);
    Json row;
    row["p"] = p;
    row["p_conj"] = pe.p_conj;
    row["sigma_p"] = real_or_sentinel(pe.sigma_p);
    const bool inside = in_window(p, field.q_crit);
    row["in_window"] = inside;
    row["in_uniform_window"] = in_window(p, field.q_bullet);

    std::optional<double> dmin, dbound, omega_p, alpha_p;
    attempt(r, row, "delta_p", [&] {
      double best = HUGE_VAL;
      std::size_t at = 0;
      for (std::size_t c = 0; c < field.cells.size(); ++c) {
        const double v = delta_p(field.cells[c].mu, p, s.tol);
        if (v < best) {
          best = v;
          at = c;
        }
      }
      dmin = best;
      Json j;
      j["min"] = best;
      j["cell"] = at;
      return j;
    });
    if (inside) {
      attempt(r, row, "delta_p_lower_bound", [&] {
        dbound = delta_p_lower_bound(field, p);
        return Json(*dbound);
      });
    } else {
      row["delta_p_lower_bound"] = nullptr;
    }
    attempt(r, row, "omega_p", [&] {
      double worst = 0.0;
      for (const auto& cell : field.cells) worst = std::max(worst, p_range_angle(cell.mu, p, s.tol).theta);
      omega_p = worst;
      return angle_to_json(worst);
    });
    if (inside) {
      attempt(r, row, "alpha_p", [&] {
        const SectorAngle a = alpha_p_complex(field, p);
        alpha_p = a.theta;
        return angle_json(a);
      });
    } else {
      row["alpha_p"] = nullptr;
    }
    if (in_window(p, field.q_bullet)) {
      attempt(r, row, "alpha_p_uniform", [&] { return angle_json(alpha_p_uniform(field, p)); });
    } else {
      row["alpha_p_uniform"] = nullptr;
    }
    row["alpha_p_real"] = real ? angle_json(alpha_p_real(field.omega_mu, p)) : Json(nullptr);
    row["psi_p"] = angle_json(hinf_angle_bound(field.omega_mu, p));

    if (dmin && dbound) r.check("delta_p >= lower bound " + tag, *dmin >= *dbound - 1e-10, *dmin - *dbound);
    if (omega_p && alpha_p) r.check("omega_p <= alpha_p " + tag, *omega_p <= *alpha_p + 1e-8, *alpha_p - *omega_p);
    rows.push_back(std::move(row));
  }
  res["exponents"] = rows;
  return emit(r, s, out);
}

// ---------------------------------------------------------------------------
// fem-check

int fem_check(const std::string& path, const Settings& s, std::ostream& out) {
  const Json sc = read_json_file(path);
  const std::string base = base_dir_of(path);
  const Json fj = resolve_input(required(sc, "field", path), base, path + ".field");
  const CoefficientField field = parse_field(fj, path + ".field", s.tol);
  const MeshSpec ms = parse_mesh(required(sc, "mesh", path), path + ".mesh");
  const Mesh2D mesh = build_mesh(ms.nx, ms.ny, ms.lx, ms.ly);
  const BoundaryMarking marking = parse_dirichlet(required(sc, "dirichlet", path), mesh, path + ".dirichlet");
  const double slack = number_or(sc, "slack", 1e-8, path);
  std::optional<double> theta_in;
  if (sc.contains("theta")) theta_in = number_or(sc, "theta", 0.0, path);

  SectorAngle theta = field.omega_mu;
  if (theta_in) {
    try {
      theta = SectorAngle::make(*theta_in, AngleRole::Free);
    } catch (const Error& e) {
      invalid(path + ".theta", bare_message(e));
    }
  }

  Report r;
  r.command = "fem-check";
  r.scenario["scenario_file"] = path;
  r.scenario["field"] = fj;
  Json mj;
  mj["nx"] = ms.nx;
  mj["ny"] = ms.ny;
  mj["Lx"] = ms.lx;
  mj["Ly"] = ms.ly;
  r.scenario["mesh"] = mj;
  r.scenario["dirichlet"] = sc["dirichlet"];
  r.scenario["theta"] = theta_in ? Json(*theta_in) : Json(nullptr);
  r.scenario["slack"] = slack;

  const FormMatrices fm = assemble(field, mesh, marking);
  const InclusionReport rep = sector_inclusion_check(fm, theta, slack, s.tol);

  Json& res = r.results;
  res["free_nodes"] = fm.free_nodes.size();
  res["discrete_angle"] = angle_to_json(rep.angle);
  res["theta"] = angle_json(theta);
  res["theta_source"] = theta_in ? "scenario" : "omega_mu";
  res["omega_mu"] = angle_json(field.omega_mu);
  res["gap_to_omega_mu"] = field.omega_mu.theta - rep.angle;
  res["max_excess_angle"] = rep.max_excess_angle;
  if (rep.witness) {
    Json w;
    w["rayleigh_quotient"] = rep.witness_value ? complex_to_json(*rep.witness_value) : Json(nullptr);
    w["vector"] = vector_json(*rep.witness);
    res["witness"] = w;
  } else {
    res["witness"] = nullptr;
  }
  r.note("omega_mu", fmt("omega(mu) = %.17g rad, tan %.17g; discrete angle %.17g rad", field.omega_mu.theta,
                         std::tan(field.omega_mu.theta), rep.angle));
  if (rep.angle < field.omega_mu.theta - 1e-6)
    r.note("gap", "the discrete form has a strictly smaller sector than the pointwise coefficient");
  r.check("discrete range inside sector theta", rep.pass, rep.theta + slack - rep.angle);

  if (!s.csv_out.empty()) {
    // Each direction is a dense eigensolve of the reduced pencil.
    const int dirs = s.n_dirs > 0 ? s.n_dirs : kFemCsvDirections;
    const RangeBoundary rb = range_boundary(reduced_operator(fm), dirs, Exec::Parallel, s.tol);
    for (const auto& z : rb.boundary_points) r.csv.push_back({"boundary", z});
    const double radius = 1.1 * max_modulus(r.csv);
    append_sector_rays(r.csv, "theta", theta.theta, radius);
    append_sector_rays(r.csv, "discrete", rep.angle, radius);
  }
  return emit(r, s, out);
}

// ---------------------------------------------------------------------------
// calculus-check

/// lambda with arg in [angle + margin, pi], either half-plane, modulus in [1e-2, 1e2].
cplx sample_outside(double angle, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double lo = angle + 0.05 * (kPi - angle);
  const double phi = lo + (kPi - lo) * u(rng);
  const double sign = u(rng) < 0.5 ? -1.0 : 1.0;
  const double radius = std::pow(10.0, -2.0 + 4.0 * u(rng));
  return std::polar(radius, sign * phi);
}

int calculus_check(const std::string& path, const Settings& s, std::ostream& out) {
  const Json sc = read_json_file(path);
  const Json mj = resolve_input(required(sc, "matrix", path), base_dir_of(path), path + ".matrix");
  const ComplexMatrix b = parse_matrix(mj, path + ".matrix");
  const double shift = number_or(sc, "shift", 0.0, path);
  const std::vector<double> eps = numbers_or(sc, "eps", {1e-1, 1e-3, 1e-6}, path);
  for (std::size_t k = 0; k < eps.size(); ++k)
    if (!(eps[k] > 0.0 && eps[k] < 1.0)) invalid(path + ".eps[" + std::to_string(k) + "]", "expected 0 < eps < 1");
  const int lambda_samples = static_cast<int>(integer_or(sc, "lambda_samples", 20, 0, 100000, path));
  const int z_samples = static_cast<int>(integer_or(sc, "z_samples", 20, 0, 100000, path));
  std::optional<double> nu_in;
  if (sc.contains("nu")) nu_in = number_or(sc, "nu", 0.0, path);

  std::vector<std::string> names = {"rat1", "cayley", "sqrtres", "exp"};
  if (sc.contains("functions")) {
    const Json& fl = sc["functions"];
    if (!fl.is_array()) invalid(path + ".functions", "expected an array of function names");
    names.clear();
    for (std::size_t k = 0; k < fl.size(); ++k) {
      if (!fl[k].is_string()) invalid(path + ".functions[" + std::to_string(k) + "]", "expected a string");
      names.push_back(fl[k].get<std::string>());
    }
  }
  std::vector<CalcFunction> functions;
  for (std::size_t k = 0; k < names.size(); ++k) {
    try {
      functions.push_back(named_function(names[k]));
    } catch (const Error& e) {
      invalid(path + ".functions[" + std::to_string(k) + "]", bare_message(e));
    }
  }

  Report r;
  r.command = "calculus-check";
  r.scenario["scenario_file"] = path;
  r.scenario["matrix"] = matrix_to_json(b);
  r.scenario["shift"] = shift;
  r.scenario["functions"] = names;
  r.scenario["eps"] = eps;
  r.scenario["nu"] = nu_in ? Json(*nu_in) : Json(nullptr);
  r.scenario["lambda_samples"] = lambda_samples;
  r.scenario["z_samples"] = z_samples;

  const SectorialMatrix sm = certify(b, shift, s.tol);
  const double theta = sm.theta.theta;
  Json& res = r.results;
  Json cert;
  cert["theta"] = angle_json(sm.theta);
  cert["min_re"] = sm.min_re;
  cert["shift"] = sm.shift;
  res["certified"] = cert;

  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  {
    double worst = 0.0;
    bool ok = true;
    for (int k = 0; k < lambda_samples; ++k) {
      const ResolventReport rep = resolvent(sm, sample_outside(theta, rng));
      worst = std::max(worst, rep.product);
      ok = ok && rep.pass;
    }
    Json j;
    j["samples"] = lambda_samples;
    j["max_norm_times_distance"] = worst;
    res["resolvent"] = j;
    if (lambda_samples > 0) r.check("resolvent norm * distance <= 1", ok, worst);
  }

  Json angular = Json::array();
  for (const double vartheta : {theta + 0.1, kPi / 2}) {
    if (!(vartheta > theta) || vartheta >= kPi || lambda_samples == 0) continue;
    double worst = 0.0;
    bool ok = true;
    for (int k = 0; k < lambda_samples; ++k) {
      const AngularResolventReport rep = resolvent_angular(sm, sample_outside(vartheta, rng), vartheta);
      worst = std::max(worst, rep.scaled_norm / rep.bound);
      ok = ok && rep.pass;
    }
    Json j;
    j["vartheta"] = angle_to_json(vartheta);
    j["max_ratio_to_bound"] = worst;
    angular.push_back(j);
    r.check(fmt("angular resolvent bound [vartheta=%.6f]", vartheta), ok, worst);
  }
  res["angular_resolvent"] = angular;

  {
    const double half = std::max(0.0, kPi / 2 - theta);
    double worst = 0.0;
    bool ok = true;
    for (int k = 0; k < z_samples; ++k) {
      double phi = half * (2.0 * u01(rng) - 1.0);
      if (k == 0) phi = half;
      if (k == 1) phi = -half;
      const cplx z = std::polar(std::pow(10.0, -2.0 + 4.0 * u01(rng)), phi);
      const SemigroupReport rep = semigroup(sm, z, 1e-10, s.tol);
      worst = std::max(worst, rep.norm);
      ok = ok && rep.pass;
    }
    Json j;
    j["samples"] = z_samples;
    j["sector"] = angle_to_json(half);
    j["max_norm"] = worst;
    res["semigroup"] = j;
    if (z_samples > 0) r.check("semigroup contraction", ok, worst);
  }

  Json approx = Json::array();
  for (const double e : eps) {
    const SectorialMatrix a = approximant(sm, e, s.tol);
    Json j;
    j["eps"] = e;
    j["theta"] = angle_json(a.theta);
    j["min_re"] = a.min_re;
    approx.push_back(j);
    r.check(fmt("approximant angle [eps=%g]", e), a.theta.theta <= theta + 1e-8, theta - a.theta.theta);
    r.check(fmt("approximant min Re [eps=%g]", e), a.min_re >= e - 1e-10, a.min_re - e);
  }
  res["approximants"] = approx;

  Json fres = Json::array();
  for (std::size_t k = 0; k < functions.size(); ++k) {
    const CalcFunction& f = functions[k];
    const std::string tag = "[" + f.name + "]";
    const double nu = nu_in ? *nu_in : theta + std::min(0.5 * (std::min(f.max_angle, kPi) - theta), 1.0);
    Json j;
    j["name"] = f.name;
    j["nu"] = nu;
    try {
      const ComplexMatrix contour = evaluate(f, sm, nu, Exec::Parallel, s.tol);
      j["norm"] = spectral_norm(contour);
      if (f.direct) {
        const double err = spectral_norm(contour - f.direct(sm.b));
        j["contour_vs_direct"] = err;
        r.check("contour vs direct " + tag, err <= 1e-8, err);
      } else {
        j["contour_vs_direct"] = nullptr;
      }
    } catch (const Error& e) {
      j["norm"] = nullptr;
      j["contour_vs_direct"] = nullptr;
      r.check("contour vs direct " + tag, false, e.what());
    }
    try {
      Json steps = Json::array();
      for (const auto& st : calculus_convergence(f, sm, nu, eps, s.tol)) {
        Json e;
        e["eps"] = st.eps;
        e["difference"] = st.difference;
        steps.push_back(e);
      }
      j["convergence"] = steps;
    } catch (const Error& e) {
      j["convergence"] = nullptr;
      r.note(f.name + " convergence", e.what());
    }
    try {
      const RatioReport cr = crouzeix_ratio(sm.b, f, {}, s.tol);
      j["crouzeix_ratio"] = cr.ratio;
      r.check("crouzeix ratio " + tag, cr.pass, cr.ratio);
    } catch (const Error& e) {
      j["crouzeix_ratio"] = nullptr;
      r.check("crouzeix ratio " + tag, false, e.what());
    }
    if (f.half_plane_bounded) {
      try {
        const RatioReport vn = von_neumann_check(sm, f, s.tol);
        j["von_neumann_ratio"] = vn.ratio;
        r.check("von neumann ratio " + tag, vn.pass, vn.ratio);
      } catch (const Error& e) {
        j["von_neumann_ratio"] = nullptr;
        r.check("von neumann ratio " + tag, false, e.what());
      }
    } else {
      j["von_neumann_ratio"] = nullptr;
    }
    fres.push_back(std::move(j));
  }
  res["functions"] = fres;
  return emit(r, s, out);
}

// ---------------------------------------------------------------------------
// pform-check

int pform_check(const std::string& path, const Settings& s, std::ostream& out) {
  const Json sc = read_json_file(path);
  const std::string base = base_dir_of(path);
  const Json fj = resolve_input(required(sc, "field", path), base, path + ".field");
  const CoefficientField field = parse_field(fj, path + ".field", s.tol);
  if (field.d() != 2) invalid(path + ".field.d", "the form quadrature needs d = 2");
  const std::vector<double> ps = numbers_or(sc, "p", {2.0, 3.0, 4.0}, path);
  const double k_cut = number_or(sc, "K", 2.0, path);
  const auto cells = static_cast<std::size_t>(integer_or(sc, "cells", 128, 32, 4096, path));

  Json corpus = sc.contains("corpus") ? sc["corpus"] : Json::object();
  if (!corpus.is_object()) invalid(path + ".corpus", "expected an object");
  const int count = static_cast<int>(integer_or(corpus, "count", 3, 1, 1000, path + ".corpus"));
  const int max_freq = static_cast<int>(integer_or(corpus, "max_freq", 1, 0, 8, path + ".corpus"));
  const auto seed = static_cast<std::uint64_t>(
      integer_or(corpus, "seed", static_cast<long long>(s.seed % (1ULL << 62)), 0, 1LL << 62, path + ".corpus"));

  std::vector<CutoffSpec> specs;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    try {
      specs.push_back(CutoffSpec::make(k_cut, ps[k]));
    } catch (const Error& e) {
      invalid(path + ".p[" + std::to_string(k) + "]", bare_message(e));
    }
  }

  std::optional<std::pair<std::size_t, int>> conv;
  if (sc.contains("convergence")) {
    const Json& c = sc["convergence"];
    const std::string w = path + ".convergence";
    if (!c.is_object()) invalid(w, "expected an object");
    conv = {static_cast<std::size_t>(integer_or(c, "base_cells", 64, 32, 4096, w)),
            static_cast<int>(integer_or(c, "levels", 3, 3, 6, w))};
  }

  Report r;
  r.command = "pform-check";
  r.scenario["scenario_file"] = path;
  r.scenario["field"] = fj;
  r.scenario["p"] = ps;
  r.scenario["K"] = k_cut;
  r.scenario["cells"] = cells;
  Json cj;
  cj["count"] = count;
  cj["seed"] = seed;
  cj["max_freq"] = max_freq;
  r.scenario["corpus"] = cj;
  if (conv) {
    Json j;
    j["base_cells"] = conv->first;
    j["levels"] = conv->second;
    r.scenario["convergence"] = j;
  } else {
    r.scenario["convergence"] = nullptr;
  }
  r.scenario["pairing"] = sc.contains("pairing") ? sc["pairing"] : Json(nullptr);

  Json forms = Json::array(), convs = Json::array();
  for (int k = 0; k < count; ++k) {
    const TrigPolynomial u = random_band_limited(seed + static_cast<std::uint64_t>(k), max_freq);
    const GridFunction grid = GridFunction::sample(u, cells);
    for (const auto& spec : specs) {
      const std::string tag = fmt("[u=%d,p=%g]", k, spec.p.p);
      Json j;
      j["u"] = k;
      j["p"] = spec.p.p;
      try {
        const DualGradient dual = p_dual_gradient(grid, spec, Exec::Parallel, s.tol);
        Json x;
        x["discrepancy"] = dual.discrepancy;
        x["tolerance"] = dual.tolerance;
        j["cross_check"] = x;
        const FormIntegralReport fi = form_integral(field, grid, spec, Exec::Parallel, s.tol);
        j["value"] = complex_to_json(fi.value);
        j["arg"] = fi.arg;
        j["theta_p"] = angle_json(fi.theta);
        j["tol_quad"] = fi.tol_quad;
        j["margin"] = fi.theta.theta + fi.tol_quad - std::abs(fi.arg);
        r.check("form integral inside sector " + tag, fi.pass, j["margin"]);
      } catch (const Error& e) {
        j["error"] = e.what();
        r.check("form integral inside sector " + tag, false, e.what());
      }
      forms.push_back(std::move(j));

      if (conv) {
        Json c;
        c["u"] = k;
        c["p"] = spec.p.p;
        try {
          const ConvergenceReport cr =
              form_convergence(field, u, spec, conv->first, conv->second, Exec::Parallel, s.tol);
          c["cells"] = cr.cells;
          Json vals = Json::array();
          for (const auto& v : cr.values) vals.push_back(complex_to_json(v));
          c["values"] = vals;
          c["ratios"] = cr.ratios;
          const bool ok = std::all_of(cr.ratios.begin(), cr.ratios.end(),
                                      [](double q) { return q >= 1.5 && q <= 2.5; });
          r.check("first-order convergence " + tag, ok, cr.ratios);
        } catch (const Error& e) {
          c["error"] = e.what();
          r.check("first-order convergence " + tag, false, e.what());
        }
        convs.push_back(std::move(c));
      }
    }
  }
  r.results["form_integrals"] = forms;
  r.results["convergence"] = conv ? convs : Json(nullptr);

  if (sc.contains("pairing")) {
    const Json& pj = sc["pairing"];
    const std::string w = path + ".pairing";
    const MeshSpec ms = parse_mesh(required(pj, "mesh", w), w + ".mesh");
    const Mesh2D mesh = build_mesh(ms.nx, ms.ny, ms.lx, ms.ly);
    const BoundaryMarking marking = parse_dirichlet(required(pj, "dirichlet", w), mesh, w + ".dirichlet");
    const int vectors = static_cast<int>(integer_or(pj, "vectors", 3, 1, 1000, w));
    const FormMatrices fm = assemble(field, mesh, marking);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Json rows = Json::array();
    for (int v = 0; v < vectors; ++v) {
      CVector x(fm.free_nodes.size());
      for (auto& z : x) z = {u(rng), u(rng)};
      for (const auto& spec : specs) {
        Json j;
        j["status"] = "EXPLORATORY";
        j["vector"] = v;
        j["p"] = spec.p.p;
        const cplx val = discrete_lp_pairing(fm, x, spec.p.p);
        j["value"] = complex_to_json(val);
        j["arg"] = std::arg(val);
        rows.push_back(std::move(j));
      }
    }
    r.results["discrete_pairing"] = rows;
    r.note("discrete_pairing", "exploratory quantity, reported without an asserted bound");
  } else {
    r.results["discrete_pairing"] = nullptr;
  }
  return emit(r, s, out);
}

// ---------------------------------------------------------------------------
// selftest

int selftest(const std::vector<int>& only, const Settings& s, std::ostream& out) {
  acceptance::Options o;
  o.seed = s.seed;
  o.tol = s.tol;
  const int total = acceptance::criterion_count();
  for (std::size_t k = 0; k < only.size(); ++k)
    if (only[k] < 1 || only[k] > total) invalid(fmt("--only[%zu]", k), fmt("expected a criterion id in [1, %d]", total));
  o.only = only;

  const auto results = acceptance::run(o, [&](const acceptance::CriterionResult& c) {
    out << acceptance::format_line(c) << '\n';
    out.flush();
  });

  Report r;
  r.command = "selftest";
  r.scenario["only"] = only;
  Json rows = Json::array();
  std::size_t failed = 0;
  for (const auto& c : results) {
    Json j;
    j["id"] = c.id;
    j["name"] = c.name;
    j["check_passed"] = c.check_passed;
    j["within_time"] = c.within_time();
    j["time_limit"] = c.time_limit;
    j["detail"] = c.detail;
    rows.push_back(j);
    r.check(fmt("criterion %d", c.id), c.pass(), c.name);
    if (!c.pass()) ++failed;
  }
  r.results["criteria"] = rows;
  out << (failed == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED") << ": " << failed << " failed\n";

  if (!s.json_out.empty()) return emit(r, s, out);
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
      return kExitParse;
    case ErrorCode::ValidationError:
    case ErrorCode::GridMismatch:
    case ErrorCode::DomainError:
    case ErrorCode::OutOfRange:
    case ErrorCode::NotCoercive:
    case ErrorCode::NotPElliptic:
    case ErrorCode::NotAccretive:
    case ErrorCode::NotHermitian:
    case ErrorCode::NotSectorialValued:
    case ErrorCode::EmptySubspace:
      return kExitValidation;
    default:
      return kExitNumeric;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sector angles of complex elliptic coefficients and their verification checks", "sectorctl"};
  app.require_subcommand(1);
  app.fallthrough();

  Settings s;
  app.add_option("--tol-override", s.overrides, "Override a tolerance, name=value (repeatable)");
  app.add_option("--n-dirs", s.n_dirs, "Directions for sampled numerical ranges")->check(CLI::Range(8, 1000000));
  app.add_option("--seed", s.seed, "Seed for randomized samples");
  app.add_option("--csv-out", s.csv_out, "Write plot data (series,re,im)");
  app.add_option("--json-out", s.json_out, "Write the JSON report to a file instead of stdout");

  std::string file;
  std::vector<double> ps{2.0, 3.0, 4.0};
  std::vector<int> only;

  auto* am = app.add_subcommand("analyze-matrix", "Angles and estimates of a single matrix");
  am->add_option("file", file, "Matrix JSON file")->required();
  auto* af = app.add_subcommand("analyze-field", "Ellipticity constants and L^p angles of a coefficient field");
  af->add_option("file", file, "Field JSON file")->required();
  af->add_option("--p", ps, "Exponents, comma separated")->delimiter(',');
  auto* fe = app.add_subcommand("fem-check", "Sector inclusion of a Galerkin discretization");
  fe->add_option("scenario", file, "Scenario JSON file")->required();
  auto* cc = app.add_subcommand("calculus-check", "Resolvent, semigroup and functional calculus checks");
  cc->add_option("scenario", file, "Scenario JSON file")->required();
  auto* pf = app.add_subcommand("pform-check", "Sector test of the p-adapted form by quadrature");
  pf->add_option("scenario", file, "Scenario JSON file")->required();
  auto* st = app.add_subcommand("selftest", "Run the acceptance suite");
  st->add_option("--only", only, "Criterion ids, comma separated")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    s.apply();
    if (*am) return analyze_matrix(file, s, out);
    if (*af) return analyze_field(file, ps, s, out);
    if (*fe) return fem_check(file, s, out);
    if (*cc) return calculus_check(file, s, out);
    if (*pf) return pform_check(file, s, out);
    return selftest(only, s, out);
  } catch (const Error& e) {
    err << "sectorctl: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "sectorctl: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace sectorctl
