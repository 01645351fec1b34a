// SPDX-License-Identifier: Apache-2.0

// Serial reference vs OpenMP kernels: best-of-N wall time and the largest
// difference between the two results.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "sectorial/discretize.hpp"
#include "sectorial/pform.hpp"
#include "sectorial/sectorial_calculus.hpp"
#include "support/random.hpp"

using namespace sectorial;

namespace {

template <class F>
double best_seconds(int repeat, F&& f) {
  double best = 1e300;
  for (int k = 0; k < repeat; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

struct Kernel {
  std::string name;
  std::string size;
  // Runs the kernel under exec and returns a fingerprint of its result.
  std::function<std::vector<cplx>(Exec)> run;
};

double max_gap(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double gap = a.size() == b.size() ? 0.0 : HUGE_VAL;
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) gap = std::max(gap, std::abs(a[k] - b[k]));
  return gap;
}

std::vector<cplx> flatten(const ComplexMatrix& m) { return {m.data().begin(), m.data().end()}; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel kernel timings", "bench_kernels"};
  int repeat = 3;
  std::uint64_t seed = 7;
  app.add_option("--repeat", repeat, "Timed runs per variant (best is reported)")->check(CLI::Range(1, 1000));
  app.add_option("--seed", seed, "Seed for the random inputs");
  CLI11_PARSE(app, argc, argv);

  testing::MatrixSampler rs(seed);
  const ComplexMatrix dense = rs.coercive(64);
  const ComplexMatrix left = rs.gaussian_matrix(256), right = rs.gaussian_matrix(256);

  std::vector<ComplexMatrix> mus;
  for (int k = 0; k < 16 * 16; ++k) mus.push_back(rs.coefficient(2, 0.2));
  const CoefficientField field = make_field({16, 16}, mus);
  const Mesh2D mesh = build_mesh(32, 32);
  const BoundaryMarking marking = BoundaryMarking::sides(mesh, {"left", "bottom"});

  const GridFunction u = GridFunction::sample(random_band_limited(seed), 512);
  const CutoffSpec spec = CutoffSpec::make(2.0, 3.0);

  const SectorialMatrix sm = certify(rs.coercive(16, 0.5));
  const CalcFunction rat1 = named_function("rat1");
  const double nu = sm.theta.theta + std::min(0.5 * (rat1.max_angle - sm.theta.theta), 1.0);

  const std::vector<Kernel> kernels = {
      {"range_boundary", "n=64, 720 dirs",
       [&](Exec e) { return range_boundary(dense, 720, e).boundary_points; }},
      {"multiply", "n=256", [&](Exec e) { return flatten(multiply(left, right, e)); }},
      {"assemble", "32x32 mesh, 16x16 field", [&](Exec e) { return flatten(assemble(field, mesh, marking, e).k); }},
      {"form_integral", "512x512 cells, p=3",
       [&](Exec e) { return std::vector<cplx>{form_integral(field, u, spec, e).value}; }},
      {"dunford_riesz", "n=16, rat1", [&](Exec e) { return flatten(dunford_riesz(rat1, sm, nu, e)); }},
  };

  std::printf("threads: %d, repeat: %d\n", max_threads(), repeat);
  std::printf("%-16s %-26s %12s %12s %8s %12s\n", "kernel", "size", "serial ms", "parallel ms", "speedup",
              "max |diff|");
  for (const auto& k : kernels) {
    std::vector<cplx> serial, parallel;
    const double ts = best_seconds(repeat, [&] { serial = k.run(Exec::Serial); });
    const double tp = best_seconds(repeat, [&] { parallel = k.run(Exec::Parallel); });
    std::printf("%-16s %-26s %12.3f %12.3f %8.2f %12.3e\n", k.name.c_str(), k.size.c_str(), 1e3 * ts, 1e3 * tp,
                ts / tp, max_gap(serial, parallel));
  }
  return 0;
}
