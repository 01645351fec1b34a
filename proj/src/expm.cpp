// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cmath>
#include <string>

#include "sectorial/errors.hpp"
#include "sectorial/numkernel.hpp"

namespace sectorial {
namespace {

// Degree-13 Pade coefficients and the 1-norm threshold below which no
// scaling is needed (Higham 2005).
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

ComplexMatrix combine(std::size_t n, double c6, const ComplexMatrix& a6, double c4, const ComplexMatrix& a4,
                      double c2, const ComplexMatrix& a2, double c0) {
  ComplexMatrix out(n);
  for (std::size_t k = 0; k < n * n; ++k)
    out.data()[k] = c6 * a6.data()[k] + c4 * a4.data()[k] + c2 * a2.data()[k];
  for (std::size_t i = 0; i < n; ++i) out(i, i) += c0;
  return out;
}

}  // namespace

ComplexMatrix expm(const ComplexMatrix& a, const Tolerances& tol) {
  require_square_finite(a, "expm");
  const std::size_t n = a.rows();
  const double norm = norm_one(a);
  if (norm > tol.expm_norm_cap)
    throw Error(ErrorCode::Overflow, "expm: ||A||_1 = " + std::to_string(norm) + " exceeds cap");
  if (norm == 0.0) return ComplexMatrix::identity(n);

  int s = 0;
  if (norm > kTheta13) s = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
  ComplexMatrix x = std::ldexp(1.0, -s) * a;

  const auto& b = kPade13;
  const ComplexMatrix x2 = x * x;
  const ComplexMatrix x4 = x2 * x2;
  const ComplexMatrix x6 = x4 * x2;
  const ComplexMatrix zero(n);

  ComplexMatrix u_inner = x6 * combine(n, b[13], x6, b[11], x4, b[9], x2, 0.0);
  u_inner += combine(n, b[7], x6, b[5], x4, b[3], x2, b[1]);
  const ComplexMatrix u = x * u_inner;
  ComplexMatrix v = x6 * combine(n, b[12], x6, b[10], x4, b[8], x2, 0.0);
  v += combine(n, b[6], x6, b[4], x4, b[2], x2, b[0]);

  ComplexMatrix r = solve(v - u, v + u, tol);
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

}  // namespace sectorial
