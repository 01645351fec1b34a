// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <string>

#include "sectorial/errors.hpp"
#include "sectorial/numkernel.hpp"

namespace sectorial {
namespace {

constexpr double kEps = 2.220446049250313e-16;

// Householder reduction to upper Hessenberg form (similarity, eigenvalues only).
void hessenberg(ComplexMatrix& a) {
  const std::size_t n = a.rows();
  CVector v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    double xnorm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) xnorm2 += std::norm(a(k + 1 + i, k));
    const cplx x0 = a(k + 1, k);
    if (xnorm2 - std::norm(x0) <= 0.0) continue;
    const double xnorm = std::sqrt(xnorm2);
    const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx{1.0};
    const cplx beta = -phase * xnorm;
    for (std::size_t i = 0; i < m; ++i) v[i] = a(k + 1 + i, k);
    v[0] -= beta;
    const double vnorm = norm2(std::span<const cplx>(v.data(), m));
    for (std::size_t i = 0; i < m; ++i) v[i] /= vnorm;

    // A <- H A (rows k+1..), then A <- A H (columns k+1..).
    for (std::size_t j = k; j < n; ++j) {
      cplx s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += std::conj(v[i]) * a(k + 1 + i, j);
      s *= 2.0;
      for (std::size_t i = 0; i < m; ++i) a(k + 1 + i, j) -= s * v[i];
    }
    for (std::size_t r = 0; r < n; ++r) {
      cplx s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += a(r, k + 1 + j) * v[j];
      s *= 2.0;
      for (std::size_t j = 0; j < m; ++j) a(r, k + 1 + j) -= s * std::conj(v[j]);
    }
    a(k + 1, k) = beta;
    for (std::size_t i = 1; i < m; ++i) a(k + 1 + i, k) = 0.0;
  }
}

cplx wilkinson_shift(cplx a, cplx b, cplx c, cplx d) {
  const cplx half_tr = 0.5 * (a + d);
  const cplx det = a * d - b * c;
  const cplx disc = std::sqrt(half_tr * half_tr - det);
  const cplx l1 = half_tr + disc, l2 = half_tr - disc;
  return std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
}

// One explicitly shifted QR step on the active block [lo, hi] of a Hessenberg
// matrix, using Givens rotations.
void qr_step(ComplexMatrix& h, std::size_t lo, std::size_t hi, cplx mu) {
  const std::size_t len = hi - lo;
  std::vector<double> cs(len);
  CVector sn(len);
  for (std::size_t k = lo; k <= hi; ++k) h(k, k) -= mu;
  for (std::size_t k = lo; k < hi; ++k) {
    const cplx a = h(k, k), b = h(k + 1, k);
    const double r = std::hypot(std::abs(a), std::abs(b));
    double c;
    cplx s;
    if (r == 0.0) {
      c = 1.0;
      s = 0.0;
    } else if (std::abs(a) == 0.0) {
      c = 0.0;
      s = std::conj(b) / std::abs(b);
    } else {
      c = std::abs(a) / r;
      s = (a / std::abs(a)) * std::conj(b) / r;
    }
    cs[k - lo] = c;
    sn[k - lo] = s;
    for (std::size_t j = k; j <= hi; ++j) {
      const cplx x = h(k, j), y = h(k + 1, j);
      h(k, j) = c * x + s * y;
      h(k + 1, j) = -std::conj(s) * x + c * y;
    }
  }
  for (std::size_t k = lo; k < hi; ++k) {
    const double c = cs[k - lo];
    const cplx s = sn[k - lo];
    const std::size_t rmax = std::min(k + 2, hi);
    for (std::size_t r = lo; r <= rmax; ++r) {
      const cplx x = h(r, k), y = h(r, k + 1);
      h(r, k) = c * x + std::conj(s) * y;
      h(r, k + 1) = -s * x + c * y;
    }
  }
  for (std::size_t k = lo; k <= hi; ++k) h(k, k) += mu;
}

}  // namespace

// Eigenvalues of the dilation [[0, A], [A*, 0]] are the +/- singular values
// of A, resolved to eps ||A|| (the Gram matrix would only give sqrt(eps)).
double smallest_singular_value(const ComplexMatrix& a) {
  const std::size_t n = a.rows();
  ComplexMatrix dil(2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      dil(i, n + j) = a(i, j);
      dil(n + j, i) = std::conj(a(i, j));
    }
  const auto values = eigvals_hermitian(dil);
  double best = std::abs(values.front());
  for (double v : values) best = std::min(best, std::abs(v));
  return best;
}

std::vector<cplx> eig_general(const ComplexMatrix& a, const Tolerances& tol) {
  require_square_finite(a, "eig_general");
  const std::size_t n = a.rows();
  ComplexMatrix h = a;
  hessenberg(h);

  std::vector<cplx> values(n);
  std::size_t hi = n - 1;
  int iter = 0;
  int total = 0;
  while (true) {
    if (hi == 0) {
      values[0] = h(0, 0);
      break;
    }
    // Find the start of the unreduced block ending at hi.
    std::size_t lo = hi;
    while (lo > 0) {
      const double scale = std::abs(h(lo, lo)) + std::abs(h(lo - 1, lo - 1));
      if (std::abs(h(lo, lo - 1)) <= kEps * (scale > 0.0 ? scale : 1.0)) {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      values[hi] = h(hi, hi);
      --hi;
      iter = 0;
      continue;
    }
    if (++iter > tol.qr_max_iterations) throw Error(ErrorCode::NoConvergence, "QR iteration cap exceeded");
    ++total;
    cplx mu;
    if (iter % 11 == 0) {
      // Exceptional shift breaks cycles.
      mu = h(hi, hi) + std::abs(h(hi, hi - 1)) * cplx{0.75, 0.4375};
    } else {
      mu = wilkinson_shift(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
    }
    qr_step(h, lo, hi, mu);
  }

  const double anorm = std::max(spectral_norm(a), 1e-300);
  for (const cplx& lambda : values) {
    ComplexMatrix shifted = a;
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= lambda;
    const double smin = smallest_singular_value(shifted);
    if (smin > tol.eig_general_residual * anorm)
      throw Error(ErrorCode::NoConvergence, "eigenvalue failed verification, sigma_min = " + std::to_string(smin));
  }
  std::sort(values.begin(), values.end(), [](cplx x, cplx y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return values;
}

}  // namespace sectorial
