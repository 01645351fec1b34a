// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sectorial/errors.hpp"
#include "sectorial/numkernel.hpp"

namespace sectorial {
namespace {

constexpr double kEps = 2.220446049250313e-16;

void require_hermitian(const ComplexMatrix& h, const Tolerances& tol) {
  require_square_finite(h, "eig_hermitian");
  const double defect = hermitian_defect(h);
  if (defect > tol.hermitian_check)
    throw Error(ErrorCode::NotHermitian, "max |H - H*| = " + std::to_string(defect));
}

// Householder reduction of a Hermitian matrix to Hermitian tridiagonal form,
// A = Q T Q*. On return `a` holds T (diagonal and first sub/superdiagonal).
// Q is accumulated only when `q` is non-null.
void tridiagonalize(ComplexMatrix& a, ComplexMatrix* q) {
  const std::size_t n = a.rows();
  CVector v(n), p(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;  // length of x = a[k+1:, k]
    double xnorm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) xnorm2 += std::norm(a(k + 1 + i, k));
    const double xnorm = std::sqrt(xnorm2);
    const cplx x0 = a(k + 1, k);
    const double tail = xnorm2 - std::norm(x0);
    if (tail <= 0.0) continue;  // already tridiagonal in this column

    const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx{1.0};
    const cplx beta = -phase * xnorm;
    for (std::size_t i = 0; i < m; ++i) v[i] = a(k + 1 + i, k);
    v[0] -= beta;
    const double vnorm = norm2(std::span<const cplx>(v.data(), m));
    for (std::size_t i = 0; i < m; ++i) v[i] /= vnorm;

    // Trailing block B = a[k+1:, k+1:] <- H B H with H = I - 2 v v*.
    for (std::size_t i = 0; i < m; ++i) {
      cplx s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += a(k + 1 + i, k + 1 + j) * v[j];
      p[i] = 2.0 * s;
    }
    const double kk = dot(std::span<const cplx>(v.data(), m), std::span<const cplx>(p.data(), m)).real();
    for (std::size_t i = 0; i < m; ++i) p[i] -= kk * v[i];
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        a(k + 1 + i, k + 1 + j) -= v[i] * std::conj(p[j]) + p[i] * std::conj(v[j]);

    a(k + 1, k) = beta;
    a(k, k + 1) = std::conj(beta);
    for (std::size_t i = 1; i < m; ++i) {
      a(k + 1 + i, k) = 0.0;
      a(k, k + 1 + i) = 0.0;
    }

    if (q != nullptr) {
      // Q <- Q H on columns k+1..n-1.
      for (std::size_t r = 0; r < n; ++r) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += (*q)(r, k + 1 + j) * v[j];
        s *= 2.0;
        for (std::size_t j = 0; j < m; ++j) (*q)(r, k + 1 + j) -= s * std::conj(v[j]);
      }
    }
  }
}

// Implicit QL on a real symmetric tridiagonal matrix (EISPACK tql2 lineage).
// d: diagonal; e[i] couples i-1 and i (e[0] unused). Eigenvectors are
// accumulated into the row-major n x n array z when non-null. Sorted ascending.
void tql2(std::vector<double>& d, std::vector<double>& e, std::vector<double>* z, int max_iter) {
  const std::size_t n = d.size();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0, tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= kEps * tst1) break;
      ++m;
    }
    if (m == n) m = n - 1;
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > max_iter) throw Error(ErrorCode::NoConvergence, "tridiagonal QL iteration cap exceeded");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = c, c3 = c;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          if (z != nullptr) {
            auto& zz = *z;
            for (std::size_t k = 0; k < n; ++k) {
              h = zz[k * n + ii + 1];
              zz[k * n + ii + 1] = s * zz[k * n + ii] + c * h;
              zz[k * n + ii] = c * zz[k * n + ii] - s * h;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > kEps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }

  // Selection sort keeps the column swaps simple.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t k = i;
    double p = d[i];
    for (std::size_t j = i + 1; j < n; ++j)
      if (d[j] < p) {
        k = j;
        p = d[j];
      }
    if (k != i) {
      d[k] = d[i];
      d[i] = p;
      if (z != nullptr)
        for (std::size_t r = 0; r < n; ++r) std::swap((*z)[r * n + i], (*z)[r * n + k]);
    }
  }
}

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // off[i] couples i-1 and i, magnitude only
  CVector phase;            // T = S T_real S*, S = diag(phase)
};

Tridiagonal realify(const ComplexMatrix& t) {
  const std::size_t n = t.rows();
  Tridiagonal out{std::vector<double>(n), std::vector<double>(n, 0.0), CVector(n, 1.0)};
  for (std::size_t i = 0; i < n; ++i) out.diag[i] = t(i, i).real();
  for (std::size_t i = 1; i < n; ++i) {
    const cplx e = t(i, i - 1);
    const double mag = std::abs(e);
    out.off[i] = mag;
    out.phase[i] = mag > 0.0 ? out.phase[i - 1] * (e / mag) : out.phase[i - 1];
  }
  return out;
}

}  // namespace

HermitianEigen eig_hermitian(const ComplexMatrix& h, const Tolerances& tol) {
  require_hermitian(h, tol);
  const std::size_t n = h.rows();
  ComplexMatrix a = h;
  ComplexMatrix q = ComplexMatrix::identity(n);
  tridiagonalize(a, &q);
  Tridiagonal t = realify(a);

  std::vector<double> z(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
  tql2(t.diag, t.off, &z, tol.ql_max_iterations);

  // V = Q S Z
  HermitianEigen out{std::move(t.diag), ComplexMatrix(n)};
  for (std::size_t r = 0; r < n; ++r) {
    auto vr = out.vectors.row(r);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx qs = q(r, k) * t.phase[k];
      if (qs == cplx{}) continue;
      for (std::size_t j = 0; j < n; ++j) vr[j] += qs * z[k * n + j];
    }
  }
  return out;
}

std::vector<double> eigvals_hermitian(const ComplexMatrix& h, const Tolerances& tol) {
  require_hermitian(h, tol);
  ComplexMatrix a = h;
  tridiagonalize(a, nullptr);
  Tridiagonal t = realify(a);
  tql2(t.diag, t.off, nullptr, tol.ql_max_iterations);
  return t.diag;
}

HermitianEigen eig_hermitian_jacobi(const ComplexMatrix& h, const Tolerances& tol) {
  require_hermitian(h, tol);
  const std::size_t n = h.rows();
  ComplexMatrix a = h;
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = std::max(frobenius_norm(a), 1e-300);

  for (int sweep = 0;; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= kEps * scale) break;
    if (sweep >= tol.jacobi_max_sweeps) throw Error(ErrorCode::NoConvergence, "Jacobi sweep cap exceeded");

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx b = a(p, q);
        const double g = std::abs(b);
        if (g <= 1e-300) continue;
        const cplx ph = b / g;  // e^{i phi}
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * g);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cplx ph_c = std::conj(ph);
        // A <- A G with G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q).
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * ph_c * akq;
          a(k, q) = s * akp + c * ph_c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * ph * aqk;
          a(q, k) = s * apk + c * ph * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * ph_c * vkq;
          v(k, q) = s * vkp + c * ph_c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  HermitianEigen out{std::vector<double>(n), ComplexMatrix(n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

TopEigen top_eigenpair(const ComplexMatrix& h, const Tolerances& tol) {
  HermitianEigen e = eig_hermitian(h, tol);
  const std::size_t last = e.values.size() - 1;
  return {e.values[last], e.vectors.col(last)};
}

}  // namespace sectorial
