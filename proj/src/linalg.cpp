// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sectorial/errors.hpp"
#include "sectorial/numkernel.hpp"

namespace sectorial {

LUFactorization::LUFactorization(const ComplexMatrix& a, const Tolerances& tol) : lu_(a), perm_(a.rows()) {
  require_square_finite(a, "solve");
  const std::size_t n = a.rows();
  std::iota(perm_.begin(), perm_.end(), 0);
  const double threshold = tol.singular_pivot * std::max(max_abs(a), 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(lu_(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best <= threshold)
      throw Error(ErrorCode::Singular, "pivot " + std::to_string(best) + " below threshold at column " +
                                           std::to_string(k));
    if (piv != k) {
      std::swap(perm_[k], perm_[piv]);
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
    }
    const cplx inv = 1.0 / lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx f = lu_(i, k) * inv;
      lu_(i, k) = f;
      if (f == cplx{}) continue;
      auto ri = lu_.row(i);
      const auto rk = lu_.row(k);
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= f * rk[j];
    }
  }
}

ComplexMatrix LUFactorization::solve(const ComplexMatrix& rhs) const {
  const std::size_t n = lu_.rows();
  if (rhs.rows() != n) throw Error(ErrorCode::DomainError, "solve: right-hand side does not conform");
  const std::size_t m = rhs.cols();
  ComplexMatrix x(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) x(i, j) = rhs(perm_[i], j);
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    for (std::size_t k = 0; k < i; ++k) {
      const cplx l = lu_(i, k);
      if (l == cplx{}) continue;
      const auto xk = x.row(k);
      for (std::size_t j = 0; j < m; ++j) xi[j] -= l * xk[j];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    auto xi = x.row(i);
    for (std::size_t k = i + 1; k < n; ++k) {
      const cplx u = lu_(i, k);
      if (u == cplx{}) continue;
      const auto xk = x.row(k);
      for (std::size_t j = 0; j < m; ++j) xi[j] -= u * xk[j];
    }
    const cplx inv = 1.0 / lu_(i, i);
    for (std::size_t j = 0; j < m; ++j) xi[j] *= inv;
  }
  return x;
}

CVector LUFactorization::solve(std::span<const cplx> rhs) const {
  const ComplexMatrix x = solve(ComplexMatrix::column(rhs));
  return x.col(0);
}

ComplexMatrix LUFactorization::inverse() const { return solve(ComplexMatrix::identity(lu_.rows())); }

ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& rhs, const Tolerances& tol) {
  return LUFactorization(a, tol).solve(rhs);
}

CVector solve(const ComplexMatrix& a, std::span<const cplx> rhs, const Tolerances& tol) {
  return LUFactorization(a, tol).solve(rhs);
}

ComplexMatrix inverse(const ComplexMatrix& a, const Tolerances& tol) { return LUFactorization(a, tol).inverse(); }

ComplexMatrix cholesky(const ComplexMatrix& a) {
  require_square_finite(a, "cholesky");
  const std::size_t n = a.rows();
  ComplexMatrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "cholesky: non-positive pivot at " + std::to_string(j));
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      cplx s = a(i, j);
      const auto li = l.row(i);
      const auto lj = l.row(j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * std::conj(lj[k]);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

ComplexMatrix solve_lower(const ComplexMatrix& l, const ComplexMatrix& b) {
  const std::size_t n = l.rows(), m = b.cols();
  ComplexMatrix x = b;
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    for (std::size_t k = 0; k < i; ++k) {
      const cplx lik = l(i, k);
      if (lik == cplx{}) continue;
      const auto xk = x.row(k);
      for (std::size_t j = 0; j < m; ++j) xi[j] -= lik * xk[j];
    }
    const cplx inv = 1.0 / l(i, i);
    for (std::size_t j = 0; j < m; ++j) xi[j] *= inv;
  }
  return x;
}

ComplexMatrix solve_lower_adjoint(const ComplexMatrix& l, const ComplexMatrix& b) {
  const std::size_t n = l.rows(), m = b.cols();
  ComplexMatrix x = b;
  for (std::size_t i = n; i-- > 0;) {
    auto xi = x.row(i);
    for (std::size_t k = i + 1; k < n; ++k) {
      const cplx u = std::conj(l(k, i));
      if (u == cplx{}) continue;
      const auto xk = x.row(k);
      for (std::size_t j = 0; j < m; ++j) xi[j] -= u * xk[j];
    }
    const cplx inv = 1.0 / std::conj(l(i, i));
    for (std::size_t j = 0; j < m; ++j) xi[j] *= inv;
  }
  return x;
}

double spectral_norm(const ComplexMatrix& a) {
  if (a.empty()) return 0.0;
  const ComplexMatrix g = a.rows() >= a.cols() ? gram(a) : gram(a.adjoint());
  const auto values = eigvals_hermitian(g);
  return std::sqrt(std::max(values.back(), 0.0));
}

}  // namespace sectorial
