// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "sectorial/errors.hpp"
#include "sectorial/numkernel.hpp"

namespace sectorial {

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::DomainError, "ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> d) {
  ComplexMatrix out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out(i, i) = d[i];
  return out;
}

ComplexMatrix ComplexMatrix::column(std::span<const cplx> v) {
  ComplexMatrix out(v.size(), 1);
  std::copy(v.begin(), v.end(), out.data_.begin());
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

CVector ComplexMatrix::col(std::size_t j) const {
  CVector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

CVector ComplexMatrix::diag() const {
  CVector out(std::min(rows_, cols_));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)(i, i);
  return out;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw Error(ErrorCode::DomainError, "matrix sum: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw Error(ErrorCode::DomainError, "matrix difference: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) { return multiply(a, b); }

CVector operator*(const ComplexMatrix& a, std::span<const cplx> x) {
  if (a.cols() != x.size()) throw Error(ErrorCode::DomainError, "matrix-vector: shape mismatch");
  CVector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx s = 0.0;
    const auto r = a.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b, Exec exec) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::DomainError, "matrix product: shape mismatch");
  const std::size_t n = a.rows(), m = b.cols(), inner = a.cols();
  ComplexMatrix c(n, m);
  // i-k-j ordering; each c(i, j) accumulates over k in increasing order in
  // both variants.
  auto row_kernel = [&](std::size_t i) {
    auto ci = c.row(i);
    const auto ai = a.row(i);
    for (std::size_t k = 0; k < inner; ++k) {
      const cplx aik = ai[k];
      if (aik == cplx{}) continue;
      const auto bk = b.row(k);
      for (std::size_t j = 0; j < m; ++j) ci[j] += aik * bk[j];
    }
  };
  if (exec == Exec::Parallel) {
    const auto rows = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < rows; ++i) row_kernel(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) row_kernel(i);
  }
  return c;
}

cplx dot(std::span<const cplx> x, std::span<const cplx> y) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

double norm2(std::span<const cplx> x) {
  double s = 0.0;
  for (const auto& z : x) s += std::norm(z);
  return std::sqrt(s);
}

cplx quadratic_form(const ComplexMatrix& a, std::span<const cplx> x, std::span<const cplx> y) {
  const CVector ay = a * y;
  return dot(x, ay);
}

ComplexMatrix gram(const ComplexMatrix& a) {
  const std::size_t n = a.cols();
  ComplexMatrix g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      cplx s = 0.0;
      for (std::size_t k = 0; k < a.rows(); ++k) s += std::conj(a(k, i)) * a(k, j);
      g(i, j) = s;
      g(j, i) = std::conj(s);
    }
    g(i, i) = g(i, i).real();
  }
  return g;
}

double max_abs(const ComplexMatrix& a) {
  double m = 0.0;
  for (const auto& z : a.data()) m = std::max(m, std::abs(z));
  return m;
}

double frobenius_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (const auto& z : a.data()) s += std::norm(z);
  return std::sqrt(s);
}

double norm_one(const ComplexMatrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

double hermitian_defect(const ComplexMatrix& a) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - std::conj(a(j, i))));
  return d;
}

void require_square_finite(const ComplexMatrix& a, const char* what) {
  if (a.empty() || !a.square())
    throw Error(ErrorCode::DomainError, std::string(what) + ": expected a non-empty square matrix");
  if (!a.all_finite()) throw Error(ErrorCode::DomainError, std::string(what) + ": non-finite entry");
}

}  // namespace sectorial
