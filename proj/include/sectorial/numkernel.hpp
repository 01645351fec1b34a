// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "sectorial/exec.hpp"
#include "sectorial/tolerances.hpp"

namespace sectorial {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

inline constexpr cplx kI{0.0, 1.0};

/// Dense complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  explicit ComplexMatrix(std::size_t n) : ComplexMatrix(n, n) {}
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const cplx> d);
  static ComplexMatrix column(std::span<const cplx> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<cplx> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const cplx> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  CVector col(std::size_t j) const;
  CVector diag() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(cplx s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
CVector operator*(const ComplexMatrix& a, std::span<const cplx> x);

/// C = A B. The parallel variant distributes rows; both variants accumulate
/// each entry in the same order.
ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b, Exec exec = Exec::Serial);

/// x* A y with the inner product conjugating the left vector.
cplx quadratic_form(const ComplexMatrix& a, std::span<const cplx> x, std::span<const cplx> y);
cplx dot(std::span<const cplx> x, std::span<const cplx> y);  // sum conj(x_i) y_i
double norm2(std::span<const cplx> x);

/// A* A, with the lower triangle mirrored so the result is exactly Hermitian.
ComplexMatrix gram(const ComplexMatrix& a);

double max_abs(const ComplexMatrix& a);
double frobenius_norm(const ComplexMatrix& a);
double norm_one(const ComplexMatrix& a);
double hermitian_defect(const ComplexMatrix& a);  // max |a_ij - conj(a_ji)|

/// Throws DomainError unless `a` is square, non-empty, and finite.
void require_square_finite(const ComplexMatrix& a, const char* what);

// ---------------------------------------------------------------------------
// Eigenvalue problems

struct HermitianEigen {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // columns, unitary
};

/// Hermitian eigendecomposition: Householder reduction to a real tridiagonal
/// matrix followed by implicit QL.
HermitianEigen eig_hermitian(const ComplexMatrix& h, const Tolerances& tol = default_tolerances());

/// Eigenvalues only (ascending); skips accumulation of the transformation.
std::vector<double> eigvals_hermitian(const ComplexMatrix& h,
                                      const Tolerances& tol = default_tolerances());

/// Cyclic Jacobi rotations. Slow but simple; kept as the reference solver.
HermitianEigen eig_hermitian_jacobi(const ComplexMatrix& h,
                                    const Tolerances& tol = default_tolerances());

/// Largest eigenvalue and its unit eigenvector.
struct TopEigen {
  double value;
  CVector vector;
};
TopEigen top_eigenpair(const ComplexMatrix& h, const Tolerances& tol = default_tolerances());

/// Eigenvalues of a general square matrix (Hessenberg reduction + shifted QR).
/// Each value is verified by the smallest singular value of A - lambda I.
std::vector<cplx> eig_general(const ComplexMatrix& a, const Tolerances& tol = default_tolerances());

double smallest_singular_value(const ComplexMatrix& a);

// ---------------------------------------------------------------------------
// Linear algebra

/// LU factorization with partial pivoting.
class LUFactorization {
 public:
  explicit LUFactorization(const ComplexMatrix& a, const Tolerances& tol = default_tolerances());

  ComplexMatrix solve(const ComplexMatrix& rhs) const;
  CVector solve(std::span<const cplx> rhs) const;
  ComplexMatrix inverse() const;
  std::size_t size() const noexcept { return lu_.rows(); }

 private:
  ComplexMatrix lu_;
  std::vector<std::size_t> perm_;
};

ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& rhs,
                    const Tolerances& tol = default_tolerances());
CVector solve(const ComplexMatrix& a, std::span<const cplx> rhs,
              const Tolerances& tol = default_tolerances());
ComplexMatrix inverse(const ComplexMatrix& a, const Tolerances& tol = default_tolerances());

/// Lower-triangular L with A = L L*. Throws NotPositiveDefinite.
ComplexMatrix cholesky(const ComplexMatrix& a);
/// Solves L X = B for lower-triangular L.
ComplexMatrix solve_lower(const ComplexMatrix& l, const ComplexMatrix& b);
/// Solves L* X = B for lower-triangular L.
ComplexMatrix solve_lower_adjoint(const ComplexMatrix& l, const ComplexMatrix& b);

double spectral_norm(const ComplexMatrix& a);

/// Matrix exponential by scaling and squaring with a degree-13 Pade core.
ComplexMatrix expm(const ComplexMatrix& a, const Tolerances& tol = default_tolerances());

}  // namespace sectorial
