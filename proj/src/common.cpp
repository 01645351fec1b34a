// SPDX-License-Identifier: Apache-2.0

#include <cstddef>
#include <string>
#include <type_traits>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sectorial/errors.hpp"
#include "sectorial/exec.hpp"
#include "sectorial/tolerances.hpp"

namespace sectorial {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NotSectorialValued: return "NotSectorialValued";
    case ErrorCode::NotCoercive: return "NotCoercive";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotPElliptic: return "NotPElliptic";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::EmptySubspace: return "EmptySubspace";
    case ErrorCode::NotAccretive: return "NotAccretive";
    case ErrorCode::InsideSector: return "InsideSector";
    case ErrorCode::ContourTooTight: return "ContourTooTight";
    case ErrorCode::TruncationError: return "TruncationError";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

// Keeps name lookup and the struct in one table.
template <class Fn>
void for_each_field(Tolerances& t, Fn&& fn) {
  fn("hermitian_check", t.hermitian_check);
  fn("unitary_check", t.unitary_check);
  fn("jacobi_max_sweeps", t.jacobi_max_sweeps);
  fn("ql_max_iterations", t.ql_max_iterations);
  fn("qr_max_iterations", t.qr_max_iterations);
  fn("eig_general_residual", t.eig_general_residual);
  fn("singular_pivot", t.singular_pivot);
  fn("expm_norm_cap", t.expm_norm_cap);
  fn("n_dirs", t.n_dirs);
  fn("angle_refine", t.angle_refine);
  fn("sector_slack", t.sector_slack);
  fn("eigenvalue_match", t.eigenvalue_match);
  fn("contour_margin", t.contour_margin);
  fn("truncation", t.truncation);
  fn("quad_nodes", t.quad_nodes);
  fn("crouzeix_slack", t.crouzeix_slack);
  fn("sup_samples", t.sup_samples);
  fn("quad_tol_factor", t.quad_tol_factor);
  fn("cross_check_factor", t.cross_check_factor);
}

}  // namespace

void Tolerances::set(std::string_view name, double value) {
  bool found = false;
  for_each_field(*this, [&](std::string_view key, auto& field) {
    if (key == name) {
      field = static_cast<std::remove_reference_t<decltype(field)>>(value);
      found = true;
    }
  });
  if (!found) throw Error(ErrorCode::ValidationError, "unknown tolerance '" + std::string(name) + "'");
}

double Tolerances::get(std::string_view name) const {
  Tolerances copy = *this;
  double out = 0.0;
  bool found = false;
  for_each_field(copy, [&](std::string_view key, auto& field) {
    if (key == name) {
      out = static_cast<double>(field);
      found = true;
    }
  });
  if (!found) throw Error(ErrorCode::ValidationError, "unknown tolerance '" + std::string(name) + "'");
  return out;
}

std::vector<std::string> Tolerances::names() {
  Tolerances t;
  std::vector<std::string> out;
  for_each_field(t, [&](std::string_view key, auto&) { out.emplace_back(key); });
  return out;
}

const Tolerances& default_tolerances() {
  static const Tolerances kDefaults{};
  return kDefaults;
}

}  // namespace sectorial
