// SPDX-License-Identifier: Apache-2.0

// P1 finite elements on a rectangle: mesh, Dirichlet marking, the Galerkin
// pencil (K, M) of the form (mu grad u, grad v), and its numerical range angle.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sectorial/coefficient_field.hpp"

namespace sectorial {

/// Structured triangulation of [0, lx] x [0, ly]. Vertex (i, j) has index
/// j (nx + 1) + i; every grid cell is split along its lower-left to
/// upper-right diagonal into two triangles.
struct Mesh2D {
  std::size_t nx = 0, ny = 0;
  double lx = 1.0, ly = 1.0;
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<std::size_t, 3>> triangles;  // counter-clockwise
  std::vector<std::size_t> cell_of_triangle;          // row-major mesh cell

  std::size_t vertex(std::size_t i, std::size_t j) const { return j * (nx + 1) + i; }
  std::size_t boundary_edge_count() const { return 2 * (nx + ny); }
  /// Endpoints of boundary edge k; edges are numbered bottom (left to right),
  /// top (left to right), left (bottom to top), right (bottom to top).
  std::array<std::size_t, 2> boundary_edge(std::size_t k) const;
  double triangle_area(std::size_t t) const;
};

Mesh2D build_mesh(std::size_t nx, std::size_t ny, double lx = 1.0, double ly = 1.0);

struct BoundaryMarking {
  std::vector<bool> dirichlet_edges;  // indexed as Mesh2D::boundary_edge

  static BoundaryMarking none(const Mesh2D& mesh);
  static BoundaryMarking full(const Mesh2D& mesh);
  /// Any subset of "left", "right", "top", "bottom".
  static BoundaryMarking sides(const Mesh2D& mesh, const std::vector<std::string>& names);
  static BoundaryMarking edges(const Mesh2D& mesh, const std::vector<std::size_t>& indices);

  /// Vertices not on any Dirichlet edge, ascending.
  std::vector<std::size_t> free_nodes(const Mesh2D& mesh) const;
};

struct FormMatrices {
  ComplexMatrix k;                   // K_ij = t(phi_j, phi_i) over free nodes
  ComplexMatrix m;                   // consistent P1 mass matrix
  std::vector<double> lumped_mass;   // row sums of m
  std::vector<std::size_t> free_nodes;
};

/// Mesh cell (i, j) maps to field cell (i fx / nx, j fy / ny); the mesh must
/// refine the field grid. A single-cell field fits any mesh.
std::size_t field_cell_of_mesh_cell(const CoefficientField& field, const Mesh2D& mesh, std::size_t cell);

/// Throws GridMismatch if the field does not fit the mesh or d != 2, and
/// EmptySubspace if every node is constrained.
FormMatrices assemble(const CoefficientField& field, const Mesh2D& mesh, const BoundaryMarking& marking,
                      Exec exec = Exec::Parallel);

/// Reduces the pencil to L = C^{-1} K C^{-*} with M = C C*.
ComplexMatrix reduced_operator(const FormMatrices& fm);

/// Optimal angle of the Rayleigh quotients u*Ku / u*Mu.
SectorAngle generalized_range_angle(const FormMatrices& fm, const Tolerances& tol = default_tolerances());

struct InclusionReport {
  double angle = 0.0;
  double theta = 0.0;
  double max_excess_angle = 0.0;
  bool pass = true;
  std::optional<CVector> witness;  // coefficient vector on the free nodes
  std::optional<cplx> witness_value;  // its Rayleigh quotient
};

/// Checks generalized_range_angle <= theta + slack (default 1e-8).
InclusionReport sector_inclusion_check(const FormMatrices& fm, const SectorAngle& theta, double slack = 1e-8,
                                       const Tolerances& tol = default_tolerances());

}  // namespace sectorial
