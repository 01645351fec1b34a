// SPDX-License-Identifier: Apache-2.0

#include "sectorial/discretize.hpp"

#include <algorithm>
#include <cmath>

#include "sectorial/errors.hpp"

namespace sectorial {
namespace {

struct Element {
  std::array<std::size_t, 3> nodes;
  std::array<std::array<double, 2>, 3> grad;
  double area;
  std::size_t field_cell;
};

Element make_element(const CoefficientField& field, const Mesh2D& mesh, std::size_t t) {
  Element e;
  e.nodes = mesh.triangles[t];
  const auto& p0 = mesh.vertices[e.nodes[0]];
  const auto& p1 = mesh.vertices[e.nodes[1]];
  const auto& p2 = mesh.vertices[e.nodes[2]];
  const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
  e.area = 0.5 * det;
  const std::array<const std::array<double, 2>*, 3> p{&p0, &p1, &p2};
  for (int a = 0; a < 3; ++a) {
    const auto& pb = *p[(a + 1) % 3];
    const auto& pc = *p[(a + 2) % 3];
    e.grad[a] = {(pb[1] - pc[1]) / det, (pc[0] - pb[0]) / det};
  }
  e.field_cell = field_cell_of_mesh_cell(field, mesh, mesh.cell_of_triangle[t]);
  return e;
}

// area * grad_a^T mu grad_b
cplx stiffness_entry(const Element& e, const ComplexMatrix& mu, int a, int b) {
  const auto& ga = e.grad[a];
  const auto& gb = e.grad[b];
  cplx s = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) s += ga[r] * mu(r, c) * gb[c];
  return e.area * s;
}

double mass_entry(const Element& e, int a, int b) { return e.area / 12.0 * (a == b ? 2.0 : 1.0); }

void require_fit(const CoefficientField& field, const Mesh2D& mesh) {
  if (field.d() != 2) throw Error(ErrorCode::GridMismatch, "finite elements need a 2-dimensional field");
  std::size_t count = 1;
  for (std::size_t n : field.grid_dims) count *= n;
  if (count == 1) return;
  if (field.grid_dims.size() != 2)
    throw Error(ErrorCode::GridMismatch, "field grid must be two-dimensional for finite elements");
  const std::size_t fx = field.grid_dims[0], fy = field.grid_dims[1];
  if (mesh.nx % fx != 0 || mesh.ny % fy != 0)
    throw Error(ErrorCode::GridMismatch, "mesh " + std::to_string(mesh.nx) + "x" + std::to_string(mesh.ny) +
                                             " does not refine field grid " + std::to_string(fx) + "x" +
                                             std::to_string(fy));
}

}  // namespace

std::array<std::size_t, 2> Mesh2D::boundary_edge(std::size_t k) const {
  if (k < nx) return {vertex(k, 0), vertex(k + 1, 0)};
  k -= nx;
  if (k < nx) return {vertex(k, ny), vertex(k + 1, ny)};
  k -= nx;
  if (k < ny) return {vertex(0, k), vertex(0, k + 1)};
  k -= ny;
  if (k < ny) return {vertex(nx, k), vertex(nx, k + 1)};
  throw Error(ErrorCode::OutOfRange, "boundary edge index out of range");
}

double Mesh2D::triangle_area(std::size_t t) const {
  const auto& a = vertices[triangles[t][0]];
  const auto& b = vertices[triangles[t][1]];
  const auto& c = vertices[triangles[t][2]];
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

Mesh2D build_mesh(std::size_t nx, std::size_t ny, double lx, double ly) {
  if (nx < 1 || ny < 1 || !(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
    throw Error(ErrorCode::DomainError, "mesh needs nx, ny >= 1 and positive side lengths");
  Mesh2D m;
  m.nx = nx;
  m.ny = ny;
  m.lx = lx;
  m.ly = ly;
  m.vertices.reserve((nx + 1) * (ny + 1));
  for (std::size_t j = 0; j <= ny; ++j)
    for (std::size_t i = 0; i <= nx; ++i)
      m.vertices.push_back({lx * static_cast<double>(i) / nx, ly * static_cast<double>(j) / ny});
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t v00 = m.vertex(i, j), v10 = m.vertex(i + 1, j);
      const std::size_t v01 = m.vertex(i, j + 1), v11 = m.vertex(i + 1, j + 1);
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
      m.cell_of_triangle.push_back(j * nx + i);
      m.cell_of_triangle.push_back(j * nx + i);
    }
  }
  return m;
}

BoundaryMarking BoundaryMarking::none(const Mesh2D& mesh) {
  return {std::vector<bool>(mesh.boundary_edge_count(), false)};
}

BoundaryMarking BoundaryMarking::full(const Mesh2D& mesh) {
  return {std::vector<bool>(mesh.boundary_edge_count(), true)};
}

BoundaryMarking BoundaryMarking::sides(const Mesh2D& mesh, const std::vector<std::string>& names) {
  BoundaryMarking b = none(mesh);
  for (const auto& name : names) {
    std::size_t first, count;
    if (name == "bottom") {
      first = 0, count = mesh.nx;
    } else if (name == "top") {
      first = mesh.nx, count = mesh.nx;
    } else if (name == "left") {
      first = 2 * mesh.nx, count = mesh.ny;
    } else if (name == "right") {
      first = 2 * mesh.nx + mesh.ny, count = mesh.ny;
    } else {
      throw Error(ErrorCode::ValidationError, "unknown boundary side '" + name + "'");
    }
    for (std::size_t k = 0; k < count; ++k) b.dirichlet_edges[first + k] = true;
  }
  return b;
}

BoundaryMarking BoundaryMarking::edges(const Mesh2D& mesh, const std::vector<std::size_t>& indices) {
  BoundaryMarking b = none(mesh);
  for (std::size_t k : indices) {
    if (k >= b.dirichlet_edges.size())
      throw Error(ErrorCode::ValidationError, "boundary edge index " + std::to_string(k) + " out of range");
    b.dirichlet_edges[k] = true;
  }
  return b;
}

std::vector<std::size_t> BoundaryMarking::free_nodes(const Mesh2D& mesh) const {
  std::vector<bool> fixed(mesh.vertices.size(), false);
  for (std::size_t k = 0; k < dirichlet_edges.size(); ++k) {
    if (!dirichlet_edges[k]) continue;
    const auto e = mesh.boundary_edge(k);
    fixed[e[0]] = fixed[e[1]] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < fixed.size(); ++v)
    if (!fixed[v]) out.push_back(v);
  return out;
}

std::size_t field_cell_of_mesh_cell(const CoefficientField& field, const Mesh2D& mesh, std::size_t cell) {
  if (field.cells.size() == 1) return 0;
  const std::size_t fx = field.grid_dims[0], fy = field.grid_dims[1];
  const std::size_t i = cell % mesh.nx, j = cell / mesh.nx;
  return (j * fy / mesh.ny) * fx + i * fx / mesh.nx;
}

FormMatrices assemble(const CoefficientField& field, const Mesh2D& mesh, const BoundaryMarking& marking, Exec exec) {
  require_fit(field, mesh);
  if (marking.dirichlet_edges.size() != mesh.boundary_edge_count())
    throw Error(ErrorCode::GridMismatch, "boundary marking does not match the mesh");
  FormMatrices fm;
  fm.free_nodes = marking.free_nodes(mesh);
  if (fm.free_nodes.empty()) throw Error(ErrorCode::EmptySubspace, "every node lies on the Dirichlet boundary");
  const std::size_t n = fm.free_nodes.size();
  constexpr std::size_t kFixed = static_cast<std::size_t>(-1);
  std::vector<std::size_t> row(mesh.vertices.size(), kFixed);
  for (std::size_t r = 0; r < n; ++r) row[fm.free_nodes[r]] = r;

  std::vector<Element> elements;
  elements.reserve(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) elements.push_back(make_element(field, mesh, t));

  fm.k = ComplexMatrix(n);
  fm.m = ComplexMatrix(n);
  if (exec == Exec::Serial) {
    for (const Element& e : elements) {
      const ComplexMatrix& mu = field.cells[e.field_cell].mu;
      for (int a = 0; a < 3; ++a) {
        const std::size_t ra = row[e.nodes[a]];
        if (ra == kFixed) continue;
        for (int b = 0; b < 3; ++b) {
          const std::size_t rb = row[e.nodes[b]];
          if (rb == kFixed) continue;
          fm.k(ra, rb) += stiffness_entry(e, mu, a, b);
          fm.m(ra, rb) += mass_entry(e, a, b);
        }
      }
    }
  } else {
    // Each free row gathers from its incident triangles, so rows never collide.
    std::vector<std::vector<std::pair<std::size_t, int>>> incident(mesh.vertices.size());
    for (std::size_t t = 0; t < elements.size(); ++t)
      for (int a = 0; a < 3; ++a) incident[elements[t].nodes[a]].emplace_back(t, a);
    const long rows = static_cast<long>(n);
#pragma omp parallel for schedule(static)
    for (long r = 0; r < rows; ++r) {
      for (const auto& [t, a] : incident[fm.free_nodes[r]]) {
        const Element& e = elements[t];
        const ComplexMatrix& mu = field.cells[e.field_cell].mu;
        for (int b = 0; b < 3; ++b) {
          const std::size_t rb = row[e.nodes[b]];
          if (rb == kFixed) continue;
          fm.k(r, rb) += stiffness_entry(e, mu, a, b);
          fm.m(r, rb) += mass_entry(e, a, b);
        }
      }
    }
  }
  fm.lumped_mass.assign(n, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) fm.lumped_mass[r] += fm.m(r, c).real();
  return fm;
}

ComplexMatrix reduced_operator(const FormMatrices& fm) {
  const ComplexMatrix c = cholesky(fm.m);
  const ComplexMatrix y = solve_lower(c, fm.k);
  return solve_lower(c, y.adjoint()).adjoint();
}

SectorAngle generalized_range_angle(const FormMatrices& fm, const Tolerances& tol) {
  return optimal_angle(reduced_operator(fm), tol);
}

InclusionReport sector_inclusion_check(const FormMatrices& fm, const SectorAngle& theta, double slack,
                                       const Tolerances& tol) {
  const ComplexMatrix l = reduced_operator(fm);
  InclusionReport r;
  r.theta = theta.theta;
  r.angle = optimal_angle(l, tol).theta;
  r.max_excess_angle = std::max(0.0, r.angle - r.theta);
  r.pass = r.angle <= r.theta + slack;
  if (r.pass) return r;

  // Witness: the extremal Rayleigh quotient of L, pulled back through C*.
  CVector x;
  const HermitianParts parts = operator_parts(l);
  if (eigvals_hermitian(parts.re_part, tol).front() > 0.0) {
    const ComplexMatrix c = cholesky(parts.re_part);
    const ComplexMatrix w = solve_lower(c, solve_lower(c, parts.im_part).adjoint()).adjoint();
    ComplexMatrix ws = w + w.adjoint();
    ws *= 0.5;
    const HermitianEigen e = eig_hermitian(ws, tol);
    const std::size_t pick = std::abs(e.values.front()) > std::abs(e.values.back()) ? 0 : e.values.size() - 1;
    x = solve_lower_adjoint(c, ComplexMatrix::column(e.vectors.col(pick))).col(0);
  } else {
    const RangeBoundary rb = range_boundary(l, tol.n_dirs, Exec::Parallel, tol);
    std::size_t best = 0;
    for (std::size_t k = 1; k < rb.boundary_points.size(); ++k)
      if (std::abs(std::arg(rb.boundary_points[k])) > std::abs(std::arg(rb.boundary_points[best]))) best = k;
    x = top_eigenpair(std::cos(rb.directions[best]) * parts.re_part + std::sin(rb.directions[best]) * parts.im_part,
                      tol)
            .vector;
  }
  const ComplexMatrix cm = cholesky(fm.m);
  CVector u = solve_lower_adjoint(cm, ComplexMatrix::column(x)).col(0);
  r.witness_value = quadratic_form(fm.k, u, u) / quadratic_form(fm.m, u, u);
  r.witness = std::move(u);
  return r;
}

}  // namespace sectorial
