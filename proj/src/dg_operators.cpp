#include "mmrb/dg_operators.hpp"

#include <vector>

namespace mmrb {

namespace {

using Triplet = Eigen::Triplet<double>;

// One-dimensional face-difference stencils lifted to the 2D index set.
// For the minus-trace derivative in x the row for cell (i,j) is
//   +dy * u(i,j) - dy * u(i-1,j)
// and for the plus-trace derivative
//   -dy * u(i,j) + dy * u(i+1,j),
// with exterior traces dropped (vacuum) or wrapped (periodic).
SparseMat derivative_x(const SpatialMesh& m, BoundaryCondition bc, bool minus_side) {
  std::vector<Triplet> trips;
  trips.reserve(2 * static_cast<size_t>(m.n_dof));
  const double f = m.dy;
  for (int j = 0; j < m.ny; ++j) {
    for (int i = 0; i < m.nx; ++i) {
      const int row = m.index(i, j);
      if (minus_side) {
        trips.emplace_back(row, row, f);
        if (i > 0)
          trips.emplace_back(row, m.index(i - 1, j), -f);
        else if (bc == BoundaryCondition::periodic)
          trips.emplace_back(row, m.index(m.nx - 1, j), -f);
      } else {
        trips.emplace_back(row, row, -f);
        if (i + 1 < m.nx)
          trips.emplace_back(row, m.index(i + 1, j), f);
        else if (bc == BoundaryCondition::periodic)
          trips.emplace_back(row, m.index(0, j), f);
      }
    }
  }
  SparseMat d(m.n_dof, m.n_dof);
  d.setFromTriplets(trips.begin(), trips.end());
  d.makeCompressed();
  return d;
}

SparseMat derivative_y(const SpatialMesh& m, BoundaryCondition bc, bool minus_side) {
  std::vector<Triplet> trips;
  trips.reserve(2 * static_cast<size_t>(m.n_dof));
  const double f = m.dx;
  for (int j = 0; j < m.ny; ++j) {
    for (int i = 0; i < m.nx; ++i) {
      const int row = m.index(i, j);
      if (minus_side) {
        trips.emplace_back(row, row, f);
        if (j > 0)
          trips.emplace_back(row, m.index(i, j - 1), -f);
        else if (bc == BoundaryCondition::periodic)
          trips.emplace_back(row, m.index(i, m.ny - 1), -f);
      } else {
        trips.emplace_back(row, row, -f);
        if (j + 1 < m.ny)
          trips.emplace_back(row, m.index(i, j + 1), f);
        else if (bc == BoundaryCondition::periodic)
          trips.emplace_back(row, m.index(i, 0), f);
      }
    }
  }
  SparseMat d(m.n_dof, m.n_dof);
  d.setFromTriplets(trips.begin(), trips.end());
  d.makeCompressed();
  return d;
}

} // namespace

DgOperators assemble_operators(const SpatialMesh& mesh,
                               const ScalarField& sigma_s,
                               const ScalarField& sigma_a,
                               BoundaryCondition bc,
                               double alpha_x, double alpha_y,
                               int k) {
  if (k != 0)
    throw SchemeError("assemble_operators: polynomial degree K > 0 is not implemented");
  if (!(alpha_x > 0.0) || !(alpha_y > 0.0))
    throw ConfigError("assemble_operators: jump penalties alpha must be positive");

  DgOperators ops;
  ops.mesh = mesh;
  ops.bc = bc;
  ops.alpha_x = alpha_x;
  ops.alpha_y = alpha_y;

  const double area = mesh.cell_area();
  ops.mass = Vector::Constant(mesh.n_dof, area);
  ops.sigma_s_diag.resize(mesh.n_dof);
  ops.sigma_a_diag.resize(mesh.n_dof);
  for (int j = 0; j < mesh.ny; ++j) {
    for (int i = 0; i < mesh.nx; ++i) {
      const double x = mesh.center_x(i);
      const double y = mesh.center_y(j);
      const double ss = sigma_s(x, y);
      const double sa = sigma_a(x, y);
      if (ss < 0.0 || sa < 0.0)
        throw ModelError("assemble_operators: negative cross section in a cell");
      const int idx = mesh.index(i, j);
      ops.sigma_s_diag[idx] = ss * area;
      ops.sigma_a_diag[idx] = sa * area;
    }
  }

  ops.dxm = derivative_x(mesh, bc, true);
  ops.dxp = derivative_x(mesh, bc, false);
  ops.dym = derivative_y(mesh, bc, true);
  ops.dyp = derivative_y(mesh, bc, false);

  SparseMat jump = (alpha_x * (ops.dxm - ops.dxp) + alpha_y * (ops.dym - ops.dyp));
  jump.makeCompressed();
  ops.djump = std::move(jump);
  return ops;
}

SparseMat DgOperators::upwind_derivative(double vx, double vy) const {
  SparseMat r = vx * dx_of_sign(vx) + vy * dy_of_sign(vy);
  r.makeCompressed();
  return r;
}

void DgOperators::apply_upwind(double vx, double vy, const Vector& u, Vector& out) const {
  out.noalias() = vx * (dx_of_sign(vx) * u);
  out.noalias() += vy * (dy_of_sign(vy) * u);
}

} // namespace mmrb
