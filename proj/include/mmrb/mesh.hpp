#pragma once

#include <cstdint>

#include "mmrb/errors.hpp"

namespace mmrb {

enum class BoundaryCondition { vacuum, periodic };

/// Uniform rectangular mesh with one degree of freedom per cell (piecewise
/// constant discontinuous Galerkin space). Cells are indexed x-fastest:
/// cell (i, j) -> j*nx + i.
struct SpatialMesh {
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;
  int nx = 1, ny = 1;

  double dx = 1.0, dy = 1.0;
  double h = 1.0;     // min(dx, dy)
  int n_dof = 1;      // nx*ny

  int index(int i, int j) const { return j * nx + i; }
  double center_x(int i) const { return x0 + (i + 0.5) * dx; }
  double center_y(int j) const { return y0 + (j + 0.5) * dy; }
  double cell_area() const { return dx * dy; }
};

inline SpatialMesh build_mesh(double x0, double x1, double y0, double y1, int nx, int ny) {
  if (!(x1 > x0) || !(y1 > y0))
    throw ConfigError("build_mesh: degenerate domain range");
  if (nx < 1 || ny < 1)
    throw ConfigError("build_mesh: cell counts must be >= 1");
  SpatialMesh m;
  m.x0 = x0; m.x1 = x1; m.y0 = y0; m.y1 = y1;
  m.nx = nx; m.ny = ny;
  m.dx = (x1 - x0) / nx;
  m.dy = (y1 - y0) / ny;
  m.h = m.dx < m.dy ? m.dx : m.dy;
  m.n_dof = nx * ny;
  return m;
}

} // namespace mmrb
