#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>

#include "mmrb/mesh.hpp"

namespace mmrb {

using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Scalar field sampled at cell centers during assembly.
using ScalarField = std::function<double(double, double)>;

/// Assembled piecewise-constant DG operators on a uniform rectangular mesh.
///
/// dxm/dxp (dym/dyp) are the discrete x (y) derivatives with traces taken
/// from the minus/plus side of each cell face; djump is the penalty operator
/// alpha_x*(dxm - dxp) + alpha_y*(dym - dyp). Under vacuum or periodic
/// boundaries dxp == -dxm^T and dyp == -dym^T, which makes djump symmetric
/// positive semi-definite.
struct DgOperators {
  SpatialMesh mesh;
  BoundaryCondition bc = BoundaryCondition::vacuum;
  double alpha_x = 0.0, alpha_y = 0.0;

  Vector mass;          // diagonal of M (cell areas)
  Vector sigma_s_diag;  // diagonal of Sigma_s
  Vector sigma_a_diag;  // diagonal of Sigma_a

  SparseMat dxm, dxp, dym, dyp;
  SparseMat djump;

  /// v_x*D_x^star + v_y*D_y^star with star = minus for component >= 0, plus otherwise.
  SparseMat upwind_derivative(double vx, double vy) const;

  /// Action of the upwind derivative on u without forming the matrix.
  void apply_upwind(double vx, double vy, const Vector& u, Vector& out) const;

  const SparseMat& dx_of_sign(double v) const { return v >= 0.0 ? dxm : dxp; }
  const SparseMat& dy_of_sign(double v) const { return v >= 0.0 ? dym : dyp; }
};

/// Assembles mass, cross-section and derivative matrices for polynomial
/// degree k. Only k = 0 is implemented; sigma fields are sampled at cell
/// centers (midpoint rule, consistent with the first-order scheme).
DgOperators assemble_operators(const SpatialMesh& mesh,
                               const ScalarField& sigma_s,
                               const ScalarField& sigma_a,
                               BoundaryCondition bc,
                               double alpha_x, double alpha_y,
                               int k = 0);

} // namespace mmrb
