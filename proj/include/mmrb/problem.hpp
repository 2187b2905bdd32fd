#pragma once

#include <functional>

#include "mmrb/angular.hpp"
#include "mmrb/dg_operators.hpp"
#include "mmrb/mesh.hpp"

namespace mmrb {

/// Initial micro data evaluated at (x, y, v); null means g(.,.,0) = 0.
using AngularField = std::function<double(double, double, const Vec3&)>;

/// A transport problem instance under diffusive scaling.
struct ProblemDefinition {
  double epsilon = 1.0;
  ScalarField sigma_s;
  ScalarField sigma_a;
  ScalarField source;       // isotropic, time-independent
  ScalarField initial_rho;  // null means 0
  AngularField initial_g;   // null means 0
  double final_time = 1.0;
  BoundaryCondition bc = BoundaryCondition::vacuum;

  void validate() const {
    if (!(epsilon > 0.0)) throw ModelError("problem: epsilon must be positive");
    if (!(final_time > 0.0)) throw ModelError("problem: final time must be positive");
    if (!sigma_s || !sigma_a) throw ConfigError("problem: cross section fields are required");
  }
};

/// Operators for a problem with the default jump penalties
/// alpha_xi = 1 / <v_xi^2>_h of the given (training) quadrature.
inline DgOperators assemble_problem_operators(const ProblemDefinition& p,
                                              const SpatialMesh& mesh,
                                              const AngularQuadrature& quad) {
  const double ax = 1.0 / quad.second_moment(0, 0);
  const double ay = 1.0 / quad.second_moment(1, 1);
  return assemble_operators(mesh, p.sigma_s, p.sigma_a, p.bc, ax, ay);
}

/// Cell vector of the initial scalar flux.
Vector initial_rho_vector(const ProblemDefinition& p, const SpatialMesh& mesh);

/// Matrix (n_dof x N_v) of the initial micro component at the given nodes.
Matrix initial_g_matrix(const ProblemDefinition& p, const SpatialMesh& mesh,
                        const AngularQuadrature& quad);

/// Source vector with entries integral of G against the cell indicator.
Vector source_vector(const ProblemDefinition& p, const SpatialMesh& mesh);

} // namespace mmrb
