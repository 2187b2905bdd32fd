#pragma once

#include <optional>
#include <vector>

#include "mmrb/problem.hpp"

namespace mmrb {

/// Scalar flux and micro unknowns at one time level; column j of g belongs
/// to angular node v_j.
struct FomState {
  Vector rho;
  Matrix g;
  int time_index = 0;
};

/// Time step selection: dt = h when eps < 0.25*sigma_s*h, otherwise
/// 0.25*min(h/sqrt2, eps*h/(sqrt2*sigma_s)), minimized over the per-cell
/// sigma_s values, then shrunk so that n_steps*dt == final_time exactly.
struct TimeGrid {
  double dt = 0.0;
  int n_steps = 0;
};
TimeGrid stable_dt(const ProblemDefinition& p, const SpatialMesh& mesh);

/// Schur complement system for the scalar flux update:
///   H = M + dt*Sigma_a + dt*Djump
///       - dt^2 (<vx^2>_h Dx+ Theta^-1 Dx- + <vy^2>_h Dy+ Theta^-1 Dy-),
/// with Theta = eps^2 (M + dt*Sigma_a) + dt*Sigma_s (diagonal for K=0).
struct SchurSystem {
  SparseMat H;
  Vector theta_inv;
  Vector jacobi_inv;   // 1 / diag(H)
  double epsilon = 0.0;
  double dt = 0.0;
  double vxx = 1.0 / 3.0, vyy = 1.0 / 3.0; // <v_xi^2>_h of the assembling rule
  double cg_rel_tol = 1e-10;
  int cg_max_iters = 0; // default: 10 * n_dof

  /// Jacobi-preconditioned conjugate gradient solve of H x = b; x0 is the
  /// starting guess. Throws SolverError when the iteration budget runs out.
  Vector solve(const Vector& b, const Vector& x0) const;
};

SchurSystem assemble_schur(const DgOperators& ops, const AngularQuadrature& quad,
                           double epsilon, double dt);

/// One implicit-explicit step of the micro-macro scheme via the Schur
/// complement; source is the assembled per-cell source vector.
FomState fom_step(const FomState& state, const DgOperators& ops,
                  const AngularQuadrature& quad, const SchurSystem& schur,
                  const Vector& source);

/// Discrete energy ||rho||^2 + eps^2 sum_j w_j ||g_j||^2
/// + dt sum_j w_j int sigma_s g_j^2.
double discrete_energy(const FomState& state, const AngularQuadrature& quad,
                       const DgOperators& ops, double epsilon, double dt);

/// Receives every accepted time level, including the initial one (n = 0).
class SnapshotSink {
public:
  virtual ~SnapshotSink() = default;
  virtual void on_level(int n, const Vector& rho, const Matrix& g) = 0;
};

class InMemorySink : public SnapshotSink {
public:
  void on_level(int n, const Vector& rho, const Matrix& g) override {
    (void)n;
    rhos.push_back(rho);
    gs.push_back(g);
  }
  std::vector<Vector> rhos;
  std::vector<Matrix> gs;
};

struct FomSummary {
  FomState final_state;
  std::vector<double> energy;
  double dt = 0.0;
  int n_steps = 0;
};

struct FomOptions {
  std::optional<TimeGrid> grid;   // defaults to stable_dt
  bool track_energy = true;
  double cg_rel_tol = 1e-10;
};

/// Marches the full-order model from the problem's initial data to the final
/// time, streaming every level to the sink (pass nullptr to discard).
/// Negative quadrature weights are rejected; zero weights are allowed.
FomSummary fom_solve(const ProblemDefinition& p, const SpatialMesh& mesh,
                     const AngularQuadrature& quad, const DgOperators& ops,
                     SnapshotSink* sink, const FomOptions& opts = {});

/// Backward Euler march of the discrete diffusion limit (the eps -> 0 form
/// of the scheme, H assembled with eps = 0). Requires sigma_s > 0 in every
/// cell. Returns the rho trajectory including the initial level.
std::vector<Vector> diffusion_limit_solve(const ProblemDefinition& p,
                                          const SpatialMesh& mesh,
                                          const DgOperators& ops,
                                          const TimeGrid& grid);

} // namespace mmrb
