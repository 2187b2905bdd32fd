#pragma once

#include <Eigen/Cholesky>
#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "mmrb/fom.hpp"

namespace mmrb {

/// Orthonormal basis with the SVD factors of the snapshot matrix it came
/// from: S = B * diag(lambda) * V^T with singular values descending.
struct ReducedBasis {
  Matrix B;
  Vector lambda;
  Matrix V;
  int snapshot_count = 0;

  int rank() const { return static_cast<int>(lambda.size()); }

  /// Coordinates of B*c in the snapshot (interpolation) basis: V * lambda^-1 * c.
  Vector snapshot_coordinates(const Vector& c) const {
    return V * lambda.cwiseInverse().cwiseProduct(c);
  }
};

/// Thin SVD with relative truncation (drop singular values < rel_cutoff * max).
ReducedBasis svd_orthonormalize(const Matrix& snapshots, double rel_cutoff = 1e-12);

struct RomState {
  Vector c_rho;          // length r_rho
  Matrix c_g;            // r_g x |V|, one column per node of the active set
  int time_index = 0;
};

/// Galerkin projection of the full-order operators onto the reduced bases,
/// with the factorizations needed for time stepping against the training
/// quadrature quad_rq.
struct ReducedModel {
  ReducedBasis basis_rho;
  ReducedBasis basis_g;
  AngularQuadrature quad_rq;
  double epsilon = 0.0;
  double dt = 0.0;
  int n_steps = 0;

  Matrix mr_rho, ar_rho, jr_rho;   // B_rho^T {M, Sigma_a, Djump} B_rho
  Matrix mr_g, sr_g, ar_g;         // B_g^T {M, Sigma_s, Sigma_a} B_g
  Matrix dxp_r, dyp_r;             // B_rho^T D_xi^+ B_g
  Matrix dxm_r, dym_r;             // B_g^T D_xi^- B_rho
  Matrix gxm, gxp, gym, gyp;       // B_g^T D_xi^{-,+} B_g (upwind blocks)
  Matrix theta_r;                  // eps^2 mr_g + dt sr_g + eps^2 dt ar_g

  /// Per-node reduced upwind operator, assembled from the sign-selected blocks.
  Matrix upwind_reduced(const Vec3& v) const {
    return v.x * (v.x >= 0.0 ? gxm : gxp) + v.y * (v.y >= 0.0 ? gym : gyp);
  }
};

/// Projects operators and factorizes Theta_r and H_r (for quad). Refuses
/// non-orthonormal bases and quadratures violating the cross-moment condition.
ReducedModel project_operators(const DgOperators& ops, const ReducedBasis& basis_rho,
                               const ReducedBasis& basis_g, const AngularQuadrature& quad,
                               double epsilon, double dt);

/// Time stepper for one active angular set (the training set during greedy
/// sampling, the reduced rule online). Holds the Cholesky factors of the
/// reduced Schur complement for that set.
class RomSolver {
public:
  RomSolver(const ReducedModel& model, const AngularQuadrature& active);

  /// One implicit-explicit step of the projected system; source_r = B_rho^T G.
  /// On return, *upwind_moment (when given) holds sum_v w_v U_v c_g_v of the
  /// incoming state, the term reused by unseen-direction prediction.
  RomState step(const RomState& state, const Vector& source_r,
                Vector* upwind_moment = nullptr) const;

  const ReducedModel& model() const { return *model_; }
  const AngularQuadrature& active() const { return *active_; }

  Vector solve_theta(const Vector& b) const { return theta_llt_.solve(b); }

private:
  const ReducedModel* model_;
  const AngularQuadrature* active_;
  Matrix h_r_;
  Eigen::LLT<Matrix> h_llt_;
  Eigen::LLT<Matrix> theta_llt_;

public:
  const Matrix& h_r() const { return h_r_; }
};

/// Per-step records of a reduced solve. c_rho is always kept; the angular
/// moments of c_g are those needed for moment reconstruction, the upwind
/// moments feed unseen-direction prediction.
struct RomTrajectory {
  std::vector<Vector> c_rho;                 // n = 0..N_t
  std::vector<std::array<Vector, 3>> m1;     // sum_v w_v v_xi c_g_v, n = 0..N_t
  std::vector<std::array<Vector, 6>> m2;     // xx, xy, xz, yy, yz, zz
  std::vector<Vector> upwind;                // n = 0..N_t-1
  RomState final_state;
};

struct RomRecordOptions {
  bool moments = true;
  bool upwind = false;
  /// Called after each accepted step with the new state.
  std::function<void(int, const RomState&)> on_step;
};

RomTrajectory rom_solve(const RomSolver& solver, const RomState& initial,
                        int n_steps, const Vector& source_r,
                        const RomRecordOptions& rec = {});

/// Moment reconstruction from recorded reduced quantities.
/// order 0: B_rho c_rho^n; order 1 (component xi): eps * B_g m1[xi]^n;
/// order 2 (pair xi,eta): <v_xi v_eta> B_rho c_rho^n + eps B_g m2[...]^n
/// with <v_xi v_eta> = delta/3 analytically.
Vector reconstruct_moment(const ReducedModel& model, const RomTrajectory& traj,
                          int n, int order, int xi = 0, int eta = 0);

/// Marches the micro update for one direction outside the active set, reusing
/// the recorded c_rho and upwind histories of a reduced solve. Returns the
/// coefficient trajectory c_{g_v}^n for n = 0..N_t. The angular flux follows
/// as B_rho c_rho^n + eps B_g c^n.
std::vector<Vector> predict_unseen(const RomSolver& solver, const Vec3& v_unseen,
                                   const std::vector<Vector>& c_rho_history,
                                   const std::vector<Vector>& upwind_history,
                                   const Vector& c0);

/// Euclidean projections of initial data onto the bases.
RomState project_initial(const ReducedModel& model, const Vector& rho0, const Matrix& g0);

/// Binary container round trip (header "MMRBROM1").
void save_model(const std::string& path, const ReducedModel& model);
ReducedModel load_model(const std::string& path);

} // namespace mmrb
