#include "mmrb/fom.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include "mmrb/parallel.hpp"

namespace mmrb {

namespace {

std::atomic<int> g_threads{1};

} // namespace

void set_thread_count(int n) { g_threads.store(n < 1 ? 1 : n); }
int thread_count() { return g_threads.load(); }

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int nt = std::min(thread_count(), n);
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(nt);
  std::atomic<int> next{0};
  for (int t = 0; t < nt; ++t)
    workers.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& w : workers) w.join();
}

Vector initial_rho_vector(const ProblemDefinition& p, const SpatialMesh& mesh) {
  Vector r = Vector::Zero(mesh.n_dof);
  if (!p.initial_rho) return r;
  for (int j = 0; j < mesh.ny; ++j)
    for (int i = 0; i < mesh.nx; ++i)
      r[mesh.index(i, j)] = p.initial_rho(mesh.center_x(i), mesh.center_y(j));
  return r;
}

Matrix initial_g_matrix(const ProblemDefinition& p, const SpatialMesh& mesh,
                        const AngularQuadrature& quad) {
  Matrix g = Matrix::Zero(mesh.n_dof, quad.size());
  if (!p.initial_g) return g;
  for (int k = 0; k < quad.size(); ++k)
    for (int j = 0; j < mesh.ny; ++j)
      for (int i = 0; i < mesh.nx; ++i)
        g(mesh.index(i, j), k) = p.initial_g(mesh.center_x(i), mesh.center_y(j), quad.nodes[k]);
  return g;
}

Vector source_vector(const ProblemDefinition& p, const SpatialMesh& mesh) {
  Vector s = Vector::Zero(mesh.n_dof);
  if (!p.source) return s;
  const double area = mesh.cell_area();
  for (int j = 0; j < mesh.ny; ++j)
    for (int i = 0; i < mesh.nx; ++i)
      s[mesh.index(i, j)] = area * p.source(mesh.center_x(i), mesh.center_y(j));
  return s;
}

TimeGrid stable_dt(const ProblemDefinition& p, const SpatialMesh& mesh) {
  p.validate();
  const double h = mesh.h;
  const double eps = p.epsilon;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  auto dt_for_sigma = [&](double sigma) {
    if (eps < 0.25 * sigma * h) return h;
    const double hyper = h * inv_sqrt2;
    const double relax = sigma > 0.0 ? eps * h * inv_sqrt2 / sigma
                                     : std::numeric_limits<double>::infinity();
    return 0.25 * std::min(hyper, relax);
  };

  double dt = std::numeric_limits<double>::infinity();
  for (int j = 0; j < mesh.ny; ++j)
    for (int i = 0; i < mesh.nx; ++i)
      dt = std::min(dt, dt_for_sigma(p.sigma_s(mesh.center_x(i), mesh.center_y(j))));

  TimeGrid grid;
  grid.n_steps = std::max(1, static_cast<int>(std::ceil(p.final_time / dt - 1e-12)));
  grid.dt = p.final_time / grid.n_steps;
  return grid;
}

Vector SchurSystem::solve(const Vector& b, const Vector& x0) const {
  const int max_iters = cg_max_iters > 0 ? cg_max_iters : 10 * static_cast<int>(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) return Vector::Zero(b.size());
  Vector x = x0;
  Vector r = b - H * x;
  double rnorm = r.norm();
  if (rnorm <= cg_rel_tol * bnorm) return x;

  Vector z = jacobi_inv.cwiseProduct(r);
  Vector d = z;
  double rz = r.dot(z);
  Vector hd(b.size());
  for (int it = 0; it < max_iters; ++it) {
    hd.noalias() = H * d;
    const double alpha = rz / d.dot(hd);
    x += alpha * d;
    r -= alpha * hd;
    rnorm = r.norm();
    if (rnorm <= cg_rel_tol * bnorm) return x;
    z = jacobi_inv.cwiseProduct(r);
    const double rz_next = r.dot(z);
    d = z + (rz_next / rz) * d;
    rz = rz_next;
  }
  std::ostringstream msg;
  msg << "conjugate gradient did not converge in " << max_iters
      << " iterations; relative residual " << rnorm / bnorm;
  throw SolverError(msg.str(), rnorm);
}

namespace {

// Shared between assemble_schur and the diffusion-limit oracle; theta_inv
// and the second moments must already be set on s.
void assemble_h(SchurSystem& s, const DgOperators& ops, double dt) {
  SparseMat h = ops.djump * dt;
  h += SparseMat(Vector(dt * ops.sigma_a_diag + ops.mass).asDiagonal());
  const SparseMat tx = s.theta_inv.asDiagonal() * ops.dxm;
  const SparseMat ty = s.theta_inv.asDiagonal() * ops.dym;
  h -= (dt * dt) * (s.vxx * SparseMat(ops.dxp * tx) + s.vyy * SparseMat(ops.dyp * ty));
  h.makeCompressed();
  s.H = std::move(h);
  s.jacobi_inv = s.H.diagonal().cwiseInverse();
}

} // namespace

SchurSystem assemble_schur(const DgOperators& ops, const AngularQuadrature& quad,
                           double epsilon, double dt) {
  const double vxy = quad.second_moment(0, 1);
  if (std::abs(vxy) > 1e-10)
    throw SchemeError("assemble_schur: quadrature violates the <v_x v_y> = 0 requirement");

  SchurSystem s;
  s.epsilon = epsilon;
  s.dt = dt;
  s.vxx = quad.second_moment(0, 0);
  s.vyy = quad.second_moment(1, 1);

  const int n = static_cast<int>(ops.mass.size());
  Vector theta(n);
  for (int i = 0; i < n; ++i) {
    theta[i] = epsilon * epsilon * (ops.mass[i] + dt * ops.sigma_a_diag[i]) +
               dt * ops.sigma_s_diag[i];
    if (!(theta[i] > 0.0))
      throw ModelError("assemble_schur: nonpositive Theta entry");
  }
  s.theta_inv = theta.cwiseInverse();
  assemble_h(s, ops, dt);
  return s;
}

FomState fom_step(const FomState& state, const DgOperators& ops,
                  const AngularQuadrature& quad, const SchurSystem& schur,
                  const Vector& source) {
  const int n = static_cast<int>(state.rho.size());
  const int nv = quad.size();
  const double eps = schur.epsilon;
  const double dt = schur.dt;

  // transport term T_j g_j per node, then its angular average s
  Matrix transported(n, nv);
  parallel_for(nv, [&](int j) {
    Vector out(n);
    ops.apply_upwind(quad.nodes[j].x, quad.nodes[j].y, state.g.col(j), out);
    transported.col(j) = out;
  });
  Vector s = Vector::Zero(n);
  for (int j = 0; j < nv; ++j) s += quad.weights[j] * transported.col(j);

  // b_{g_j} = eps^2 M g_j - eps dt (T_j g_j - s)
  Matrix bg(n, nv);
  parallel_for(nv, [&](int j) {
    bg.col(j) = (eps * eps) * ops.mass.cwiseProduct(state.g.col(j)) -
                (eps * dt) * (transported.col(j) - s);
  });

  // eliminate g: b~ = M rho + dt G - dt (Dx+ Theta^-1 qx + Dy+ Theta^-1 qy)
  Vector qx = Vector::Zero(n), qy = Vector::Zero(n);
  for (int j = 0; j < nv; ++j) {
    qx += (quad.weights[j] * quad.nodes[j].x) * bg.col(j);
    qy += (quad.weights[j] * quad.nodes[j].y) * bg.col(j);
  }
  Vector btilde = ops.mass.cwiseProduct(state.rho) + dt * source;
  btilde.noalias() -= dt * (ops.dxp * Vector(schur.theta_inv.cwiseProduct(qx)));
  btilde.noalias() -= dt * (ops.dyp * Vector(schur.theta_inv.cwiseProduct(qy)));

  FomState next;
  next.time_index = state.time_index + 1;
  next.rho = schur.solve(btilde, state.rho);

  const Vector dx_rho = ops.dxm * next.rho;
  const Vector dy_rho = ops.dym * next.rho;
  next.g.resize(n, nv);
  parallel_for(nv, [&](int j) {
    next.g.col(j) = schur.theta_inv.cwiseProduct(
        Vector(bg.col(j) - dt * (quad.nodes[j].x * dx_rho + quad.nodes[j].y * dy_rho)));
  });

  if (!next.rho.allFinite() || !next.g.allFinite())
    throw SolverError("fom_step produced a non-finite state",
                      std::numeric_limits<double>::quiet_NaN());
  return next;
}

double discrete_energy(const FomState& state, const AngularQuadrature& quad,
                       const DgOperators& ops, double epsilon, double dt) {
  if (quad.weights.size() > 0 && quad.weights.minCoeff() < 0.0)
    throw ModelError("discrete_energy: negative quadrature weight");
  double e = state.rho.dot(ops.mass.cwiseProduct(state.rho));
  for (int j = 0; j < quad.size(); ++j) {
    const auto gj = state.g.col(j);
    e += epsilon * epsilon * quad.weights[j] * gj.dot(ops.mass.cwiseProduct(gj));
    e += dt * quad.weights[j] * gj.dot(ops.sigma_s_diag.cwiseProduct(gj));
  }
  return e;
}

FomSummary fom_solve(const ProblemDefinition& p, const SpatialMesh& mesh,
                     const AngularQuadrature& quad, const DgOperators& ops,
                     SnapshotSink* sink, const FomOptions& opts) {
  p.validate();
  if (quad.weights.minCoeff() < 0.0)
    throw ModelError("fom_solve: quadrature weights must be non-negative");

  const TimeGrid grid = opts.grid ? *opts.grid : stable_dt(p, mesh);
  SchurSystem schur = assemble_schur(ops, quad, p.epsilon, grid.dt);
  schur.cg_rel_tol = opts.cg_rel_tol;

  FomState state;
  state.rho = initial_rho_vector(p, mesh);
  state.g = initial_g_matrix(p, mesh, quad);
  state.time_index = 0;
  const Vector src = source_vector(p, mesh);

  FomSummary out;
  out.dt = grid.dt;
  out.n_steps = grid.n_steps;
  if (sink) sink->on_level(0, state.rho, state.g);
  if (opts.track_energy)
    out.energy.push_back(discrete_energy(state, quad, ops, p.epsilon, grid.dt));

  for (int n = 0; n < grid.n_steps; ++n) {
    state = fom_step(state, ops, quad, schur, src);
    if (sink) sink->on_level(state.time_index, state.rho, state.g);
    if (opts.track_energy)
      out.energy.push_back(discrete_energy(state, quad, ops, p.epsilon, grid.dt));
  }
  out.final_state = std::move(state);
  return out;
}

std::vector<Vector> diffusion_limit_solve(const ProblemDefinition& p,
                                          const SpatialMesh& mesh,
                                          const DgOperators& ops,
                                          const TimeGrid& grid) {
  p.validate();
  for (int i = 0; i < mesh.n_dof; ++i)
    if (!(ops.sigma_s_diag[i] > 0.0))
      throw ModelError("diffusion_limit_solve: sigma_s must be positive in every cell");

  SchurSystem schur;
  schur.epsilon = 0.0;
  schur.dt = grid.dt;
  schur.vxx = schur.vyy = 1.0 / 3.0;
  schur.theta_inv = Vector(grid.dt * ops.sigma_s_diag).cwiseInverse();
  assemble_h(schur, ops, grid.dt);

  const Vector src = source_vector(p, mesh);
  std::vector<Vector> traj;
  traj.push_back(initial_rho_vector(p, mesh));
  for (int n = 0; n < grid.n_steps; ++n) {
    const Vector b = ops.mass.cwiseProduct(traj.back()) + grid.dt * src;
    traj.push_back(schur.solve(b, traj.back()));
  }
  return traj;
}

} // namespace mmrb
