#include "mmrb/rom.hpp"

#include <Eigen/SVD>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mmrb/parallel.hpp"

namespace mmrb {

namespace {

void check_orthonormal(const Matrix& b, const char* which) {
  const Matrix gram = b.transpose() * b;
  const double dev = (gram - Matrix::Identity(b.cols(), b.cols())).cwiseAbs().maxCoeff();
  if (dev > 1e-8) {
    std::ostringstream msg;
    msg << "project_operators: " << which << " basis is not orthonormal (deviation " << dev << ")";
    throw NumericalError(msg.str());
  }
}

} // namespace

ReducedBasis svd_orthonormalize(const Matrix& snapshots, double rel_cutoff) {
  if (snapshots.cols() == 0 || snapshots.rows() == 0)
    throw DegenerateBasisError("svd_orthonormalize: empty snapshot matrix");
  Eigen::BDCSVD<Matrix> svd(snapshots, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= 0.0)
    throw DegenerateBasisError("svd_orthonormalize: snapshot matrix is zero");
  const double cutoff = rel_cutoff * sv[0];
  int r = 0;
  while (r < sv.size() && sv[r] > cutoff) ++r;
  ReducedBasis basis;
  basis.B = svd.matrixU().leftCols(r);
  basis.lambda = sv.head(r);
  basis.V = svd.matrixV().leftCols(r);
  basis.snapshot_count = static_cast<int>(snapshots.cols());
  return basis;
}

ReducedModel project_operators(const DgOperators& ops, const ReducedBasis& basis_rho,
                               const ReducedBasis& basis_g, const AngularQuadrature& quad,
                               double epsilon, double dt) {
  check_orthonormal(basis_rho.B, "rho");
  check_orthonormal(basis_g.B, "g");
  if (std::abs(quad.second_moment(0, 1)) > 1e-10)
    throw SchemeError("project_operators: quadrature violates the <v_x v_y> = 0 requirement");

  ReducedModel m;
  m.basis_rho = basis_rho;
  m.basis_g = basis_g;
  m.quad_rq = quad;
  m.epsilon = epsilon;
  m.dt = dt;

  const Matrix& br = basis_rho.B;
  const Matrix& bg = basis_g.B;

  m.mr_rho = br.transpose() * ops.mass.asDiagonal() * br;
  m.ar_rho = br.transpose() * ops.sigma_a_diag.asDiagonal() * br;
  m.jr_rho = br.transpose() * (ops.djump * br);
  m.mr_g = bg.transpose() * ops.mass.asDiagonal() * bg;
  m.sr_g = bg.transpose() * ops.sigma_s_diag.asDiagonal() * bg;
  m.ar_g = bg.transpose() * ops.sigma_a_diag.asDiagonal() * bg;

  m.dxp_r = br.transpose() * (ops.dxp * bg);
  m.dyp_r = br.transpose() * (ops.dyp * bg);
  m.dxm_r = bg.transpose() * (ops.dxm * br);
  m.dym_r = bg.transpose() * (ops.dym * br);

  m.gxm = bg.transpose() * (ops.dxm * bg);
  m.gxp = bg.transpose() * (ops.dxp * bg);
  m.gym = bg.transpose() * (ops.dym * bg);
  m.gyp = bg.transpose() * (ops.dyp * bg);

  m.theta_r = epsilon * epsilon * m.mr_g + dt * m.sr_g + epsilon * epsilon * dt * m.ar_g;
  return m;
}

RomSolver::RomSolver(const ReducedModel& model, const AngularQuadrature& active)
    : model_(&model), active_(&active) {
  const double vxx = active.second_moment(0, 0);
  const double vyy = active.second_moment(1, 1);
  if (std::abs(active.second_moment(0, 1)) > 1e-10)
    throw SchemeError("RomSolver: active quadrature violates the cross-moment requirement");

  theta_llt_.compute(model.theta_r);
  if (theta_llt_.info() != Eigen::Success)
    throw NumericalError("RomSolver: Theta_r is not positive definite");

  const double dt = model.dt;
  h_r_ = model.mr_rho + dt * model.ar_rho + dt * model.jr_rho;
  h_r_ -= (dt * dt) *
          (vxx * (model.dxp_r * theta_llt_.solve(model.dxm_r)) +
           vyy * (model.dyp_r * theta_llt_.solve(model.dym_r)));
  h_llt_.compute(h_r_);
  if (h_llt_.info() != Eigen::Success)
    throw NumericalError("RomSolver: reduced Schur operator is not positive definite");
}

RomState RomSolver::step(const RomState& state, const Vector& source_r,
                         Vector* upwind_moment) const {
  const ReducedModel& m = *model_;
  const AngularQuadrature& act = *active_;
  const int rg = m.basis_g.rank();
  const int nv = act.size();
  const double eps = m.epsilon, dt = m.dt;

  // per-node transported coefficients U_v c_v, then the angular average
  Matrix transported(rg, nv);
  parallel_for(nv, [&](int j) {
    const Vec3& v = act.nodes[j];
    transported.col(j) = v.x * ((v.x >= 0.0 ? m.gxm : m.gxp) * state.c_g.col(j)) +
                         v.y * ((v.y >= 0.0 ? m.gym : m.gyp) * state.c_g.col(j));
  });
  Vector s = Vector::Zero(rg);
  for (int j = 0; j < nv; ++j) s += act.weights[j] * transported.col(j);
  if (upwind_moment) *upwind_moment = s;

  Matrix z(rg, nv); // Theta_r^-1 b_{r,g_v}
  parallel_for(nv, [&](int j) {
    const Vector b = eps * eps * (m.mr_g * state.c_g.col(j)) -
                     (eps * dt) * (transported.col(j) - s);
    z.col(j) = theta_llt_.solve(b);
  });

  Vector qx = Vector::Zero(rg), qy = Vector::Zero(rg);
  for (int j = 0; j < nv; ++j) {
    qx += (act.weights[j] * act.nodes[j].x) * z.col(j);
    qy += (act.weights[j] * act.nodes[j].y) * z.col(j);
  }

  Vector rhs = m.mr_rho * state.c_rho + dt * source_r;
  rhs.noalias() -= dt * (m.dxp_r * qx + m.dyp_r * qy);

  RomState next;
  next.time_index = state.time_index + 1;
  next.c_rho = h_llt_.solve(rhs);

  const Vector tx = m.dxm_r * next.c_rho;
  const Vector ty = m.dym_r * next.c_rho;
  next.c_g.resize(rg, nv);
  parallel_for(nv, [&](int j) {
    next.c_g.col(j) =
        z.col(j) -
        dt * theta_llt_.solve(Vector(act.nodes[j].x * tx + act.nodes[j].y * ty));
  });

  if (!next.c_rho.allFinite() || !next.c_g.allFinite())
    throw NumericalError("rom step produced a non-finite state");
  return next;
}

namespace {

void record_moments(const AngularQuadrature& act, const RomState& st, RomTrajectory& traj) {
  const int rg = static_cast<int>(st.c_g.rows());
  std::array<Vector, 3> m1;
  std::array<Vector, 6> m2;
  for (auto& v : m1) v = Vector::Zero(rg);
  for (auto& v : m2) v = Vector::Zero(rg);
  for (int j = 0; j < act.size(); ++j) {
    const double w = act.weights[j];
    const double c[3] = {act.nodes[j].x, act.nodes[j].y, act.nodes[j].z};
    const auto col = st.c_g.col(j);
    for (int xi = 0; xi < 3; ++xi) m1[xi] += (w * c[xi]) * col;
    int k = 0;
    for (int xi = 0; xi < 3; ++xi)
      for (int eta = xi; eta < 3; ++eta) m2[k++] += (w * c[xi] * c[eta]) * col;
  }
  traj.m1.push_back(std::move(m1));
  traj.m2.push_back(std::move(m2));
}

} // namespace

RomTrajectory rom_solve(const RomSolver& solver, const RomState& initial,
                        int n_steps, const Vector& source_r,
                        const RomRecordOptions& rec) {
  RomTrajectory traj;
  RomState state = initial;
  traj.c_rho.push_back(state.c_rho);
  if (rec.moments) record_moments(solver.active(), state, traj);
  if (rec.on_step) rec.on_step(0, state);

  for (int n = 0; n < n_steps; ++n) {
    Vector upw;
    RomState next = solver.step(state, source_r, rec.upwind ? &upw : nullptr);
    if (rec.upwind) traj.upwind.push_back(std::move(upw));
    state = std::move(next);
    traj.c_rho.push_back(state.c_rho);
    if (rec.moments) record_moments(solver.active(), state, traj);
    if (rec.on_step) rec.on_step(state.time_index, state);
  }
  traj.final_state = std::move(state);
  return traj;
}

Vector reconstruct_moment(const ReducedModel& model, const RomTrajectory& traj,
                          int n, int order, int xi, int eta) {
  const auto pair_index = [](int a, int b) {
    if (a > b) std::swap(a, b);
    // (0,0) (0,1) (0,2) (1,1) (1,2) (2,2)
    static const int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    return table[a][b];
  };
  switch (order) {
    case 0:
      return model.basis_rho.B * traj.c_rho.at(n);
    case 1:
      return model.epsilon * (model.basis_g.B * traj.m1.at(n)[xi]);
    case 2: {
      const double exact = xi == eta ? 1.0 / 3.0 : 0.0;
      Vector out = exact * (model.basis_rho.B * traj.c_rho.at(n));
      out += model.epsilon * (model.basis_g.B * traj.m2.at(n)[pair_index(xi, eta)]);
      return out;
    }
    default:
      throw std::invalid_argument("reconstruct_moment: order must be 0, 1 or 2");
  }
}

std::vector<Vector> predict_unseen(const RomSolver& solver, const Vec3& v_unseen,
                                   const std::vector<Vector>& c_rho_history,
                                   const std::vector<Vector>& upwind_history,
                                   const Vector& c0) {
  const ReducedModel& m = solver.model();
  const double eps = m.epsilon, dt = m.dt;
  const size_t n_steps = upwind_history.size();
  if (c_rho_history.size() != n_steps + 1)
    throw std::invalid_argument("predict_unseen: history length mismatch");
  const double r2 = v_unseen.x * v_unseen.x + v_unseen.y * v_unseen.y + v_unseen.z * v_unseen.z;
  if (std::abs(r2 - 1.0) > 1e-10)
    throw std::invalid_argument("predict_unseen: direction must be a unit vector");

  const Matrix u_v = m.upwind_reduced(v_unseen);
  std::vector<Vector> traj;
  traj.reserve(n_steps + 1);
  traj.push_back(c0);
  for (size_t n = 0; n < n_steps; ++n) {
    const Vector& c = traj.back();
    Vector b = eps * eps * (m.mr_g * c);
    b.noalias() -= (eps * dt) * (u_v * c - upwind_history[n]);
    b.noalias() -= dt * (v_unseen.x * (m.dxm_r * c_rho_history[n + 1]) +
                         v_unseen.y * (m.dym_r * c_rho_history[n + 1]));
    traj.push_back(solver.solve_theta(b));
  }
  return traj;
}

RomState project_initial(const ReducedModel& model, const Vector& rho0, const Matrix& g0) {
  RomState st;
  st.c_rho = model.basis_rho.B.transpose() * rho0;
  st.c_g = model.basis_g.B.transpose() * g0;
  st.time_index = 0;
  return st;
}

namespace {

constexpr char kModelMagic[9] = "MMRBROM1";

void put_bytes(std::ostream& os, const void* p, size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void get_bytes(std::istream& is, void* p, size_t n) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!is) throw Error("model file: truncated");
}

void put_i64(std::ostream& os, int64_t v) { put_bytes(os, &v, 8); }
int64_t get_i64(std::istream& is) {
  int64_t v;
  get_bytes(is, &v, 8);
  return v;
}

void put_f64(std::ostream& os, double v) { put_bytes(os, &v, 8); }
double get_f64(std::istream& is) {
  double v;
  get_bytes(is, &v, 8);
  return v;
}

void put_matrix(std::ostream& os, const Matrix& m) {
  put_i64(os, m.rows());
  put_i64(os, m.cols());
  put_bytes(os, m.data(), sizeof(double) * static_cast<size_t>(m.size()));
}

Matrix get_matrix(std::istream& is) {
  const int64_t r = get_i64(is), c = get_i64(is);
  Matrix m(r, c);
  get_bytes(is, m.data(), sizeof(double) * static_cast<size_t>(m.size()));
  return m;
}

void put_vector(std::ostream& os, const Vector& v) {
  put_i64(os, v.size());
  put_bytes(os, v.data(), sizeof(double) * static_cast<size_t>(v.size()));
}

Vector get_vector(std::istream& is) {
  const int64_t n = get_i64(is);
  Vector v(n);
  get_bytes(is, v.data(), sizeof(double) * static_cast<size_t>(v.size()));
  return v;
}

void put_basis(std::ostream& os, const ReducedBasis& b) {
  put_matrix(os, b.B);
  put_vector(os, b.lambda);
  put_matrix(os, b.V);
  put_i64(os, b.snapshot_count);
}

ReducedBasis get_basis(std::istream& is) {
  ReducedBasis b;
  b.B = get_matrix(is);
  b.lambda = get_vector(is);
  b.V = get_matrix(is);
  b.snapshot_count = static_cast<int>(get_i64(is));
  return b;
}

} // namespace

void save_model(const std::string& path, const ReducedModel& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open for writing: " + path);
  put_bytes(os, kModelMagic, 8);
  put_f64(os, m.epsilon);
  put_f64(os, m.dt);
  put_i64(os, m.n_steps);
  put_basis(os, m.basis_rho);
  put_basis(os, m.basis_g);

  std::ostringstream quad_text;
  save_quadrature(quad_text, m.quad_rq);
  const std::string qt = quad_text.str();
  put_i64(os, static_cast<int64_t>(qt.size()));
  put_bytes(os, qt.data(), qt.size());

  for (const Matrix* mat : {&m.mr_rho, &m.ar_rho, &m.jr_rho, &m.mr_g, &m.sr_g, &m.ar_g,
                            &m.dxp_r, &m.dyp_r, &m.dxm_r, &m.dym_r,
                            &m.gxm, &m.gxp, &m.gym, &m.gyp, &m.theta_r})
    put_matrix(os, *mat);
}

ReducedModel load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open for reading: " + path);
  char magic[8];
  get_bytes(is, magic, 8);
  if (std::memcmp(magic, kModelMagic, 8) != 0)
    throw Error("model file: bad magic header");
  ReducedModel m;
  m.epsilon = get_f64(is);
  m.dt = get_f64(is);
  m.n_steps = static_cast<int>(get_i64(is));
  m.basis_rho = get_basis(is);
  m.basis_g = get_basis(is);

  const int64_t qlen = get_i64(is);
  std::string qt(static_cast<size_t>(qlen), '\0');
  get_bytes(is, qt.data(), qt.size());
  std::istringstream quad_text(qt);
  m.quad_rq = load_quadrature(quad_text);

  for (Matrix* mat : {&m.mr_rho, &m.ar_rho, &m.jr_rho, &m.mr_g, &m.sr_g, &m.ar_g,
                      &m.dxp_r, &m.dyp_r, &m.dxm_r, &m.dym_r,
                      &m.gxm, &m.gxp, &m.gym, &m.gyp, &m.theta_r})
    *mat = get_matrix(is);
  return m;
}

} // namespace mmrb
