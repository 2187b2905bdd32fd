#include "mmrb/metrics.hpp"

#include <Eigen/SVD>
#include <chrono>
#include <cmath>

namespace mmrb {

double compression_ratio(int r_rho, int r_g, int nv_rq, int nv_train, int n_dof) {
  return (static_cast<double>(r_rho) + static_cast<double>(nv_rq) * r_g) /
         (static_cast<double>(nv_train + 1) * n_dof);
}

ErrorAccumulator::ErrorAccumulator(double dt, const Vector& mass, int n_directions)
    : dt_(dt), mass_(mass), num_f_(n_directions, 0.0), den_f_(n_directions, 0.0) {}

namespace {

double mass_sq(const Vector& v, const Vector& mass) { return v.dot(mass.cwiseProduct(v)); }

} // namespace

void ErrorAccumulator::add_rho(const Vector& rom, const Vector& fom) {
  num_rho_ += mass_sq(rom - fom, mass_);
  den_rho_ += mass_sq(fom, mass_);
}

void ErrorAccumulator::add_vf(const Vector& rom_x, const Vector& rom_y,
                              const Vector& fom_x, const Vector& fom_y) {
  num_vf_ += mass_sq(rom_x - fom_x, mass_) + mass_sq(rom_y - fom_y, mass_);
  den_vf_ += mass_sq(fom_x, mass_) + mass_sq(fom_y, mass_);
}

void ErrorAccumulator::add_f(int direction, const Vector& rom, const Vector& fom) {
  num_f_.at(direction) += mass_sq(rom - fom, mass_);
  den_f_.at(direction) += mass_sq(fom, mass_);
}

RunMetrics ErrorAccumulator::finalize() const {
  RunMetrics m;
  m.e_rho = std::sqrt(dt_ * num_rho_);
  m.r_rho = den_rho_ > 0.0 ? m.e_rho / std::sqrt(dt_ * den_rho_) : (num_rho_ > 0.0 ? 1.0 : 0.0);
  m.e_vf = std::sqrt(dt_ * num_vf_);
  m.r_vf = den_vf_ > 0.0 ? m.e_vf / std::sqrt(dt_ * den_vf_) : (num_vf_ > 0.0 ? 1.0 : 0.0);
  double worst_num = 0.0, worst_den = 0.0;
  for (double v : num_f_) worst_num = std::max(worst_num, v);
  for (double v : den_f_) worst_den = std::max(worst_den, v);
  m.e_f = std::sqrt(dt_ * worst_num);
  m.r_f = worst_den > 0.0 ? m.e_f / std::sqrt(dt_ * worst_den) : (worst_num > 0.0 ? 1.0 : 0.0);
  return m;
}

RunMetrics error_metrics(const std::vector<Vector>& rom_rho,
                         const std::vector<Vector>& fom_rho,
                         const std::vector<std::array<Vector, 2>>& rom_vf,
                         const std::vector<std::array<Vector, 2>>& fom_vf,
                         const std::vector<std::vector<Vector>>& rom_f,
                         const std::vector<std::vector<Vector>>& fom_f,
                         double dt, const Vector& mass) {
  if (rom_rho.size() != fom_rho.size() || rom_vf.size() != fom_vf.size() ||
      rom_f.size() != fom_f.size())
    throw std::invalid_argument("error_metrics: series lengths do not match");

  ErrorAccumulator acc(dt, mass, static_cast<int>(rom_f.size()));
  for (size_t n = 1; n < rom_rho.size(); ++n) acc.add_rho(rom_rho[n], fom_rho[n]);
  for (size_t n = 1; n < rom_vf.size(); ++n)
    acc.add_vf(rom_vf[n][0], rom_vf[n][1], fom_vf[n][0], fom_vf[n][1]);
  for (size_t v = 0; v < rom_f.size(); ++v) {
    if (rom_f[v].size() != fom_f[v].size())
      throw std::invalid_argument("error_metrics: f series length mismatch");
    for (size_t n = 1; n < rom_f[v].size(); ++n)
      acc.add_f(static_cast<int>(v), rom_f[v][n], fom_f[v][n]);
  }
  return acc.finalize();
}

PodResult pod_baseline(const Matrix& snapshots, int rank, int max_snapshots) {
  if (snapshots.cols() > max_snapshots)
    throw ConfigError("pod_baseline: snapshot count exceeds the memory guard");
  PodResult out;
  out.snapshot_count = static_cast<int>(snapshots.cols());
  const auto t0 = std::chrono::steady_clock::now();
  Eigen::BDCSVD<Matrix> svd(snapshots, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.svd_wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  const Vector& sv = svd.singularValues();
  int r = std::min<int>(rank, static_cast<int>(sv.size()));
  while (r > 1 && sv[r - 1] <= 0.0) --r;
  out.basis.B = svd.matrixU().leftCols(r);
  out.basis.lambda = sv.head(r);
  out.basis.V = svd.matrixV().leftCols(r);
  out.basis.snapshot_count = out.snapshot_count;
  return out;
}

} // namespace mmrb
