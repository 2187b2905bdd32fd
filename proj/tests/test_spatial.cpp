#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mmrb/dg_operators.hpp"
#include "mmrb/mesh.hpp"

using namespace mmrb;

namespace {

DgOperators unit_ops(int nx, int ny, BoundaryCondition bc,
                     double x0 = 0.0, double x1 = 1.0, double y0 = 0.0, double y1 = 1.0) {
  auto mesh = build_mesh(x0, x1, y0, y1, nx, ny);
  auto one = [](double, double) { return 1.0; };
  auto zero = [](double, double) { return 0.0; };
  return assemble_operators(mesh, one, zero, bc, 3.0, 3.0);
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("build_mesh basic quantities") {
  auto m = build_mesh(0, 2, 0, 2, 80, 80);
  CHECK(m.n_dof == 6400);
  CHECK(m.h == doctest::Approx(0.025).epsilon(1e-14));

  auto single = build_mesh(0, 1, 0, 1, 1, 1);
  CHECK(single.n_dof == 1);
  CHECK(single.h == doctest::Approx(1.0));

  auto rect = build_mesh(-1, 1, -1, 1, 4, 2);
  CHECK(rect.n_dof == 8);
  CHECK(rect.h == doctest::Approx(0.5));

  CHECK_THROWS_AS(build_mesh(0, 0, 0, 1, 2, 2), ConfigError);
  CHECK_THROWS_AS(build_mesh(0, 1, 0, 1, 0, 2), ConfigError);
}

TEST_CASE("single cell vacuum operators reduce to boundary traces") {
  auto ops = unit_ops(1, 1, BoundaryCondition::vacuum);
  Eigen::MatrixXd dxm(ops.dxm), dxp(ops.dxp);
  // minus side keeps the interior trace at the right face only
  CHECK(dxm(0, 0) == doctest::Approx(1.0));
  CHECK(dxp(0, 0) == doctest::Approx(-1.0));
  CHECK(max_abs(dxp + dxm.transpose()) < 1e-14);
}

TEST_CASE("transpose duality for both boundary types up to 8x8") {
  for (auto bc : {BoundaryCondition::vacuum, BoundaryCondition::periodic}) {
    for (int n : {2, 3, 5, 8}) {
      auto ops = unit_ops(n, n, bc, 0, 1.3, 0, 0.7);
      CHECK(max_abs(Eigen::MatrixXd(ops.dxp) + Eigen::MatrixXd(ops.dxm).transpose()) < 1e-14);
      CHECK(max_abs(Eigen::MatrixXd(ops.dyp) + Eigen::MatrixXd(ops.dym).transpose()) < 1e-14);
    }
  }
}

TEST_CASE("periodic derivative of a constant vanishes") {
  auto ops = unit_ops(4, 4, BoundaryCondition::periodic);
  Eigen::VectorXd u = Eigen::VectorXd::Ones(16);
  CHECK((ops.dxm * u).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((ops.dxp * u).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((ops.dym * u).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((ops.dyp * u).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("hand-assembled 4x4 stencil matches dxm") {
  auto ops = unit_ops(4, 4, BoundaryCondition::vacuum);
  const auto& m = ops.mesh;
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(16, 16);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) {
      expect(m.index(i, j), m.index(i, j)) += m.dy;
      if (i > 0) expect(m.index(i, j), m.index(i - 1, j)) -= m.dy;
    }
  CHECK(max_abs(Eigen::MatrixXd(ops.dxm) - expect) < 1e-15);
}

TEST_CASE("djump definition and positive semidefiniteness") {
  for (auto bc : {BoundaryCondition::vacuum, BoundaryCondition::periodic}) {
    auto mesh = build_mesh(0, 1, 0, 1, 8, 8);
    auto one = [](double, double) { return 1.0; };
    auto ops = assemble_operators(mesh, one, one, bc, 2.0, 0.5);
    Eigen::MatrixXd jump(ops.djump);
    Eigen::MatrixXd expect =
        2.0 * (Eigen::MatrixXd(ops.dxm) - Eigen::MatrixXd(ops.dxp)) +
        0.5 * (Eigen::MatrixXd(ops.dym) - Eigen::MatrixXd(ops.dyp));
    CHECK(max_abs(jump - expect) < 1e-15);
    CHECK(max_abs(jump - jump.transpose()) < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jump);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }
}

TEST_CASE("upwind selector follows component signs") {
  auto ops = unit_ops(3, 3, BoundaryCondition::vacuum);
  CHECK(max_abs(Eigen::MatrixXd(ops.upwind_derivative(0.0, 0.0))) == 0.0);

  Eigen::MatrixXd up(ops.upwind_derivative(1.0, -1.0));
  Eigen::MatrixXd expect = Eigen::MatrixXd(ops.dxm) - Eigen::MatrixXd(ops.dyp);
  CHECK(max_abs(up - expect) < 1e-15);

  Eigen::MatrixXd up2(ops.upwind_derivative(-0.3, 0.0));
  CHECK(max_abs(up2 - (-0.3) * Eigen::MatrixXd(ops.dxp)) < 1e-15);

  // action helper agrees with the assembled matrix
  Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(9, -1.0, 2.0);
  Eigen::VectorXd out;
  ops.apply_upwind(0.7, -0.2, u, out);
  CHECK((out - ops.upwind_derivative(0.7, -0.2) * u).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("first-order consistency of dxm on a smooth field") {
  const double pi = std::numbers::pi;
  std::vector<double> errs;
  // sin(pi x) cos(pi y) is periodic on [0,2]^2; h = 1/8, 1/16, 1/32
  for (int n : {16, 32, 64}) {
    auto ops = unit_ops(n, n, BoundaryCondition::periodic, 0, 2, 0, 2);
    const auto& m = ops.mesh;
    Eigen::VectorXd u(m.n_dof), dudx(m.n_dof);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double x = m.center_x(i), y = m.center_y(j);
        u[m.index(i, j)] = std::sin(pi * x) * std::cos(pi * y);
        dudx[m.index(i, j)] = pi * std::cos(pi * x) * std::cos(pi * y);
      }
    Eigen::VectorXd approx = ops.dxm * u;
    Eigen::VectorXd target = ops.mass.asDiagonal() * dudx;
    errs.push_back((approx - target).norm() / target.norm());
  }
  const double order1 = std::log2(errs[0] / errs[1]);
  const double order2 = std::log2(errs[1] / errs[2]);
  CHECK(order1 > 0.9);
  CHECK(order2 > 0.9);
}

TEST_CASE("assembly rejects invalid inputs") {
  auto mesh = build_mesh(0, 1, 0, 1, 2, 2);
  auto one = [](double, double) { return 1.0; };
  auto neg = [](double, double) { return -0.5; };
  CHECK_THROWS_AS(assemble_operators(mesh, neg, one, BoundaryCondition::vacuum, 3, 3), ModelError);
  CHECK_THROWS_AS(assemble_operators(mesh, one, one, BoundaryCondition::vacuum, 0.0, 3),
                  ConfigError);
  CHECK_THROWS_AS(assemble_operators(mesh, one, one, BoundaryCondition::vacuum, 3, 3, 1),
                  SchemeError);
}
