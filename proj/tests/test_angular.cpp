#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mmrb/angular.hpp"

using namespace mmrb;

namespace {

constexpr double kPi = std::numbers::pi;
const double kY00 = 1.0 / std::sqrt(4.0 * kPi);

double harmonic_at(const Vec3& v, int m, int l) {
  const double theta = std::acos(std::clamp(v.z, -1.0, 1.0));
  double phi = std::atan2(v.y, v.x);
  if (phi < 0) phi += 2 * kPi;
  return real_spherical_harmonic(m, l, theta, phi);
}

double harmonic_moment(const AngularQuadrature& q, int m, int l) {
  double s = 0.0;
  for (int k = 0; k < q.size(); ++k) s += q.weights[k] * harmonic_at(q.nodes[k], m, l);
  return s;
}

Vec3 unit(double x, double y, double z) {
  const double r = std::sqrt(x * x + y * y + z * z);
  return {x / r, y / r, z / r};
}

} // namespace

TEST_CASE("embedded lebedev tables satisfy the moment requirements") {
  for (int n : {6, 26, 50, 110, 194, 302, 590, 2030}) {
    auto q = lebedev(n);
    REQUIRE(q.size() == n);
    q.check_invariants(1e-12);
    CHECK(q.moment(Eigen::VectorXd::Ones(n)) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(q.second_moment(0, 0) - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(q.second_moment(0, 1)) < 1e-12);
  }
  CHECK_THROWS_AS(lebedev(42), ConfigError);
}

TEST_CASE("6-point rule is the octahedron with uniform weights") {
  auto q = lebedev(6);
  for (int k = 0; k < 6; ++k) {
    CHECK(q.weights[k] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    int n_unit = 0;
    for (double c : {q.nodes[k].x, q.nodes[k].y, q.nodes[k].z})
      if (std::abs(std::abs(c) - 1.0) < 1e-15) ++n_unit;
    CHECK(n_unit == 1);
  }
}

TEST_CASE("590-point rule annihilates a high harmonic") {
  auto q = lebedev(590);
  CHECK(std::abs(harmonic_moment(q, 5, 3)) < 1e-12);
}

TEST_CASE("real spherical harmonic normalization") {
  CHECK(real_spherical_harmonic(0, 0, 0.7, 1.3) == doctest::Approx(0.2820947918).epsilon(1e-9));
  CHECK(real_spherical_harmonic(1, 0, 0.0, 0.0) ==
        doctest::Approx(std::sqrt(3.0 / (4.0 * kPi))).epsilon(1e-14));
  CHECK_THROWS_AS(real_spherical_harmonic(2, 3, 0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(real_spherical_harmonic(-1, 0, 0.1, 0.1), std::invalid_argument);

  // flat layout matches the scalar evaluator
  auto row = real_spherical_harmonics_row(4, 1.1, 2.3);
  for (int m = 0; m <= 4; ++m)
    for (int l = -m; l <= m; ++l)
      CHECK(row[harmonic_flat_index(m, l) - 1] ==
            doctest::Approx(real_spherical_harmonic(m, l, 1.1, 2.3)).epsilon(1e-13));
}

TEST_CASE("discrete orthonormality on the 110-point rule up to degree 5") {
  auto q = lebedev(110);
  for (int m = 0; m <= 5; ++m)
    for (int l = -m; l <= m; ++l)
      for (int m2 = 0; m2 <= 5; ++m2)
        for (int l2 = -m2; l2 <= m2; ++l2) {
          double s = 0.0;
          for (int k = 0; k < q.size(); ++k)
            s += q.weights[k] * harmonic_at(q.nodes[k], m, l) * harmonic_at(q.nodes[k], m2, l2);
          const double expect = (m == m2 && l == l2) ? 1.0 : 0.0;
          CHECK(std::abs(4.0 * kPi * s - expect) < 1e-12);
        }
}

TEST_CASE("discrete moments") {
  auto q = lebedev(26);
  CHECK(q.moment(Eigen::VectorXd::Constant(26, 3.25)) == doctest::Approx(3.25).epsilon(1e-14));
  Eigen::VectorXd vx(26), vx2(26);
  for (int k = 0; k < 26; ++k) {
    vx[k] = q.nodes[k].x;
    vx2[k] = q.nodes[k].x * q.nodes[k].x;
  }
  CHECK(std::abs(q.moment(vx)) < 1e-15);
  CHECK(q.moment(vx2) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(q.moment(Eigen::VectorXd::Ones(25)), std::invalid_argument);
}

TEST_CASE("least-squares weights reproduce harmonic integrals") {
  auto base = lebedev(50);
  auto ls = ls_quadrature_weights(base.nodes, 3);
  REQUIRE(ls.full_rank);
  AngularQuadrature q;
  q.nodes = base.nodes;
  q.weights = ls.weights;
  CHECK(std::abs(harmonic_moment(q, 0, 0) - kY00) < 1e-12);
  for (int m = 1; m <= 3; ++m)
    for (int l = -m; l <= m; ++l) CHECK(std::abs(harmonic_moment(q, m, l)) < 1e-10);

  auto leb26 = lebedev(26);
  auto ls26 = ls_quadrature_weights(leb26.nodes, 3);
  AngularQuadrature q26;
  q26.nodes = leb26.nodes;
  q26.weights = ls26.weights;
  CHECK(std::abs(q26.second_moment(0, 0) - 1.0 / 3.0) < 1e-12);

  CHECK_THROWS_AS(ls_quadrature_weights(lebedev(6).nodes, 3), std::invalid_argument);
  CHECK_THROWS_AS(ls_quadrature_weights(base.nodes, 2), std::invalid_argument);
}

TEST_CASE("weights depend only on the node list") {
  auto base = lebedev(26);
  auto nodes = base.nodes;
  auto w1 = ls_quadrature_weights(nodes, 4).weights;
  std::vector<Vec3> perm(nodes.rbegin(), nodes.rend());
  auto wp = ls_quadrature_weights(perm, 4).weights;
  for (int k = 0; k < 26; ++k)
    CHECK(w1[k] == doctest::Approx(wp[25 - k]).epsilon(1e-12));
  auto w2 = ls_quadrature_weights(nodes, 4).weights;
  CHECK((w1 - w2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("nonneg reduced quadrature keeps a valid rule without additions") {
  auto old = lebedev(26);
  auto q = nonneg_reduced_quadrature(old.nodes, old, 3, 7);
  CHECK(q.provenance == QuadratureProvenance::reduced_ls);
  q.check_invariants(1e-12);
}

TEST_CASE("nonneg reduced quadrature certifies an augmented rule") {
  auto old = lebedev(26);
  std::mt19937 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  auto nodes = old.nodes;
  const Vec3 v = unit(g(rng), g(rng), g(rng));
  nodes.push_back(v);
  nodes.push_back({-v.x, -v.y, -v.z});
  auto q = nonneg_reduced_quadrature(nodes, old, 3, 7);
  REQUIRE(q.provenance == QuadratureProvenance::reduced_ls);
  CHECK(q.exactness_degree >= 3);
  CHECK(q.exactness_degree <= 7);
  q.check_invariants(1e-12);
  CHECK(std::abs(harmonic_moment(q, 0, 0) - kY00) < 1e-12);
  for (int m = 1; m <= q.exactness_degree; ++m)
    for (int l = -m; l <= m; ++l) CHECK(std::abs(harmonic_moment(q, m, l)) < 1e-9);
}

TEST_CASE("clustered node sets force the zero-padded fallback") {
  // A previous greedy iteration may leave a badly distributed rule; a polar-cap
  // concentration of antipodal pairs makes the LS weights negative at every
  // feasible degree. The old rule only has to carry non-negative weights.
  std::mt19937 rng(0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  AngularQuadrature old;
  for (int k = 0; k < 9; ++k) {
    const double th = 0.4 * std::sqrt(u(rng));
    const double ph = 2 * kPi * u(rng);
    Vec3 v = {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
    old.nodes.push_back(v);
    old.nodes.push_back({-v.x, -v.y, -v.z});
  }
  old.weights = Eigen::VectorXd::Constant(old.size(), 1.0 / old.size());
  old.exactness_degree = 0;

  auto nodes = old.nodes;
  const Vec3 v = unit(0.05, -0.03, 1.0);
  nodes.push_back(v);
  nodes.push_back({-v.x, -v.y, -v.z});

  bool every_feasible_degree_fails = true;
  for (int m = 3; m <= 7; ++m) {
    if ((m + 1) * (m + 1) > static_cast<int>(nodes.size())) continue;
    auto ls = ls_quadrature_weights(nodes, m);
    if (ls.full_rank && ls.weights.minCoeff() >= 0.0) every_feasible_degree_fails = false;
  }
  REQUIRE(every_feasible_degree_fails); // the scenario must actually be adversarial

  auto q = nonneg_reduced_quadrature(nodes, old, 3, 7);
  REQUIRE(q.provenance == QuadratureProvenance::fallback_zero_padded);
  CHECK(q.exactness_degree == old.exactness_degree);
  // previously assigned weights are untouched, additions get zero
  for (int k = 0; k < old.size(); ++k) CHECK(q.weights[k] == old.weights[k]);
  for (int k = old.size(); k < q.size(); ++k) CHECK(q.weights[k] == 0.0);
  q.check_invariants(1e-12);
}

TEST_CASE("fuzzed augmentations always yield valid rules") {
  std::mt19937 rng(20240811);
  std::normal_distribution<double> g(0.0, 1.0);
  auto q = lebedev(26);
  for (int iter = 0; iter < 100; ++iter) {
    auto nodes = q.nodes;
    Vec3 v;
    if (iter % 5 == 4) {
      // near-duplicate of an existing node, stressing the fallback path
      std::uniform_int_distribution<int> pick(0, static_cast<int>(nodes.size()) - 1);
      const Vec3 b = nodes[pick(rng)];
      v = unit(b.x + 1e-5 * g(rng), b.y + 1e-5 * g(rng), b.z + 1e-5 * g(rng));
    } else {
      v = unit(g(rng), g(rng), g(rng));
    }
    nodes.push_back(v);
    nodes.push_back({-v.x, -v.y, -v.z});
    q = nonneg_reduced_quadrature(nodes, q, 3, 7);
    q.check_invariants(1e-12);
  }
}

TEST_CASE("quadrature text round trip") {
  auto old = lebedev(26);
  auto nodes = old.nodes;
  nodes.push_back(unit(0.3, -0.4, 0.5));
  nodes.push_back(unit(-0.3, 0.4, -0.5));
  auto q = nonneg_reduced_quadrature(nodes, old, 3, 7);

  std::stringstream ss;
  save_quadrature(ss, q);
  auto r = load_quadrature(ss);
  REQUIRE(r.size() == q.size());
  CHECK(r.exactness_degree == q.exactness_degree);
  CHECK(r.provenance == q.provenance);
  for (int k = 0; k < q.size(); ++k) {
    CHECK(r.nodes[k].x == q.nodes[k].x);
    CHECK(r.weights[k] == q.weights[k]);
  }
}
