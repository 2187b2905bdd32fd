#include "mmrb/angular.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "lebedev_tables.hpp"

namespace mmrb {

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt4Pi = 1.0 / std::sqrt(4.0 * kPi);

void push_orbit(const detail::LebedevOrbit& o, std::vector<Vec3>& nodes,
                std::vector<double>& weights) {
  auto add = [&](double x, double y, double z) {
    nodes.push_back({x, y, z});
    weights.push_back(o.w);
  };
  switch (o.code) {
    case 1:
      for (int d = 0; d < 3; ++d)
        for (int s = -1; s <= 1; s += 2) {
          double p[3] = {0, 0, 0};
          p[d] = s;
          add(p[0], p[1], p[2]);
        }
      break;
    case 2: {
      const double a = std::sqrt(0.5);
      for (int d = 0; d < 3; ++d)
        for (int s1 = -1; s1 <= 1; s1 += 2)
          for (int s2 = -1; s2 <= 1; s2 += 2) {
            double p[3];
            p[d] = 0;
            p[(d + 1) % 3] = s1 * a;
            p[(d + 2) % 3] = s2 * a;
            add(p[0], p[1], p[2]);
          }
      break;
    }
    case 3: {
      const double a = std::sqrt(1.0 / 3.0);
      for (int s3 = -1; s3 <= 1; s3 += 2)
        for (int s2 = -1; s2 <= 1; s2 += 2)
          for (int s1 = -1; s1 <= 1; s1 += 2) add(s1 * a, s2 * a, s3 * a);
      break;
    }
    case 4: {
      const double a = o.a;
      const double b = std::sqrt(1.0 - 2.0 * a * a);
      for (int d = 0; d < 3; ++d)
        for (int s3 = -1; s3 <= 1; s3 += 2)
          for (int s2 = -1; s2 <= 1; s2 += 2)
            for (int s1 = -1; s1 <= 1; s1 += 2) {
              double p[3];
              p[d] = s3 * b;
              p[(d + 1) % 3] = s1 * a;
              p[(d + 2) % 3] = s2 * a;
              add(p[0], p[1], p[2]);
            }
      break;
    }
    case 5: {
      const double a = o.a;
      const double b = std::sqrt(1.0 - a * a);
      double c1 = a, c2 = b;
      for (int swap = 0; swap < 2; ++swap) {
        for (int d = 0; d < 3; ++d)
          for (int s2 = -1; s2 <= 1; s2 += 2)
            for (int s1 = -1; s1 <= 1; s1 += 2) {
              double p[3];
              p[d] = 0;
              p[(d + 1) % 3] = s1 * c1;
              p[(d + 2) % 3] = s2 * c2;
              add(p[0], p[1], p[2]);
            }
        std::swap(c1, c2);
      }
      break;
    }
    case 6: {
      const double a = o.a;
      const double b = o.b;
      const double c = std::sqrt(1.0 - a * a - b * b);
      const double tpl[2][5] = {{a, b, c, a, b}, {b, a, c, b, a}};
      for (int rev = 0; rev < 2; ++rev)
        for (int d = 0; d < 3; ++d)
          for (int s3 = -1; s3 <= 1; s3 += 2)
            for (int s2 = -1; s2 <= 1; s2 += 2)
              for (int s1 = -1; s1 <= 1; s1 += 2)
                add(tpl[rev][d] * s1, tpl[rev][d + 1] * s2, tpl[rev][d + 2] * s3);
      break;
    }
    default:
      throw Error("lebedev: unknown orbit code");
  }
}

void to_spherical(const Vec3& v, double& theta, double& phi) {
  const double z = std::clamp(v.z, -1.0, 1.0);
  theta = std::acos(z);
  phi = std::atan2(v.y, v.x);
  if (phi < 0.0) phi += 2.0 * kPi;
}

// Normalized associated Legendre values Pbar_m^l(cos theta) for all degrees
// m <= max_degree and orders 0 <= l <= m, such that
//   Y_{m,0} = Pbar_m^0,  Y_{m,+-l} = sqrt(2) Pbar_m^l * cos/sin(l phi).
// Standard stable recurrence; values stay O(1) up to very high degree.
void normalized_legendre(int max_degree, double ct, double st, Eigen::MatrixXd& p) {
  const int n = max_degree + 1;
  p.setZero(n, n);
  p(0, 0) = kInvSqrt4Pi;
  for (int l = 1; l <= max_degree; ++l)
    p(l, l) = std::sqrt((2.0 * l + 1.0) / (2.0 * l)) * st * p(l - 1, l - 1);
  for (int l = 0; l < max_degree; ++l)
    p(l + 1, l) = std::sqrt(2.0 * l + 3.0) * ct * p(l, l);
  for (int l = 0; l <= max_degree; ++l) {
    for (int m = l + 2; m <= max_degree; ++m) {
      const double a =
          std::sqrt((4.0 * m * m - 1.0) / (static_cast<double>(m) * m - static_cast<double>(l) * l));
      const double b = std::sqrt(((m - 1.0) * (m - 1.0) - static_cast<double>(l) * l) /
                                 (4.0 * (m - 1.0) * (m - 1.0) - 1.0));
      p(m, l) = a * (ct * p(m - 1, l) - b * p(m - 2, l));
    }
  }
}

} // namespace

double AngularQuadrature::moment(const Eigen::VectorXd& samples) const {
  if (samples.size() != weights.size())
    throw std::invalid_argument("discrete moment: one sample per node required");
  return weights.dot(samples);
}

double AngularQuadrature::second_moment(int xi, int eta) const {
  double s = 0.0;
  for (int k = 0; k < size(); ++k) {
    const double c[3] = {nodes[k].x, nodes[k].y, nodes[k].z};
    s += weights[k] * c[xi] * c[eta];
  }
  return s;
}

void AngularQuadrature::check_invariants(double tol) const {
  if (static_cast<Eigen::Index>(nodes.size()) != weights.size())
    throw Error("quadrature: node/weight size mismatch");
  for (const auto& v : nodes) {
    const double r = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    if (std::abs(r - 1.0) > tol) throw Error("quadrature: node off the unit sphere");
  }
  if (weights.minCoeff() < 0.0) throw Error("quadrature: negative weight");
  if (std::abs(weights.sum() - 1.0) > tol) throw Error("quadrature: weights do not sum to 1");
  if (exactness_degree >= 2) {
    for (int xi = 0; xi < 3; ++xi)
      for (int eta = xi; eta < 3; ++eta) {
        const double expect = xi == eta ? 1.0 / 3.0 : 0.0;
        if (std::abs(second_moment(xi, eta) - expect) > tol)
          throw Error("quadrature: second moment violates exactness");
      }
  }
}

const std::vector<int>& lebedev_available() {
  static const std::vector<int> counts = [] {
    std::vector<int> c;
    for (int i = 0; i < detail::kLebedevRuleCount; ++i)
      c.push_back(detail::kLebedevRules[i].n_points);
    return c;
  }();
  return counts;
}

AngularQuadrature lebedev(int points_requested) {
  const detail::LebedevRule* rule = nullptr;
  for (int i = 0; i < detail::kLebedevRuleCount; ++i)
    if (detail::kLebedevRules[i].n_points == points_requested) rule = &detail::kLebedevRules[i];
  if (!rule) {
    std::ostringstream msg;
    msg << "lebedev: no embedded rule with " << points_requested << " points; available:";
    for (int c : lebedev_available()) msg << " " << c;
    throw ConfigError(msg.str());
  }

  AngularQuadrature q;
  std::vector<double> w;
  for (int i = 0; i < rule->n_orbits; ++i) push_orbit(rule->orbits[i], q.nodes, w);
  q.weights = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  q.weights /= q.weights.sum();
  q.exactness_degree = rule->exactness_degree;
  q.provenance = QuadratureProvenance::lebedev_table;
  return q;
}

double real_spherical_harmonic(int m, int l, double theta, double phi) {
  if (m < 0 || l < -m || l > m)
    throw std::invalid_argument("real_spherical_harmonic: order out of range");
  Eigen::MatrixXd p;
  normalized_legendre(m, std::cos(theta), std::sin(theta), p);
  if (l == 0) return p(m, 0);
  const int al = l > 0 ? l : -l;
  const double trig = l > 0 ? std::cos(al * phi) : std::sin(al * phi);
  return std::numbers::sqrt2 * p(m, al) * trig;
}

Eigen::VectorXd real_spherical_harmonics_row(int max_degree, double theta, double phi) {
  Eigen::MatrixXd p;
  normalized_legendre(max_degree, std::cos(theta), std::sin(theta), p);
  const int n = (max_degree + 1) * (max_degree + 1);
  Eigen::VectorXd row(n);
  for (int m = 0; m <= max_degree; ++m) {
    row[m * m + m] = p(m, 0);
    for (int l = 1; l <= m; ++l) {
      const double base = std::numbers::sqrt2 * p(m, l);
      row[m * m + m + l] = base * std::cos(l * phi);
      row[m * m + m - l] = base * std::sin(l * phi);
    }
  }
  return row;
}

LsWeights ls_quadrature_weights(const std::vector<Vec3>& nodes, int degree) {
  const int n = static_cast<int>(nodes.size());
  const int cols = (degree + 1) * (degree + 1);
  if (degree < 3)
    throw std::invalid_argument("ls_quadrature_weights: degree must be >= 3");
  if (cols > n)
    throw std::invalid_argument("ls_quadrature_weights: needs (M+1)^2 <= number of nodes");

  Eigen::MatrixXd I(n, cols);
  for (int i = 0; i < n; ++i) {
    double theta, phi;
    to_spherical(nodes[i], theta, phi);
    I.row(i) = real_spherical_harmonics_row(degree, theta, phi).transpose();
  }

  // w_k = (1/sqrt(4pi)) * pinv(I)_{1,k}; only the first pseudo-inverse row is needed.
  Eigen::BDCSVD<Eigen::MatrixXd> svd(I, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = 1e-12 * sv[0];

  LsWeights out;
  out.weights.setZero(n);
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] <= cutoff) {
      out.full_rank = false;
      continue;
    }
    // pinv(I)_{1,:} = sum_i V_{1,i} / s_i * U_{:,i}^T
    out.weights += (svd.matrixV()(0, i) / sv[i]) * svd.matrixU().col(i);
  }
  out.weights *= kInvSqrt4Pi;
  return out;
}

AngularQuadrature nonneg_reduced_quadrature(const std::vector<Vec3>& new_nodes,
                                            const AngularQuadrature& old_quad,
                                            int m_min, int m_max) {
  const int n = static_cast<int>(new_nodes.size());
  const int n_old = old_quad.size();
  if (m_min < 3) throw std::invalid_argument("nonneg_reduced_quadrature: M_min must be >= 3");
  if (m_max < m_min) throw std::invalid_argument("nonneg_reduced_quadrature: M_max < M_min");
  if ((m_min + 1) * (m_min + 1) > n)
    throw std::invalid_argument("nonneg_reduced_quadrature: too few nodes for M_min");
  if (old_quad.weights.size() > 0 && old_quad.weights.minCoeff() < 0.0)
    throw std::invalid_argument("nonneg_reduced_quadrature: old rule has negative weights");
  if (n < n_old)
    throw std::invalid_argument("nonneg_reduced_quadrature: new node set smaller than old");
  for (int i = 0; i < n_old; ++i) {
    const double d = std::abs(new_nodes[i].x - old_quad.nodes[i].x) +
                     std::abs(new_nodes[i].y - old_quad.nodes[i].y) +
                     std::abs(new_nodes[i].z - old_quad.nodes[i].z);
    if (d > 1e-12)
      throw std::invalid_argument("nonneg_reduced_quadrature: new nodes must extend the old set");
  }

  for (int degree = m_max; degree >= m_min; --degree) {
    if ((degree + 1) * (degree + 1) > n) continue;
    LsWeights ls = ls_quadrature_weights(new_nodes, degree);
    if (!ls.full_rank) continue;
    if (ls.weights.minCoeff() < 0.0) continue;
    AngularQuadrature q;
    q.nodes = new_nodes;
    q.weights = ls.weights / ls.weights.sum();
    q.exactness_degree = degree;
    q.provenance = QuadratureProvenance::reduced_ls;
    return q;
  }

  // Every degree produced a negative weight: keep the old rule, zero-pad additions.
  AngularQuadrature q;
  q.nodes = new_nodes;
  q.weights.setZero(n);
  q.weights.head(n_old) = old_quad.weights;
  q.exactness_degree = old_quad.exactness_degree;
  q.provenance = QuadratureProvenance::fallback_zero_padded;
  return q;
}

namespace {

const char* provenance_name(QuadratureProvenance p) {
  switch (p) {
    case QuadratureProvenance::lebedev_table: return "lebedev_table";
    case QuadratureProvenance::reduced_ls: return "reduced_ls";
    case QuadratureProvenance::fallback_zero_padded: return "fallback_zero_padded";
  }
  return "unknown";
}

QuadratureProvenance provenance_from_name(const std::string& s) {
  if (s == "lebedev_table") return QuadratureProvenance::lebedev_table;
  if (s == "reduced_ls") return QuadratureProvenance::reduced_ls;
  if (s == "fallback_zero_padded") return QuadratureProvenance::fallback_zero_padded;
  throw Error("quadrature file: unknown provenance '" + s + "'");
}

} // namespace

void save_quadrature(std::ostream& os, const AngularQuadrature& quad) {
  os << "# exactness=" << quad.exactness_degree
     << " provenance=" << provenance_name(quad.provenance) << "\n";
  os << std::setprecision(17);
  for (int k = 0; k < quad.size(); ++k)
    os << quad.nodes[k].x << " " << quad.nodes[k].y << " " << quad.nodes[k].z << " "
       << quad.weights[k] << "\n";
}

AngularQuadrature load_quadrature(std::istream& is) {
  AngularQuadrature q;
  std::string line;
  if (!std::getline(is, line) || line.rfind("#", 0) != 0)
    throw Error("quadrature file: missing header line");
  {
    std::istringstream hs(line.substr(1));
    std::string tok;
    while (hs >> tok) {
      if (tok.rfind("exactness=", 0) == 0)
        q.exactness_degree = std::stoi(tok.substr(10));
      else if (tok.rfind("provenance=", 0) == 0)
        q.provenance = provenance_from_name(tok.substr(11));
    }
  }
  std::vector<double> w;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Vec3 v;
    double wk;
    if (!(ls >> v.x >> v.y >> v.z >> wk)) throw Error("quadrature file: malformed node line");
    q.nodes.push_back(v);
    w.push_back(wk);
  }
  q.weights = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  return q;
}

void save_quadrature_file(const std::string& path, const AngularQuadrature& quad) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open for writing: " + path);
  save_quadrature(os, quad);
}

AngularQuadrature load_quadrature_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open for reading: " + path);
  return load_quadrature(is);
}

} // namespace mmrb
