#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmrb/errors.hpp"

namespace mmrb {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

enum class QuadratureProvenance { lebedev_table, reduced_ls, fallback_zero_padded };

/// Quadrature rule on the unit sphere for the normalized angular average
/// <f> = (1/4pi) * integral of f. Weights are non-negative and sum to 1;
/// exactness_degree is the certified polynomial exactness degree.
struct AngularQuadrature {
  std::vector<Vec3> nodes;
  Eigen::VectorXd weights;
  int exactness_degree = 0;
  QuadratureProvenance provenance = QuadratureProvenance::lebedev_table;

  int size() const { return static_cast<int>(nodes.size()); }

  /// Discrete moment <f>_h = sum_j w_j f_j; f has one sample per node.
  double moment(const Eigen::VectorXd& samples_per_node) const;

  /// <v_xi v_eta>_h for xi, eta in {0,1,2} = {x,y,z}.
  double second_moment(int xi, int eta) const;

  /// Validates the struct invariants (unit nodes, non-negative weights,
  /// unit weight sum, Eq.(8)-style second moments when degree >= 2).
  void check_invariants(double tol = 1e-12) const;
};

/// Lebedev rules embedded for point counts {6, 26, 50, 110, 194, 302, 590, 2030}.
/// Weights are normalized to sum exactly to 1.
AngularQuadrature lebedev(int points_requested);

/// Point counts available to lebedev().
const std::vector<int>& lebedev_available();

/// Real spherical harmonic of degree m >= 0 and order l in [-m, m],
/// orthonormal in L2 on the sphere with surface measure: integral of Y^2 equals 1,
/// Y_{0,0} = 1/sqrt(4pi). theta is the polar angle from +z, phi the azimuth from +x.
double real_spherical_harmonic(int m, int l, double theta, double phi);

/// All harmonics of degree <= max_degree at one node, laid out with the flat
/// index j = m^2 + l + m (zero-based; the row of the least-squares matrix).
Eigen::VectorXd real_spherical_harmonics_row(int max_degree, double theta, double phi);

/// Flat index of (m, l), one-based as in j = m^2 + l + m + 1.
inline int harmonic_flat_index(int m, int l) {
  if (m < 0 || l < -m || l > m)
    throw std::invalid_argument("harmonic_flat_index: order out of range");
  return m * m + l + m + 1;
}

struct LsWeights {
  Eigen::VectorXd weights;
  bool full_rank = true; // exactness certified only when the LS matrix has full column rank
};

/// Interpolatory least-squares weights w_k = (1/sqrt(4pi)) * pinv(I)_{1,k}
/// where I_{ij} = Y_{ml}(theta_i, phi_i), j = m^2+l+m+1. Exact to degree M
/// whenever I has full column rank. Requires (M+1)^2 <= #nodes and M >= 3.
LsWeights ls_quadrature_weights(const std::vector<Vec3>& nodes, int degree);

/// Iterative non-negative-weight construction: tries degrees M = m_max down
/// to m_min through ls_quadrature_weights and returns the first rule with all
/// weights non-negative (provenance reduced_ls). If every degree fails, the
/// old rule's weights are kept and newly appended nodes get weight zero
/// (provenance fallback_zero_padded, exactness inherited from old_quad).
/// new_nodes must extend old_quad.nodes as a prefix.
AngularQuadrature nonneg_reduced_quadrature(const std::vector<Vec3>& new_nodes,
                                            const AngularQuadrature& old_quad,
                                            int m_min = 3, int m_max = 7);

/// Plain-text round trip: header "# exactness=M provenance=..." then one
/// node per line "vx vy vz w" in full precision.
void save_quadrature(std::ostream& os, const AngularQuadrature& quad);
AngularQuadrature load_quadrature(std::istream& is);
void save_quadrature_file(const std::string& path, const AngularQuadrature& quad);
AngularQuadrature load_quadrature_file(const std::string& path);

} // namespace mmrb
