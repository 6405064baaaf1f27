#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nmc/lattice.hpp"

namespace nmc {

/// Effective statistical-mechanics data of the two-time circuit. The bond
/// matrices are the primary representation consumed by the contraction and
/// the oracle; the couplings may carry signed-infinity flags at strong
/// measurement but are never NaN.
struct CircuitParams {
  double t_a = 0.0;
  double t_b = 0.0;

  double beta_j_plus = 0.0;   // 2 atanh(tan t_A tan t_B) while finite
  double beta_j_minus = 0.0;  // -2 atanh(tan t_A cot t_B) while finite
  double beta_h = 0.0;        // 0.5 ln|tan(t_A+t_B) tan(t_A-t_B)|

  Eigen::Matrix2d bond_plus;   // B^{s=+1}(sigma_i, sigma_j), index 0 = up
  Eigen::Matrix2d bond_minus;  // B^{s=-1}

  const Eigen::Matrix2d& bond(int s) const { return s > 0 ? bond_plus : bond_minus; }
  /// Weight as a function of the product u = O_A * O_B (diagonal entry for
  /// u = +1, off-diagonal for u = -1).
  double weight(int s, int u) const { return u > 0 ? bond(s)(0, 0) : bond(s)(0, 1); }
};

/// Couplings and bond matrices from the two evolution times. Angles are
/// radians; the physical window is [0, pi/2] but any finite angle is accepted
/// (the symmetry maps t_A -> -t_A and t_A -> t_A + pi/2 are used in tests).
CircuitParams couplings_from_times(double t_a, double t_b);

/// The gauge-symmetric cut t_B = pi/4 seen as a random-bond Ising model.
struct NishimoriParams {
  double beta = 0.0;    // ln|tan(t_A + pi/4)|, +inf at t_A = pi/4
  double p_flip = 0.0;  // antiferromagnetic-bond probability (1 - sin 2t_A)/2
};
NishimoriParams nishimori_params(double t_a);

/// Measurement-averaged string correlators of the premeasurement state.
/// Undecorated: (cos2tA cos2tB)^n + [closed] (-sin2tA sin2tB)^n.
/// Decorated (site spins at the two open ends): (-sin2tA sin2tB)^n.
/// n = 0 returns 1.
double premeasurement_correlator(double t_a, double t_b, int length, bool closed,
                                 bool decorated);

/// Same, for an explicit bond path on a graph; closedness is inferred from
/// the path endpoints.
double premeasurement_correlator(const LatticeGraph& g, double t_a, double t_b,
                                 const std::vector<int>& path, bool decorated);

/// Endpoints of a bond path (sites covered an odd number of times). Returns
/// an empty vector for a closed loop; throws if the path is not a valid
/// string.
std::vector<int> path_endpoints(const LatticeGraph& g, const std::vector<int>& path);

}  // namespace nmc
