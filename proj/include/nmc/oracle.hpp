#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nmc/lattice.hpp"
#include "nmc/model.hpp"

namespace nmc {

/// Ancilla configuration, one entry of +1 / -1 per bond.
using SpinConfig = std::vector<std::int8_t>;

/// Bitmask encoding of a configuration: bit b set <=> s_b = -1.
std::uint32_t config_to_mask(const SpinConfig& s);
SpinConfig mask_to_config(std::uint32_t mask, int n_bonds);

/// Numerically stable deterministic sum (pairwise reduction, independent of
/// thread count).
double pairwise_sum(const std::vector<double>& v);

/// Exhaustively enumerated measurement ensemble on a guarded (<= 24 spin)
/// lattice. Indexed by the configuration bitmask.
struct ExactEnsemble {
  std::vector<double> prob;  // normalized p_s
  std::vector<double> corr;  // <sigma_corner sigma_center>_s
  std::vector<double> z;     // raw partition sums, common scale
  double z_total = 0.0;
};

/// Raw partition sum Z_s for a single outcome configuration (no pinning).
double partition_sum(const LatticeGraph& g, const CircuitParams& p, const SpinConfig& s);

/// <sigma_corner sigma_center>_s under the classical ensemble of Z_s.
double pair_correlation(const LatticeGraph& g, const CircuitParams& p, const SpinConfig& s);

/// Full enumeration over all 2^bonds outcomes. `parallel` chooses the OpenMP
/// kernel; both kernels produce bit-identical results.
ExactEnsemble enumerate_ensemble(const LatticeGraph& g, const CircuitParams& p,
                                 bool parallel = true);

/// Edwards-Anderson order parameter sum_s p_s <sigma_0 sigma_c>_s^2 by
/// enumeration.
double exact_ea(const LatticeGraph& g, const CircuitParams& p, bool parallel = true);

/// Closed forms for the open chain with L bonds (L even for the central-site
/// construction).
double oned_q(double t_a, double t_b, int L);
double oned_bond_prob(double t_a, double t_b);

/// Premeasurement expectation <psi| prod_{b in bonds} s_b^x (sigma_i sigma_j) |psi>
/// by enumeration over site spins; the optional decoration inserts sigma^z at
/// the two open ends of the string.
double premeasurement_expectation(const LatticeGraph& g, double t_a, double t_b,
                                  const std::vector<int>& bonds, bool decorated);

enum class PremeasObservable { single_s, string, plaquette, decorated_string, cube_product };

/// Named observables of the spec surface; `path` selects the bond list where
/// applicable (defaults: first bond / first plaquette / designated string).
double premeasurement_check(const LatticeGraph& g, const CircuitParams& p,
                            PremeasObservable obs, const std::vector<int>& path = {});

struct NishimoriCheck {
  std::string name;
  double max_dev = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct NishimoriReport {
  double t_a = 0.0, t_b = 0.0;
  std::vector<NishimoriCheck> checks;
  bool all_pass = false;
  std::string to_json() const;
};

/// Gauge-symmetric-line identities on a guarded lattice:
///  (a) p_s proportional to the RBIM partition function at
///      beta = ln|tan(t_A + pi/4)|          (only run at t_B = pi/4)
///  (b) gauge invariance p_s = p_{gauge(s)} for every gauge transform
///  (c) EA identity [<ss>^2] = gauge-fixed [<ss>]' at flip rate p_flip
///      (only run at t_B = pi/4)
/// Off the line only (b) runs, and is expected to fail.
NishimoriReport verify_nishimori(const LatticeGraph& g, double t_a,
                                 double t_b = 1.57079632679489661923 / 2.0);

/// Strong-measurement identity of the 3D two-body gate protocol: at
/// t_A = t_B = pi/4 the postmeasurement populations are proportional to the
/// stabilizer projector onto W_q = s_q for every face (uniform weight on the
/// eigenspace, zero off it). Returns the maximum deviation over all outcome
/// assignments.
double strong_limit_projector_deviation(const LatticeGraph& g);

}  // namespace nmc
