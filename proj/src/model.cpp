#include "nmc/model.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace nmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log of a ratio of two nonnegative weights, as a signed-infinity flag when
// one side vanishes.
double log_ratio(double num, double den) {
  if (num == 0.0 && den == 0.0) return 0.0;
  if (den == 0.0) return kInf;
  if (num == 0.0) return -kInf;
  return std::log(num / den);
}

}  // namespace

CircuitParams couplings_from_times(double t_a, double t_b) {
  if (!std::isfinite(t_a) || !std::isfinite(t_b))
    throw std::invalid_argument("evolution times must be finite");
  CircuitParams p;
  p.t_a = t_a;
  p.t_b = t_b;

  // Angles hitting pi/2 multiples leave O(1e-33) residue in the squared
  // trig entries; snap those to exact zero so projective measurement points
  // behave as true projectors.
  auto snap = [](double x) { return std::abs(x) < 1e-30 ? 0.0 : x; };
  const double cp = std::cos(t_a + t_b), cm = std::cos(t_a - t_b);
  const double sp = std::sin(t_a + t_b), sm = std::sin(t_a - t_b);
  p.bond_plus << snap(cp * cp), snap(cm * cm), snap(cm * cm), snap(cp * cp);
  p.bond_minus << snap(sp * sp), snap(sm * sm), snap(sm * sm), snap(sp * sp);

  // Couplings from the matrix elements themselves; this reduces to
  // tanh(beta J_+/2) = tan tA tan tB etc. in the physical window.
  p.beta_j_plus = 0.5 * log_ratio(p.bond_plus(0, 1), p.bond_plus(0, 0));
  p.beta_j_minus = 0.5 * log_ratio(p.bond_minus(0, 1), p.bond_minus(0, 0));
  p.beta_h = 0.25 * log_ratio(p.bond_minus(0, 0) * p.bond_minus(0, 1),
                              p.bond_plus(0, 0) * p.bond_plus(0, 1));
  return p;
}

NishimoriParams nishimori_params(double t_a) {
  if (t_a < 0.0 || t_a > M_PI / 4 + 1e-12)
    throw std::invalid_argument("nishimori_params expects t_A in [0, pi/4]");
  NishimoriParams n;
  const double s2 = std::sin(2.0 * t_a);
  n.p_flip = 0.5 * (1.0 - s2);
  n.beta = (s2 >= 1.0) ? kInf : std::atanh(s2);
  return n;
}

double premeasurement_correlator(double t_a, double t_b, int length, bool closed,
                                 bool decorated) {
  if (length < 0) throw std::invalid_argument("negative string length");
  if (length == 0) return 1.0;
  const double c = std::cos(2 * t_a) * std::cos(2 * t_b);
  const double s = -std::sin(2 * t_a) * std::sin(2 * t_b);
  if (decorated && !closed) return std::pow(s, length);
  double value = std::pow(c, length);
  if (closed) value += std::pow(s, length);
  return value;
}

std::vector<int> path_endpoints(const LatticeGraph& g, const std::vector<int>& path) {
  std::map<int, int> mult;
  for (int b : path) {
    if (b < 0 || b >= g.n_bonds()) throw std::invalid_argument("bad bond index in path");
    const Bond& bond = g.bonds[b];
    if (bond.a_sites.size() != 1 || bond.b_sites.size() != 1)
      throw std::invalid_argument("string paths need two-site bonds");
    mult[bond.site_i()] += 1;
    mult[bond.site_j()] += 1;
  }
  std::vector<int> ends;
  for (auto [site, count] : mult)
    if (count % 2 == 1) ends.push_back(site);
  if (!ends.empty() && ends.size() != 2)
    throw std::invalid_argument("bond list is not a single string");
  return ends;
}

double premeasurement_correlator(const LatticeGraph& g, double t_a, double t_b,
                                 const std::vector<int>& path, bool decorated) {
  const bool closed = path_endpoints(g, path).empty();
  return premeasurement_correlator(t_a, t_b, static_cast<int>(path.size()), closed,
                                   decorated);
}

}  // namespace nmc
