#include "nmc/oracle.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "json.hpp"

namespace nmc {

namespace {

constexpr int kSpinGuard = 24;
constexpr double kPi = 3.14159265358979323846;

void check_guard(const LatticeGraph& g) {
  if (g.total_spins() > kSpinGuard)
    throw std::invalid_argument("enumeration guard: lattice exceeds 24 spins");
}

// Per-bond site masks for the parity products O_A, O_B over a site bitmask.
struct BondMasks {
  std::vector<std::uint32_t> all;  // union of both groups: sign of u = O_A O_B
  std::vector<std::uint32_t> grp_a, grp_b;
};

BondMasks bond_masks(const LatticeGraph& g) {
  BondMasks m;
  m.all.resize(g.n_bonds());
  m.grp_a.resize(g.n_bonds());
  m.grp_b.resize(g.n_bonds());
  for (const Bond& b : g.bonds) {
    std::uint32_t ma = 0, mb = 0;
    for (int s : b.a_sites) ma |= 1u << s;
    for (int s : b.b_sites) mb |= 1u << s;
    m.grp_a[b.index] = ma;
    m.grp_b[b.index] = mb;
    m.all[b.index] = ma ^ mb;
  }
  return m;
}

inline int parity_sign(std::uint32_t x) { return (std::popcount(x) & 1) ? -1 : +1; }

double pairwise_sum_impl(const double* v, std::size_t n) {
  if (n <= 8) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += v[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_impl(v, half) + pairwise_sum_impl(v + half, n - half);
}

// Z and the corner-center correlation numerator for one outcome mask.
void sums_for_mask(const LatticeGraph& g, const BondMasks& masks,
                   const std::vector<double>& w_plus_mask,  // (w(u=+1), w(u=-1)) per bond,
                   const std::vector<double>& w_minus_mask, // for s=+1 and s=-1
                   std::uint32_t s_mask, double* z_out, double* num_out) {
  const int nb = g.n_bonds();
  const int ns = g.n_sites();
  const std::uint32_t corr_mask =
      (1u << g.pinned_corner) ^ (1u << g.central_site);
  double z = 0.0, num = 0.0;
  for (std::uint32_t sig = 0; sig < (1u << ns); ++sig) {
    double w = 1.0;
    for (int b = 0; b < nb; ++b) {
      const int u = parity_sign(sig & masks.all[b]);
      const bool flipped = (s_mask >> b) & 1u;
      const double* tab = flipped ? w_minus_mask.data() : w_plus_mask.data();
      w *= tab[2 * b + (u > 0 ? 0 : 1)];
    }
    z += w;
    num += w * parity_sign(sig & corr_mask);
  }
  *z_out = z;
  *num_out = num;
}

struct WeightTables {
  std::vector<double> plus, minus;  // 2 entries per bond: u=+1, u=-1
};

WeightTables weight_tables(const LatticeGraph& g, const CircuitParams& p) {
  WeightTables t;
  t.plus.resize(2 * g.n_bonds());
  t.minus.resize(2 * g.n_bonds());
  for (int b = 0; b < g.n_bonds(); ++b) {
    t.plus[2 * b] = p.weight(+1, +1);
    t.plus[2 * b + 1] = p.weight(+1, -1);
    t.minus[2 * b] = p.weight(-1, +1);
    t.minus[2 * b + 1] = p.weight(-1, -1);
  }
  return t;
}

}  // namespace

std::uint32_t config_to_mask(const SpinConfig& s) {
  std::uint32_t m = 0;
  for (std::size_t b = 0; b < s.size(); ++b)
    if (s[b] < 0) m |= 1u << b;
  return m;
}

SpinConfig mask_to_config(std::uint32_t mask, int n_bonds) {
  SpinConfig s(n_bonds, +1);
  for (int b = 0; b < n_bonds; ++b)
    if ((mask >> b) & 1u) s[b] = -1;
  return s;
}

double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum_impl(v.data(), v.size());
}

double partition_sum(const LatticeGraph& g, const CircuitParams& p, const SpinConfig& s) {
  check_guard(g);
  const BondMasks masks = bond_masks(g);
  const WeightTables tabs = weight_tables(g, p);
  double z, num;
  sums_for_mask(g, masks, tabs.plus, tabs.minus, config_to_mask(s), &z, &num);
  return z;
}

double pair_correlation(const LatticeGraph& g, const CircuitParams& p,
                        const SpinConfig& s) {
  check_guard(g);
  const BondMasks masks = bond_masks(g);
  const WeightTables tabs = weight_tables(g, p);
  double z, num;
  sums_for_mask(g, masks, tabs.plus, tabs.minus, config_to_mask(s), &z, &num);
  return z > 0.0 ? num / z : 0.0;
}

ExactEnsemble enumerate_ensemble(const LatticeGraph& g, const CircuitParams& p,
                                 bool parallel) {
  check_guard(g);
  const BondMasks masks = bond_masks(g);
  const WeightTables tabs = weight_tables(g, p);
  const std::size_t n_conf = std::size_t{1} << g.n_bonds();

  ExactEnsemble e;
  e.z.resize(n_conf);
  e.corr.resize(n_conf);

#pragma omp parallel for schedule(static) if (parallel)
  for (long long m = 0; m < static_cast<long long>(n_conf); ++m) {
    double z, num;
    sums_for_mask(g, masks, tabs.plus, tabs.minus, static_cast<std::uint32_t>(m), &z,
                  &num);
    e.z[m] = z;
    e.corr[m] = z > 0.0 ? num / z : 0.0;
  }

  e.z_total = pairwise_sum(e.z);
  if (!(e.z_total > 0.0)) throw std::runtime_error("degenerate ensemble: Z total = 0");
  e.prob.resize(n_conf);
  for (std::size_t m = 0; m < n_conf; ++m) e.prob[m] = e.z[m] / e.z_total;
  return e;
}

double exact_ea(const LatticeGraph& g, const CircuitParams& p, bool parallel) {
  const ExactEnsemble e = enumerate_ensemble(g, p, parallel);
  std::vector<double> terms(e.prob.size());
  for (std::size_t m = 0; m < e.prob.size(); ++m)
    terms[m] = e.prob[m] * e.corr[m] * e.corr[m];
  return pairwise_sum(terms);
}

double oned_bond_prob(double t_a, double t_b) {
  return 0.5 * (1.0 + std::cos(2 * t_a) * std::cos(2 * t_b));
}

double oned_q(double t_a, double t_b, int L) {
  if (L < 2 || L % 2 != 0)
    throw std::invalid_argument("oned_q needs an even number of bonds");
  const double s2 = std::sin(2 * t_a) * std::sin(2 * t_b);
  const double c2 = std::cos(2 * t_a) * std::cos(2 * t_b);
  const double denom = 1.0 - c2 * c2;
  if (denom <= 0.0) return (s2 != 0.0 || c2 * c2 >= 1.0) ? 1.0 : 0.0;
  if (s2 == 0.0) return 0.0;
  return std::pow(s2 * s2 / denom, L / 2);
}

double premeasurement_expectation(const LatticeGraph& g, double t_a, double t_b,
                                  const std::vector<int>& bonds, bool decorated) {
  check_guard(g);
  const BondMasks masks = bond_masks(g);
  std::uint32_t corr_mask = 0;
  if (decorated) {
    std::vector<int> ends = path_endpoints(g, bonds);
    if (ends.size() != 2)
      throw std::invalid_argument("decorated strings need two open ends");
    corr_mask = (1u << ends[0]) | (1u << ends[1]);
  }
  const int ns = g.n_sites();
  std::vector<double> terms(std::size_t{1} << ns);
  for (std::uint32_t sig = 0; sig < (1u << ns); ++sig) {
    double w = 1.0;
    for (int b : bonds) {
      const int oa = parity_sign(sig & masks.grp_a[b]);
      const int ob = parity_sign(sig & masks.grp_b[b]);
      w *= std::cos(2.0 * (t_a * oa + t_b * ob));
    }
    if (decorated) w *= parity_sign(sig & corr_mask);
    terms[sig] = w;
  }
  return pairwise_sum(terms) / std::pow(2.0, ns);
}

double premeasurement_check(const LatticeGraph& g, const CircuitParams& p,
                            PremeasObservable obs, const std::vector<int>& path) {
  switch (obs) {
    case PremeasObservable::single_s:
      return premeasurement_expectation(g, p.t_a, p.t_b,
                                        path.empty() ? std::vector<int>{0} : path, false);
    case PremeasObservable::string:
      return premeasurement_expectation(g, p.t_a, p.t_b, path, false);
    case PremeasObservable::decorated_string:
      return premeasurement_expectation(g, p.t_a, p.t_b, path, true);
    case PremeasObservable::plaquette:
    case PremeasObservable::cube_product: {
      std::vector<int> bonds = path;
      if (bonds.empty()) {
        if (g.plaquettes.empty())
          throw std::invalid_argument("lattice has no plaquettes");
        bonds = g.plaquettes.front().bonds;
      }
      return premeasurement_expectation(g, p.t_a, p.t_b, bonds, false);
    }
  }
  throw std::invalid_argument("unknown observable");
}

NishimoriReport verify_nishimori(const LatticeGraph& g, double t_a, double t_b) {
  check_guard(g);
  NishimoriReport report;
  report.t_a = t_a;
  report.t_b = t_b;
  const bool on_line = std::abs(t_b - kPi / 4) < 1e-12;
  const double tol = 1e-10;

  const CircuitParams params = couplings_from_times(t_a, t_b);
  const ExactEnsemble ens = enumerate_ensemble(g, params);
  const BondMasks masks = bond_masks(g);
  const int ns = g.n_sites();
  const int nb = g.n_bonds();

  if (on_line) {
    // (a) p_s proportional to the RBIM partition function at the mapped beta.
    const NishimoriParams np = nishimori_params(t_a);
    CircuitParams rbim;  // e^{-beta s u} entries, same enumeration kernel
    rbim.t_a = t_a;
    rbim.t_b = t_b;
    const double eb = std::exp(np.beta), ebi = std::exp(-np.beta);
    rbim.bond_plus << ebi, eb, eb, ebi;
    rbim.bond_minus << eb, ebi, ebi, eb;
    const ExactEnsemble rb = enumerate_ensemble(g, rbim);
    std::size_t ref = 0;
    for (std::size_t m = 0; m < ens.prob.size(); ++m)
      if (ens.prob[m] > ens.prob[ref]) ref = m;
    const double ratio_ref = ens.prob[ref] / rb.z[ref];
    double dev = 0.0;
    for (std::size_t m = 0; m < ens.prob.size(); ++m) {
      if (rb.z[m] <= 0.0 && ens.prob[m] <= 0.0) continue;
      const double r = ens.prob[m] / rb.z[m];
      dev = std::max(dev, std::abs(r / ratio_ref - 1.0));
    }
    report.checks.push_back({"p_proportional_to_Z", dev, tol, dev <= tol});
  }

  {
    // (b) Gauge invariance of the outcome distribution.
    double dev = 0.0;
    for (std::uint32_t tau = 0; tau < (1u << ns); ++tau) {
      std::uint32_t flip = 0;
      for (int b = 0; b < nb; ++b)
        if (std::popcount(tau & masks.all[b]) & 1) flip |= 1u << b;
      if (flip == 0) continue;
      for (std::size_t m = 0; m < ens.prob.size(); ++m) {
        const double a = ens.prob[m], bb = ens.prob[m ^ flip];
        dev = std::max(dev, std::abs(a - bb) / std::max({a, bb, 1e-300}));
      }
    }
    report.checks.push_back({"gauge_invariance", dev, tol, dev <= tol});
  }

  if (on_line) {
    // (c) EA identity against the gauge-fixed uncorrelated ensemble.
    const NishimoriParams np = nishimori_params(t_a);
    std::vector<double> lhs_terms(ens.prob.size()), rhs_terms(ens.prob.size());
    for (std::size_t m = 0; m < ens.prob.size(); ++m) {
      lhs_terms[m] = ens.prob[m] * ens.corr[m] * ens.corr[m];
      const int n_flip = std::popcount(static_cast<std::uint32_t>(~m) &
                                       ((1u << nb) - 1u));
      // bit clear <=> s = +1 <=> antiferromagnetic bond, probability p_flip
      rhs_terms[m] = std::pow(np.p_flip, n_flip) *
                     std::pow(1.0 - np.p_flip, nb - n_flip) * ens.corr[m];
    }
    const double lhs = pairwise_sum(lhs_terms);
    const double rhs = pairwise_sum(rhs_terms);
    const double dev = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
    report.checks.push_back({"ea_identity", dev, tol, dev <= tol});
  }

  report.all_pass = true;
  for (const auto& c : report.checks) report.all_pass = report.all_pass && c.pass;
  return report;
}

std::string NishimoriReport::to_json() const {
  nlohmann::ordered_json j;
  j["t_a"] = t_a;
  j["t_b"] = t_b;
  j["all_pass"] = all_pass;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name},
                           {"max_deviation", c.max_dev},
                           {"tolerance", c.tol},
                           {"pass", c.pass}});
  return j.dump(2);
}

double strong_limit_projector_deviation(const LatticeGraph& g) {
  if (g.kind != LatticeKind::cubic3d)
    throw std::invalid_argument("projector check is defined for cubic3d");
  check_guard(g);
  const int ns = g.n_sites();
  const int nb = g.n_bonds();
  const BondMasks masks = bond_masks(g);
  constexpr double t = kPi / 4;

  // amp(sigma) = prod_q m_{s_q}(phi_q) with phi_q = t * (sum of the 4 face
  // spins). The postmeasurement populations |amp|^2 must be proportional to
  // the stabilizer projector prod_q (1 + s_q W_q)/2: equal weight on the
  // W_q = s_q eigenspace, zero off it. (The amplitudes themselves carry
  // configuration-dependent signs that drop out of every diagonal
  // observable.)
  double dev = 0.0;
  for (std::uint32_t sm = 0; sm < (1u << nb); ++sm) {
    double max_w = 0.0;
    std::vector<double> weight(1u << ns);
    std::vector<double> proj(1u << ns);
    for (std::uint32_t sig = 0; sig < (1u << ns); ++sig) {
      std::complex<double> a(1.0, 0.0);
      double pr = 1.0;
      for (int b = 0; b < nb; ++b) {
        int sum = 0;
        for (int site : g.bonds[b].a_sites) sum += ((sig >> site) & 1u) ? -1 : +1;
        for (int site : g.bonds[b].b_sites) sum += ((sig >> site) & 1u) ? -1 : +1;
        const double phi = t * sum;
        const int s_q = ((sm >> b) & 1u) ? -1 : +1;
        a *= (s_q > 0) ? std::complex<double>(std::cos(phi), 0.0)
                       : std::complex<double>(0.0, -std::sin(phi));
        const int w_q = parity_sign(sig & masks.all[b]);
        pr *= 0.5 * (1.0 + s_q * w_q);
      }
      weight[sig] = std::norm(a);
      proj[sig] = pr;
      max_w = std::max(max_w, weight[sig]);
    }
    // Support weights are O(1); anything at the 1e-32 scale is the floating
    // point residue of sin(pi) in an incompatible outcome sector.
    if (max_w < 1e-20) {
      for (double pr : proj) dev = std::max(dev, pr);
      continue;
    }
    for (std::uint32_t sig = 0; sig < (1u << ns); ++sig)
      dev = std::max(dev, std::abs(weight[sig] - max_w * proj[sig]) / max_w);
  }
  return dev;
}

}  // namespace nmc
