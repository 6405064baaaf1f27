#include <cmath>

#include "doctest.h"
#include "nmc/contraction.hpp"
#include "nmc/lattice.hpp"
#include "nmc/model.hpp"
#include "nmc/oracle.hpp"
#include "nmc/rng.hpp"

using namespace nmc;

namespace {
constexpr double kPi = 3.14159265358979323846;

SpinConfig random_config(const LatticeGraph& g, SplitMix64& rng) {
  SpinConfig s(g.n_bonds());
  for (auto& v : s) v = static_cast<std::int8_t>(rng.sign());
  return s;
}
}  // namespace

TEST_CASE("log-weight ratios match enumeration on guarded lattices") {
  SplitMix64 rng(101);
  std::vector<LatticeGraph> graphs;
  for (int L : {1, 3, 6}) graphs.push_back(build_lattice(LatticeKind::chain, {L}));
  for (int L : {1, 2}) graphs.push_back(build_lattice(LatticeKind::lieb_square, {L}));
  graphs.push_back(build_lattice(LatticeKind::heavy_hexagon, {2}));

  for (const LatticeGraph& g : graphs) {
    for (int k = 0; k < 8; ++k) {
      const double ta = 0.02 * kPi + rng.uniform() * 0.44 * kPi;
      const double tb = 0.02 * kPi + rng.uniform() * 0.44 * kPi;
      const CircuitParams p = couplings_from_times(ta, tb);
      const SpinConfig s1 = random_config(g, rng);
      const SpinConfig s2 = random_config(g, rng);
      const double lhs = log_weight(g, p, s1) - log_weight(g, p, s2);
      const double rhs = std::log(partition_sum(g, p, s1) / partition_sum(g, p, s2));
      CHECK(std::abs(std::exp(lhs - rhs) - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("two-fold degeneracy at the strong-measurement point") {
  const LatticeGraph g = build_lattice(LatticeKind::lieb_square, {2});
  const CircuitParams p = couplings_from_times(kPi / 4, kPi / 4);
  const SpinConfig plus(g.n_bonds(), +1), minus(g.n_bonds(), -1);
  CHECK(log_weight(g, p, minus) == doctest::Approx(log_weight(g, p, plus)).epsilon(1e-10));
}

TEST_CASE("decoupled target spins factorize the weights") {
  const LatticeGraph g = build_lattice(LatticeKind::lieb_square, {2});
  SplitMix64 rng(7);
  for (double tb : {kPi / 8, kPi / 5, 0.4}) {
    const CircuitParams p = couplings_from_times(0.0, tb);
    const SpinConfig s1 = random_config(g, rng);
    const SpinConfig s2 = random_config(g, rng);
    auto count_minus = [](const SpinConfig& s) {
      int n = 0;
      for (auto v : s) n += v < 0;
      return n;
    };
    const double expected =
        (count_minus(s1) - count_minus(s2)) * std::log(std::tan(tb) * std::tan(tb));
    CHECK(log_weight(g, p, s1) - log_weight(g, p, s2) ==
          doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("shifting t_A by pi/2 is the same as flipping every outcome") {
  const LatticeGraph g = build_lattice(LatticeKind::lieb_square, {2});
  SplitMix64 rng(8);
  const CircuitParams p = couplings_from_times(kPi / 8, kPi / 4);
  const CircuitParams shifted = couplings_from_times(kPi / 8 + kPi / 2, kPi / 4);
  const SpinConfig s = random_config(g, rng);
  SpinConfig flipped = s;
  for (auto& v : flipped) v = -v;
  CHECK(log_weight(g, shifted, flipped) == doctest::Approx(log_weight(g, p, s)).epsilon(1e-10));
}

TEST_CASE("sublattice relabeling (t_A -> -t_A) leaves the weight unchanged") {
  const LatticeGraph g = build_lattice(LatticeKind::heavy_hexagon, {2});
  SplitMix64 rng(9);
  const SpinConfig s = random_config(g, rng);
  const double a = log_weight(g, couplings_from_times(0.11 * kPi, 0.3), s);
  const double b = log_weight(g, couplings_from_times(-0.11 * kPi, 0.3), s);
  CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("bond environments: decoupled flip ratio is tan^2 t_B") {
  const LatticeGraph g = build_lattice(LatticeKind::lieb_square, {2});
  SplitMix64 rng(10);
  const double tb = kPi / 5;
  const CircuitParams p = couplings_from_times(0.0, tb);
  for (int k = 0; k < 4; ++k) {
    const SpinConfig s = random_config(g, rng);
    for (int bond = 0; bond < g.n_bonds(); ++bond) {
      const BondEnvironment env = bond_environment(g, p, s, bond);
      const double cur = env.w.cwiseProduct(p.bond(s[bond])).sum();
      const double prop = env.w.cwiseProduct(p.bond(-s[bond])).sum();
      const double expected = s[bond] > 0 ? std::pow(std::tan(tb), 2)
                                          : std::pow(std::tan(tb), -2);
      CHECK(prop / cur == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("bond environments reproduce enumeration flip ratios") {
  SplitMix64 rng(11);
  for (const LatticeGraph& g : {build_lattice(LatticeKind::lieb_square, {2}),
                                build_lattice(LatticeKind::heavy_hexagon, {2}),
                                build_lattice(LatticeKind::chain, {5})}) {
    const CircuitParams p = couplings_from_times(kPi / 8, kPi / 4);
    const SpinConfig s = random_config(g, rng);
    for (int bond = 0; bond < g.n_bonds(); ++bond) {
      const BondEnvironment env = bond_environment(g, p, s, bond);
      const double ratio = env.w.cwiseProduct(p.bond(-s[bond])).sum() /
                           env.w.cwiseProduct(p.bond(s[bond])).sum();
      SpinConfig flipped = s;
      flipped[bond] = -flipped[bond];
      const double exact = partition_sum(g, p, flipped) / partition_sum(g, p, s);
      CHECK(std::abs(ratio / exact - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("environment of a dangling-site bond has rank one") {
  const LatticeGraph g = build_lattice(LatticeKind::chain, {4});
  SplitMix64 rng(12);
  const CircuitParams p = couplings_from_times(0.1 * kPi, 0.22 * kPi);
  const SpinConfig s = random_config(g, rng);
  const BondEnvironment env = bond_environment(g, p, s, g.n_bonds() - 1);
  const double det = env.w(0, 0) * env.w(1, 1) - env.w(0, 1) * env.w(1, 0);
  CHECK(std::abs(det) < 1e-12 * env.w.cwiseAbs().maxCoeff() * env.w.cwiseAbs().maxCoeff());
}

TEST_CASE("environment consistency against full weights") {
  const LatticeGraph g = build_lattice(LatticeKind::lieb_square, {2});
  SplitMix64 rng(13);
  const CircuitParams p = couplings_from_times(0.13 * kPi, 0.19 * kPi);
  const SpinConfig s = random_config(g, rng);
  for (int bond : {0, 3, 7, 11}) {
    const BondEnvironment env = bond_environment(g, p, s, bond);
    SpinConfig flipped = s;
    flipped[bond] = -flipped[bond];
    const double lw_ratio = std::exp(log_weight(g, p, flipped) - log_weight(g, p, s));
    const double env_ratio = env.w.cwiseProduct(p.bond(flipped[bond])).sum() /
                             env.w.cwiseProduct(p.bond(s[bond])).sum();
    CHECK(env_ratio == doctest::Approx(lw_ratio).epsilon(1e-8));
  }
}

TEST_CASE("pinned central magnetization limits") {
  const LatticeGraph g = build_lattice(LatticeKind::lieb_square, {2});
  const CircuitParams strong = couplings_from_times(kPi / 4, kPi / 4);
  const SpinConfig minus(g.n_bonds(), -1), plus(g.n_bonds(), +1);
  CHECK(pinned_central_magnetization(g, strong, minus) == doctest::Approx(1.0));
  // all s=+1 antialigns neighbors; corner (0,0) and center (1,1) agree
  CHECK(pinned_central_magnetization(g, strong, plus) == doctest::Approx(1.0));
  // chain with odd corner-center distance picks up the sublattice sign
  const LatticeGraph c2 = build_lattice(LatticeKind::chain, {2});
  CHECK(pinned_central_magnetization(c2, strong, SpinConfig(2, +1)) ==
        doctest::Approx(-1.0));
  const CircuitParams free = couplings_from_times(0.0, 0.3);
  CHECK(std::abs(pinned_central_magnetization(g, free, plus)) < 1e-10);
  // matches enumeration off the symmetric cuts
  SplitMix64 rng(14);
  const CircuitParams p = couplings_from_times(0.17 * kPi, 0.21 * kPi);
  for (int k = 0; k < 5; ++k) {
    const SpinConfig s = random_config(g, rng);
    CHECK(pinned_central_magnetization(g, p, s) ==
          doctest::Approx(pair_correlation(g, p, s)).epsilon(1e-8));
  }
}

TEST_CASE("pair correlator within the central row matches enumeration") {
  const LatticeGraph g = build_lattice(LatticeKind::lieb_square, {2});
  SplitMix64 rng(15);
  const CircuitParams p = couplings_from_times(0.12 * kPi, 0.27 * kPi);
  const auto [a, b] = wilson_endpoints(g);
  ContractionEngine eng(g, p);
  for (int k = 0; k < 5; ++k) {
    const SpinConfig s = random_config(g, rng);
    // test-side enumeration of <sigma_a sigma_b>
    double num = 0.0, z = 0.0;
    for (std::uint32_t sig = 0; sig < (1u << g.n_sites()); ++sig) {
      double w = 1.0;
      for (const Bond& bond : g.bonds) {
        const int si = (sig >> bond.site_i()) & 1 ? -1 : 1;
        const int sj = (sig >> bond.site_j()) & 1 ? -1 : 1;
        w *= p.weight(s[bond.index], si * sj);
      }
      const int sa = (sig >> a) & 1 ? -1 : 1;
      const int sb = (sig >> b) & 1 ? -1 : 1;
      z += w;
      num += w * sa * sb;
    }
    CHECK(eng.pair_correlator(s, a, b) == doctest::Approx(num / z).epsilon(1e-8));
  }
}

TEST_CASE("truncation cutoff stability") {
  // A discarded density-matrix weight eps perturbs amplitudes by O(sqrt(eps)),
  // so the loose-vs-tight deltas scale with the square root of the cutoff.
  const LatticeGraph g = build_lattice(LatticeKind::lieb_square, {8});
  SplitMix64 rng(16);
  const SpinConfig s = random_config(g, rng);
  for (auto [ta, tb] : {std::pair{kPi / 8, kPi / 4}, {0.13 * kPi, kPi / 5}}) {
    const CircuitParams p = couplings_from_times(ta, tb);
    ContractionOptions exact, loose, tight;
    exact.cutoff = 0.0;
    loose.cutoff = 1e-8;
    tight.cutoff = 1e-12;
    const double ref = log_weight(g, p, s, exact);
    const double err_loose = std::abs(log_weight(g, p, s, loose) - ref);
    const double err_tight = std::abs(log_weight(g, p, s, tight) - ref);
    CHECK(err_loose < 1e-3);
    CHECK(err_tight < 1e-5);
    CHECK(err_tight < err_loose);
  }
}

TEST_CASE("row application with constant gates is the identity") {
  const LatticeGraph g = build_lattice(LatticeKind::lieb_square, {4});
  const CircuitParams flat = couplings_from_times(0.0, kPi / 4);  // all entries 1/2
  const CircuitParams p = couplings_from_times(0.14 * kPi, 0.2 * kPi);
  SplitMix64 rng(17);
  const SpinConfig s = random_config(g, rng);
  ContractionEngine eng(g, p), eng_flat(g, flat);
  // a nontrivial boundary state: contract two rows first
  BoundaryMps st = eng.fresh_row(0, Direction::up);
  eng.apply_row_gates(st, 0, s);
  eng.apply_transfer(st, 0, Direction::up, s);
  eng.apply_row_gates(st, 1, s);

  BoundaryMps once = st;
  eng_flat.apply_row_gates(once, 1, s);
  BoundaryMps twice = once;
  eng_flat.apply_row_gates(twice, 1, s);
  CHECK(std::abs(st.overlap(once)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(once.overlap(twice)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("raster sweep environments match standalone environments") {
  const LatticeGraph g = build_lattice(LatticeKind::lieb_square, {2});
  const CircuitParams p = couplings_from_times(0.13 * kPi, 0.22 * kPi);
  SplitMix64 rng(18);
  SpinConfig s = random_config(g, rng);
  const SpinConfig frozen = s;
  ContractionEngine eng(g, p);
  std::vector<Eigen::Matrix2d> observed(g.n_bonds());
  eng.raster_sweep(s, [&](int bond, const Eigen::Matrix2d& env) {
    observed[bond] = env;
    return false;  // never flip
  });
  CHECK(s == frozen);
  for (int bond = 0; bond < g.n_bonds(); ++bond) {
    const BondEnvironment ref = bond_environment(g, p, frozen, bond);
    const double na = observed[bond].sum(), nb = ref.w.sum();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(observed[bond](i, j) / na == doctest::Approx(ref.w(i, j) / nb).epsilon(1e-9));
  }
}

TEST_CASE("impossible outcomes are reported") {
  const LatticeGraph g = build_lattice(LatticeKind::lieb_square, {2});
  const CircuitParams strong = couplings_from_times(kPi / 4, kPi / 4);
  SpinConfig s(g.n_bonds(), +1);
  s[0] = -1;  // frustrates two plaquettes at beta = infinity
  CHECK_THROWS_AS(log_weight(g, strong, s), std::runtime_error);
}

TEST_CASE("bond dimension profile and stats dump") {
  const LatticeGraph g = build_lattice(LatticeKind::lieb_square, {4});
  const CircuitParams p = couplings_from_times(0.15 * kPi, kPi / 4);
  SplitMix64 rng(19);
  const SpinConfig s = random_config(g, rng);
  ContractionEngine eng(g, p);
  const auto profile = eng.bond_dim_profile(s);
  CHECK(profile.size() == static_cast<std::size_t>(g.n_rows));
  CHECK(eng.stats().max_chi >= 1);
  CHECK(eng.stats_json(s).find("bond_dim_profile") != std::string::npos);
}
