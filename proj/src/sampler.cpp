#include "nmc/sampler.hpp"

#include <omp.h>

#include <cmath>
#include <stdexcept>

#include "nmc/analysis.hpp"

namespace nmc {

namespace {

double plaquette_mean(const LatticeGraph& g, const SpinConfig& s) {
  if (g.plaquettes.empty()) return 0.0;
  double acc = 0.0;
  for (const Plaquette& p : g.plaquettes) {
    int prod = 1;
    for (int b : p.bonds) prod *= s[b];
    acc += prod;
  }
  return acc / static_cast<double>(g.plaquettes.size());
}

double mean_bond_spin(const SpinConfig& s) {
  double acc = 0.0;
  for (auto v : s) acc += v;
  return acc / static_cast<double>(s.size());
}

// min{ <W, B^{-s}> / <W, B^{s}>, 1 } acceptance; ties always accepted.
bool metropolis_decide(const CircuitParams& p, const SpinConfig& s, int bond,
                       const Eigen::Matrix2d& env, SplitMix64& rng) {
  const double cur = env.cwiseProduct(p.bond(s[bond])).sum();
  const double prop = env.cwiseProduct(p.bond(-s[bond])).sum();
  if (!(cur > 0.0))
    throw std::runtime_error("sampler: current configuration has zero weight");
  const double ratio = prop / cur;
  if (ratio >= 1.0) return true;
  return rng.uniform() < ratio;
}

}  // namespace

SpinConfig init_config(const LatticeGraph& g, InitMode mode, SplitMix64& rng) {
  SpinConfig s(g.n_bonds(), +1);
  switch (mode) {
    case InitMode::uniform_plus:
      break;
    case InitMode::random:
      for (auto& v : s) v = static_cast<std::int8_t>(rng.sign());
      break;
    case InitMode::random_flux_free: {
      for (auto& v : s) v = static_cast<std::int8_t>(rng.sign());
      // Faces are ordered bottom strip to top, left to right; each closing
      // bond appears in no earlier face, so one pass restores all fluxes.
      for (const Plaquette& p : g.plaquettes) {
        int prod = 1;
        for (int b : p.bonds) prod *= s[b];
        if (prod < 0) s[p.closing_bond] = -s[p.closing_bond];
      }
      break;
    }
  }
  return s;
}

int metropolis_sweep(ContractionEngine& engine, SpinConfig& s, SplitMix64& rng) {
  return engine.raster_sweep(s, [&](int bond, const Eigen::Matrix2d& env) {
    return metropolis_decide(engine.params(), s, bond, env, rng);
  });
}

ChainRecord run_chain(const LatticeGraph& g, const CircuitParams& p,
                      const Schedule& schedule, std::uint64_t master_seed,
                      int chain_index, const SamplerOptions& opts) {
  if (schedule.n_discard >= schedule.n_sweeps)
    throw std::invalid_argument("schedule: n_discard must be < n_sweeps");
  if (schedule.thin < 1) throw std::invalid_argument("schedule: thin must be >= 1");

  SplitMix64 rng(SplitMix64::stream_seed(master_seed, chain_index));
  SpinConfig s = init_config(g, opts.init, rng);
  ContractionEngine engine(g, p, opts.contraction);

  const auto [w_a, w_b] = wilson_endpoints(g);
  const std::vector<int> path = wilson_path(g, w_a, w_b);

  ChainRecord rec;
  rec.snapshot_stride = opts.snapshot_stride;
  const int n_bonds = g.n_bonds();

  for (int sweep = 0; sweep < schedule.n_sweeps; ++sweep) {
    int accepted = 0;
    if (opts.proposal == ProposalOrder::raster) {
      accepted = metropolis_sweep(engine, s, rng);
    } else {
      for (int k = 0; k < n_bonds; ++k) {
        const int bond = static_cast<int>(rng.below(n_bonds));
        const BondEnvironment env = engine.bond_environment(s, bond);
        if (metropolis_decide(p, s, bond, env.w, rng)) {
          s[bond] = -s[bond];
          ++accepted;
        }
      }
    }

    if (sweep < schedule.n_discard) continue;
    if ((sweep - schedule.n_discard) % schedule.thin != 0) continue;

    if (opts.measure) {
      const auto meas = engine.measure_with_pair(s, w_a, w_b);
      rec.m_c.push_back(meas.m_c);
      double string_prod = 1.0;
      for (int b : path) string_prod *= s[b];
      rec.wilson.push_back(string_prod * meas.pair);
    } else {
      rec.m_c.push_back(0.0);
      rec.wilson.push_back(0.0);
    }
    rec.plaquette.push_back(plaquette_mean(g, s));
    rec.mean_s.push_back(mean_bond_spin(s));
    rec.acceptance.push_back(accepted / static_cast<double>(n_bonds));
    if (opts.snapshot_stride > 0 &&
        (rec.retained() - 1) % opts.snapshot_stride == 0)
      rec.snapshots.push_back(s);
  }
  rec.stats = engine.stats();
  return rec;
}

std::vector<ChainRecord> run_chains(const LatticeGraph& g, const CircuitParams& p,
                                    const Schedule& schedule, std::uint64_t master_seed,
                                    int n_chains, int threads,
                                    const SamplerOptions& opts) {
  std::vector<ChainRecord> records(n_chains);
  if (threads <= 0) {
    for (int c = 0; c < n_chains; ++c)
      records[c] = run_chain(g, p, schedule, master_seed, c, opts);
    return records;
  }
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int c = 0; c < n_chains; ++c)
    records[c] = run_chain(g, p, schedule, master_seed, c, opts);
  return records;
}

std::pair<double, double> estimate_ea(const std::vector<ChainRecord>& records) {
  return chain_average(records, ChainSeries::m_c_squared);
}

std::pair<double, double> chain_average(const std::vector<ChainRecord>& records,
                                        ChainSeries series) {
  if (records.size() < 2)
    throw std::invalid_argument("need >= 2 chains for an error estimate");
  std::vector<std::vector<double>> chains;
  chains.reserve(records.size());
  for (const ChainRecord& r : records) {
    std::vector<double> v;
    switch (series) {
      case ChainSeries::m_c: v = r.m_c; break;
      case ChainSeries::m_c_squared:
        v.reserve(r.m_c.size());
        for (double m : r.m_c) v.push_back(m * m);
        break;
      case ChainSeries::wilson: v = r.wilson; break;
      case ChainSeries::plaquette: v = r.plaquette; break;
      case ChainSeries::mean_s: v = r.mean_s; break;
      case ChainSeries::acceptance: v = r.acceptance; break;
    }
    chains.push_back(std::move(v));
  }
  return disorder_average(chains);
}

}  // namespace nmc
