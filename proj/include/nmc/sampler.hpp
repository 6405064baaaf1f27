#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nmc/contraction.hpp"
#include "nmc/lattice.hpp"
#include "nmc/model.hpp"
#include "nmc/oracle.hpp"
#include "nmc/rng.hpp"

namespace nmc {

enum class InitMode { uniform_plus, random, random_flux_free };
enum class ProposalOrder { raster, random_bond };

struct Schedule {
  int n_sweeps = 1000;
  int n_discard = 100;  // equilibration prefix, dropped from the record
  int thin = 1;
};

/// Per-sweep observable series of one Markov chain. All series share the
/// number of retained sweeps.
struct ChainRecord {
  std::vector<double> m_c;         // pinned central magnetization
  std::vector<double> wilson;      // (prod_path s) * <sigma_i sigma_j>
  std::vector<double> plaquette;   // mean over plaquettes of prod s
  std::vector<double> mean_s;      // mean bond spin
  std::vector<double> acceptance;  // accepted proposals / bonds
  std::vector<SpinConfig> snapshots;
  int snapshot_stride = 0;  // 0 = none
  ContractionStats stats;
  int retained() const { return static_cast<int>(m_c.size()); }
};

struct SamplerOptions {
  InitMode init = InitMode::random_flux_free;
  ProposalOrder proposal = ProposalOrder::raster;
  ContractionOptions contraction;
  bool measure = true;      // contract observables each retained sweep
  int snapshot_stride = 0;  // record s every k retained sweeps (0 = never)
};

/// Initial ancilla configuration. `random_flux_free` randomizes a spanning
/// set (all horizontal bonds plus the first vertical bond of each face) and
/// fixes each face's closing bond so every plaquette product is +1.
SpinConfig init_config(const LatticeGraph& g, InitMode mode, SplitMix64& rng);

/// One Metropolis sweep (one proposal per bond, raster order). Returns the
/// number of accepted flips.
int metropolis_sweep(ContractionEngine& engine, SpinConfig& s, SplitMix64& rng);

/// Run one chain. Deterministic given (master_seed, chain_index); the chain
/// generator is seeded with SplitMix64::stream_seed(master_seed, chain_index).
ChainRecord run_chain(const LatticeGraph& g, const CircuitParams& p,
                      const Schedule& schedule, std::uint64_t master_seed,
                      int chain_index, const SamplerOptions& opts = {});

/// Independent chains, OpenMP-parallel (capped at `threads`; 0 = serial
/// reference loop). Aggregation order is fixed by chain index, so results do
/// not depend on the thread count.
std::vector<ChainRecord> run_chains(const LatticeGraph& g, const CircuitParams& p,
                                    const Schedule& schedule, std::uint64_t master_seed,
                                    int n_chains, int threads,
                                    const SamplerOptions& opts = {});

/// Edwards-Anderson estimate from >= 2 chains: disorder-and-thermal average
/// of m_c^2 with a binning/between-chain error bar. Each recorded m_c is an
/// exact thermal expectation, so mean(m_c^2) estimates [<s0 sc>^2] directly.
std::pair<double, double> estimate_ea(const std::vector<ChainRecord>& records);

/// Mean and error of an arbitrary recorded series across chains.
enum class ChainSeries { m_c, m_c_squared, wilson, plaquette, mean_s, acceptance };
std::pair<double, double> chain_average(const std::vector<ChainRecord>& records,
                                        ChainSeries series);

}  // namespace nmc
