#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "nmc/lattice.hpp"
#include "nmc/model.hpp"
#include "nmc/oracle.hpp"

namespace nmc {

struct ContractionOptions {
  double cutoff = 1e-10;  // relative discarded density-matrix weight
  int chi_max = 256;
};

struct ContractionStats {
  int max_chi = 0;
  double max_discarded = 0.0;
  void merge(const ContractionStats& o) {
    max_chi = std::max(max_chi, o.max_chi);
    max_discarded = std::max(max_discarded, o.max_discarded);
  }
};

/// Rank-3 boundary tensor: a matrix (left virtual x right virtual) per value
/// of the dimension-2 classical index. Absent grid positions carry a
/// dimension-1 dummy index so every row has uniform width.
struct MpsTensor {
  int phys = 2;
  std::array<Eigen::MatrixXd, 2> a;
  int left() const { return static_cast<int>(a[0].rows()); }
  int right() const { return static_cast<int>(a[0].cols()); }
};

/// Boundary state of the partial contraction; kept at unit 2-norm with the
/// discarded scale accumulated in log_norm.
struct BoundaryMps {
  std::vector<MpsTensor> t;
  double log_norm = 0.0;
  int width() const { return static_cast<int>(t.size()); }
  int max_bond_dim() const;
  double overlap(const BoundaryMps& other) const;  // <this|other>, unit norms
};

enum class Direction { up, down };

/// 2x2 environment of a single bond: total network weight with the target
/// bond matrix removed, up to exp(log_scale).
struct BondEnvironment {
  Eigen::Matrix2d w;
  double log_scale = 0.0;
};

/// Boundary-MPS evaluation of the outcome weights p_s on a row-decomposed
/// lattice. One engine instance serves one (graph, params) pair and is
/// single-threaded; distinct instances are independent.
class ContractionEngine {
 public:
  ContractionEngine(const LatticeGraph& g, const CircuitParams& p,
                    const ContractionOptions& opts = {});
  ~ContractionEngine();
  ContractionEngine(const ContractionEngine&) = delete;
  ContractionEngine& operator=(const ContractionEngine&) = delete;

  /// log p_s up to a global additive constant (a corner pin halves every
  /// weight, so differences are exact log-probability ratios).
  double log_weight(const SpinConfig& s);

  BondEnvironment bond_environment(const SpinConfig& s, int bond);

  /// <sigma_center> with the corner spin pinned to +1.
  double central_magnetization(const SpinConfig& s);

  /// <sigma_i sigma_j> of the pinned ensemble. Supports pairs within one row
  /// and pairs anchored at the pinned corner.
  double pair_correlator(const SpinConfig& s, int site_i, int site_j);

  /// Central magnetization and one pair correlator from shared boundary
  /// stacks (one stack build when the pair lives in the central row).
  struct CentralMeasurement {
    double m_c = 0.0;
    double pair = 0.0;
  };
  CentralMeasurement measure_with_pair(const SpinConfig& s, int site_i, int site_j);

  /// One raster-order pass over all bonds: rows bottom to top, within a row
  /// columns left to right (vertical bond first, then the horizontal bond to
  /// the right). `decide(bond, env)` returns true to flip s[bond]; cached
  /// boundary stacks make a full pass cost O(rows) row applications.
  using DecideFn = std::function<bool(int bond, const Eigen::Matrix2d& env)>;
  int raster_sweep(SpinConfig& s, const DecideFn& decide);

  const CircuitParams& params() const { return p_; }
  const LatticeGraph& graph() const { return g_; }
  const ContractionStats& stats() const { return stats_; }
  std::vector<int> bond_dim_profile(const SpinConfig& s);
  std::string stats_json(const SpinConfig& s);

  // Row primitives, exposed for tests.
  BoundaryMps fresh_row(int row, Direction dir) const;
  void apply_row_gates(BoundaryMps& state, int row, const SpinConfig& s);
  void apply_transfer(BoundaryMps& state, int level, Direction dir, const SpinConfig& s);

 private:
  struct Level;  // per-row column layout

  const LatticeGraph& g_;
  CircuitParams p_;
  ContractionOptions opts_;
  ContractionStats stats_;
  std::vector<Level> levels_;
  BoundaryMps dummy_top_;

  BoundaryMps bottom_state(int level, const SpinConfig& s);
  BoundaryMps top_state(int level, const SpinConfig& s);
  std::vector<BoundaryMps> top_stack(const SpinConfig& s);
  double zip_value(const BoundaryMps& bot, const BoundaryMps& top, int level,
                   const SpinConfig& s, const std::vector<std::array<double, 2>>* ins);
  friend class ZipSweeper;
};

/// Convenience wrappers matching the operation surface.
double log_weight(const LatticeGraph& g, const CircuitParams& p, const SpinConfig& s,
                  const ContractionOptions& opts = {}, ContractionStats* stats = nullptr);
BondEnvironment bond_environment(const LatticeGraph& g, const CircuitParams& p,
                                 const SpinConfig& s, int bond,
                                 const ContractionOptions& opts = {});
double pinned_central_magnetization(const LatticeGraph& g, const CircuitParams& p,
                                    const SpinConfig& s,
                                    const ContractionOptions& opts = {});

/// Evolve a boundary state through one row: the row's horizontal gates with
/// density-matrix truncation and renormalization, then the vertical transfer
/// toward the next row in `dir` (when one exists).
void apply_row(BoundaryMps& state, const LatticeGraph& g, const CircuitParams& p,
               const SpinConfig& s, int row, Direction dir,
               const ContractionOptions& opts = {});

}  // namespace nmc
