#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace nmc {

enum class LatticeKind { chain, lieb_square, heavy_hexagon, cubic3d };

std::string to_string(LatticeKind kind);
LatticeKind lattice_kind_from_string(const std::string& name);

/// Target (site) spin. Coordinates are doubled so bond midpoints and face
/// centers land on integers for every geometry.
struct Site {
  int index = 0;
  std::array<int, 3> coord{0, 0, 0};
  int sublattice = 0;  // 0 = A (evolved for time t_A), 1 = B
  int row = 0;
  int col = 0;
};

enum class BondType {
  intra_row,  // couples (row, col) - (row, col+1)
  inter_row,  // couples (row, col) - (row+1, col)
  face        // plaquette ancilla of the 3D gauge protocol (4 sites)
};

/// Ancilla spin together with the target spins it is entangled with. The two
/// groups collect the endpoints evolved for t_A and t_B respectively; for the
/// 1D/2D Ising protocol each group is a single site.
struct Bond {
  int index = 0;
  BondType type = BondType::intra_row;
  std::array<int, 3> coord{0, 0, 0};
  std::vector<int> a_sites;
  std::vector<int> b_sites;
  int row = 0;
  int col = 0;
  int site_i() const { return a_sites.front(); }
  int site_j() const { return b_sites.front(); }
};

/// Elementary closed face (square, hexagon, or the cube boundary in 3D).
/// `closing_bond` is the member fixed last by flux-free initialization.
struct Plaquette {
  std::vector<int> bonds;
  int closing_bond = -1;
};

struct LatticeGraph {
  LatticeKind kind = LatticeKind::chain;
  std::array<int, 3> extents{0, 0, 0};

  std::vector<Site> sites;
  std::vector<Bond> bonds;
  std::vector<Plaquette> plaquettes;

  // Row decomposition used by the boundary-MPS contraction. All rows share
  // the same column count; absent grid entries are -1.
  int n_rows = 0;
  int n_cols = 0;
  std::vector<int> site_grid;   // (row, col) -> site index
  std::vector<int> intra_grid;  // (row, col) -> bond between cols c, c+1
  std::vector<int> post_grid;   // (row, col) -> bond between rows r, r+1

  int pinned_corner = 0;
  int central_site = 0;

  // site -> list of (neighbor site, bond); empty for the 3D gauge lattice.
  std::vector<std::vector<std::pair<int, int>>> adjacency;

  int site_at(int r, int c) const { return site_grid[r * n_cols + c]; }
  int intra_at(int r, int c) const { return intra_grid[r * n_cols + c]; }
  int post_at(int r, int c) const { return post_grid[r * n_cols + c]; }

  int n_sites() const { return static_cast<int>(sites.size()); }
  int n_bonds() const { return static_cast<int>(bonds.size()); }
  int total_spins() const { return n_sites() + n_bonds(); }

  /// 1D/2D kinds contract as a planar network; the 3D lattice is oracle-only.
  bool contractible() const { return kind != LatticeKind::cubic3d; }
};

/// Build one of the supported geometries with open boundaries.
///   chain:         extents {L}            (L bonds, L+1 sites)
///   lieb_square:   extents {L}            ((L+1)^2 sites, 2L(L+1) bonds)
///   heavy_hexagon: extents {L_y, L_x}     (requires L_x = 2 L_y - 1; L_x may
///                                          be omitted)
///   cubic3d:       extents {nx, ny, nz}   vertex grid; spins on edges and
///                                          faces, guarded to <= 24 spins
/// Throws std::invalid_argument for unsupported extents.
LatticeGraph build_lattice(LatticeKind kind, const std::vector<int>& extents);

/// Shortest path of bonds from site_a to site_b; ties broken toward the
/// lexicographically smallest bond-index sequence. Empty when a == b.
std::vector<int> wilson_path(const LatticeGraph& g, int site_a, int site_b);

/// Endpoints of the designated string observable: the full central row for
/// 2D lattices, the whole chain in 1D.
std::pair<int, int> wilson_endpoints(const LatticeGraph& g);

/// Graph dump (sites with coordinates, bonds, plaquettes) for debugging and
/// plotting.
std::string graph_to_json(const LatticeGraph& g);

}  // namespace nmc
