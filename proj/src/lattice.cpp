#include "nmc/lattice.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace nmc {

namespace {

constexpr int kOracleSpinGuard = 24;

int grid_idx(const LatticeGraph& g, int r, int c) { return r * g.n_cols + c; }

void init_grids(LatticeGraph& g, int rows, int cols) {
  g.n_rows = rows;
  g.n_cols = cols;
  g.site_grid.assign(rows * cols, -1);
  g.intra_grid.assign(rows * cols, -1);
  g.post_grid.assign(rows * cols, -1);
}

int add_site(LatticeGraph& g, int r, int c, std::array<int, 3> coord) {
  Site s;
  s.index = g.n_sites();
  s.coord = coord;
  s.row = r;
  s.col = c;
  s.sublattice = ((r + c) % 2 + 2) % 2;
  g.sites.push_back(s);
  g.site_grid[grid_idx(g, r, c)] = s.index;
  return s.index;
}

// Endpoint roles: the A-sublattice side is evolved for t_A.
int add_pair_bond(LatticeGraph& g, BondType type, int r, int c, int si, int sj) {
  Bond b;
  b.index = g.n_bonds();
  b.type = type;
  b.row = r;
  b.col = c;
  if (g.sites[si].sublattice != 0) std::swap(si, sj);
  if (g.sites[si].sublattice != 0 || g.sites[sj].sublattice != 1)
    throw std::invalid_argument("lattice is not bipartite");
  b.a_sites = {si};
  b.b_sites = {sj};
  for (int k = 0; k < 3; ++k)
    b.coord[k] = (g.sites[si].coord[k] + g.sites[sj].coord[k]) / 2;
  g.bonds.push_back(b);
  int idx = grid_idx(g, r, c);
  (type == BondType::intra_row ? g.intra_grid : g.post_grid)[idx] = b.index;
  return b.index;
}

void build_adjacency(LatticeGraph& g) {
  g.adjacency.assign(g.sites.size(), {});
  for (const Bond& b : g.bonds) {
    if (b.type == BondType::face) continue;
    g.adjacency[b.site_i()].push_back({b.site_j(), b.index});
    g.adjacency[b.site_j()].push_back({b.site_i(), b.index});
  }
}

LatticeGraph build_chain(int L) {
  if (L < 1) throw std::invalid_argument("chain needs L >= 1");
  LatticeGraph g;
  g.kind = LatticeKind::chain;
  g.extents = {L, 0, 0};
  init_grids(g, L + 1, 1);
  for (int r = 0; r <= L; ++r) add_site(g, r, 0, {0, 2 * r, 0});
  for (int r = 0; r < L; ++r)
    add_pair_bond(g, BondType::inter_row, r, 0, g.site_at(r, 0), g.site_at(r + 1, 0));
  g.pinned_corner = g.site_at(0, 0);
  g.central_site = g.site_at((L + 1) / 2, 0);
  build_adjacency(g);
  return g;
}

LatticeGraph build_lieb(int L) {
  if (L < 1) throw std::invalid_argument("lieb_square needs L >= 1");
  LatticeGraph g;
  g.kind = LatticeKind::lieb_square;
  g.extents = {L, L, 0};
  const int W = L + 1;
  init_grids(g, W, W);
  for (int r = 0; r < W; ++r)
    for (int c = 0; c < W; ++c) add_site(g, r, c, {2 * c, 2 * r, 0});
  for (int r = 0; r < W; ++r) {
    for (int c = 0; c + 1 < W; ++c)
      add_pair_bond(g, BondType::intra_row, r, c, g.site_at(r, c), g.site_at(r, c + 1));
    if (r + 1 < W)
      for (int c = 0; c < W; ++c)
        add_pair_bond(g, BondType::inter_row, r, c, g.site_at(r, c), g.site_at(r + 1, c));
  }
  for (int r = 0; r + 1 < W; ++r)
    for (int c = 0; c + 1 < W; ++c) {
      Plaquette p;
      p.bonds = {g.intra_at(r, c), g.post_at(r, c + 1), g.intra_at(r + 1, c),
                 g.post_at(r, c)};
      p.closing_bond = g.post_at(r, c + 1);
      g.plaquettes.push_back(p);
    }
  g.pinned_corner = g.site_at(0, 0);
  const int mid = (L + 1) / 2;
  g.central_site = g.site_at(mid, mid);
  build_adjacency(g);
  return g;
}

// Brick-wall honeycomb: L_x zig-zag rows of 2*L_y sites, vertical bonds at
// columns of alternating parity. The two dangling corner qubits (bottom
// right, top left) are dropped, which reproduces the 2*Lx*Ly - 2 site and
// 3*Lx*Ly - Lx - Ly - 2 bond counts.
LatticeGraph build_heavy_hexagon(int Ly, int Lx) {
  if (Ly < 2) throw std::invalid_argument("heavy_hexagon needs L_y >= 2");
  if (Lx != 2 * Ly - 1)
    throw std::invalid_argument("heavy_hexagon requires L_x = 2*L_y - 1");
  LatticeGraph g;
  g.kind = LatticeKind::heavy_hexagon;
  g.extents = {Ly, Lx, 0};
  const int R = Lx;
  const int W = 2 * Ly;
  init_grids(g, R, W);
  auto trimmed = [&](int r, int c) {
    return (r == 0 && c == W - 1) || (r == R - 1 && c == 0);
  };
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < W; ++c)
      if (!trimmed(r, c)) add_site(g, r, c, {2 * c, 2 * r, 0});
  for (int r = 0; r < R; ++r) {
    for (int c = 0; c + 1 < W; ++c)
      if (g.site_at(r, c) >= 0 && g.site_at(r, c + 1) >= 0)
        add_pair_bond(g, BondType::intra_row, r, c, g.site_at(r, c), g.site_at(r, c + 1));
    if (r + 1 < R)
      for (int c = r % 2; c < W; c += 2)
        if (g.site_at(r, c) >= 0 && g.site_at(r + 1, c) >= 0)
          add_pair_bond(g, BondType::inter_row, r, c, g.site_at(r, c), g.site_at(r + 1, c));
  }
  for (int r = 0; r + 1 < R; ++r)
    for (int p = r % 2; p + 2 < W; p += 2) {
      Plaquette q;
      q.bonds = {g.intra_at(r, p),     g.intra_at(r, p + 1), g.post_at(r, p + 2),
                 g.intra_at(r + 1, p + 1), g.intra_at(r + 1, p), g.post_at(r, p)};
      for (int b : q.bonds)
        if (b < 0) throw std::logic_error("heavy_hexagon face misses a bond");
      q.closing_bond = g.post_at(r, p + 2);
      g.plaquettes.push_back(q);
    }
  g.pinned_corner = g.site_at(0, 0);
  g.central_site = g.site_at((R - 1) / 2, Ly);
  build_adjacency(g);
  return g;
}

// 3D gauge protocol: target spins on the edges of a vertex grid, ancillas on
// the faces; each face couples the edge pairs {left, up} (t_A) and
// {right, down} (t_B). Elementary cells play the role of plaquettes.
LatticeGraph build_cubic(int nx, int ny, int nz) {
  if (nx < 2 || ny < 2 || nz < 2)
    throw std::invalid_argument("cubic3d needs at least a 2x2x2 vertex grid");
  LatticeGraph g;
  g.kind = LatticeKind::cubic3d;
  g.extents = {nx, ny, nz};
  const std::array<int, 3> n{nx, ny, nz};

  auto edge_key = [&](int d, std::array<int, 3> v) {
    return ((d * nz + v[2]) * ny + v[1]) * nx + v[0];
  };
  std::vector<int> edge_site(3 * nx * ny * nz, -1);

  int n_edges = 0;
  for (int d = 0; d < 3; ++d)
    for (int z = 0; z < nz; ++z)
      for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
          std::array<int, 3> v{x, y, z};
          if (v[d] + 1 >= n[d]) continue;
          ++n_edges;
        }
  int n_faces = 0;
  for (int d1 = 0; d1 < 3; ++d1)
    for (int d2 = d1 + 1; d2 < 3; ++d2)
      for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
          for (int x = 0; x < nx; ++x) {
            std::array<int, 3> v{x, y, z};
            if (v[d1] + 1 >= n[d1] || v[d2] + 1 >= n[d2]) continue;
            ++n_faces;
          }
  if (n_edges + n_faces > kOracleSpinGuard)
    throw std::invalid_argument("cubic3d beyond oracle scale (> 24 spins)");

  init_grids(g, 1, n_edges);
  for (int d = 0; d < 3; ++d)
    for (int z = 0; z < nz; ++z)
      for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
          std::array<int, 3> v{x, y, z};
          if (v[d] + 1 >= n[d]) continue;
          std::array<int, 3> coord{2 * x, 2 * y, 2 * z};
          coord[d] += 1;
          int idx = add_site(g, 0, g.n_sites(), coord);
          g.sites[idx].sublattice = 0;  // roles are per-face in 3D
          edge_site[edge_key(d, v)] = idx;
        }

  for (int d1 = 0; d1 < 3; ++d1)
    for (int d2 = d1 + 1; d2 < 3; ++d2)
      for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
          for (int x = 0; x < nx; ++x) {
            std::array<int, 3> v{x, y, z};
            if (v[d1] + 1 >= n[d1] || v[d2] + 1 >= n[d2]) continue;
            std::array<int, 3> v1 = v, v2 = v;
            v1[d1] += 1;
            v2[d2] += 1;
            Bond b;
            b.index = g.n_bonds();
            b.type = BondType::face;
            b.row = 0;
            b.col = b.index;
            b.coord = {2 * x, 2 * y, 2 * z};
            b.coord[d1] += 1;
            b.coord[d2] += 1;
            const int left = edge_site[edge_key(d2, v)];
            const int up = edge_site[edge_key(d1, v2)];
            const int right = edge_site[edge_key(d2, v1)];
            const int down = edge_site[edge_key(d1, v)];
            b.a_sites = {left, up};
            b.b_sites = {right, down};
            g.bonds.push_back(b);
          }

  // Cells: the six faces around each elementary cube.
  auto face_of = [&](int d1, int d2, std::array<int, 3> v) {
    for (const Bond& b : g.bonds) {
      std::array<int, 3> c{2 * v[0], 2 * v[1], 2 * v[2]};
      c[d1] += 1;
      c[d2] += 1;
      if (b.coord == c) return b.index;
    }
    return -1;
  };
  for (int z = 0; z + 1 < nz; ++z)
    for (int y = 0; y + 1 < ny; ++y)
      for (int x = 0; x + 1 < nx; ++x) {
        Plaquette cell;
        for (int d1 = 0; d1 < 3; ++d1)
          for (int d2 = d1 + 1; d2 < 3; ++d2) {
            int d3 = 3 - d1 - d2;
            std::array<int, 3> v{x, y, z};
            cell.bonds.push_back(face_of(d1, d2, v));
            v[d3] += 1;
            cell.bonds.push_back(face_of(d1, d2, v));
          }
        cell.closing_bond = cell.bonds.back();
        g.plaquettes.push_back(cell);
      }

  g.pinned_corner = 0;
  g.central_site = 0;
  g.adjacency.assign(g.sites.size(), {});
  return g;
}

}  // namespace

std::string to_string(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::chain: return "chain";
    case LatticeKind::lieb_square: return "lieb_square";
    case LatticeKind::heavy_hexagon: return "heavy_hexagon";
    case LatticeKind::cubic3d: return "cubic3d";
  }
  return "?";
}

LatticeKind lattice_kind_from_string(const std::string& name) {
  if (name == "chain") return LatticeKind::chain;
  if (name == "lieb" || name == "lieb_square") return LatticeKind::lieb_square;
  if (name == "hex" || name == "heavy_hexagon") return LatticeKind::heavy_hexagon;
  if (name == "cubic" || name == "cubic3d") return LatticeKind::cubic3d;
  throw std::invalid_argument("unknown lattice kind: " + name);
}

LatticeGraph build_lattice(LatticeKind kind, const std::vector<int>& extents) {
  if (extents.empty()) throw std::invalid_argument("missing lattice extents");
  for (int e : extents)
    if (e <= 0) throw std::invalid_argument("lattice extents must be positive");
  switch (kind) {
    case LatticeKind::chain:
      return build_chain(extents[0]);
    case LatticeKind::lieb_square:
      return build_lieb(extents[0]);
    case LatticeKind::heavy_hexagon: {
      int Ly = extents[0];
      int Lx = extents.size() > 1 ? extents[1] : 2 * Ly - 1;
      return build_heavy_hexagon(Ly, Lx);
    }
    case LatticeKind::cubic3d: {
      if (extents.size() != 3)
        throw std::invalid_argument("cubic3d needs three extents");
      return build_cubic(extents[0], extents[1], extents[2]);
    }
  }
  throw std::invalid_argument("unknown lattice kind");
}

std::vector<int> wilson_path(const LatticeGraph& g, int site_a, int site_b) {
  if (site_a < 0 || site_a >= g.n_sites() || site_b < 0 || site_b >= g.n_sites())
    throw std::invalid_argument("wilson_path: site index out of range");
  if (g.adjacency.empty() || g.adjacency.size() != g.sites.size() ||
      (g.kind == LatticeKind::cubic3d))
    throw std::invalid_argument("wilson_path: unsupported for this lattice");
  if (site_a == site_b) return {};

  // BFS distances from the target, then greedy descent choosing the smallest
  // bond index at each step: yields the lexicographically smallest path.
  std::vector<int> dist(g.sites.size(), std::numeric_limits<int>::max());
  std::deque<int> queue;
  dist[site_b] = 0;
  queue.push_back(site_b);
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (auto [w, bond] : g.adjacency[v])
      if (dist[w] == std::numeric_limits<int>::max()) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
  }
  if (dist[site_a] == std::numeric_limits<int>::max())
    throw std::invalid_argument("wilson_path: endpoints are disconnected");

  std::vector<int> path;
  int v = site_a;
  while (v != site_b) {
    int best_bond = -1, best_site = -1;
    for (auto [w, bond] : g.adjacency[v])
      if (dist[w] == dist[v] - 1 && (best_bond < 0 || bond < best_bond)) {
        best_bond = bond;
        best_site = w;
      }
    path.push_back(best_bond);
    v = best_site;
  }
  return path;
}

std::pair<int, int> wilson_endpoints(const LatticeGraph& g) {
  if (g.kind == LatticeKind::chain)
    return {g.site_at(0, 0), g.site_at(g.n_rows - 1, 0)};
  if (!g.contractible())
    throw std::invalid_argument("wilson_endpoints: unsupported lattice");
  const int rc = g.n_rows / 2;
  int left = -1, right = -1;
  for (int c = 0; c < g.n_cols; ++c)
    if (g.site_at(rc, c) >= 0) {
      if (left < 0) left = g.site_at(rc, c);
      right = g.site_at(rc, c);
    }
  return {left, right};
}

std::string graph_to_json(const LatticeGraph& g) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(g.kind);
  j["extents"] = g.extents;
  j["n_sites"] = g.n_sites();
  j["n_bonds"] = g.n_bonds();
  j["n_spins"] = g.total_spins();
  j["pinned_corner"] = g.pinned_corner;
  j["central_site"] = g.central_site;
  j["sites"] = nlohmann::json::array();
  for (const Site& s : g.sites)
    j["sites"].push_back({{"index", s.index},
                          {"coord", s.coord},
                          {"sublattice", s.sublattice == 0 ? "A" : "B"},
                          {"row", s.row},
                          {"col", s.col}});
  j["bonds"] = nlohmann::json::array();
  for (const Bond& b : g.bonds)
    j["bonds"].push_back({{"index", b.index},
                          {"coord", b.coord},
                          {"a_sites", b.a_sites},
                          {"b_sites", b.b_sites}});
  j["plaquettes"] = nlohmann::json::array();
  for (const Plaquette& p : g.plaquettes) j["plaquettes"].push_back(p.bonds);
  return j.dump(2);
}

}  // namespace nmc
