#include "nmc/contraction.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace nmc {

namespace {

using Eigen::MatrixXd;
using SigmaMats = std::array<MatrixXd, 2>;

// M = U * V with orthonormal U columns; truncation on the eigenvalues of the
// two-site density matrix (relative discarded weight <= cutoff, k <= chi_max).
void split_truncate(const MatrixXd& m, double cutoff, int chi_max, MatrixXd* u,
                    MatrixXd* v, double* discarded) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  const bool left_small = rows <= cols;
  const int dim = left_small ? rows : cols;

  MatrixXd gram(dim, dim);
  if (left_small)
    gram.noalias() = m * m.transpose();
  else
    gram.noalias() = m.transpose() * m;

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram);
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
  double total = 0.0;
  for (int i = 0; i < dim; ++i) total += std::max(ev[i], 0.0);

  int drop = 0;
  if (total > 0.0) {
    double acc = 0.0;
    while (drop < dim - 1 && acc + std::max(ev[drop], 0.0) <= cutoff * total) {
      acc += std::max(ev[drop], 0.0);
      ++drop;
    }
  }
  int keep = dim - drop;
  if (keep > chi_max) keep = chi_max;
  if (keep < 1) keep = 1;

  double kept_weight = 0.0;
  for (int i = dim - keep; i < dim; ++i) kept_weight += std::max(ev[i], 0.0);
  *discarded = total > 0.0 ? (total - kept_weight) / total : 0.0;

  if (left_small) {
    *u = es.eigenvectors().rightCols(keep);
    v->noalias() = u->transpose() * m;
  } else {
    const MatrixXd v0 = es.eigenvectors().rightCols(keep);  // cols x keep
    MatrixXd w0;
    w0.noalias() = m * v0;  // rows x keep
    Eigen::HouseholderQR<MatrixXd> qr(w0);
    *u = qr.householderQ() * MatrixXd::Identity(rows, keep);
    MatrixXd r = qr.matrixQR().topRows(keep).triangularView<Eigen::Upper>();
    v->noalias() = r * v0.transpose();
  }
}

MatrixXd ones_matrix(int r, int c) { return MatrixXd::Ones(r, c); }

}  // namespace

int BoundaryMps::max_bond_dim() const {
  int chi = 0;
  for (const MpsTensor& x : t) chi = std::max({chi, x.left(), x.right()});
  return chi;
}

double BoundaryMps::overlap(const BoundaryMps& other) const {
  MatrixXd env = MatrixXd::Ones(1, 1);
  for (int c = 0; c < width(); ++c) {
    const MpsTensor& a = t[c];
    const MpsTensor& b = other.t[c];
    if (a.phys != b.phys) throw std::invalid_argument("overlap: shape mismatch");
    MatrixXd next = MatrixXd::Zero(a.right(), b.right());
    for (int k = 0; k < a.phys; ++k) next.noalias() += a.a[k].transpose() * env * b.a[k];
    env = std::move(next);
  }
  return env(0, 0);
}

// ---------------------------------------------------------------------------

struct ContractionEngine::Level {
  std::vector<int> phys_bot, phys_top;
  std::vector<int> post;   // bond between (r,c) and (r+1,c), or -1
  std::vector<int> intra;  // bond between (r,c) and (r,c+1), or -1
};

ContractionEngine::~ContractionEngine() = default;

ContractionEngine::ContractionEngine(const LatticeGraph& g, const CircuitParams& p,
                                     const ContractionOptions& opts)
    : g_(g), p_(p), opts_(opts) {
  if (!g.contractible())
    throw std::invalid_argument("contraction supports row-decomposed 1D/2D lattices");
  const int R = g.n_rows, W = g.n_cols;
  levels_.resize(R);
  for (int r = 0; r < R; ++r) {
    Level& lv = levels_[r];
    lv.phys_bot.resize(W);
    lv.phys_top.resize(W);
    lv.post.resize(W);
    lv.intra.resize(W);
    for (int c = 0; c < W; ++c) {
      lv.phys_bot[c] = g.site_at(r, c) >= 0 ? 2 : 1;
      lv.phys_top[c] = (r + 1 < R && g.site_at(r + 1, c) >= 0) ? 2 : 1;
      lv.post[c] = r + 1 < R ? g.post_at(r, c) : -1;
      lv.intra[c] = c + 1 < W ? g.intra_at(r, c) : -1;
    }
  }
  dummy_top_.t.resize(W);
  for (int c = 0; c < W; ++c) {
    dummy_top_.t[c].phys = 1;
    dummy_top_.t[c].a[0] = MatrixXd::Ones(1, 1);
  }
}

BoundaryMps ContractionEngine::fresh_row(int row, Direction dir) const {
  BoundaryMps st;
  st.t.resize(g_.n_cols);
  for (int c = 0; c < g_.n_cols; ++c) {
    MpsTensor& x = st.t[c];
    const int site = g_.site_at(row, c);
    x.phys = site >= 0 ? 2 : 1;
    x.a[0] = MatrixXd::Ones(1, 1);
    if (x.phys == 2) {
      x.a[1] = MatrixXd::Ones(1, 1);
      if (dir == Direction::up && row == 0 && site == g_.pinned_corner)
        x.a[1] = MatrixXd::Zero(1, 1);  // corner pinned to sigma = +1
    }
  }
  return st;
}

void ContractionEngine::apply_row_gates(BoundaryMps& state, int row, const SpinConfig& s) {
  const int W = state.width();
  // Right-canonicalize so each two-site split below truncates optimally.
  for (int c = W - 1; c >= 1; --c) {
    MpsTensor& x = state.t[c];
    const int l = x.left(), r = x.right();
    MatrixXd m(l, x.phys * r);
    for (int k = 0; k < x.phys; ++k) m.middleCols(k * r, r) = x.a[k];
    const int kdim = std::min<int>(l, x.phys * r);
    Eigen::HouseholderQR<MatrixXd> qr(m.transpose());
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(x.phys * r, kdim);
    MatrixXd rr = qr.matrixQR().topRows(kdim).triangularView<Eigen::Upper>();
    for (int k = 0; k < x.phys; ++k) x.a[k] = q.middleRows(k * r, r).transpose();
    MpsTensor& prev = state.t[c - 1];
    for (int k = 0; k < prev.phys; ++k) prev.a[k] = prev.a[k] * rr.transpose();
  }

  // Sweep left to right applying the diagonal two-site gates.
  for (int c = 0; c + 1 < W; ++c) {
    MpsTensor& x0 = state.t[c];
    MpsTensor& x1 = state.t[c + 1];
    const int bond = levels_[row].intra[c];
    const int l = x0.left(), r = x1.right();
    MatrixXd theta(x0.phys * l, x1.phys * r);
    for (int k0 = 0; k0 < x0.phys; ++k0)
      for (int k1 = 0; k1 < x1.phys; ++k1) {
        double w = 1.0;
        if (bond >= 0) w = p_.bond(s[bond])(k0, k1);
        theta.block(k0 * l, k1 * r, l, r).noalias() = w * (x0.a[k0] * x1.a[k1]);
      }
    MatrixXd u, v;
    double discarded = 0.0;
    split_truncate(theta, opts_.cutoff, opts_.chi_max, &u, &v, &discarded);
    stats_.max_discarded = std::max(stats_.max_discarded, discarded);
    const int chi = static_cast<int>(u.cols());
    stats_.max_chi = std::max(stats_.max_chi, chi);
    for (int k0 = 0; k0 < x0.phys; ++k0) x0.a[k0] = u.middleRows(k0 * l, l);
    for (int k1 = 0; k1 < x1.phys; ++k1) x1.a[k1] = v.middleCols(k1 * r, r);
  }

  MpsTensor& last = state.t[W - 1];
  double norm2 = 0.0;
  for (int k = 0; k < last.phys; ++k) norm2 += last.a[k].squaredNorm();
  if (!(norm2 > 0.0))
    throw std::runtime_error("contraction: zero-weight state (impossible outcome)");
  const double norm = std::sqrt(norm2);
  for (int k = 0; k < last.phys; ++k) last.a[k] /= norm;
  state.log_norm += std::log(norm);
}

void ContractionEngine::apply_transfer(BoundaryMps& state, int level, Direction dir,
                                       const SpinConfig& s) {
  const Level& lv = levels_[level];
  for (int c = 0; c < state.width(); ++c) {
    MpsTensor& x = state.t[c];
    const int pb = lv.phys_bot[c], pt = lv.phys_top[c];
    MatrixXd pmat;
    if (lv.post[c] >= 0)
      pmat = p_.bond(s[lv.post[c]]);
    else
      pmat = ones_matrix(pb, pt);
    const int from = dir == Direction::up ? pb : pt;
    const int to = dir == Direction::up ? pt : pb;
    std::array<MatrixXd, 2> next;
    for (int kt = 0; kt < to; ++kt) {
      next[kt] = MatrixXd::Zero(x.left(), x.right());
      for (int kf = 0; kf < from; ++kf) {
        const double w = dir == Direction::up ? pmat(kf, kt) : pmat(kt, kf);
        next[kt].noalias() += w * x.a[kf];
      }
    }
    x.phys = to;
    x.a = std::move(next);
  }
}

double ContractionEngine::log_weight(const SpinConfig& s) {
  BoundaryMps st = fresh_row(0, Direction::up);
  for (int r = 0; r < g_.n_rows; ++r) {
    apply_row_gates(st, r, s);
    if (r + 1 < g_.n_rows) apply_transfer(st, r, Direction::up, s);
  }
  MatrixXd env = MatrixXd::Ones(1, 1);
  for (int c = 0; c < st.width(); ++c) {
    MatrixXd b = st.t[c].a[0];
    for (int k = 1; k < st.t[c].phys; ++k) b += st.t[c].a[k];
    env = env * b;
  }
  const double scalar = env(0, 0);
  if (!(scalar > 0.0))
    throw std::runtime_error("contraction: nonpositive closure (impossible outcome)");
  return st.log_norm + std::log(scalar);
}

BoundaryMps ContractionEngine::bottom_state(int level, const SpinConfig& s) {
  BoundaryMps st = fresh_row(0, Direction::up);
  for (int r = 0; r < level; ++r) {
    apply_row_gates(st, r, s);
    apply_transfer(st, r, Direction::up, s);
  }
  return st;
}

BoundaryMps ContractionEngine::top_state(int level, const SpinConfig& s) {
  if (level >= g_.n_rows) return dummy_top_;
  BoundaryMps st = fresh_row(g_.n_rows - 1, Direction::down);
  apply_row_gates(st, g_.n_rows - 1, s);
  for (int r = g_.n_rows - 2; r >= level; --r) {
    apply_transfer(st, r, Direction::down, s);
    apply_row_gates(st, r, s);
  }
  return st;
}

std::vector<BoundaryMps> ContractionEngine::top_stack(const SpinConfig& s) {
  const int R = g_.n_rows;
  std::vector<BoundaryMps> tops(R + 1);
  tops[R] = dummy_top_;
  if (R >= 1) {
    tops[R - 1] = fresh_row(R - 1, Direction::down);
    apply_row_gates(tops[R - 1], R - 1, s);
    for (int r = R - 2; r >= 1; --r) {
      tops[r] = tops[r + 1];
      apply_transfer(tops[r], r, Direction::down, s);
      apply_row_gates(tops[r], r, s);
    }
  }
  return tops;
}

// ---------------------------------------------------------------------------
// Column-by-column contraction of <top| middle(level) |bottom>, where the
// middle layer holds the level's horizontal gates and vertical bond matrices.
// Carries one dangling classical index for the gate to the next column, so
// single-bond environments come out in O(chi^3) per column.

class ZipSweeper {
 public:
  ZipSweeper(const ContractionEngine& eng, const BoundaryMps& bot, const BoundaryMps& top,
             int level, const SpinConfig& s,
             const std::vector<std::array<double, 2>>* ins, bool build_right)
      : eng_(eng), bot_(bot), top_(top), lv_(eng.levels_[level]), s_(s) {
    w_ = bot.width();
    if (ins) {
      scaled_bot_.resize(w_);
      for (int c = 0; c < w_; ++c)
        for (int k = 0; k < bot.t[c].phys; ++k)
          scaled_bot_[c][k] = (*ins)[c][k] * bot.t[c].a[k];
    }
    lhat_[0] = MatrixXd::Ones(1, 1);
    lhat_[1] = MatrixXd::Ones(1, 1);
    if (build_right) build_right_partials();
  }

  Eigen::Matrix2d post_env(int c) const {
    Eigen::Matrix2d env = Eigen::Matrix2d::Zero();
    for (int k = 0; k < 2; ++k) {
      MatrixXd x;
      x.noalias() = abot(c, k).transpose() * lhat_[k];  // bR x tL
      for (int kt = 0; kt < 2; ++kt) {
        MatrixXd t1;
        t1.noalias() = atop(c, kt) * rpart_[c][k].transpose();  // tL x bR
        env(k, kt) = x.transpose().cwiseProduct(t1).sum();
      }
    }
    return env;
  }

  Eigen::Matrix2d intra_env(int c) {
    SigmaMats mcheck = make_mcheck(c + 1);
    Eigen::Matrix2d env = Eigen::Matrix2d::Zero();
    for (int k0 = 0; k0 < lv_.phys_bot[c]; ++k0)
      for (int k1 = 0; k1 < lv_.phys_bot[c + 1]; ++k1)
        env(k0, k1) = mcur_[k0].cwiseProduct(mcheck[k1]).sum();
    return env;
  }

  void commit_column(int c) {
    const MatrixXd pmat = p_at(c);
    for (int k = 0; k < lv_.phys_bot[c]; ++k) {
      MatrixXd x;
      x.noalias() = abot(c, k).transpose() * lhat_[k];  // bR x tL
      mcur_[k] = MatrixXd::Zero(x.rows(), atop(c, 0).cols());
      for (int kt = 0; kt < lv_phys_top(c); ++kt)
        mcur_[k].noalias() += pmat(k, kt) * (x * atop(c, kt));
    }
  }

  void advance(int c) {
    const int bond = lv_.intra[c];
    for (int k1 = 0; k1 < lv_.phys_bot[c + 1]; ++k1) {
      MatrixXd acc = MatrixXd::Zero(mcur_[0].rows(), mcur_[0].cols());
      for (int k0 = 0; k0 < lv_.phys_bot[c]; ++k0) {
        const double w = bond >= 0 ? eng_.p_.bond(s_[bond])(k0, k1) : 1.0;
        acc.noalias() += w * mcur_[k0];
      }
      lhat_[k1] = std::move(acc);
    }
  }

  double value() {
    for (int c = 0; c < w_; ++c) {
      commit_column(c);
      if (c + 1 < w_) advance(c);
    }
    double v = 0.0;
    for (int k = 0; k < lv_.phys_bot[w_ - 1]; ++k) v += mcur_[k](0, 0);
    return v;
  }

 private:
  int lv_phys_top(int c) const { return static_cast<int>(top_.t[c].phys); }

  const MatrixXd& abot(int c, int k) const {
    return scaled_bot_.empty() ? bot_.t[c].a[k] : scaled_bot_[c][k];
  }
  const MatrixXd& atop(int c, int k) const { return top_.t[c].a[k]; }

  MatrixXd p_at(int c) const {
    if (lv_.post[c] >= 0) return eng_.p_.bond(s_[lv_.post[c]]);
    return MatrixXd::Ones(bot_.t[c].phys, top_.t[c].phys);
  }

  SigmaMats make_mcheck(int c) const {
    const MatrixXd pmat = p_at(c);
    SigmaMats out;
    for (int k = 0; k < lv_.phys_bot[c]; ++k) {
      MatrixXd ar;
      ar.noalias() = abot(c, k) * rpart_[c][k];  // bL x tR
      out[k] = MatrixXd::Zero(ar.rows(), atop(c, 0).rows());
      for (int kt = 0; kt < lv_phys_top(c); ++kt)
        out[k].noalias() += pmat(k, kt) * (ar * atop(c, kt).transpose());
    }
    return out;
  }

  void build_right_partials() {
    rpart_.resize(w_);
    for (int k = 0; k < lv_.phys_bot[w_ - 1]; ++k)
      rpart_[w_ - 1][k] = MatrixXd::Ones(bot_.t[w_ - 1].right(), top_.t[w_ - 1].right());
    for (int c = w_ - 1; c >= 1; --c) {
      SigmaMats mcheck = make_mcheck(c);
      const int bond = lv_.intra[c - 1];
      for (int k0 = 0; k0 < lv_.phys_bot[c - 1]; ++k0) {
        MatrixXd acc = MatrixXd::Zero(mcheck[0].rows(), mcheck[0].cols());
        for (int k1 = 0; k1 < lv_.phys_bot[c]; ++k1) {
          const double w = bond >= 0 ? eng_.p_.bond(s_[bond])(k0, k1) : 1.0;
          acc.noalias() += w * mcheck[k1];
        }
        rpart_[c - 1][k0] = std::move(acc);
      }
    }
  }

  const ContractionEngine& eng_;
  const BoundaryMps& bot_;
  const BoundaryMps& top_;
  const ContractionEngine::Level& lv_;
  const SpinConfig& s_;
  int w_ = 0;
  std::vector<SigmaMats> scaled_bot_;
  std::vector<SigmaMats> rpart_;
  SigmaMats lhat_, mcur_;
};

double ContractionEngine::zip_value(const BoundaryMps& bot, const BoundaryMps& top,
                                    int level, const SpinConfig& s,
                                    const std::vector<std::array<double, 2>>* ins) {
  ZipSweeper z(*this, bot, top, level, s, ins, false);
  return z.value();
}

BondEnvironment ContractionEngine::bond_environment(const SpinConfig& s, int bond) {
  if (bond < 0 || bond >= g_.n_bonds())
    throw std::invalid_argument("bond_environment: bad bond index");
  const Bond& b = g_.bonds[bond];
  const int level = b.row;
  BoundaryMps bot = bottom_state(level, s);
  BoundaryMps top = top_state(level + 1, s);
  ZipSweeper z(*this, bot, top, level, s, nullptr, true);

  Eigen::Matrix2d env;
  const int c = b.col;
  for (int cc = 0; cc < c; ++cc) {
    z.commit_column(cc);
    z.advance(cc);
  }
  if (b.type == BondType::inter_row) {
    env = z.post_env(c);
  } else {
    z.commit_column(c);
    env = z.intra_env(c);
  }

  const double top_scale = env.cwiseAbs().maxCoeff();
  if (!(top_scale > 0.0))
    throw std::runtime_error("contraction: degenerate all-zero bond environment");
  if (env.minCoeff() < -1e-8 * top_scale)
    throw std::runtime_error("contraction: negative bond environment weight");
  env = env.cwiseMax(0.0);  // clamp roundoff

  BondEnvironment out;
  out.w = env;
  out.log_scale = bot.log_norm + top.log_norm;
  return out;
}

double ContractionEngine::central_magnetization(const SpinConfig& s) {
  return pair_correlator(s, g_.pinned_corner, g_.central_site);
}

double ContractionEngine::pair_correlator(const SpinConfig& s, int site_i, int site_j) {
  if (site_i == site_j) return 1.0;
  std::vector<std::pair<int, int>> insert_at;  // (row, col)
  const Site& si = g_.sites[site_i];
  const Site& sj = g_.sites[site_j];
  if (site_i == g_.pinned_corner)
    insert_at = {{sj.row, sj.col}};
  else if (site_j == g_.pinned_corner)
    insert_at = {{si.row, si.col}};
  else if (si.row == sj.row)
    insert_at = {{si.row, si.col}, {sj.row, sj.col}};
  else
    throw std::invalid_argument(
        "pair_correlator supports same-row pairs or corner-anchored pairs");

  const int level = insert_at.front().first;
  BoundaryMps bot = bottom_state(level, s);
  BoundaryMps top = top_state(level + 1, s);
  const double z = zip_value(bot, top, level, s, nullptr);
  if (!(z > 0.0))
    throw std::runtime_error("contraction: zero normalization in correlator");
  std::vector<std::array<double, 2>> ins(g_.n_cols, {1.0, 1.0});
  for (auto [r, c] : insert_at) ins[c] = {1.0, -1.0};
  const double num = zip_value(bot, top, level, s, &ins);
  return num / z;
}

ContractionEngine::CentralMeasurement ContractionEngine::measure_with_pair(
    const SpinConfig& s, int site_i, int site_j) {
  const Site& center = g_.sites[g_.central_site];
  const Site& si = g_.sites[site_i];
  const Site& sj = g_.sites[site_j];
  CentralMeasurement out;
  if (site_i != g_.pinned_corner && site_j != g_.pinned_corner &&
      si.row == center.row && sj.row == center.row) {
    const int level = center.row;
    BoundaryMps bot = bottom_state(level, s);
    BoundaryMps top = top_state(level + 1, s);
    const double z = zip_value(bot, top, level, s, nullptr);
    if (!(z > 0.0))
      throw std::runtime_error("contraction: zero normalization in measurement");
    std::vector<std::array<double, 2>> ins(g_.n_cols, {1.0, 1.0});
    ins[center.col] = {1.0, -1.0};
    out.m_c = zip_value(bot, top, level, s, &ins) / z;
    ins.assign(g_.n_cols, {1.0, 1.0});
    ins[si.col][1] *= -1.0;
    ins[sj.col][1] *= -1.0;
    out.pair = zip_value(bot, top, level, s, &ins) / z;
    return out;
  }
  out.m_c = central_magnetization(s);
  out.pair = pair_correlator(s, site_i, site_j);
  return out;
}

int ContractionEngine::raster_sweep(SpinConfig& s, const DecideFn& decide) {
  const int R = g_.n_rows, W = g_.n_cols;
  std::vector<BoundaryMps> tops = top_stack(s);
  BoundaryMps bot = fresh_row(0, Direction::up);
  int accepted = 0;

  for (int r = 0; r < R; ++r) {
    const BoundaryMps& top = tops[r + 1];
    ZipSweeper z(*this, bot, top, r, s, nullptr, true);
    const Level& lv = levels_[r];
    for (int c = 0; c < W; ++c) {
      if (lv.post[c] >= 0) {
        const Eigen::Matrix2d env = z.post_env(c);
        if (decide(lv.post[c], env)) {
          s[lv.post[c]] = -s[lv.post[c]];
          ++accepted;
        }
      }
      z.commit_column(c);
      if (c + 1 < W) {
        if (lv.intra[c] >= 0) {
          const Eigen::Matrix2d env = z.intra_env(c);
          if (decide(lv.intra[c], env)) {
            s[lv.intra[c]] = -s[lv.intra[c]];
            ++accepted;
          }
        }
        z.advance(c);
      }
    }
    apply_row_gates(bot, r, s);
    if (r + 1 < R) apply_transfer(bot, r, Direction::up, s);
  }
  return accepted;
}

std::vector<int> ContractionEngine::bond_dim_profile(const SpinConfig& s) {
  BoundaryMps st = fresh_row(0, Direction::up);
  std::vector<int> profile;
  for (int r = 0; r < g_.n_rows; ++r) {
    apply_row_gates(st, r, s);
    profile.push_back(st.max_bond_dim());
    if (r + 1 < g_.n_rows) apply_transfer(st, r, Direction::up, s);
  }
  return profile;
}

std::string ContractionEngine::stats_json(const SpinConfig& s) {
  nlohmann::ordered_json j;
  j["bond_dim_profile"] = bond_dim_profile(s);
  j["max_chi"] = stats_.max_chi;
  j["max_discarded_weight"] = stats_.max_discarded;
  return j.dump(2);
}

// ---------------------------------------------------------------------------

double log_weight(const LatticeGraph& g, const CircuitParams& p, const SpinConfig& s,
                  const ContractionOptions& opts, ContractionStats* stats) {
  ContractionEngine eng(g, p, opts);
  const double lw = eng.log_weight(s);
  if (stats) stats->merge(eng.stats());
  return lw;
}

BondEnvironment bond_environment(const LatticeGraph& g, const CircuitParams& p,
                                 const SpinConfig& s, int bond,
                                 const ContractionOptions& opts) {
  ContractionEngine eng(g, p, opts);
  return eng.bond_environment(s, bond);
}

double pinned_central_magnetization(const LatticeGraph& g, const CircuitParams& p,
                                    const SpinConfig& s, const ContractionOptions& opts) {
  ContractionEngine eng(g, p, opts);
  return eng.central_magnetization(s);
}

void apply_row(BoundaryMps& state, const LatticeGraph& g, const CircuitParams& p,
               const SpinConfig& s, int row, Direction dir,
               const ContractionOptions& opts) {
  ContractionEngine eng(g, p, opts);
  eng.apply_row_gates(state, row, s);
  if (dir == Direction::up && row + 1 < g.n_rows)
    eng.apply_transfer(state, row, Direction::up, s);
  else if (dir == Direction::down && row - 1 >= 0)
    eng.apply_transfer(state, row - 1, Direction::down, s);
}

}  // namespace nmc
