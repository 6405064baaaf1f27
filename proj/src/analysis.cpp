#include "nmc/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace nmc {

namespace {

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size() - 1);
}

}  // namespace

BinnedStats binning_error(const std::vector<double>& series) {
  if (series.size() < 8)
    throw std::invalid_argument("binning_error: series too short (< 8)");

  BinnedStats out;
  out.mean = mean_of(series);

  std::vector<double> bins = series;
  double naive_var = variance_of(bins, out.mean) / static_cast<double>(bins.size());
  double err = std::sqrt(naive_var);
  int level = 0;

  std::vector<double> current = series;
  while (true) {
    const std::size_t m = current.size() / 2;
    if (m < 32) break;
    std::vector<double> next(m);
    for (std::size_t i = 0; i < m; ++i)
      next[i] = 0.5 * (current[2 * i] + current[2 * i + 1]);
    current = std::move(next);
    ++level;
    const double var = variance_of(current, mean_of(current)) /
                       static_cast<double>(current.size());
    err = std::sqrt(var);
  }

  out.stderror = err;
  out.level = level;
  out.tau_int = naive_var > 0.0 ? 0.5 * (err * err) / naive_var : 0.5;
  return out;
}

std::pair<double, double> disorder_average(
    const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2)
    throw std::invalid_argument("disorder_average: need >= 2 chains");
  const int m = static_cast<int>(chains.size());

  double w_total = 0.0, acc = 0.0;
  std::vector<double> means(m), werr2(m), weights(m);
  for (int c = 0; c < m; ++c) {
    if (chains[c].empty())
      throw std::invalid_argument("disorder_average: empty chain series");
    means[c] = mean_of(chains[c]);
    weights[c] = static_cast<double>(chains[c].size());
    if (chains[c].size() >= 8) {
      werr2[c] = std::pow(binning_error(chains[c]).stderror, 2);
    } else {
      werr2[c] = variance_of(chains[c], means[c]) / weights[c];
    }
    w_total += weights[c];
    acc += weights[c] * means[c];
  }
  const double mean = acc / w_total;

  double within = 0.0, between = 0.0;
  for (int c = 0; c < m; ++c) {
    const double w = weights[c] / w_total;
    within += w * w * werr2[c];
    between += w * (means[c] - mean) * (means[c] - mean);
  }
  between /= static_cast<double>(m - 1);
  return {mean, std::sqrt(within + between)};
}

// ---------------------------------------------------------------------------

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& x0, const std::vector<double>& step,
                          int max_iter, double ftol) {
  const int n = static_cast<int>(x0.size());
  std::vector<std::vector<double>> pts(n + 1, x0);
  for (int i = 0; i < n; ++i) pts[i + 1][i] += step[i];

  SimplexResult res;
  std::vector<double> vals(n + 1);
  for (int i = 0; i <= n; ++i) vals[i] = f(pts[i]);
  res.evaluations = n + 1;

  auto centroid_except = [&](int skip) {
    std::vector<double> c(n, 0.0);
    for (int i = 0; i <= n; ++i) {
      if (i == skip) continue;
      for (int k = 0; k < n; ++k) c[k] += pts[i][k];
    }
    for (double& x : c) x /= n;
    return c;
  };
  auto lerp = [&](const std::vector<double>& a, const std::vector<double>& b,
                  double t) {
    std::vector<double> c(n);
    for (int k = 0; k < n; ++k) c[k] = a[k] + t * (b[k] - a[k]);
    return c;
  };

  for (int it = 0; it < max_iter; ++it) {
    // order: best first
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return vals[a] < vals[b]; });
    std::vector<std::vector<double>> spts(n + 1);
    std::vector<double> svals(n + 1);
    for (int i = 0; i <= n; ++i) {
      spts[i] = pts[idx[i]];
      svals[i] = vals[idx[i]];
    }
    pts = std::move(spts);
    vals = std::move(svals);

    if (std::abs(vals[n] - vals[0]) <=
        ftol * (std::abs(vals[0]) + std::abs(vals[n]) + 1e-300)) {
      res.converged = true;
      break;
    }

    const std::vector<double> cen = centroid_except(n);
    const std::vector<double> xr = lerp(cen, pts[n], -1.0);  // reflection
    const double fr = f(xr);
    ++res.evaluations;
    if (fr < vals[0]) {
      const std::vector<double> xe = lerp(cen, pts[n], -2.0);  // expansion
      const double fe = f(xe);
      ++res.evaluations;
      if (fe < fr) {
        pts[n] = xe;
        vals[n] = fe;
      } else {
        pts[n] = xr;
        vals[n] = fr;
      }
    } else if (fr < vals[n - 1]) {
      pts[n] = xr;
      vals[n] = fr;
    } else {
      const std::vector<double> xc = lerp(cen, pts[n], 0.5);  // contraction
      const double fc = f(xc);
      ++res.evaluations;
      if (fc < vals[n]) {
        pts[n] = xc;
        vals[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {  // shrink toward best
          pts[i] = lerp(pts[0], pts[i], 0.5);
          vals[i] = f(pts[i]);
          ++res.evaluations;
        }
      }
    }
  }

  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (vals[i] < vals[best]) best = i;
  res.x = pts[best];
  res.value = vals[best];
  return res;
}

// ---------------------------------------------------------------------------

namespace {

struct Scaled {
  double x, y, e;
  int size;
};

// Houdayer-Hartmann quality: for every rescaled point, the squared deviation
// from the linear interpolation of the bracketing points of the *other*
// sizes, normalized by the combined errors; averaged over usable points.
double collapse_objective(const std::map<int, std::vector<CollapsePoint>>& data,
                          double window_lo, double window_hi, double t_c,
                          double inv_nu, double beta_over_nu) {
  if (inv_nu <= 0.0 || inv_nu > 20.0) return 1e12;
  std::vector<std::vector<Scaled>> sets;
  for (const auto& [size, pts] : data) {
    std::vector<Scaled> sc;
    const double la = std::pow(static_cast<double>(size), inv_nu);
    const double lb = std::pow(static_cast<double>(size), beta_over_nu);
    for (const CollapsePoint& p : pts) {
      if (p.t < window_lo - 1e-15 || p.t > window_hi + 1e-15) continue;
      sc.push_back({(p.t - t_c) * la, p.q * lb, std::max(p.err, 1e-300) * lb, size});
    }
    std::sort(sc.begin(), sc.end(), [](const Scaled& a, const Scaled& b) {
      return a.x < b.x;
    });
    sets.push_back(std::move(sc));
  }

  double acc = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    std::vector<Scaled> others;
    for (std::size_t j = 0; j < sets.size(); ++j)
      if (j != i) others.insert(others.end(), sets[j].begin(), sets[j].end());
    std::sort(others.begin(), others.end(),
              [](const Scaled& a, const Scaled& b) { return a.x < b.x; });
    for (const Scaled& p : sets[i]) {
      auto hi = std::lower_bound(others.begin(), others.end(), p.x,
                                 [](const Scaled& s, double x) { return s.x < x; });
      if (hi == others.begin() || hi == others.end()) continue;  // not bracketed
      const Scaled& b = *hi;
      const Scaled& a = *(hi - 1);
      const double span = b.x - a.x;
      double y, var;
      if (span <= 0.0) {
        y = 0.5 * (a.y + b.y);
        var = 0.25 * (a.e * a.e + b.e * b.e);
      } else {
        const double wa = (b.x - p.x) / span, wb = (p.x - a.x) / span;
        y = wa * a.y + wb * b.y;
        var = wa * wa * a.e * a.e + wb * wb * b.e * b.e;
      }
      const double denom = var + p.e * p.e;
      if (denom <= 0.0) continue;
      acc += (p.y - y) * (p.y - y) / denom;
      ++used;
    }
  }
  if (used == 0) return 1e12;
  return acc / used;
}

}  // namespace

ScalingFit collapse_fit(const std::map<int, std::vector<CollapsePoint>>& datasets,
                        double window_lo, double window_hi,
                        const std::array<double, 3>& init) {
  if (datasets.size() < 3)
    throw std::invalid_argument("collapse_fit: need >= 3 system sizes");
  for (const auto& [size, pts] : datasets) {
    int in_window = 0;
    for (const CollapsePoint& p : pts)
      if (p.t >= window_lo - 1e-15 && p.t <= window_hi + 1e-15) ++in_window;
    if (in_window < 4)
      throw std::invalid_argument("collapse_fit: need >= 4 points per size in window");
  }

  auto objective = [&](const std::vector<double>& x) {
    const double t_c = x[0], inv_nu = x[1], bon = x[2];
    if (t_c < window_lo - 0.5 * (window_hi - window_lo) ||
        t_c > window_hi + 0.5 * (window_hi - window_lo))
      return 1e12;
    if (bon < -2.0 || bon > 5.0) return 1e12;
    return collapse_objective(datasets, window_lo, window_hi, t_c, inv_nu, bon);
  };

  // three deterministic starts: the caller's init and two jittered copies
  const double span = window_hi - window_lo;
  const std::array<std::array<double, 3>, 3> starts = {{
      {init[0], init[1], init[2]},
      {init[0] + 0.1 * span, init[1] * 1.3, init[2] * 1.4 + 0.02},
      {init[0] - 0.1 * span, init[1] * 0.7, init[2] * 0.6 + 0.01},
  }};

  ScalingFit fit;
  fit.window_lo = window_lo;
  fit.window_hi = window_hi;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s0 : starts) {
    SimplexResult r = nelder_mead(objective, {s0[0], s0[1], s0[2]},
                                  {0.05 * span, 0.2 * s0[1] + 0.02, 0.05}, 2000, 1e-10);
    fit.evaluations += r.evaluations;
    if (r.value < best) {
      best = r.value;
      fit.t_c = r.x[0];
      fit.nu = 1.0 / r.x[1];
      fit.beta_over_nu = r.x[2];
      fit.quality = r.value;
      fit.converged = r.converged;
    }
  }
  return fit;
}

std::vector<RescaledPoint> rescale_collapse(
    const std::map<int, std::vector<CollapsePoint>>& datasets, const ScalingFit& fit) {
  std::vector<RescaledPoint> out;
  for (const auto& [size, pts] : datasets) {
    const double la = std::pow(static_cast<double>(size), 1.0 / fit.nu);
    const double lb = std::pow(static_cast<double>(size), fit.beta_over_nu);
    for (const CollapsePoint& p : pts)
      out.push_back({(p.t - fit.t_c) * la, p.q * lb, p.err * lb, size, p.t});
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// regularized incomplete gamma: series for x < a+1, continued fraction else
double gamma_p_series(double a, double x) {
  double sum = 1.0 / a, term = sum;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi_square_pvalue(double statistic, int dof) {
  if (dof <= 0) throw std::invalid_argument("chi_square_pvalue: dof must be positive");
  if (statistic <= 0.0) return 1.0;
  const double a = 0.5 * dof, x = 0.5 * statistic;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_contfrac(a, x);
}

}  // namespace nmc
