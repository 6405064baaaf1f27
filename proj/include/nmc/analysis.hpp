#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace nmc {

struct BinnedStats {
  double mean = 0.0;
  double stderror = 0.0;
  double tau_int = 0.5;
  int level = 0;  // binning level the error was read from
};

/// Logarithmic binning analysis for an autocorrelated series (length >= 8).
/// The error is taken at the deepest level that still has >= 32 bins;
/// tau_int = (stderr / stderr_naive)^2 / 2.
BinnedStats binning_error(const std::vector<double>& series);

/// Pooled multi-chain average: length-weighted mean, error from the
/// between-chain scatter combined with the per-chain binning errors.
/// Chains may have different lengths; needs >= 2 chains.
std::pair<double, double> disorder_average(const std::vector<std::vector<double>>& chains);

struct CollapsePoint {
  double t = 0.0;
  double q = 0.0;
  double err = 0.0;
};

struct ScalingFit {
  double t_c = 0.0;
  double nu = 0.0;
  double beta_over_nu = 0.0;
  double quality = 0.0;  // collapse objective at the minimum
  double window_lo = 0.0, window_hi = 0.0;
  bool converged = false;
  int evaluations = 0;
};

/// Finite-size-scaling collapse of q(t, L) onto q = L^{-beta/nu} f((t-t_c) L^{1/nu}).
/// Objective: Houdayer-Hartmann-style quality function (each rescaled point
/// compared against the error-weighted linear interpolation of the other
/// sizes' bracketing points). Minimized by deterministic Nelder-Mead descent
/// from `init` = (t_c, 1/nu, beta/nu) plus two jittered restarts.
/// Needs >= 3 system sizes and >= 4 points per size inside the window.
ScalingFit collapse_fit(const std::map<int, std::vector<CollapsePoint>>& datasets,
                        double window_lo, double window_hi,
                        const std::array<double, 3>& init);

/// Rescaled points (x, y, err, L) of a fitted collapse, for plotting.
struct RescaledPoint {
  double x = 0.0, y = 0.0, err = 0.0;
  int size = 0;
  double t = 0.0;
};
std::vector<RescaledPoint> rescale_collapse(
    const std::map<int, std::vector<CollapsePoint>>& datasets, const ScalingFit& fit);

/// Deterministic Nelder-Mead minimizer (fixed coefficients, no randomness).
struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  int evaluations = 0;
};
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& x0, const std::vector<double>& step,
                          int max_iter, double ftol);

/// Survival function of the chi-square distribution (regularized upper
/// incomplete gamma), for goodness-of-fit tests.
double chi_square_pvalue(double statistic, int dof);

}  // namespace nmc
