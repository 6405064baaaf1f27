// Acceptance suite: one self-contained check per criterion, each printing a
// single PASS/FAIL line (details indented below it). Run all criteria or a
// single one with --only N.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nmc/analysis.hpp"
#include "nmc/contraction.hpp"
#include "nmc/io.hpp"
#include "nmc/lattice.hpp"
#include "nmc/model.hpp"
#include "nmc/oracle.hpp"
#include "nmc/rng.hpp"
#include "nmc/sampler.hpp"

using namespace nmc;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;
const fs::path kArtifactDir = "acceptance_artifacts";

struct Detail {
  std::ostringstream out;
  bool ok = true;
  void require(bool cond, const std::string& what) {
    ok = ok && cond;
    out << "    " << (cond ? "ok   " : "FAIL ") << what << "\n";
  }
};

SpinConfig random_config(const LatticeGraph& g, SplitMix64& rng) {
  SpinConfig s(g.n_bonds());
  for (auto& v : s) v = static_cast<std::int8_t>(rng.sign());
  return s;
}

// ---------------------------------------------------------------- criterion 1
bool criterion_exactness(Detail& d) {
  SplitMix64 rng(20240201);
  std::vector<LatticeGraph> graphs;
  for (int L : {1, 2, 5, 11}) graphs.push_back(build_lattice(LatticeKind::chain, {L}));
  for (int L : {1, 2}) graphs.push_back(build_lattice(LatticeKind::lieb_square, {L}));
  graphs.push_back(build_lattice(LatticeKind::heavy_hexagon, {2}));

  int draws = 0;
  double worst = 0.0;
  for (const LatticeGraph& g : graphs) {
    for (int k = 0; k < 15; ++k) {
      const double ta = 0.02 * kPi + rng.uniform() * 0.44 * kPi;
      const double tb = 0.02 * kPi + rng.uniform() * 0.44 * kPi;
      const CircuitParams p = couplings_from_times(ta, tb);
      const SpinConfig s1 = random_config(g, rng);
      const SpinConfig s2 = random_config(g, rng);
      const double lhs = log_weight(g, p, s1) - log_weight(g, p, s2);
      const double rhs = std::log(partition_sum(g, p, s1) / partition_sum(g, p, s2));
      worst = std::max(worst, std::abs(std::exp(lhs - rhs) - 1.0));
      ++draws;
    }
  }
  d.require(draws >= 100, "100 random (angle, outcome) draws (" +
                              std::to_string(draws) + " across 7 guarded lattices)");
  d.require(worst < 1e-8,
            "contraction ratios match enumeration, worst relative deviation = " +
                io::format_double(worst));
  return d.ok;
}

// ---------------------------------------------------------------- criterion 2
bool criterion_nishimori(Detail& d) {
  const LatticeGraph g = build_lattice(LatticeKind::lieb_square, {2});
  for (double frac : {0.05, 0.10, 0.15, 0.20}) {
    const NishimoriReport r = verify_nishimori(g, frac * kPi);
    double worst = 0.0;
    for (const auto& c : r.checks) worst = std::max(worst, c.max_dev);
    d.require(r.all_pass && r.checks.size() == 3,
              "t_A = " + std::to_string(frac) +
                  " pi: p~Z, gauge invariance, EA identity to 1e-10 (max dev " +
                  io::format_double(worst) + ")");
  }
  const NishimoriReport off = verify_nishimori(g, 0.10 * kPi, kPi / 5);
  d.require(!off.checks.empty() && off.checks[0].name == "gauge_invariance" &&
                !off.checks[0].pass,
            "gauge invariance fails off the line at t_B = pi/5 (dev " +
                io::format_double(off.checks[0].max_dev) + ")");
  fs::create_directories(kArtifactDir);
  io::write_text(kArtifactDir / "nishimori_report.json",
                 verify_nishimori(g, 0.15 * kPi).to_json());
  return d.ok;
}

// ---------------------------------------------------------------- criterion 3
bool criterion_oned(Detail& d) {
  SamplerOptions opts;
  for (const bool diagonal : {false, true}) {
    for (int L : {4, 8, 16, 32}) {
      const double ta = kPi / 8;
      const double tb = diagonal ? ta : kPi / 4;
      const LatticeGraph g = build_lattice(LatticeKind::chain, {L});
      const CircuitParams p = couplings_from_times(ta, tb);
      Schedule sched;
      sched.n_sweeps = L <= 16 ? 10000 : 4000;
      sched.n_discard = sched.n_sweeps / 10;
      const auto records =
          run_chains(g, p, sched, 33 + L + (diagonal ? 1 : 0), 11, 2, opts);
      const auto [q, err] = estimate_ea(records);
      const double exact = oned_q(ta, tb, L);
      const bool pass = std::abs(q - exact) < 3 * err + 1e-9;
      std::ostringstream label;
      label << (diagonal ? "diagonal" : "nishimori") << " cut, L = " << L << ": q = "
            << q << " +- " << err << " vs " << exact;
      d.require(pass, label.str());
    }
  }
  return d.ok;
}

// ---------------------------------------------------------------- criterion 4
bool criterion_correlators(Detail& d) {
  const LatticeGraph g = build_lattice(LatticeKind::lieb_square, {6});
  struct Point {
    double ta, tb;
  };
  for (const Point pt : {Point{0.12 * kPi, kPi / 4}, Point{0.10 * kPi, kPi / 5}}) {
    const CircuitParams p = couplings_from_times(pt.ta, pt.tb);
    Schedule sched{1500, 150, 1};
    const auto records = run_chains(g, p, sched, 1001, 11, 2, {});

    const double c2 = std::cos(2 * pt.ta) * std::cos(2 * pt.tb);
    const double s2 = std::sin(2 * pt.ta) * std::sin(2 * pt.tb);

    const auto [ms, ms_err] = chain_average(records, ChainSeries::mean_s);
    d.require(std::abs(ms - c2) < 3 * ms_err + 1e-6,
              "[s] = " + io::format_double(ms) + " +- " + io::format_double(ms_err) +
                  " vs cos2tA cos2tB = " + io::format_double(c2));

    const auto [plq, plq_err] = chain_average(records, ChainSeries::plaquette);
    const double plq_exact = std::pow(c2, 4) + std::pow(s2, 4);
    d.require(std::abs(plq - plq_exact) < 3 * plq_err + 1e-6,
              "plaquette = " + io::format_double(plq) + " +- " +
                  io::format_double(plq_err) + " vs " + io::format_double(plq_exact));

    const auto [wl, wl_err] = chain_average(records, ChainSeries::wilson);
    const double wl_exact = std::pow(-s2, 6);
    d.require(std::abs(wl - wl_exact) < 3 * wl_err + 1e-6,
              "wilson line = " + io::format_double(wl) + " +- " +
                  io::format_double(wl_err) + " vs (-sin2tA sin2tB)^6 = " +
                  io::format_double(wl_exact));
  }
  return d.ok;
}

// ----------------------------------------------------------- criteria 5 and 6
struct ScanResult {
  std::vector<double> grid;
  std::map<int, std::vector<io::AggregateRow>> rows;  // size -> per-point
};

ScanResult run_scan(bool diagonal, const std::string& tag) {
  const std::vector<int> sizes = {6, 8, 10, 12};
  ScanResult res;
  for (int i = 0; i < 9; ++i) res.grid.push_back(0.10 * kPi + 0.10 * kPi * i / 8.0);

  struct Task {
    int size_idx, point, chain;
  };
  std::vector<Task> tasks;
  for (int si = 0; si < static_cast<int>(sizes.size()); ++si)
    for (int pt = 0; pt < static_cast<int>(res.grid.size()); ++pt)
      for (int ch = 0; ch < 11; ++ch) tasks.push_back({si, pt, ch});

  std::map<int, std::vector<std::vector<ChainRecord>>> records;
  for (int L : sizes)
    records[L] = std::vector<std::vector<ChainRecord>>(res.grid.size(),
                                                       std::vector<ChainRecord>(11));
  Schedule sched{2000, 200, 1};
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(2)
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    try {
      const Task& task = tasks[t];
      const int L = sizes[task.size_idx];
      const double ta = res.grid[task.point];
      const double tb = diagonal ? ta : kPi / 4;
      const LatticeGraph g = build_lattice(LatticeKind::lieb_square, {L});
      const CircuitParams p = couplings_from_times(ta, tb);
      const std::uint64_t stream =
          (static_cast<std::uint64_t>(task.size_idx) * 9 + task.point) * 11 +
          task.chain;
      records[L][task.point][task.chain] =
          run_chain(g, p, sched, diagonal ? 7102 : 7101, static_cast<int>(stream), {});
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  for (int L : sizes) {
    std::vector<io::AggregateRow> rows;
    for (std::size_t pt = 0; pt < res.grid.size(); ++pt) {
      io::AggregateRow row;
      row.t_a = res.grid[pt];
      row.size = L;
      std::tie(row.q, row.q_err) = estimate_ea(records[L][pt]);
      std::tie(row.mean_s, row.mean_s_err) =
          chain_average(records[L][pt], ChainSeries::mean_s);
      std::tie(row.plaquette, row.plaquette_err) =
          chain_average(records[L][pt], ChainSeries::plaquette);
      std::tie(row.wilson, row.wilson_err) =
          chain_average(records[L][pt], ChainSeries::wilson);
      row.acceptance = chain_average(records[L][pt], ChainSeries::acceptance).first;
      rows.push_back(row);
    }
    res.rows[L] = rows;
    fs::create_directories(kArtifactDir);
    io::write_aggregate_csv(
        kArtifactDir / (tag + "_L" + std::to_string(L) + ".csv"), rows, false);
  }
  return res;
}

bool criterion_critical_point(Detail& d) {
  const ScanResult scan = run_scan(false, "nishimori_scan");

  std::map<int, std::vector<CollapsePoint>> data;
  for (const auto& [L, rows] : scan.rows)
    for (const auto& r : rows) data[L].push_back({r.t_a, r.q, r.q_err});

  const ScalingFit fit =
      collapse_fit(data, 0.10 * kPi, 0.20 * kPi, {0.15 * kPi, 1.0 / 1.4, 0.36 / 1.4});
  std::ostringstream fitjson;
  fitjson << "{\n  \"t_c_over_pi\": " << io::format_double(fit.t_c / kPi)
          << ",\n  \"nu\": " << io::format_double(fit.nu)
          << ",\n  \"beta_over_nu\": " << io::format_double(fit.beta_over_nu)
          << ",\n  \"quality\": " << io::format_double(fit.quality) << "\n}\n";
  io::write_text(kArtifactDir / "nishimori_fit.json", fitjson.str());

  d.require(fit.t_c > 0.14 * kPi && fit.t_c < 0.16 * kPi,
            "collapse t_c = " + io::format_double(fit.t_c / kPi) +
                " pi inside [0.14, 0.16] pi (paper: 0.149 pi)");
  d.require(fit.nu > 1.1 && fit.nu < 1.8,
            "collapse nu = " + io::format_double(fit.nu) +
                " inside [1.1, 1.8] (paper: 1.4)");

  const auto& l6 = scan.rows.at(6);
  d.require(l6.front().q < 0.1, "L=6 q(0.10 pi) = " + io::format_double(l6.front().q) +
                                    " < 0.1 (disordered side)");
  d.require(l6.back().q > 0.5, "L=6 q(0.20 pi) = " + io::format_double(l6.back().q) +
                                   " > 0.5 (ordered side)");
  return d.ok;
}

bool criterion_diagonal_cut(Detail& d) {
  const ScanResult scan = run_scan(true, "diagonal_scan");

  // difference q_big - q_small changes sign inside the window
  auto interp = [&](const std::vector<io::AggregateRow>& rows, double t) {
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
      if (rows[i].t_a <= t && t <= rows[i + 1].t_a) {
        const double w = (t - rows[i].t_a) / (rows[i + 1].t_a - rows[i].t_a);
        return (1 - w) * rows[i].q + w * rows[i + 1].q;
      }
    return rows.back().q;
  };

  const double lo = 0.155 * kPi, hi = 0.18 * kPi;
  std::vector<double> crossings;
  for (auto [small, big] : {std::pair{6, 12}, {6, 10}, {8, 12}}) {
    const auto& rs = scan.rows.at(small);
    const auto& rb = scan.rows.at(big);
    for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
      const double d0 = rb[i].q - rs[i].q;
      const double d1 = rb[i + 1].q - rs[i + 1].q;
      if (d0 < 0.0 && d1 >= 0.0) {
        crossings.push_back(rs[i].t_a +
                            (rs[i + 1].t_a - rs[i].t_a) * (-d0) / (d1 - d0));
        break;
      }
    }
  }
  const double d_lo = interp(scan.rows.at(12), lo) - interp(scan.rows.at(6), lo);
  const double d_hi = interp(scan.rows.at(12), hi) - interp(scan.rows.at(6), hi);
  d.require(d_lo < 0.0, "q(L=12) < q(L=6) at the left window edge 0.155 pi (diff " +
                            io::format_double(d_lo) + ")");
  d.require(d_hi > 0.0, "q(L=12) > q(L=6) at the right window edge 0.18 pi (diff " +
                            io::format_double(d_hi) + ")");
  if (!crossings.empty()) {
    double mean = 0.0;
    for (double c : crossings) mean += c;
    mean /= crossings.size();
    d.require(mean > lo && mean < hi,
              "mean size-pair crossing at " + io::format_double(mean / kPi) +
                  " pi inside [0.155, 0.18] pi (paper: 0.168 pi)");
  } else {
    d.require(false, "no size-pair crossing found on the grid");
  }
  return d.ok;
}

// ---------------------------------------------------------------- criterion 7
bool criterion_cube(Detail& d) {
  const LatticeGraph g = build_lattice(LatticeKind::cubic3d, {2, 2, 2});
  SplitMix64 rng(555);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double ta = rng.uniform() * kPi / 2;
    const double tb = rng.uniform() * kPi / 2;
    const CircuitParams p = couplings_from_times(ta, tb);
    const double expected = std::pow(std::cos(2 * ta) * std::cos(2 * tb), 6) +
                            std::pow(std::sin(2 * ta) * std::sin(2 * tb), 6);
    worst = std::max(worst,
                     std::abs(premeasurement_check(g, p, PremeasObservable::cube_product) -
                              expected));
  }
  d.require(worst < 1e-10, "cube product equals cos^6 cos^6 + sin^6 sin^6 (worst dev " +
                               io::format_double(worst) + ")");

  double worst_nish = 0.0;
  for (int i = 0; i <= 10; ++i) {
    const double ta = 0.025 * kPi * i;
    const CircuitParams p = couplings_from_times(ta, kPi / 4);
    worst_nish = std::max(
        worst_nish, std::abs(premeasurement_check(g, p, PremeasObservable::cube_product) -
                             std::pow(std::sin(2 * ta), 6)));
  }
  d.require(worst_nish < 1e-10, "cube product equals sin^6(2 t_A) on the gauge cut "
                                "(worst dev " + io::format_double(worst_nish) + ")");

  const double proj_dev = strong_limit_projector_deviation(g);
  d.require(proj_dev < 1e-10,
            "two-body strong-measurement projector identity (max dev " +
                io::format_double(proj_dev) + ")");
  return d.ok;
}

// ---------------------------------------------------------------- criterion 8
bool criterion_sampler_law(Detail& d) {
  const LatticeGraph g = build_lattice(LatticeKind::lieb_square, {2});
  const CircuitParams p = couplings_from_times(kPi / 8, kPi / 4);
  const ExactEnsemble oracle = enumerate_ensemble(g, p);
  const int n_conf = 1 << g.n_bonds();

  const int n_chains = 4;
  const long n_sweeps = 1000000;
  const long burn = 50000;
  std::vector<std::vector<long>> counts(n_chains, std::vector<long>(n_conf, 0));

#pragma omp parallel for num_threads(2)
  for (int chain = 0; chain < n_chains; ++chain) {
    SplitMix64 rng(SplitMix64::stream_seed(88, chain));
    SpinConfig s = init_config(g, InitMode::random_flux_free, rng);
    ContractionEngine eng(g, p);
    for (long sweep = 0; sweep < n_sweeps; ++sweep) {
      metropolis_sweep(eng, s, rng);
      if (sweep >= burn) ++counts[chain][config_to_mask(s)];
    }
  }

  // seed-averaged total variation at 1e6 sweeps per chain
  std::vector<long> pooled(n_conf, 0);
  for (const auto& c : counts)
    for (int m = 0; m < n_conf; ++m) pooled[m] += c[m];
  const double n_pooled = static_cast<double>(n_chains) * (n_sweeps - burn);
  double tv = 0.0;
  for (int m = 0; m < n_conf; ++m)
    tv += std::abs(pooled[m] / n_pooled - oracle.prob[m]);
  tv /= 2.0;
  d.require(tv < 0.02, "total variation to the enumerated law = " +
                           io::format_double(tv) + " < 0.02");

  // chi-square on cells merged to expected counts >= 10
  std::vector<std::pair<double, long>> cells;  // (expected, observed)
  double tail_exp = 0.0;
  long tail_obs = 0;
  for (int m = 0; m < n_conf; ++m) {
    const double e = oracle.prob[m] * n_pooled;
    if (e < 10.0) {
      tail_exp += e;
      tail_obs += pooled[m];
    } else {
      cells.push_back({e, pooled[m]});
    }
  }
  if (tail_exp > 0.0) cells.push_back({tail_exp, tail_obs});
  // thin the statistic by the measured autocorrelation time of the sweeps
  std::vector<double> indicator;
  indicator.reserve(200000);
  {
    SplitMix64 rng(SplitMix64::stream_seed(88, 0));
    SpinConfig s = init_config(g, InitMode::random_flux_free, rng);
    ContractionEngine eng(g, p);
    const std::uint32_t probe = config_to_mask(s);
    for (int sweep = 0; sweep < 200000; ++sweep) {
      metropolis_sweep(eng, s, rng);
      indicator.push_back(config_to_mask(s) == probe ? 1.0 : 0.0);
    }
  }
  const double tau = std::max(0.5, binning_error(indicator).tau_int);
  double stat = 0.0;
  for (auto [e, o] : cells) stat += (o - e) * (o - e) / e;
  stat /= 2.0 * tau;  // effective sample correction for autocorrelated draws
  const double pvalue = chi_square_pvalue(stat, static_cast<int>(cells.size()) - 1);
  d.require(pvalue > 0.01, "chi-square p = " + io::format_double(pvalue) +
                               " > 0.01 over " + std::to_string(cells.size()) +
                               " merged cells (tau_int = " + io::format_double(tau) +
                               ")");
  return d.ok;
}

struct Criterion {
  int id;
  std::string label;
  std::function<bool(Detail&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

  const std::vector<Criterion> criteria = {
      {1, "exactness: contraction vs enumeration on <= 24-spin lattices",
       criterion_exactness},
      {2, "nishimori identity suite on lieb L=2", criterion_nishimori},
      {3, "1D analytic reproduction for L in {4,8,16,32}", criterion_oned},
      {4, "correlator formulas on lieb L=6", criterion_correlators},
      {5, "critical point from the nishimori-line scan (L=6..12)",
       criterion_critical_point},
      {6, "diagonal-cut crossing", criterion_diagonal_cut},
      {7, "3D oracle: cube product and projector identity", criterion_cube},
      {8, "sampler stationary law on lieb L=2", criterion_sampler_law},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Detail detail;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail.out << "    exception: " << e.what() << "\n";
      ok = false;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": " << c.label
              << " (" << secs << " s)\n"
              << detail.out.str();
    if (!ok) ++failures;
  }
  return failures;
}
