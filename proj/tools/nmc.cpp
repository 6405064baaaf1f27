// Command-line driver: reproducible sampling runs, exact desk-scale checks,
// and finite-size-scaling fits. Artifacts are CSV tables plus a JSON manifest
// sufficient to re-run bit-identically.

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nmc/analysis.hpp"
#include "nmc/contraction.hpp"
#include "nmc/io.hpp"
#include "nmc/lattice.hpp"
#include "nmc/model.hpp"
#include "nmc/oracle.hpp"
#include "nmc/rng.hpp"
#include "nmc/sampler.hpp"
#include "nmc/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Angles are accepted as fractions of pi ("0.149pi") or plain radians.
double parse_angle(const std::string& text) {
  std::string t = text;
  double factor = 1.0;
  if (t.size() > 2 && t.substr(t.size() - 2) == "pi") {
    factor = kPi;
    t = t.substr(0, t.size() - 2);
  }
  std::size_t pos = 0;
  const double v = std::stod(t, &pos);
  if (pos != t.size()) throw CLI::ValidationError("angle", "cannot parse '" + text + "'");
  return v * factor;
}

struct RunConfig {
  std::string lattice = "lieb";
  std::vector<int> extents = {4};
  std::string t_a_text = "0.125pi";
  std::string t_b_text;
  std::string cut = "fixed";  // nishimori | diagonal | fixed
  std::string t_a_max_text;
  int points = 1;
  int chains = 11;
  int sweeps = 1000;
  double discard_frac = 0.1;
  int thin = 1;
  std::uint64_t seed = 1;
  double cutoff = 1e-10;
  int chi_max = 256;
  std::string proposal = "raster";
  int threads = 0;
  std::string out;

  double t_b_for(double t_a) const {
    if (cut == "nishimori") return kPi / 4;
    if (cut == "diagonal") return t_a;
    return parse_angle(t_b_text);
  }
};

std::vector<double> angle_grid(const RunConfig& cfg) {
  const double lo = parse_angle(cfg.t_a_text);
  if (cfg.points <= 1 || cfg.t_a_max_text.empty()) return {lo};
  const double hi = parse_angle(cfg.t_a_max_text);
  std::vector<double> grid(cfg.points);
  for (int i = 0; i < cfg.points; ++i)
    grid[i] = lo + (hi - lo) * i / static_cast<double>(cfg.points - 1);
  std::sort(grid.begin(), grid.end());
  return grid;
}

void validate(const RunConfig& cfg) {
  nmc::build_lattice(nmc::lattice_kind_from_string(cfg.lattice), cfg.extents);
  if (cfg.cut == "fixed" && cfg.t_b_text.empty())
    throw std::invalid_argument("--tB is required unless --cut is given");
  if (cfg.cut != "fixed" && cfg.cut != "nishimori" && cfg.cut != "diagonal")
    throw std::invalid_argument("unknown cut: " + cfg.cut);
  if (cfg.chains < 1 || cfg.sweeps < 2) throw std::invalid_argument("bad schedule");
  if (cfg.discard_frac < 0.0 || cfg.discard_frac >= 1.0)
    throw std::invalid_argument("discard fraction must be in [0, 1)");
  if (cfg.proposal != "raster" && cfg.proposal != "random")
    throw std::invalid_argument("unknown proposal order: " + cfg.proposal);
}

ordered_json base_manifest(const RunConfig& cfg, const std::string& command) {
  ordered_json m;
  m["command"] = command;
  m["version"] = nmc::kVersion;
  m["lattice"] = {{"kind", cfg.lattice}, {"extents", cfg.extents}};
  m["t_a"] = cfg.t_a_text;
  m["t_a_max"] = cfg.t_a_max_text;
  m["points"] = cfg.points;
  m["cut"] = cfg.cut;
  m["t_b"] = cfg.t_b_text;
  m["chains"] = cfg.chains;
  m["sweeps"] = cfg.sweeps;
  m["discard_fraction"] = cfg.discard_frac;
  m["thin"] = cfg.thin;
  m["seed"] = cfg.seed;
  m["cutoff"] = cfg.cutoff;
  m["chi_max"] = cfg.chi_max;
  m["proposal"] = cfg.proposal;
  m["threads"] = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
  m["rng"] = "splitmix64; chain seed = stream_seed(master_seed, point*chains + chain)";
  return m;
}

fs::path out_dir(const RunConfig& cfg, const std::string& fallback) {
  if (!cfg.out.empty()) return cfg.out;
  return nmc::io::default_output_root() / fallback;
}

int cmd_sample(const RunConfig& cfg, const std::string& command) {
  validate(cfg);
  const auto kind = nmc::lattice_kind_from_string(cfg.lattice);
  const nmc::LatticeGraph graph = nmc::build_lattice(kind, cfg.extents);
  if (!graph.contractible())
    throw std::invalid_argument("sampling requires a contractible (1D/2D) lattice");

  const std::vector<double> grid = angle_grid(cfg);
  const fs::path dir = out_dir(cfg, command);
  fs::create_directories(dir);

  nmc::Schedule schedule;
  schedule.n_sweeps = cfg.sweeps;
  schedule.n_discard = static_cast<int>(cfg.sweeps * cfg.discard_frac);
  schedule.thin = cfg.thin;

  nmc::SamplerOptions opts;
  opts.contraction.cutoff = cfg.cutoff;
  opts.contraction.chi_max = cfg.chi_max;
  opts.proposal = cfg.proposal == "raster" ? nmc::ProposalOrder::raster
                                           : nmc::ProposalOrder::random_bond;

  const int n_points = static_cast<int>(grid.size());
  std::vector<std::vector<nmc::ChainRecord>> records(n_points);
  for (auto& r : records) r.resize(cfg.chains);

  const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(threads) collapse(2)
  for (int i = 0; i < n_points; ++i)
    for (int c = 0; c < cfg.chains; ++c) {
      try {
        const nmc::CircuitParams p =
            nmc::couplings_from_times(grid[i], cfg.t_b_for(grid[i]));
        records[i][c] = nmc::run_chain(graph, p, schedule, cfg.seed,
                                       i * cfg.chains + c, opts);
      } catch (...) {
#pragma omp critical
        if (!error) error = std::current_exception();
      }
    }
  if (error) std::rethrow_exception(error);

  // per-chain series
  for (int i = 0; i < n_points; ++i)
    for (int c = 0; c < cfg.chains; ++c) {
      const nmc::ChainRecord& r = records[i][c];
      std::vector<std::vector<double>> rows;
      for (int k = 0; k < r.retained(); ++k)
        rows.push_back({static_cast<double>(schedule.n_discard + k * schedule.thin),
                        r.m_c[k], r.wilson[k], r.plaquette[k], r.acceptance[k],
                        r.mean_s[k]});
      char name[64];
      std::snprintf(name, sizeof(name), "chain_p%02d_c%02d.csv", i, c);
      nmc::io::write_csv(dir / name,
                         {"sweep_index", "m_c", "wilson_line", "mean_plaquette",
                          "acceptance_rate", "mean_s"},
                         rows);
    }

  // aggregated observables
  const int size_label = cfg.extents[0];
  const bool chain_lattice = kind == nmc::LatticeKind::chain;
  std::vector<nmc::io::AggregateRow> agg;
  nmc::ContractionStats stats;
  for (int i = 0; i < n_points; ++i) {
    nmc::io::AggregateRow row;
    row.t_a = grid[i];
    row.size = size_label;
    std::tie(row.q, row.q_err) = nmc::estimate_ea(records[i]);
    std::tie(row.mean_s, row.mean_s_err) =
        nmc::chain_average(records[i], nmc::ChainSeries::mean_s);
    std::tie(row.plaquette, row.plaquette_err) =
        nmc::chain_average(records[i], nmc::ChainSeries::plaquette);
    std::tie(row.wilson, row.wilson_err) =
        nmc::chain_average(records[i], nmc::ChainSeries::wilson);
    row.acceptance = nmc::chain_average(records[i], nmc::ChainSeries::acceptance).first;
    if (chain_lattice && size_label % 2 == 0)
      row.q_exact = nmc::oned_q(grid[i], cfg.t_b_for(grid[i]), size_label);
    for (const auto& r : records[i]) stats.merge(r.stats);
    agg.push_back(row);
  }
  nmc::io::write_aggregate_csv(dir / "observables.csv", agg, chain_lattice);

  ordered_json manifest = base_manifest(cfg, command);
  manifest["grid_radians"] = ordered_json::array();
  for (double t : grid)
    manifest["grid_radians"].push_back({{"t_a", t}, {"t_b", cfg.t_b_for(t)}});
  manifest["max_chi"] = stats.max_chi;
  manifest["max_discarded_weight"] = stats.max_discarded;
  manifest["outputs"] = {"observables.csv"};
  manifest["graph"] = {{"sites", graph.n_sites()},
                       {"bonds", graph.n_bonds()},
                       {"spins", graph.total_spins()}};
  nmc::io::write_text(dir / "manifest.json", manifest.dump(2));
  std::cout << "wrote " << (dir / "observables.csv").string() << "\n";
  return 0;
}

int cmd_exact(const RunConfig& cfg) {
  const auto kind = nmc::lattice_kind_from_string(cfg.lattice);
  const nmc::LatticeGraph graph = nmc::build_lattice(kind, cfg.extents);
  const std::vector<double> grid = angle_grid(cfg);
  const fs::path dir = out_dir(cfg, "exact");
  fs::create_directories(dir);

  ordered_json report;
  report["command"] = "exact";
  report["version"] = nmc::kVersion;
  report["lattice"] = {{"kind", cfg.lattice}, {"extents", cfg.extents}};
  report["spins"] = graph.total_spins();
  report["points"] = ordered_json::array();

  std::vector<std::vector<double>> cube_rows;
  for (double t_a : grid) {
    const double t_b = cfg.t_b_for(t_a);
    const nmc::CircuitParams p = nmc::couplings_from_times(t_a, t_b);
    ordered_json entry;
    entry["t_a"] = t_a;
    entry["t_b"] = t_b;
    if (kind == nmc::LatticeKind::cubic3d) {
      const double cube =
          nmc::premeasurement_check(graph, p, nmc::PremeasObservable::cube_product);
      const double c6 = std::pow(std::cos(2 * t_a) * std::cos(2 * t_b), 6);
      const double s6 = std::pow(std::sin(2 * t_a) * std::sin(2 * t_b), 6);
      entry["cube_product"] = cube;
      entry["cube_formula"] = c6 + s6;
      cube_rows.push_back({t_a, cube, c6 + s6, std::pow(std::sin(2 * t_a), 6)});
    } else {
      entry["exact_ea"] = nmc::exact_ea(graph, p);
      if (kind == nmc::LatticeKind::chain && cfg.extents[0] % 2 == 0)
        entry["oned_q"] = nmc::oned_q(t_a, t_b, cfg.extents[0]);
      const nmc::NishimoriReport nr = nmc::verify_nishimori(graph, t_a, t_b);
      entry["nishimori"] = ordered_json::parse(nr.to_json());
    }
    report["points"].push_back(entry);
  }
  if (kind == nmc::LatticeKind::cubic3d) {
    nmc::io::write_csv(dir / "cube_product.csv",
                       {"t_a", "cube_product", "formula", "nishimori_formula"},
                       cube_rows);
    report["projector_identity_max_dev"] = nmc::strong_limit_projector_deviation(graph);
  }
  nmc::io::write_text(dir / "exact_report.json", report.dump(2));
  std::cout << "wrote " << (dir / "exact_report.json").string() << "\n";
  return 0;
}

int cmd_oned(const RunConfig& cfg, const std::vector<int>& sizes) {
  const fs::path dir = out_dir(cfg, "oned");
  fs::create_directories(dir);
  const std::vector<double> grid = angle_grid(cfg);
  std::vector<std::string> header = {"t_a"};
  for (int L : sizes) header.push_back("q_L" + std::to_string(L));
  header.push_back("p_bond");
  std::vector<std::vector<double>> rows;
  for (double t_a : grid) {
    const double t_b = cfg.t_b_for(t_a);
    std::vector<double> row = {t_a};
    for (int L : sizes) row.push_back(nmc::oned_q(t_a, t_b, L));
    row.push_back(nmc::oned_bond_prob(t_a, t_b));
    rows.push_back(std::move(row));
  }
  nmc::io::write_csv(dir / "oned_closed_forms.csv", header, rows);
  std::cout << "wrote " << (dir / "oned_closed_forms.csv").string() << "\n";
  return 0;
}

int cmd_collapse(const std::vector<std::string>& inputs, const std::string& lo_text,
                 const std::string& hi_text, const std::string& tc_text, double nu,
                 double beta, const std::string& out) {
  std::map<int, std::vector<nmc::CollapsePoint>> data;
  for (const std::string& in : inputs) {
    auto part = nmc::io::read_aggregate_csv(in);
    for (auto& [size, pts] : part) {
      auto& dst = data[size];
      dst.insert(dst.end(), pts.begin(), pts.end());
    }
  }
  const double lo = parse_angle(lo_text), hi = parse_angle(hi_text);
  const double tc0 = parse_angle(tc_text);
  const nmc::ScalingFit fit =
      nmc::collapse_fit(data, lo, hi, {tc0, 1.0 / nu, beta / nu});

  const fs::path dir =
      out.empty() ? nmc::io::default_output_root() / "collapse" : fs::path(out);
  fs::create_directories(dir);
  ordered_json j;
  j["command"] = "collapse";
  j["version"] = nmc::kVersion;
  j["inputs"] = inputs;
  j["window"] = {lo, hi};
  j["init"] = {tc0, nu, beta};
  j["t_c"] = fit.t_c;
  j["t_c_over_pi"] = fit.t_c / kPi;
  j["nu"] = fit.nu;
  j["beta_over_nu"] = fit.beta_over_nu;
  j["beta"] = fit.beta_over_nu * fit.nu;
  j["quality"] = fit.quality;
  j["converged"] = fit.converged;
  j["evaluations"] = fit.evaluations;
  nmc::io::write_text(dir / "fit.json", j.dump(2));

  std::vector<std::vector<double>> rows;
  for (const nmc::RescaledPoint& p : nmc::rescale_collapse(data, fit))
    rows.push_back({p.x, p.y, p.err, static_cast<double>(p.size), p.t});
  nmc::io::write_csv(dir / "collapse.csv", {"x", "y", "err", "L", "t_a"}, rows);
  std::cout << "t_c = " << fit.t_c / kPi << " pi, nu = " << fit.nu
            << ", beta/nu = " << fit.beta_over_nu << ", S = " << fit.quality << "\n";
  return 0;
}

int cmd_graph(const RunConfig& cfg) {
  const auto kind = nmc::lattice_kind_from_string(cfg.lattice);
  const nmc::LatticeGraph graph = nmc::build_lattice(kind, cfg.extents);
  const fs::path dir = out_dir(cfg, "graph");
  fs::create_directories(dir);
  nmc::io::write_text(dir / "graph.json", nmc::graph_to_json(graph));
  std::cout << "wrote " << (dir / "graph.json").string() << "\n";
  return 0;
}

void add_lattice_opts(CLI::App* app, RunConfig* cfg) {
  app->add_option("--lattice", cfg->lattice, "chain | lieb | heavy_hexagon | cubic3d");
  app->add_option("--L", cfg->extents, "lattice extents (L; Ly Lx; nx ny nz)")
      ->expected(1, 3);
}

void add_angle_opts(CLI::App* app, RunConfig* cfg) {
  app->add_option("--tA", cfg->t_a_text, "t_A (radians, or multiples of pi: 0.149pi)");
  app->add_option("--tB", cfg->t_b_text, "t_B (same format)");
  app->add_option("--cut", cfg->cut, "nishimori | diagonal | fixed");
  app->add_option("--tA-max", cfg->t_a_max_text, "scan end point (inclusive)");
  app->add_option("--points", cfg->points, "scan grid size");
}

void add_run_opts(CLI::App* app, RunConfig* cfg) {
  app->add_option("--chains", cfg->chains);
  app->add_option("--sweeps", cfg->sweeps);
  app->add_option("--discard-frac", cfg->discard_frac);
  app->add_option("--thin", cfg->thin);
  app->add_option("--seed", cfg->seed);
  app->add_option("--cutoff", cfg->cutoff);
  app->add_option("--chi-max", cfg->chi_max);
  app->add_option("--proposal", cfg->proposal, "raster | random");
  app->add_option("--threads", cfg->threads);
  app->add_option("--out", cfg->out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid Monte Carlo / boundary-MPS sampler for weak-measurement "
               "Ising ensembles"};
  app.require_subcommand(1);

  RunConfig cfg;
  cfg.cut = "fixed";

  CLI::App* sample = app.add_subcommand("sample", "run Metropolis chains at one point");
  CLI::App* scan = app.add_subcommand("scan", "sample over a t_A grid");
  for (CLI::App* s : {sample, scan}) {
    add_lattice_opts(s, &cfg);
    add_angle_opts(s, &cfg);
    add_run_opts(s, &cfg);
  }

  CLI::App* exact = app.add_subcommand("exact", "desk-scale enumeration checks");
  add_lattice_opts(exact, &cfg);
  add_angle_opts(exact, &cfg);
  exact->add_option("--out", cfg.out);

  std::vector<int> oned_sizes = {4, 8, 16};
  CLI::App* oned = app.add_subcommand("oned", "closed-form 1D tables");
  add_angle_opts(oned, &cfg);
  oned->add_option("--sizes", oned_sizes, "chain lengths");
  oned->add_option("--out", cfg.out);

  std::vector<std::string> collapse_inputs;
  std::string win_lo = "0.1pi", win_hi = "0.2pi", init_tc = "0.15pi", collapse_out;
  double init_nu = 1.4, init_beta = 0.36;
  CLI::App* collapse = app.add_subcommand("collapse", "finite-size-scaling fit");
  collapse->add_option("--input", collapse_inputs, "aggregated csv files")->required();
  collapse->add_option("--window-lo", win_lo);
  collapse->add_option("--window-hi", win_hi);
  collapse->add_option("--init-tc", init_tc);
  collapse->add_option("--init-nu", init_nu);
  collapse->add_option("--init-beta", init_beta);
  collapse->add_option("--out", collapse_out);

  CLI::App* graph = app.add_subcommand("graph", "dump lattice graph as JSON");
  add_lattice_opts(graph, &cfg);
  graph->add_option("--out", cfg.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sample->parsed()) return cmd_sample(cfg, "sample");
    if (scan->parsed()) return cmd_sample(cfg, "scan");
    if (exact->parsed()) return cmd_exact(cfg);
    if (oned->parsed()) return cmd_oned(cfg, oned_sizes);
    if (graph->parsed()) return cmd_graph(cfg);
    if (collapse->parsed())
      return cmd_collapse(collapse_inputs, win_lo, win_hi, init_tc, init_nu, init_beta,
                          collapse_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
