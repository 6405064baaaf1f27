#pragma once

#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "nmc/analysis.hpp"

namespace nmc::io {

/// One row of the aggregated observables table.
struct AggregateRow {
  double t_a = 0.0;
  int size = 0;
  double q = 0.0, q_err = 0.0;
  double mean_s = 0.0, mean_s_err = 0.0;
  double plaquette = 0.0, plaquette_err = 0.0;
  double wilson = 0.0, wilson_err = 0.0;
  double acceptance = 0.0;
  double q_exact = std::numeric_limits<double>::quiet_NaN();  // chains only
};

/// 17-significant-digit decimal so artifacts diff cleanly.
std::string format_double(double v);

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_aggregate_csv(const std::filesystem::path& path,
                         const std::vector<AggregateRow>& rows, bool with_exact);

/// Reads an aggregated CSV back into collapse inputs keyed by size.
std::map<int, std::vector<CollapsePoint>> read_aggregate_csv(
    const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Default output root: $NMC_OUTPUT_ROOT or ./nmc_runs.
std::filesystem::path default_output_root();

}  // namespace nmc::io
