#include "nmc/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nmc::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i)
    os << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << format_double(row[i]) << (i + 1 < row.size() ? "," : "\n");
  }
  write_text(path, os.str());
}

void write_aggregate_csv(const std::filesystem::path& path,
                         const std::vector<AggregateRow>& rows, bool with_exact) {
  std::vector<std::string> header = {"t_a",         "L",
                                     "q",           "q_err",
                                     "mean_s",      "mean_plaquette",
                                     "wilson_line", "acceptance",
                                     "mean_s_err",  "mean_plaquette_err",
                                     "wilson_line_err"};
  if (with_exact) header.push_back("q_exact");
  std::vector<std::vector<double>> table;
  for (const AggregateRow& r : rows) {
    std::vector<double> row = {r.t_a,    static_cast<double>(r.size),
                               r.q,      r.q_err,
                               r.mean_s, r.plaquette,
                               r.wilson, r.acceptance,
                               r.mean_s_err, r.plaquette_err,
                               r.wilson_err};
    if (with_exact) row.push_back(r.q_exact);
    table.push_back(std::move(row));
  }
  write_csv(path, header, table);
}

std::map<int, std::vector<CollapsePoint>> read_aggregate_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv " + path.string());

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  int col_t = -1, col_l = -1, col_q = -1, col_err = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    if (header[i] == "t_a") col_t = i;
    if (header[i] == "L") col_l = i;
    if (header[i] == "q") col_q = i;
    if (header[i] == "q_err") col_err = i;
  }
  if (col_t < 0 || col_l < 0 || col_q < 0 || col_err < 0)
    throw std::runtime_error("csv is missing t_a/L/q/q_err columns: " + path.string());

  std::map<int, std::vector<CollapsePoint>> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    const int size = static_cast<int>(row.at(col_l));
    out[size].push_back({row.at(col_t), row.at(col_q), row.at(col_err)});
  }
  return out;
}

std::filesystem::path default_output_root() {
  if (const char* env = std::getenv("NMC_OUTPUT_ROOT")) return env;
  return "nmc_runs";
}

}  // namespace nmc::io
