#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ecd/experiment.hpp"

namespace ecd {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", x);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace

void write_outputs(const ResultSet& results, const std::string& dir) {
  const std::filesystem::path root(dir);
  std::filesystem::create_directories(root);

  std::string csv =
      "sweep_var,value,infidelity,strength_base,strength_corr,integral_norm,n_periods,"
      "cert_delta\n";
  for (const auto& r : results.rows) {
    csv += r.sweep_var;
    csv += ',';
    csv += fmt(r.value);
    csv += ',';
    csv += fmt(r.infidelity);
    csv += ',';
    csv += fmt(r.strength_base);
    csv += ',';
    csv += fmt(r.strength_corr);
    csv += ',';
    csv += fmt(r.integral_norm);
    csv += ',';
    csv += std::to_string(r.n_periods);
    csv += ',';
    csv += fmt(r.cert_delta);
    csv += '\n';
  }
  write_file(root / "results.csv", csv);

  std::string meta = results.metadata_json;
  if (meta.empty()) meta = "{}";
  meta += '\n';
  write_file(root / "results.json", meta);

  for (const auto& [stem, series] : results.series) {
    std::string dat = "#";
    for (const auto& c : series.columns) {
      dat += ' ';
      dat += c;
    }
    dat += '\n';
    for (const auto& row : series.rows) {
      for (size_t i = 0; i < row.size(); ++i) {
        if (i) dat += ' ';
        dat += fmt(row[i]);
      }
      dat += '\n';
    }
    write_file(root / (stem + ".dat"), dat);
  }
}

}  // namespace ecd
