#include "plapflow/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "plapflow/trichotomy.hpp"

namespace plapflow {

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x,
                                 std::chars_format::general, 17);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: byte-identical emission
  if (!out) throw ConfigError("emit_csv: cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

void emit_csv(const TrajectoryRecord& record, const std::string& path) {
  auto out = open_out(path);
  out << "t,sup_norm,grad_p_seminorm,energy,dt\n";
  for (const TrajectorySample& s : record.samples)
    out << format_double(s.t) << ',' << format_double(s.sup_norm) << ','
        << format_double(s.grad_p_seminorm) << ',' << format_double(s.energy) << ','
        << format_double(s.dt) << '\n';
  if (!out) throw ConfigError("emit_csv: write failure on '" + path + "'");
}

void emit_csv(const BranchResult& branch, const std::string& path) {
  auto out = open_out(path);
  out << "lambda,seminorm,supnorm,residual,iterations\n";
  for (const BranchSample& s : branch.samples)
    out << format_double(s.lambda) << ',' << format_double(s.seminorm) << ','
        << format_double(s.sup) << ',' << format_double(s.residual) << ','
        << s.iterations << '\n';
  if (!out) throw ConfigError("emit_csv: write failure on '" + path + "'");
}

void emit_csv(const EigenResult& eigen, const std::string& path, bool include_psi) {
  auto out = open_out(path);
  out << "mu0,residual,iterations\n";
  out << format_double(eigen.mu0) << ',' << format_double(eigen.residual) << ','
      << eigen.iterations << '\n';
  if (!out) throw ConfigError("emit_csv: write failure on '" + path + "'");
  if (!include_psi) return;
  auto psi_out = open_out(path + ".psi.csv");
  const Grid& grid = eigen.psi0.grid();
  psi_out << (grid.dim() == 1 ? "x,psi\n" : "x,y,psi\n");
  for (std::size_t k = 0; k < eigen.psi0.size(); ++k) {
    const Point pt = grid.coord(k);
    psi_out << format_double(pt.x) << ',';
    if (grid.dim() == 2) psi_out << format_double(pt.y) << ',';
    psi_out << format_double(eigen.psi0[k]) << '\n';
  }
}

void emit_csv(const TrichotomyReport& report, const std::string& path) {
  auto out = open_out(path);
  out << "regime,lambda,applicable,outcome,final_sup,final_seminorm,t_estimate,"
         "equilibrium_dist,pass\n";
  for (const TrichotomyRow& r : report.rows)
    out << r.regime << ',' << format_double(r.lambda) << ','
        << (r.applicable ? 1 : 0) << ',' << to_string(r.outcome) << ','
        << format_double(r.final_sup) << ',' << format_double(r.final_seminorm) << ','
        << format_double(r.t_estimate) << ',' << format_double(r.equilibrium_dist)
        << ',' << (r.pass ? 1 : 0) << '\n';
  if (!out) throw ConfigError("emit_csv: write failure on '" + path + "'");
}

std::vector<std::vector<double>> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("read_csv: cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      const std::string cell = line.substr(start, comma - start);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec == std::errc() && ptr == cell.data() + cell.size()) row.push_back(v);
      start = comma + 1;
      if (comma == line.size()) break;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace plapflow
