#include "sqg/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sqg {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw error("cannot create output directory: " + dir);
  // probe writability up front so a run never starts into a dead sink
  const std::string probe = dir + "/.write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw error("output directory is not writable: " + dir);
  }
  std::filesystem::remove(probe, ec);
}

void write_timeseries_csv(const std::string& path, const TorusMesh& mesh,
                          const std::vector<TimeseriesRow>& rows) {
  std::ofstream f(path);
  if (!f) throw error("cannot open " + path);
  f << "# n_side=" << mesh.n_side() << " h=" << format_full(mesh.h()) << "\n";
  f << "t,dt,kinetic_energy,helicity_integral,helicity_signed,grad_sup_norm,"
       "theta_min,theta_max\n";
  for (const auto& r : rows) {
    f << format_full(r.t) << ',' << format_full(r.dt) << ','
      << format_full(r.kinetic_energy) << ',' << format_full(r.helicity_integral)
      << ',' << format_full(r.helicity_signed) << ',' << format_full(r.grad_sup_norm)
      << ',' << format_full(r.theta_min) << ',' << format_full(r.theta_max) << "\n";
  }
  if (!f) throw error("write failed: " + path);
}

std::vector<TimeseriesRow> read_timeseries_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw error("cannot open " + path);
  std::vector<TimeseriesRow> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 't') continue;
    TimeseriesRow r;
    std::istringstream ss(line);
    char comma;
    ss >> r.t >> comma >> r.dt >> comma >> r.kinetic_energy >> comma >>
        r.helicity_integral >> comma >> r.helicity_signed >> comma >>
        r.grad_sup_norm >> comma >> r.theta_min >> comma >> r.theta_max;
    if (ss.fail()) throw error("malformed timeseries row: " + line);
    rows.push_back(r);
  }
  return rows;
}

void write_errors_csv(const std::string& path, const ErrorTable& table) {
  std::ofstream f(path);
  if (!f) throw error("cannot open " + path);
  const bool extras = !table.kinetic.empty();
  f << "dofs,L1,rate,L2,rate,Linf,rate";
  if (extras) f << ",kinetic_energy,helicity_integral";
  f << "\n";
  auto rate_str = [&](size_t i, double ec, double ef) -> std::string {
    if (i == 0 || !(ec > 0.0) || !(ef > 0.0)) return "";
    return format_full(std::log2(ec / ef));
  };
  for (size_t i = 0; i < table.dofs.size(); ++i) {
    const auto& e = table.errors[i];
    std::string r1, r2, ri;
    if (i > 0) {
      const auto& p = table.errors[i - 1];
      r1 = rate_str(i, p.l1, e.l1);
      r2 = rate_str(i, p.l2, e.l2);
      ri = rate_str(i, p.linf, e.linf);
    }
    f << table.dofs[i] << ',' << format_full(e.l1) << ',' << r1 << ','
      << format_full(e.l2) << ',' << r2 << ',' << format_full(e.linf) << ',' << ri;
    if (extras)
      f << ',' << format_full(table.kinetic[i]) << ',' << format_full(table.helicity[i]);
    f << "\n";
  }
  if (!f) throw error("write failed: " + path);
}

void write_spectrum_csv(const std::string& path, const SpectrumRecord& spec) {
  std::ofstream f(path);
  if (!f) throw error("cannot open " + path);
  f << "m,modulus\n";
  for (size_t m = 0; m < spec.modulus.size(); ++m)
    f << m << ',' << format_full(spec.modulus[m]) << "\n";
  if (!f) throw error("write failed: " + path);
}

void write_vtk_snapshot(const std::string& path_stem, const TorusMesh& mesh,
                        const std::vector<double>& field,
                        const std::string& field_name) {
  const int n = mesh.n_side();
  {
    std::ofstream f(path_stem + ".vtk");
    if (!f) throw error("cannot open " + path_stem + ".vtk");
    f << "# vtk DataFile Version 3.0\n";
    f << "sqgfem snapshot n_side=" << n << " h=" << format_full(mesh.h()) << "\n";
    f << "ASCII\nDATASET STRUCTURED_POINTS\n";
    f << "DIMENSIONS " << n << ' ' << n << " 1\n";
    f << "ORIGIN 0 0 0\n";
    f << "SPACING " << format_full(mesh.h()) << ' ' << format_full(mesh.h()) << " 1\n";
    f << "POINT_DATA " << n * n << "\n";
    f << "SCALARS " << field_name << " double 1\nLOOKUP_TABLE default\n";
    for (size_t i = 0; i < field.size(); ++i) f << format_full(field[i]) << "\n";
    if (!f) throw error("write failed: " + path_stem + ".vtk");
  }
  {
    std::ofstream f(path_stem + ".txt");
    if (!f) throw error("cannot open " + path_stem + ".txt");
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i1 = 0; i1 < n; ++i1) {
        if (i1) f << ' ';
        f << format_full(field[static_cast<size_t>(i2) * n + i1]);
      }
      f << "\n";
    }
    if (!f) throw error("write failed: " + path_stem + ".txt");
  }
}

void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream f(path);
  if (!f) throw error("cannot open " + path);
  f << "# " << version_string << "\n";
  for (const auto& [k, v] : kv) f << k << " = " << v << "\n";
  if (!f) throw error("write failed: " + path);
}

}  // namespace sqg
