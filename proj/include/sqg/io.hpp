#ifndef SQG_IO_HPP
#define SQG_IO_HPP

#include <string>
#include <vector>

#include "sqg/diagnostics.hpp"

namespace sqg {

constexpr const char* version_string = "sqgfem 0.1.0";

/// Shortest decimal that round-trips a double (17 significant digits).
std::string format_full(double v);

void ensure_directory(const std::string& dir);

/// timeseries.csv: a `# n_side=.. h=..` header comment, the column header
/// t,dt,kinetic_energy,helicity_integral,helicity_signed,grad_sup_norm,
/// theta_min,theta_max, then one row per step.
void write_timeseries_csv(const std::string& path, const TorusMesh& mesh,
                          const std::vector<TimeseriesRow>& rows);
std::vector<TimeseriesRow> read_timeseries_csv(const std::string& path);

struct ErrorTable {
  std::vector<int> dofs;
  std::vector<ErrorNorms> errors;
  std::vector<double> kinetic;   // optional extra columns (empty = omitted)
  std::vector<double> helicity;
};

/// errors.csv: dofs,L1,rate,L2,rate,Linf,rate (rates empty on the first row
/// or where undefined).
void write_errors_csv(const std::string& path, const ErrorTable& table);

void write_spectrum_csv(const std::string& path, const SpectrumRecord& spec);

/// Legacy-VTK structured points snapshot plus a parallel plain-text grid
/// (n_side lines of n_side values).
void write_vtk_snapshot(const std::string& path_stem, const TorusMesh& mesh,
                        const std::vector<double>& field,
                        const std::string& field_name = "theta");

void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& kv);

}  // namespace sqg

#endif  // SQG_IO_HPP
