#ifndef SQG_DIAGNOSTICS_HPP
#define SQG_DIAGNOSTICS_HPP

#include <functional>
#include <string>
#include <utility>

#include "sqg/assembly.hpp"

namespace sqg {

/// One monitored row of a run: written every step.
struct TimeseriesRow {
  double t = 0.0;
  double dt = 0.0;
  double kinetic_energy = 0.0;
  double helicity_integral = 0.0;  // int Psi Theta (positive for the benchmarks)
  double helicity_signed = 0.0;    // -int Psi Theta, the defined helicity
  double grad_sup_norm = 0.0;
  double theta_min = 0.0;
  double theta_max = 0.0;
};

struct RunRecord {
  std::vector<TimeseriesRow> rows;
  std::vector<std::pair<double, std::string>> snapshots;  // time -> file stem
};

/// K = 1/2 int Theta^2 = 1/2 theta^T M theta, exact for P1.
double kinetic_energy(const FemOperators& ops, const std::vector<double>& theta);

/// int Psi Theta = psi^T M theta; the signed helicity of the system carries
/// the opposite sign.
double helicity_integral(const FemOperators& ops, const std::vector<double>& psi,
                         const std::vector<double>& theta);

/// max over triangles of |grad Theta| (element gradients are constant).
double grad_sup_norm(const TorusMesh& mesh, const std::vector<double>& theta);

struct ErrorNorms {
  double l1 = 0.0, l2 = 0.0, linf = 0.0;
};

/// L1/L2 by the edge-midpoint rule (exact for quadratics) against a closed
/// form; Linf sampled at vertices and edge midpoints.
ErrorNorms error_norms(const TorusMesh& mesh, const std::vector<double>& theta,
                       const std::function<double(double, double)>& exact);

/// rate_k = log2(e_k / e_{k+1}) per consecutive refinement pair; NaN where
/// a zero error leaves the rate undefined.
std::vector<double> convergence_rates(const std::vector<double>& errors);

/// Schlieren shading sigma = exp(-10 (|grad| - min) / (max - min)) from the
/// patch-averaged nodal gradient magnitude. A constant field degenerates to
/// sigma = 1 everywhere (flagged via the return).
struct SchlierenResult {
  std::vector<double> sigma;
  bool constant_field = false;
};
SchlierenResult schlieren(const TorusMesh& mesh, const std::vector<double>& theta);

/// Two-point correlation energy spectrum: R(y_m) correlates Theta against
/// its x1-translates, then a length-N DFT (direct, radix-agnostic; the
/// forward transform carries no 1/N so that (1/N) sum_m |R~_m| recovers
/// R(0) = K).
struct SpectrumRecord {
  int n = 0;                    // transform length = n_side
  std::vector<double> modulus;  // |R~_m|, m = 0..N/2
  double kinetic_reconstruction = 0.0;  // (1/N) sum over all m of |R~_m|
};
SpectrumRecord energy_spectrum(const TorusMesh& mesh, const std::vector<double>& theta);

/// Least-squares slope of log |R~_m| vs log m over band [m_lo, m_hi].
double slope_fit(const SpectrumRecord& spec, int m_lo, int m_hi);

/// The piecewise-linear time reconstruction between two step snapshots.
std::vector<double> interpolate_in_time(const std::vector<double>& a, double ta,
                                        const std::vector<double>& b, double tb,
                                        double t);

}  // namespace sqg

#endif  // SQG_DIAGNOSTICS_HPP
