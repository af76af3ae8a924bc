#ifndef SQG_TRANSPORT_HPP
#define SQG_TRANSPORT_HPP

#include <optional>

#include "sqg/velocity.hpp"

namespace sqg {

enum class SchemeKind { Galerkin, LowOrder, EntropyViscosity, FCT };

enum class EVNormalization { Local, Max };  // eta~ vs max(eta~, |eta_i|)

struct EVConfig {
  double c_ev = 1.0;
  double epsilon = 1e-8;
  EVNormalization normalization = EVNormalization::Local;
};

struct TransportState {
  std::vector<double> theta;
  double t = 0.0;
  long step_index = 0;
};

/// Graph viscosity d_ij: symmetric, nonnegative off-diagonal, zero row sums.
/// Values live on the shared stencil pattern.
using GraphViscosity = SparseOperator;

/// Low-order coefficients d^L_ij = max over the edge orientations of the
/// local wave speed max(|u_i.n|, |u_j.n|) times ||c_ij||; for this scalar
/// model the speeds depend on the velocities only, not on theta.
void low_order_viscosity(const FemOperators& ops, const VectorField2& U,
                         const std::vector<double>& theta, GraphViscosity& d);

struct DtChoice {
  double dt = 0.0;
  bool capped_all_zero = false;  // every viscosity row sum was zero
};

/// dt = cfl * min_i m_i / sum_{j != i} d^L_ij, capped at dt_max.
DtChoice select_dt(const FemOperators& ops, const GraphViscosity& dL,
                   double cfl, double dt_max);

/// max_i dt * sum_{j!=i} d_ij / m_i: the CFL ratio a stage actually sees.
double cfl_ratio(const FemOperators& ops, const GraphViscosity& d, double dt);

/// F_i = sum_j u_j . c_ij theta_j (the linearly interpolated flux).
/// z1, z2 are scratch of vertex size.
void convective_flux(const FemOperators& ops, const VectorField2& U,
                     const std::vector<double>& theta, std::vector<double>& F,
                     std::vector<double>& z1, std::vector<double>& z2);

/// Explicit invariant-domain update
/// m_i th_i^L = m_i th_i - dt F_i - kappa dt m_i A_i + dt (d^L theta)_i.
/// `Ai` may be null when kappa = 0.
void low_order_euler(const FemOperators& ops, const std::vector<double>& theta,
                     const std::vector<double>& F, const GraphViscosity& dL,
                     double dt, double kappa, const std::vector<double>* Ai,
                     std::vector<double>& out);

/// Consistent-mass Galerkin update: solve
/// sum_j m_ij (th^G_j - th_j) = -dt F_i - kappa dt m_i A_i.
/// Returns the solve report of the mass system.
SolveReport galerkin_euler(const FemOperators& ops, const std::vector<double>& theta,
                           const std::vector<double>& F, double dt, double kappa,
                           const std::vector<double>* Ai, double mass_tol,
                           std::vector<double>& out);

/// |R_i| with R_i = eta'(th_i^n) [ sum_j u_j . c_ij (th^n_j - th^G_j)
/// + kappa m_i (A_i(Th^n) - A_i(Th^G)) ], eta(x) = x^2/2. The entropy
/// weight is applied nodally (lumped), which keeps the residual computable
/// from the assembled transport objects.
void entropy_residual(const FemOperators& ops, const VectorField2& U,
                      const std::vector<double>& theta_n,
                      const std::vector<double>& theta_g, double kappa,
                      const std::vector<double>* Ai_n,
                      const std::vector<double>* Ai_g, std::vector<double>& R,
                      std::vector<double>& z1, std::vector<double>& z2);

/// d^H_ij = min(d^L_ij, c_EV max(|R_i|/eta~_i, |R_j|/eta~_j)) with the
/// normalization of the configured variant. Returns the number of rows
/// zeroed because eta~ vanished (identically zero field around i).
int high_order_viscosity(const FemOperators& ops, const std::vector<double>& R_abs,
                         const std::vector<double>& theta, const GraphViscosity& dL,
                         const EVConfig& ev, GraphViscosity& dH);

/// Consistent-mass high-order update (same right side as the low-order one
/// but with d^H and no mass lumping of the time term).
SolveReport high_order_euler(const FemOperators& ops, const std::vector<double>& theta,
                             const std::vector<double>& F, const GraphViscosity& dH,
                             double dt, double kappa, const std::vector<double>* Ai,
                             double mass_tol, std::vector<double>& out);

enum class LimiterForce { Auto, AllZero, AllOne };

/// Zalesak flux-corrected combination of the low- and high-order updates.
/// Local bounds min/max_{j in I(i)} th^n_j; antidiffusive fluxes after
/// (3.22); L_out (optional) receives the limiter matrix for inspection.
void fct_combine(const FemOperators& ops, const std::vector<double>& theta_low,
                 const std::vector<double>& theta_high,
                 const std::vector<double>& theta_n, const GraphViscosity& dL,
                 const GraphViscosity& dH, double dt, std::vector<double>& out,
                 LimiterForce force = LimiterForce::Auto,
                 SparseOperator* A_out = nullptr, SparseOperator* L_out = nullptr);

/// Everything an SSP-RK3 step needs to know.
struct StepperConfig {
  SchemeKind scheme = SchemeKind::FCT;
  double cfl = 0.4;
  double dt_max = 1e30;
  double dt_fixed = 0.0;  // > 0 overrides the CFL selection
  EVConfig ev;
  double kappa = 0.0;
  double s = 0.5;
  VelocityMode mode = VelocityMode::SQG;
  std::optional<Vec2> frozen_velocity;
  bool refresh_velocity_per_stage = true;
  double mass_tol = 1e-12;
  SincOptions sinc;
};

/// Drives Algorithm-1 Euler stages inside SSP-RK3 with on-the-fly time-step
/// selection, per-stage velocity refresh and warm-started fractional
/// solves.
class TimeStepper {
 public:
  TimeStepper(const FemOperators& ops, SincQuadrature q, StepperConfig cfg);

  const StepperConfig& config() const { return cfg_; }
  const FractionalOps& fractional() const { return fops_; }

  /// One forward Euler update with the selected scheme (Algorithm 1 for
  /// FCT). U must match theta's stage value.
  void euler_step(const std::vector<double>& theta, const VectorField2& U,
                  double dt, std::vector<double>& out, int stage_slot = 0);

  struct StepInfo {
    double dt = 0.0;
    int halvings = 0;
    bool dt_capped = false;
    int ev_zero_rows = 0;
  };

  /// One SSP-RK3 step; dt never exceeds t_end - state.t so the final step
  /// lands on t_end exactly.
  StepInfo step(TransportState& state, double t_end);

  /// Velocity at a stage value (frozen constant, SQG or QG). The stage slot
  /// picks the warm-start history.
  VectorField2 velocity(const std::vector<double>& theta, int stage_slot);

  /// Stream function of the most recent stage-0 velocity computation, empty
  /// for frozen-velocity runs until a dynamic mode computes one.
  const std::vector<double>& last_psi() const { return last_psi_; }

  /// Stream function of an arbitrary field through the configured mode,
  /// sharing the stage-0 warm-start history.
  std::vector<double> stream(const std::vector<double>& theta);

 private:
  const FemOperators* ops_;
  StepperConfig cfg_;
  FractionalOps fops_;

  // warm-start histories per stage slot
  std::array<SincWorkspace, 3> vel_ws_;
  std::array<std::vector<double>, 3> poisson_warm_;
  std::array<SincWorkspace, 3> act_n_ws_, act_g_ws_;

  // reusable buffers
  GraphViscosity dL_, dH_;
  std::vector<double> F_, z1_, z2_, R_, thL_, thG_, thH_, e_, v_;
  std::vector<double> last_psi_;
  int ev_zero_rows_ = 0;

  void stage_update(const std::vector<double>& theta, const VectorField2& U,
                    const GraphViscosity& dL, double dt, std::vector<double>& out,
                    int stage_slot);
};

}  // namespace sqg

#endif  // SQG_TRANSPORT_HPP
