#include "sqg/transport.hpp"

#include <algorithm>
#include <cmath>

namespace sqg {

void low_order_viscosity(const FemOperators& ops, const VectorField2& U,
                         const std::vector<double>& theta, GraphViscosity& d) {
  (void)theta;  // lambda_max of the scalar model depends on the velocities only
  if (d.rows() == 0) d = SparseOperator(ops.pattern);
  const auto& pat = *ops.pattern;
  double* dv = d.values();
  const double* c1 = ops.c1.values();
  const double* c2 = ops.c2.values();
  for (int i = 0; i < pat.n; ++i) {
    for (int k = pat.row_ptr[static_cast<size_t>(i)]; k < pat.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
      const int j = pat.col[static_cast<size_t>(k)];
      if (j <= i) continue;
      // lambda_max(n_ij, .) ||c_ij|| = max(|u_i.c_ij|, |u_j.c_ij|); the
      // reversed orientation gives the same value since c_ji = -c_ij.
      const double cx = c1[static_cast<size_t>(k)], cy = c2[static_cast<size_t>(k)];
      const double di = std::abs(U.u1[static_cast<size_t>(i)] * cx + U.u2[static_cast<size_t>(i)] * cy);
      const double dj = std::abs(U.u1[static_cast<size_t>(j)] * cx + U.u2[static_cast<size_t>(j)] * cy);
      const double val = std::max(di, dj);
      dv[static_cast<size_t>(k)] = val;
      dv[static_cast<size_t>(ops.trans[static_cast<size_t>(k)])] = val;
    }
  }
  // d_ii = -sum_{j != i} d_ij
  for (int i = 0; i < pat.n; ++i) {
    double s = 0.0;
    int diag = -1;
    for (int k = pat.row_ptr[static_cast<size_t>(i)]; k < pat.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
      if (pat.col[static_cast<size_t>(k)] == i) diag = k;
      else s += dv[static_cast<size_t>(k)];
    }
    dv[static_cast<size_t>(diag)] = -s;
  }
}

DtChoice select_dt(const FemOperators& ops, const GraphViscosity& dL,
                   double cfl, double dt_max) {
  const auto& pat = *ops.pattern;
  const double* dv = dL.values();
  DtChoice out;
  double dt = dt_max;
  bool any = false;
  for (int i = 0; i < pat.n; ++i) {
    double s = 0.0;
    for (int k = pat.row_ptr[static_cast<size_t>(i)]; k < pat.row_ptr[static_cast<size_t>(i) + 1]; ++k)
      if (pat.col[static_cast<size_t>(k)] != i) s += dv[static_cast<size_t>(k)];
    if (s > 0.0) {
      any = true;
      dt = std::min(dt, cfl * ops.lumped[static_cast<size_t>(i)] / s);
    }
  }
  out.dt = dt;
  out.capped_all_zero = !any;
  if (!(out.dt > 0.0)) throw error("select_dt: nonpositive time step");
  return out;
}

double cfl_ratio(const FemOperators& ops, const GraphViscosity& d, double dt) {
  const auto& pat = *ops.pattern;
  const double* dv = d.values();
  double r = 0.0;
  for (int i = 0; i < pat.n; ++i) {
    double s = 0.0;
    for (int k = pat.row_ptr[static_cast<size_t>(i)]; k < pat.row_ptr[static_cast<size_t>(i) + 1]; ++k)
      if (pat.col[static_cast<size_t>(k)] != i) s += dv[static_cast<size_t>(k)];
    r = std::max(r, dt * s / ops.lumped[static_cast<size_t>(i)]);
  }
  return r;
}

void convective_flux(const FemOperators& ops, const VectorField2& U,
                     const std::vector<double>& theta, std::vector<double>& F,
                     std::vector<double>& z1, std::vector<double>& z2) {
  const size_t n = theta.size();
  z1.resize(n);
  z2.resize(n);
  F.resize(n);
  for (size_t i = 0; i < n; ++i) {
    z1[i] = U.u1[i] * theta[i];
    z2[i] = U.u2[i] * theta[i];
  }
  ops.c1_st.apply(z1.data(), F.data());
  // reuse z1 as scratch for the second component product
  ops.c2_st.apply(z2.data(), z1.data());
  for (size_t i = 0; i < n; ++i) F[i] += z1[i];
}

void low_order_euler(const FemOperators& ops, const std::vector<double>& theta,
                     const std::vector<double>& F, const GraphViscosity& dL,
                     double dt, double kappa, const std::vector<double>* Ai,
                     std::vector<double>& out) {
  const size_t n = theta.size();
  out.resize(n);
  std::vector<double> visc(n);
  dL.apply(theta.data(), visc.data());
  for (size_t i = 0; i < n; ++i) {
    double rhs = -F[i] + visc[i];
    if (kappa != 0.0) rhs -= kappa * ops.lumped[i] * (*Ai)[i];
    out[i] = theta[i] + dt * rhs / ops.lumped[i];
  }
}

namespace {

SolveReport consistent_mass_update(const FemOperators& ops,
                                   const std::vector<double>& theta,
                                   const std::vector<double>& rhs_extra,
                                   double mass_tol, std::vector<double>& out) {
  // solve M out = M theta + rhs_extra, warm-started at theta
  const size_t n = theta.size();
  std::vector<double> rhs(n);
  ops.mass_st.apply(theta.data(), rhs.data());
  for (size_t i = 0; i < n; ++i) rhs[i] += rhs_extra[i];
  StencilLinOp op(ops.mass_st);
  SolveOptions so;
  so.tol = mass_tol;
  so.max_iter = 200 + ops.mesh->n_side();
  so.warm_start = true;
  out = theta;
  SolveReport rep = cg_solve(op, rhs.data(), out, so);
  if (!rep.converged)
    throw error("consistent-mass solve failed (residual " +
                std::to_string(rep.final_residual) + ")");
  return rep;
}

}  // namespace

SolveReport galerkin_euler(const FemOperators& ops, const std::vector<double>& theta,
                           const std::vector<double>& F, double dt, double kappa,
                           const std::vector<double>* Ai, double mass_tol,
                           std::vector<double>& out) {
  const size_t n = theta.size();
  std::vector<double> extra(n);
  for (size_t i = 0; i < n; ++i) {
    extra[i] = -dt * F[i];
    if (kappa != 0.0) extra[i] -= kappa * dt * ops.lumped[i] * (*Ai)[i];
  }
  return consistent_mass_update(ops, theta, extra, mass_tol, out);
}

void entropy_residual(const FemOperators& ops, const VectorField2& U,
                      const std::vector<double>& theta_n,
                      const std::vector<double>& theta_g, double kappa,
                      const std::vector<double>* Ai_n,
                      const std::vector<double>* Ai_g, std::vector<double>& R,
                      std::vector<double>& z1, std::vector<double>& z2) {
  const size_t n = theta_n.size();
  R.resize(n);
  z1.resize(n);
  z2.resize(n);
  // flux difference sum_j u_j . c_ij (th^n_j - th^G_j)
  std::vector<double> diff(n), acc(n);
  for (size_t i = 0; i < n; ++i) diff[i] = theta_n[i] - theta_g[i];
  for (size_t i = 0; i < n; ++i) {
    z1[i] = U.u1[i] * diff[i];
    z2[i] = U.u2[i] * diff[i];
  }
  ops.c1_st.apply(z1.data(), acc.data());
  ops.c2_st.apply(z2.data(), z1.data());
  for (size_t i = 0; i < n; ++i) {
    double r = acc[i] + z1[i];
    if (kappa != 0.0)
      r += kappa * ops.lumped[i] * ((*Ai_n)[i] - (*Ai_g)[i]);
    // eta'(th^n_i) weight, eta = x^2/2
    R[i] = std::abs(theta_n[i] * r);
  }
}

int high_order_viscosity(const FemOperators& ops, const std::vector<double>& R_abs,
                         const std::vector<double>& theta, const GraphViscosity& dL,
                         const EVConfig& ev, GraphViscosity& dH) {
  if (dH.rows() == 0) dH = SparseOperator(ops.pattern);
  const auto& pat = *ops.pattern;
  const size_t n = theta.size();

  // normalized residuals |R_i| / eta~_i
  std::vector<double> q(n);
  int zero_rows = 0;
  for (int i = 0; i < pat.n; ++i) {
    const double eta_i = 0.5 * theta[static_cast<size_t>(i)] * theta[static_cast<size_t>(i)];
    double emax = -1e300, emin = 1e300;
    for (int k = pat.row_ptr[static_cast<size_t>(i)]; k < pat.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
      const double t = theta[static_cast<size_t>(pat.col[static_cast<size_t>(k)])];
      const double e = 0.5 * t * t;
      emax = std::max(emax, e);
      emin = std::min(emin, e);
    }
    double norm = std::max(std::abs(emax - emin), ev.epsilon * std::abs(eta_i));
    if (ev.normalization == EVNormalization::Max)
      norm = std::max(norm, std::abs(eta_i));
    if (norm > 0.0) {
      q[static_cast<size_t>(i)] = R_abs[static_cast<size_t>(i)] / norm;
    } else {
      q[static_cast<size_t>(i)] = -1.0;  // marks the row as degenerate
      ++zero_rows;
    }
  }

  double* dv = dH.values();
  const double* dl = dL.values();
  for (int i = 0; i < pat.n; ++i) {
    for (int k = pat.row_ptr[static_cast<size_t>(i)]; k < pat.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
      const int j = pat.col[static_cast<size_t>(k)];
      if (j <= i) continue;
      const double qi = q[static_cast<size_t>(i)], qj = q[static_cast<size_t>(j)];
      double val;
      if (qi < 0.0 || qj < 0.0)
        val = 0.0;
      else
        val = std::min(dl[static_cast<size_t>(k)], ev.c_ev * std::max(qi, qj));
      dv[static_cast<size_t>(k)] = val;
      dv[static_cast<size_t>(ops.trans[static_cast<size_t>(k)])] = val;
    }
  }
  for (int i = 0; i < pat.n; ++i) {
    double s = 0.0;
    int diag = -1;
    for (int k = pat.row_ptr[static_cast<size_t>(i)]; k < pat.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
      if (pat.col[static_cast<size_t>(k)] == i) diag = k;
      else s += dv[static_cast<size_t>(k)];
    }
    dv[static_cast<size_t>(diag)] = -s;
  }
  return zero_rows;
}

SolveReport high_order_euler(const FemOperators& ops, const std::vector<double>& theta,
                             const std::vector<double>& F, const GraphViscosity& dH,
                             double dt, double kappa, const std::vector<double>* Ai,
                             double mass_tol, std::vector<double>& out) {
  const size_t n = theta.size();
  std::vector<double> extra(n);
  dH.apply(theta.data(), extra.data());
  for (size_t i = 0; i < n; ++i) {
    extra[i] = dt * extra[i] - dt * F[i];
    if (kappa != 0.0) extra[i] -= kappa * dt * ops.lumped[i] * (*Ai)[i];
  }
  return consistent_mass_update(ops, theta, extra, mass_tol, out);
}

void fct_combine(const FemOperators& ops, const std::vector<double>& theta_low,
                 const std::vector<double>& theta_high,
                 const std::vector<double>& theta_n, const GraphViscosity& dL,
                 const GraphViscosity& dH, double dt, std::vector<double>& out,
                 LimiterForce force, SparseOperator* A_out, SparseOperator* L_out) {
  const auto& pat = *ops.pattern;
  const size_t n = theta_n.size();
  out.resize(n);

  SparseOperator A_local;
  SparseOperator& A = A_out ? *A_out : A_local;
  if (A.rows() == 0) A = SparseOperator(ops.pattern);
  double* av = A.values();
  const double* mv = ops.mass.values();
  const double* dlv = dL.values();
  const double* dhv = dH.values();

  // antidiffusive fluxes, skew-symmetric by construction
  for (int i = 0; i < pat.n; ++i) {
    for (int k = pat.row_ptr[static_cast<size_t>(i)]; k < pat.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
      const int j = pat.col[static_cast<size_t>(k)];
      if (j < i) continue;
      if (j == i) { av[static_cast<size_t>(k)] = 0.0; continue; }
      const double dij = (theta_high[static_cast<size_t>(j)] - theta_n[static_cast<size_t>(j)]) -
                         (theta_high[static_cast<size_t>(i)] - theta_n[static_cast<size_t>(i)]);
      const double val = -(mv[static_cast<size_t>(k)] / dt) * dij +
                         (dhv[static_cast<size_t>(k)] - dlv[static_cast<size_t>(k)]) *
                             (theta_n[static_cast<size_t>(j)] - theta_n[static_cast<size_t>(i)]);
      av[static_cast<size_t>(k)] = val;
      av[static_cast<size_t>(ops.trans[static_cast<size_t>(k)])] = -val;
    }
  }

  // Zalesak limiter from the local stencil bounds of theta^n
  std::vector<double> Rp(n, 1.0), Rm(n, 1.0);
  if (force == LimiterForce::Auto) {
    for (int i = 0; i < pat.n; ++i) {
      double tmin = 1e300, tmax = -1e300, pp = 0.0, pm = 0.0;
      for (int k = pat.row_ptr[static_cast<size_t>(i)]; k < pat.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
        const double t = theta_n[static_cast<size_t>(pat.col[static_cast<size_t>(k)])];
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
        const double a = av[static_cast<size_t>(k)];
        if (a > 0.0) pp += a;
        else pm += a;
      }
      const double mi_dt = ops.lumped[static_cast<size_t>(i)] / dt;
      const double qp = mi_dt * (tmax - theta_low[static_cast<size_t>(i)]);
      const double qm = mi_dt * (tmin - theta_low[static_cast<size_t>(i)]);
      // R = 1 when P carries no flux of that sign (0/0: nothing to limit);
      // clamped to [0,1] so a low-order value marginally outside the bounds
      // (viscous case) cannot produce a negative limiter.
      Rp[static_cast<size_t>(i)] = pp > 0.0 ? std::clamp(qp / pp, 0.0, 1.0) : 1.0;
      Rm[static_cast<size_t>(i)] = pm < 0.0 ? std::clamp(qm / pm, 0.0, 1.0) : 1.0;
    }
  } else if (force == LimiterForce::AllZero) {
    std::fill(Rp.begin(), Rp.end(), 0.0);
    std::fill(Rm.begin(), Rm.end(), 0.0);
  }  // AllOne keeps R = 1

  if (L_out && L_out->rows() == 0) *L_out = SparseOperator(ops.pattern);
  for (int i = 0; i < pat.n; ++i) {
    double acc = 0.0;
    for (int k = pat.row_ptr[static_cast<size_t>(i)]; k < pat.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
      const int j = pat.col[static_cast<size_t>(k)];
      if (j == i) continue;
      const double a = av[static_cast<size_t>(k)];
      const double lij = (a >= 0.0)
                             ? std::min(Rp[static_cast<size_t>(i)], Rm[static_cast<size_t>(j)])
                             : std::min(Rm[static_cast<size_t>(i)], Rp[static_cast<size_t>(j)]);
      acc += lij * a;
      if (L_out) L_out->values()[static_cast<size_t>(k)] = lij;
    }
    out[static_cast<size_t>(i)] =
        theta_low[static_cast<size_t>(i)] + dt * acc / ops.lumped[static_cast<size_t>(i)];
  }
}

TimeStepper::TimeStepper(const FemOperators& ops, SincQuadrature q, StepperConfig cfg)
    : ops_(&ops), cfg_(cfg), fops_(ops, q, cfg.sinc) {}

std::vector<double> TimeStepper::stream(const std::vector<double>& theta) {
  return stream_function(fops_, theta, cfg_.mode, &vel_ws_[0], &poisson_warm_[0]);
}

VectorField2 TimeStepper::velocity(const std::vector<double>& theta, int stage_slot) {
  if (cfg_.frozen_velocity) {
    VectorField2 u(*ops_->mesh);
    std::fill(u.u1.begin(), u.u1.end(), cfg_.frozen_velocity->x);
    std::fill(u.u2.begin(), u.u2.end(), cfg_.frozen_velocity->y);
    return u;
  }
  std::vector<double> psi =
      stream_function(fops_, theta, cfg_.mode, &vel_ws_[static_cast<size_t>(stage_slot)],
                      &poisson_warm_[static_cast<size_t>(stage_slot)]);
  if (stage_slot == 0) last_psi_ = psi;
  return clement_perp_velocity(*ops_->mesh, psi);
}

void TimeStepper::stage_update(const std::vector<double>& theta, const VectorField2& U,
                               const GraphViscosity& dL, double dt,
                               std::vector<double>& out, int stage_slot) {
  convective_flux(*ops_, U, theta, F_, z1_, z2_);
  const bool viscous = cfg_.kappa != 0.0;
  std::vector<double> Ai_n, Ai_g;
  if (viscous)
    Ai_n = fops_.lumped_frac_action(theta, FracPower(cfg_.s),
                                    &act_n_ws_[static_cast<size_t>(stage_slot)]);

  switch (cfg_.scheme) {
    case SchemeKind::LowOrder:
      low_order_euler(*ops_, theta, F_, dL, dt, cfg_.kappa,
                      viscous ? &Ai_n : nullptr, out);
      return;
    case SchemeKind::Galerkin:
      galerkin_euler(*ops_, theta, F_, dt, cfg_.kappa, viscous ? &Ai_n : nullptr,
                     cfg_.mass_tol, out);
      return;
    case SchemeKind::EntropyViscosity:
    case SchemeKind::FCT:
      break;
  }

  galerkin_euler(*ops_, theta, F_, dt, cfg_.kappa, viscous ? &Ai_n : nullptr,
                 cfg_.mass_tol, thG_);
  if (viscous)
    Ai_g = fops_.lumped_frac_action(thG_, FracPower(cfg_.s),
                                    &act_g_ws_[static_cast<size_t>(stage_slot)]);
  entropy_residual(*ops_, U, theta, thG_, cfg_.kappa, viscous ? &Ai_n : nullptr,
                   viscous ? &Ai_g : nullptr, R_, z1_, z2_);
  ev_zero_rows_ += high_order_viscosity(*ops_, R_, theta, dL, cfg_.ev, dH_);

  if (cfg_.scheme == SchemeKind::EntropyViscosity) {
    high_order_euler(*ops_, theta, F_, dH_, dt, cfg_.kappa,
                     viscous ? &Ai_n : nullptr, cfg_.mass_tol, out);
    return;
  }

  low_order_euler(*ops_, theta, F_, dL, dt, cfg_.kappa, viscous ? &Ai_n : nullptr,
                  thL_);
  high_order_euler(*ops_, theta, F_, dH_, dt, cfg_.kappa, viscous ? &Ai_n : nullptr,
                   cfg_.mass_tol, thH_);
  fct_combine(*ops_, thL_, thH_, theta, dL, dH_, dt, out);
}

void TimeStepper::euler_step(const std::vector<double>& theta, const VectorField2& U,
                             double dt, std::vector<double>& out, int stage_slot) {
  low_order_viscosity(*ops_, U, theta, dL_);
  stage_update(theta, U, dL_, dt, out, stage_slot);
}

TimeStepper::StepInfo TimeStepper::step(TransportState& state, double t_end) {
  StepInfo info;
  ev_zero_rows_ = 0;
  const std::vector<double>& theta = state.theta;
  const VectorField2 U0 = velocity(theta, 0);

  low_order_viscosity(*ops_, U0, theta, dL_);
  double dt;
  if (cfg_.dt_fixed > 0.0) {
    dt = cfg_.dt_fixed;
  } else {
    DtChoice dc = select_dt(*ops_, dL_, cfg_.cfl, cfg_.dt_max);
    dt = dc.dt;
    info.dt_capped = dc.capped_all_zero;
  }
  dt = std::min(dt, t_end - state.t);
  if (!(dt > 0.0)) throw error("TimeStepper::step: no room left before t_end");

  std::vector<double> theta_new(theta.size());
  for (int halvings = 0;; ++halvings) {
    if (halvings > 60) throw error("TimeStepper::step: time step underflow");
    info.halvings = halvings;
    bool redo = false;

    // stage 1: dL_ already matches (theta, U0) on entry and after a redo
    stage_update(theta, U0, dL_, dt, e_, 0);

    // stage 2
    v_ = e_;
    const VectorField2 U1 =
        cfg_.refresh_velocity_per_stage ? velocity(v_, 1) : U0;
    low_order_viscosity(*ops_, U1, v_, dL_);
    if (cfg_.dt_fixed <= 0.0 && cfl_ratio(*ops_, dL_, dt) > 0.5) {
      redo = true;
    } else {
      stage_update(v_, U1, dL_, dt, e_, 1);
      for (size_t i = 0; i < v_.size(); ++i)
        v_[i] = 0.75 * theta[i] + 0.25 * e_[i];

      // stage 3
      const VectorField2 U2 =
          cfg_.refresh_velocity_per_stage ? velocity(v_, 2) : U0;
      low_order_viscosity(*ops_, U2, v_, dL_);
      if (cfg_.dt_fixed <= 0.0 && cfl_ratio(*ops_, dL_, dt) > 0.5) {
        redo = true;
      } else {
        stage_update(v_, U2, dL_, dt, e_, 2);
        for (size_t i = 0; i < theta.size(); ++i)
          theta_new[i] = theta[i] / 3.0 + 2.0 / 3.0 * e_[i];
      }
    }

    if (!redo) break;
    dt *= 0.5;
    low_order_viscosity(*ops_, U0, theta, dL_);  // restore stage-1 viscosity
  }

  state.theta = std::move(theta_new);
  state.t += dt;
  state.step_index += 1;
  info.dt = dt;
  info.ev_zero_rows = ev_zero_rows_;
  return info;
}

}  // namespace sqg
