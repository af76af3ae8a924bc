#include "sqg/velocity.hpp"

#include <cmath>

namespace sqg {

void element_gradients(const TorusMesh& mesh, const std::vector<double>& v,
                       std::vector<double>& gx, std::vector<double>& gy) {
  const auto& tris = mesh.triangles();
  gx.resize(tris.size());
  gy.resize(tris.size());
  const double inv_h = 1.0 / mesh.h();
  for (size_t t = 0; t < tris.size(); ++t) {
    const Triangle& tri = tris[t];
    double sx = 0.0, sy = 0.0;
    for (int c = 0; c < 3; ++c) {
      const Vec2 g = ref_grad(tri.upper, c);
      const double vc = v[static_cast<size_t>(tri.v[static_cast<size_t>(c)])];
      sx += vc * g.x;
      sy += vc * g.y;
    }
    gx[t] = sx * inv_h;
    gy[t] = sy * inv_h;
  }
}

std::vector<double> stream_function(const FractionalOps& fops,
                                    const std::vector<double>& theta,
                                    VelocityMode mode, SincWorkspace* ws,
                                    std::vector<double>* poisson_warm) {
  const FemOperators& ops = fops.fem();
  if (!is_zero_mean(ops.lumped, theta))
    throw error("stream_function: buoyancy is not zero-mean");
  if (mode == VelocityMode::SQG)
    return fops.inv_frac_apply(theta, FracPower(0.5), ws);

  // QG: stiffness . Psi = Mass . Theta on the zero-mean subspace
  std::vector<double> rhs(theta.size());
  ops.mass_st.apply(theta.data(), rhs.data());
  StencilLinOp op(ops.stiffness_st);
  SolveOptions so;
  so.tol = fops.options().tol;
  so.max_iter = fops.options().max_iter > 0 ? fops.options().max_iter
                                            : 50 * ops.mesh->n_side();
  so.semi_definite = true;
  so.lumped = &ops.lumped;
  std::vector<double> psi;
  if (poisson_warm && poisson_warm->size() == theta.size()) {
    psi = *poisson_warm;
    so.warm_start = true;
  }
  SolveReport rep = cg_solve(op, rhs.data(), psi, so);
  if (!rep.converged)
    throw error("stream_function: QG Poisson solve failed (residual " +
                std::to_string(rep.final_residual) + ")");
  if (poisson_warm) *poisson_warm = psi;
  return psi;
}

VectorField2 clement_perp_velocity(const TorusMesh& mesh,
                                   const std::vector<double>& psi) {
  std::vector<double> gx, gy;
  element_gradients(mesh, psi, gx, gy);
  VectorField2 u(mesh);
  const int nv = mesh.n_vertices();
  // all elements have |K| = h^2/2, so the area-weighted patch average is a
  // plain mean over the 6 incident triangles
  for (int i = 0; i < nv; ++i) {
    double ax = 0.0, ay = 0.0;
    for (const auto& inc : mesh.incident(i)) {
      ax += gx[static_cast<size_t>(inc.tri)];
      ay += gy[static_cast<size_t>(inc.tri)];
    }
    // grad^perp v = (-d2 v, d1 v)
    u.u1[static_cast<size_t>(i)] = -ay / 6.0;
    u.u2[static_cast<size_t>(i)] = ax / 6.0;
  }
  return u;
}

std::vector<double> nodal_gradient_magnitude(const TorusMesh& mesh,
                                             const std::vector<double>& v) {
  std::vector<double> gx, gy;
  element_gradients(mesh, v, gx, gy);
  const int nv = mesh.n_vertices();
  std::vector<double> mag(static_cast<size_t>(nv));
  for (int i = 0; i < nv; ++i) {
    double ax = 0.0, ay = 0.0;
    for (const auto& inc : mesh.incident(i)) {
      ax += gx[static_cast<size_t>(inc.tri)];
      ay += gy[static_cast<size_t>(inc.tri)];
    }
    mag[static_cast<size_t>(i)] = std::hypot(ax / 6.0, ay / 6.0);
  }
  return mag;
}

}  // namespace sqg
