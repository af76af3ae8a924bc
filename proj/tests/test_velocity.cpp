#include <doctest.h>

#include <cmath>

#include "sqg/transport.hpp"

using namespace sqg;

namespace {

std::vector<double> nodal(const TorusMesh& mesh, double (*f)(double, double)) {
  std::vector<double> v(static_cast<size_t>(mesh.n_vertices()));
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    const Vec2 p = mesh.vertex(i);
    v[static_cast<size_t>(i)] = f(p.x, p.y);
  }
  return v;
}

double eigenmode(double x, double y) { return std::sin(y) * std::cos(x); }

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0, s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    d += (a[i] - b[i]) * (a[i] - b[i]);
    s += b[i] * b[i];
  }
  return std::sqrt(d / s);
}

}  // namespace

TEST_CASE("stream function: SQG and QG branches on the eigenmode") {
  const TorusMesh mesh = build_uniform(64);
  const FemOperators ops = FemOperators::build(mesh);
  FractionalOps fops(ops, SincQuadrature(0.8, 12), SincOptions{1e-10, 0, 2});

  std::vector<double> theta = nodal(mesh, eigenmode);
  project_zero_mean(ops.lumped, theta);

  // (-lap)^{1/2} psi = theta with lambda = 2 -> psi = theta / sqrt(2)
  const std::vector<double> psi_sqg = stream_function(fops, theta, VelocityMode::SQG);
  std::vector<double> want(theta.size());
  for (size_t i = 0; i < want.size(); ++i) want[i] = theta[i] / std::sqrt(2.0);
  CHECK(rel_l2(psi_sqg, want) <= 0.01);

  // -lap psi = theta -> psi = theta / 2
  const std::vector<double> psi_qg = stream_function(fops, theta, VelocityMode::QG);
  for (size_t i = 0; i < want.size(); ++i) want[i] = theta[i] / 2.0;
  CHECK(rel_l2(psi_qg, want) <= 0.01);

  const std::vector<double> zero(theta.size(), 0.0);
  for (double v : stream_function(fops, zero, VelocityMode::SQG)) CHECK(v == 0.0);

  std::vector<double> biased(theta.size(), 1.0);
  CHECK_THROWS_AS(stream_function(fops, biased, VelocityMode::SQG), error);
}

TEST_CASE("Clement perp velocity of sin x1") {
  const TorusMesh mesh = build_uniform(64);
  std::vector<double> psi(static_cast<size_t>(mesh.n_vertices()));
  for (int i = 0; i < mesh.n_vertices(); ++i)
    psi[static_cast<size_t>(i)] = std::sin(mesh.vertex(i).x);

  const VectorField2 u = clement_perp_velocity(mesh, psi);
  // grad^perp sin x1 = (0, cos x1)
  double worst = 0.0;
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    worst = std::max(worst, std::abs(u.u1[static_cast<size_t>(i)]));
    worst = std::max(worst, std::abs(u.u2[static_cast<size_t>(i)] -
                                     std::cos(mesh.vertex(i).x)));
  }
  CHECK(worst <= 1e-2);

  // brute-force patch average at one vertex reproduces the library value
  const int v0 = mesh.vertex_id(5, 9);
  double gx = 0.0, gy = 0.0;
  for (const auto& inc : mesh.incident(v0)) {
    const Triangle& t = mesh.triangles()[static_cast<size_t>(inc.tri)];
    double ex = 0.0, ey = 0.0;
    for (int c = 0; c < 3; ++c) {
      const Vec2 g = ref_grad(t.upper, c);
      ex += psi[static_cast<size_t>(t.v[static_cast<size_t>(c)])] * g.x / mesh.h();
      ey += psi[static_cast<size_t>(t.v[static_cast<size_t>(c)])] * g.y / mesh.h();
    }
    gx += ex / 6.0;
    gy += ey / 6.0;
  }
  CHECK(u.u1[static_cast<size_t>(v0)] == doctest::Approx(-gy).epsilon(1e-13));
  CHECK(u.u2[static_cast<size_t>(v0)] == doctest::Approx(gx).epsilon(1e-13));

  const std::vector<double> zero(psi.size(), 0.0);
  const VectorField2 uz = clement_perp_velocity(mesh, zero);
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    CHECK(uz.u1[static_cast<size_t>(i)] == 0.0);
    CHECK(uz.u2[static_cast<size_t>(i)] == 0.0);
  }
}

TEST_CASE("flux of a constant field conserves regardless of div U") {
  const TorusMesh mesh = build_uniform(16);
  const FemOperators ops = FemOperators::build(mesh);

  std::vector<double> psi(static_cast<size_t>(mesh.n_vertices()));
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    const Vec2 p = mesh.vertex(i);
    psi[static_cast<size_t>(i)] = std::sin(p.x) * std::cos(2.0 * p.y) + 0.3 * std::cos(p.x + p.y);
  }
  const VectorField2 u = clement_perp_velocity(mesh, psi);

  // the raw FEM divergence int div(U) phi_i is generally nonzero
  {
    std::vector<double> a(psi.size()), b(psi.size());
    ops.c1_st.apply(u.u1.data(), a.data());
    ops.c2_st.apply(u.u2.data(), b.data());
    double worst = 0.0;
    for (size_t i = 0; i < psi.size(); ++i) worst = std::max(worst, std::abs(a[i] + b[i]));
    CHECK(worst > 1e-8);
  }

  // yet the interpolated flux of a constant sums to zero globally
  std::vector<double> constant(psi.size(), 0.7), F, z1, z2;
  convective_flux(ops, u, constant, F, z1, z2);
  double total = 0.0;
  for (double f : F) total += f;
  CHECK(std::abs(total) <= 1e-13);
}

TEST_CASE("coordinate swap maps (u1,u2) to (-u2,-u1)") {
  const TorusMesh mesh = build_uniform(8);
  std::vector<double> psi(static_cast<size_t>(mesh.n_vertices()));
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    const Vec2 p = mesh.vertex(i);
    psi[static_cast<size_t>(i)] = std::sin(p.x) * std::sin(p.y) + std::cos(p.x + p.y);
  }
  std::vector<double> psi_swapped(psi.size());
  for (int i2 = 0; i2 < 8; ++i2)
    for (int i1 = 0; i1 < 8; ++i1)
      psi_swapped[static_cast<size_t>(mesh.vertex_id(i1, i2))] =
          psi[static_cast<size_t>(mesh.vertex_id(i2, i1))];

  const VectorField2 u = clement_perp_velocity(mesh, psi);
  const VectorField2 us = clement_perp_velocity(mesh, psi_swapped);
  for (int i2 = 0; i2 < 8; ++i2) {
    for (int i1 = 0; i1 < 8; ++i1) {
      const int at = mesh.vertex_id(i1, i2);
      const int from = mesh.vertex_id(i2, i1);
      CHECK(us.u1[static_cast<size_t>(at)] ==
            doctest::Approx(-u.u2[static_cast<size_t>(from)]).epsilon(1e-14));
      CHECK(us.u2[static_cast<size_t>(at)] ==
            doctest::Approx(-u.u1[static_cast<size_t>(from)]).epsilon(1e-14));
    }
  }
}

TEST_CASE("pure Fourier mode gives zero-mean velocity components") {
  const TorusMesh mesh = build_uniform(32);
  const FemOperators ops = FemOperators::build(mesh);
  std::vector<double> psi(static_cast<size_t>(mesh.n_vertices()));
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    const Vec2 p = mesh.vertex(i);
    psi[static_cast<size_t>(i)] = std::sin(2.0 * p.x + p.y);
  }
  const VectorField2 u = clement_perp_velocity(mesh, psi);
  CHECK(std::abs(lumped_integral(ops.lumped, u.u1)) <= 1e-10);
  CHECK(std::abs(lumped_integral(ops.lumped, u.u2)) <= 1e-10);
}
