#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "sqg/assembly.hpp"

using namespace sqg;

namespace {

constexpr double pi = 3.14159265358979323846;

struct TriGeom {
  std::array<Vec2, 3> p;
  double area;
  std::array<Vec2, 3> grad;  // of the barycentric basis
};

TriGeom tri_geometry(const TorusMesh& mesh, const Triangle& t) {
  const double h = mesh.h();
  const double ox = t.cell_i1 * h, oy = t.cell_i2 * h;
  TriGeom g;
  if (!t.upper)
    g.p = {Vec2{ox, oy}, Vec2{ox + h, oy}, Vec2{ox + h, oy + h}};
  else
    g.p = {Vec2{ox, oy}, Vec2{ox + h, oy + h}, Vec2{ox, oy + h}};
  const double twoA = (g.p[1].x - g.p[0].x) * (g.p[2].y - g.p[0].y) -
                      (g.p[1].y - g.p[0].y) * (g.p[2].x - g.p[0].x);
  g.area = 0.5 * twoA;
  for (int c = 0; c < 3; ++c) {
    const Vec2& a = g.p[static_cast<size_t>((c + 1) % 3)];
    const Vec2& b = g.p[static_cast<size_t>((c + 2) % 3)];
    g.grad[static_cast<size_t>(c)] = {(a.y - b.y) / twoA, (b.x - a.x) / twoA};
  }
  return g;
}

// degree-5 7-point triangle rule (barycentric points, weights sum to 1)
struct QuadRule {
  std::array<std::array<double, 3>, 7> b;
  std::array<double, 7> w;
};
QuadRule degree5_rule() {
  QuadRule q;
  const double a1 = 0.059715871789770, b1 = 0.470142064105115;
  const double a2 = 0.797426985353087, b2 = 0.101286507323456;
  q.b = {{{1.0 / 3, 1.0 / 3, 1.0 / 3},
          {a1, b1, b1},
          {b1, a1, b1},
          {b1, b1, a1},
          {a2, b2, b2},
          {b2, a2, b2},
          {b2, b2, a2}}};
  const double w1 = 0.225, w2 = 0.132394152788506, w3 = 0.125939180544827;
  q.w = {w1, w2, w2, w2, w3, w3, w3};
  return q;
}

// dense brute-force assemblies by numerical quadrature
struct DenseOps {
  std::vector<double> mass, stiff, c1, c2;  // n x n row-major
  int n;
};

DenseOps brute_force(const TorusMesh& mesh) {
  const int n = mesh.n_vertices();
  DenseOps d;
  d.n = n;
  d.mass.assign(static_cast<size_t>(n) * n, 0.0);
  d.stiff.assign(static_cast<size_t>(n) * n, 0.0);
  d.c1.assign(static_cast<size_t>(n) * n, 0.0);
  d.c2.assign(static_cast<size_t>(n) * n, 0.0);
  const QuadRule q = degree5_rule();
  for (const Triangle& t : mesh.triangles()) {
    const TriGeom g = tri_geometry(mesh, t);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        double mab = 0.0;
        for (int k = 0; k < 7; ++k)
          mab += q.w[static_cast<size_t>(k)] * q.b[static_cast<size_t>(k)][static_cast<size_t>(a)] *
                 q.b[static_cast<size_t>(k)][static_cast<size_t>(b)];
        mab *= g.area;
        const double sab = g.area * (g.grad[static_cast<size_t>(a)].x * g.grad[static_cast<size_t>(b)].x +
                                     g.grad[static_cast<size_t>(a)].y * g.grad[static_cast<size_t>(b)].y);
        double phi_a = 0.0;  // int phi_a over the triangle
        for (int k = 0; k < 7; ++k)
          phi_a += q.w[static_cast<size_t>(k)] * q.b[static_cast<size_t>(k)][static_cast<size_t>(a)];
        phi_a *= g.area;
        const int ia = t.v[static_cast<size_t>(a)], jb = t.v[static_cast<size_t>(b)];
        d.mass[static_cast<size_t>(ia) * n + jb] += mab;
        d.stiff[static_cast<size_t>(ia) * n + jb] += sab;
        d.c1[static_cast<size_t>(ia) * n + jb] += g.grad[static_cast<size_t>(b)].x * phi_a;
        d.c2[static_cast<size_t>(ia) * n + jb] += g.grad[static_cast<size_t>(b)].y * phi_a;
      }
    }
  }
  return d;
}

double dense_at(const DenseOps& d, const std::vector<double>& m, int i, int j) {
  return m[static_cast<size_t>(i) * d.n + j];
}

}  // namespace

TEST_CASE("assembled operators match brute-force quadrature") {
  const TorusMesh mesh = build_uniform(6);
  const FemOperators ops = FemOperators::build(mesh);
  const DenseOps d = brute_force(mesh);
  const auto& pat = *ops.pattern;
  for (int i = 0; i < pat.n; ++i) {
    for (int k = pat.row_ptr[static_cast<size_t>(i)]; k < pat.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
      const int j = pat.col[static_cast<size_t>(k)];
      CHECK(ops.mass.values()[static_cast<size_t>(k)] ==
            doctest::Approx(dense_at(d, d.mass, i, j)).epsilon(1e-12));
      CHECK(ops.stiffness.values()[static_cast<size_t>(k)] ==
            doctest::Approx(dense_at(d, d.stiff, i, j)).epsilon(1e-12));
      CHECK(ops.c1.values()[static_cast<size_t>(k)] ==
            doctest::Approx(dense_at(d, d.c1, i, j)).scale(mesh.h()).epsilon(1e-12));
      CHECK(ops.c2.values()[static_cast<size_t>(k)] ==
            doctest::Approx(dense_at(d, d.c2, i, j)).scale(mesh.h()).epsilon(1e-12));
    }
  }
  // brute-force matrices have no support outside the stencil pattern
  for (int i = 0; i < d.n; ++i)
    for (int j = 0; j < d.n; ++j)
      if (ops.mass.find(i, j) < 0)
        CHECK(std::abs(dense_at(d, d.mass, i, j)) <= 1e-15);
}

TEST_CASE("lumped mass: m_i = h^2, diagonal h^2/2, total 4 pi^2") {
  const TorusMesh mesh = build_uniform(8);
  const auto mm = assemble_mass(mesh);
  const double h2 = mesh.h() * mesh.h();
  double total = 0.0;
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    CHECK(mm.lumped[static_cast<size_t>(i)] == doctest::Approx(h2).epsilon(1e-13));
    CHECK(mm.consistent.at(i, i) == doctest::Approx(h2 / 2).epsilon(1e-13));
    CHECK(mm.lumped[static_cast<size_t>(i)] > 0.0);
    total += mm.lumped[static_cast<size_t>(i)];
  }
  CHECK(std::abs(total - torus_area) <= 1e-12);
}

TEST_CASE("stiffness: kernel, 5-point stencil values, Dirichlet energy") {
  const TorusMesh mesh = build_uniform(8);
  const FemOperators ops = FemOperators::build(mesh);
  for (double r : ops.stiffness.row_sums()) CHECK(std::abs(r) <= 1e-12);

  const int i = mesh.vertex_id(3, 3);
  CHECK(ops.stiffness.at(i, i) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(ops.stiffness.at(i, mesh.vertex_id(4, 3)) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(ops.stiffness.at(i, mesh.vertex_id(2, 3)) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(ops.stiffness.at(i, mesh.vertex_id(3, 4)) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(ops.stiffness.at(i, mesh.vertex_id(3, 2)) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(std::abs(ops.stiffness.at(i, mesh.vertex_id(4, 4))) <= 1e-13);
  CHECK(std::abs(ops.stiffness.at(i, mesh.vertex_id(2, 2))) <= 1e-13);

  // int |grad sin x1|^2 = 2 pi^2 up to interpolation error
  const TorusMesh fine = build_uniform(64);
  const FemOperators fops = FemOperators::build(fine);
  std::vector<double> theta(static_cast<size_t>(fine.n_vertices()));
  for (int v = 0; v < fine.n_vertices(); ++v)
    theta[static_cast<size_t>(v)] = std::sin(fine.vertex(v).x);
  const auto Atheta = fops.stiffness.apply(theta);
  double energy = 0.0;
  for (size_t v = 0; v < theta.size(); ++v) energy += theta[v] * Atheta[v];
  CHECK(energy == doctest::Approx(2.0 * pi * pi).epsilon(0.01));
}

TEST_CASE("c_ij: exact skew-symmetry and zero column sums") {
  const TorusMesh mesh = build_uniform(6);
  const FemOperators ops = FemOperators::build(mesh);
  const auto& pat = *ops.pattern;
  for (int i = 0; i < pat.n; ++i) {
    for (int k = pat.row_ptr[static_cast<size_t>(i)]; k < pat.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
      const int j = pat.col[static_cast<size_t>(k)];
      CHECK(ops.c1.values()[static_cast<size_t>(k)] + ops.c1.at(j, i) == 0.0);
      CHECK(ops.c2.values()[static_cast<size_t>(k)] + ops.c2.at(j, i) == 0.0);
    }
  }
  // column sums (= negated row sums by skew-symmetry)
  for (double r : ops.c1.row_sums()) CHECK(std::abs(r) <= 1e-14);
  for (double r : ops.c2.row_sums()) CHECK(std::abs(r) <= 1e-14);
}

TEST_CASE("c_ij reproduces the derivative of a smooth field at O(h^2)") {
  double prev_err = 0.0;
  for (int n : {32, 64}) {
    const TorusMesh mesh = build_uniform(n);
    const FemOperators ops = FemOperators::build(mesh);
    std::vector<double> theta(static_cast<size_t>(mesh.n_vertices()));
    for (int v = 0; v < mesh.n_vertices(); ++v)
      theta[static_cast<size_t>(v)] = std::sin(mesh.vertex(v).x);
    // u = (1,0): flux_i = sum_j c1_ij theta_j ~ int cos(x1) phi_i = m_i cos + O(h^2)
    const auto flux = ops.c1.apply(theta);
    double err = 0.0;
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      const double want = std::cos(mesh.vertex(v).x);
      err = std::max(err, std::abs(flux[static_cast<size_t>(v)] / ops.lumped[static_cast<size_t>(v)] - want));
    }
    CHECK(err <= 1.5 * mesh.h() * mesh.h());
    if (prev_err > 0.0) CHECK(err <= 0.35 * prev_err);  // ~ second order
    prev_err = err;
  }
}

TEST_CASE("apply: row-sum identities") {
  const TorusMesh mesh = build_uniform(6);
  const FemOperators ops = FemOperators::build(mesh);
  const std::vector<double> ones(static_cast<size_t>(mesh.n_vertices()), 1.0);
  const auto m1 = ops.mass.apply(ones);
  for (int i = 0; i < mesh.n_vertices(); ++i)
    CHECK(m1[static_cast<size_t>(i)] == doctest::Approx(ops.lumped[static_cast<size_t>(i)]).epsilon(1e-14));
  for (double v : ops.stiffness.apply(ones)) CHECK(std::abs(v) <= 1e-13);
  for (double v : ops.c1.apply(ones)) CHECK(std::abs(v) <= 1e-14);
  ScalarField f(mesh, std::vector<double>(static_cast<size_t>(mesh.n_vertices()), 2.0));
  CHECK_NOTHROW(apply(ops.mass, f));
}

TEST_CASE("assembly is deterministic") {
  const TorusMesh mesh = build_uniform(6);
  const FemOperators a = FemOperators::build(mesh);
  const FemOperators b = FemOperators::build(mesh);
  const size_t bytes = a.pattern->col.size() * sizeof(double);
  CHECK(std::memcmp(a.mass.values(), b.mass.values(), bytes) == 0);
  CHECK(std::memcmp(a.stiffness.values(), b.stiffness.values(), bytes) == 0);
  CHECK(std::memcmp(a.c1.values(), b.c1.values(), bytes) == 0);
  CHECK(std::memcmp(a.c2.values(), b.c2.values(), bytes) == 0);
}

TEST_CASE("uniform stencil apply agrees with CSR apply") {
  const TorusMesh mesh = build_uniform(8);
  const FemOperators ops = FemOperators::build(mesh);
  std::vector<double> x(static_cast<size_t>(mesh.n_vertices()));
  for (size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.37 * static_cast<double>(i)) + 0.1;
  std::vector<double> y1(x.size()), y2(x.size());
  ops.mass.apply(x.data(), y1.data());
  ops.mass_st.apply(x.data(), y2.data());
  for (size_t i = 0; i < x.size(); ++i)
    CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));
  ops.c1.apply(x.data(), y1.data());
  ops.c1_st.apply(x.data(), y2.data());
  for (size_t i = 0; i < x.size(); ++i)
    CHECK(y1[i] == doctest::Approx(y2[i]).scale(1.0).epsilon(1e-14));
}
