#include <doctest.h>

#include <map>
#include <set>

#include "sqg/mesh.hpp"

using namespace sqg;

namespace {

// positions of a triangle's corners from its cell origin (wrap-free)
std::array<Vec2, 3> corner_positions(const TorusMesh& mesh, const Triangle& t) {
  const double h = mesh.h();
  const double ox = t.cell_i1 * h, oy = t.cell_i2 * h;
  if (!t.upper)
    return {Vec2{ox, oy}, Vec2{ox + h, oy}, Vec2{ox + h, oy + h}};
  return {Vec2{ox, oy}, Vec2{ox + h, oy + h}, Vec2{ox, oy + h}};
}

double signed_area(const std::array<Vec2, 3>& p) {
  return 0.5 * ((p[1].x - p[0].x) * (p[2].y - p[0].y) -
                (p[1].y - p[0].y) * (p[2].x - p[0].x));
}

// brute-force support overlap: j interacts with i iff a triangle holds both
std::set<int> brute_force_stencil(const TorusMesh& mesh, int i) {
  std::set<int> out;
  for (const Triangle& t : mesh.triangles()) {
    bool has_i = false;
    for (int v : t.v) has_i |= (v == i);
    if (!has_i) continue;
    for (int v : t.v) out.insert(v);
  }
  return out;
}

}  // namespace

TEST_CASE("uniform mesh counting and areas") {
  const TorusMesh mesh = build_uniform(4);
  CHECK(mesh.n_vertices() == 16);
  CHECK(mesh.n_triangles() == 32);
  const double half_cell = (torus_side / 4) * (torus_side / 4) / 2.0;  // (pi/2)^2/2
  for (const Triangle& t : mesh.triangles()) {
    const double a = signed_area(corner_positions(mesh, t));
    CHECK(a == doctest::Approx(half_cell).epsilon(1e-14));
    CHECK(a > 0.0);  // counter-clockwise
  }
}

TEST_CASE("total area partitions the torus") {
  const TorusMesh mesh = build_uniform(8);
  double total = 0.0;
  for (const Triangle& t : mesh.triangles())
    total += signed_area(corner_positions(mesh, t));
  CHECK(std::abs(total - torus_area) <= 1e-12);
}

TEST_CASE("stencil of the origin vertex on n=4") {
  const TorusMesh mesh = build_uniform(4);
  const int i = mesh.vertex_id(0, 0);
  const auto got = mesh.stencil(i);
  const auto want = brute_force_stencil(mesh, i);
  CHECK(got.size() == 7);
  CHECK(std::set<int>(got.begin(), got.end()) == want);
  // named neighbors: self, E, W, N, S, NE, SW under the periodic wrap
  const std::set<int> named = {
      mesh.vertex_id(0, 0),  mesh.vertex_id(1, 0),  mesh.vertex_id(-1, 0),
      mesh.vertex_id(0, 1),  mesh.vertex_id(0, -1), mesh.vertex_id(1, 1),
      mesh.vertex_id(-1, -1)};
  CHECK(want == named);
}

TEST_CASE("stencil translates across the lattice") {
  const TorusMesh mesh = build_uniform(4);
  const int i = mesh.vertex_id(1, 1);
  const auto si = mesh.stencil(i);
  CHECK(std::set<int>(si.begin(), si.end()) == brute_force_stencil(mesh, i));

  // translation invariance: stencils of any two vertices are translates
  const TorusMesh m8 = build_uniform(8);
  for (int i2 = 0; i2 < 8; ++i2) {
    for (int i1 = 0; i1 < 8; ++i1) {
      std::set<int> translated;
      for (int j : m8.stencil(m8.vertex_id(0, 0))) {
        const int j1 = j % 8, j2 = j / 8;
        translated.insert(m8.vertex_id(j1 + i1, j2 + i2));
      }
      const auto own = m8.stencil(m8.vertex_id(i1, i2));
      CHECK(std::set<int>(own.begin(), own.end()) == translated);
    }
  }
}

TEST_CASE("stencil contains self and is symmetric") {
  const TorusMesh mesh = build_uniform(6);
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    const auto si = mesh.stencil(i);
    CHECK(std::find(si.begin(), si.end(), i) != si.end());
    for (int j : si) {
      const auto sj = mesh.stencil(j);
      CHECK(std::find(sj.begin(), sj.end(), i) != sj.end());
    }
  }
}

TEST_CASE("mesh is conforming: every edge shared by exactly two triangles") {
  const TorusMesh mesh = build_uniform(5);
  std::map<std::pair<int, int>, int> edge_count;
  for (const Triangle& t : mesh.triangles()) {
    for (int e = 0; e < 3; ++e) {
      int a = t.v[static_cast<size_t>(e)], b = t.v[static_cast<size_t>((e + 1) % 3)];
      if (a > b) std::swap(a, b);
      edge_count[{a, b}] += 1;
    }
  }
  for (const auto& [edge, cnt] : edge_count) CHECK(cnt == 2);
}

TEST_CASE("invalid meshes are rejected") {
  CHECK_THROWS_AS(build_uniform(3), error);
  CHECK_THROWS_AS(build_uniform(0), error);
  const TorusMesh mesh = build_uniform(4);
  CHECK_THROWS_AS(mesh.stencil(-1), error);
  CHECK_THROWS_AS(mesh.stencil(16), error);
}
