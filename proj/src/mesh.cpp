#include "sqg/mesh.hpp"

#include <algorithm>

namespace sqg {

TorusMesh::TorusMesh(int n_side) : n_side_(n_side), h_(torus_side / n_side) {
  if (n_side < 4) throw error("TorusMesh: n_side must be >= 4");
  const int n = n_side_;
  const int nv = n * n;

  vertices_.resize(static_cast<size_t>(nv));
  for (int i2 = 0; i2 < n; ++i2)
    for (int i1 = 0; i1 < n; ++i1)
      vertices_[static_cast<size_t>(i2) * n + i1] = {i1 * h_, i2 * h_};

  // Two triangles per cell: lower {(i1,i2),(i1+1,i2),(i1+1,i2+1)} then
  // upper {(i1,i2),(i1+1,i2+1),(i1,i2+1)}.
  triangles_.reserve(static_cast<size_t>(2 * nv));
  for (int i2 = 0; i2 < n; ++i2) {
    for (int i1 = 0; i1 < n; ++i1) {
      Triangle lo;
      lo.v = {vertex_id(i1, i2), vertex_id(i1 + 1, i2), vertex_id(i1 + 1, i2 + 1)};
      lo.cell_i1 = i1; lo.cell_i2 = i2; lo.upper = false;
      triangles_.push_back(lo);
      Triangle up;
      up.v = {vertex_id(i1, i2), vertex_id(i1 + 1, i2 + 1), vertex_id(i1, i2 + 1)};
      up.cell_i1 = i1; up.cell_i2 = i2; up.upper = true;
      triangles_.push_back(up);
    }
  }

  // Stencil I(i) = {self, E, W, N, S, NE, SW} under the periodic wrap.
  stencil_.resize(static_cast<size_t>(nv) * 7);
  for (int i2 = 0; i2 < n; ++i2) {
    for (int i1 = 0; i1 < n; ++i1) {
      const int id = i2 * n + i1;
      std::array<int, 7> s = {
          id,
          vertex_id(i1 + 1, i2), vertex_id(i1 - 1, i2),
          vertex_id(i1, i2 + 1), vertex_id(i1, i2 - 1),
          vertex_id(i1 + 1, i2 + 1), vertex_id(i1 - 1, i2 - 1)};
      std::sort(s.begin(), s.end());
      std::copy(s.begin(), s.end(), stencil_.begin() + static_cast<size_t>(id) * 7);
    }
  }

  // Incident triangles in ascending triangle index, enumerated from the
  // explicit triangle list.
  incident_.assign(static_cast<size_t>(nv), {});
  std::vector<int> count(static_cast<size_t>(nv), 0);
  for (int t = 0; t < static_cast<int>(triangles_.size()); ++t) {
    for (int c = 0; c < 3; ++c) {
      const int vid = triangles_[static_cast<size_t>(t)].v[static_cast<size_t>(c)];
      incident_[static_cast<size_t>(vid)][static_cast<size_t>(count[static_cast<size_t>(vid)]++)] =
          {t, c};
    }
  }
  for (int i = 0; i < nv; ++i)
    if (count[static_cast<size_t>(i)] != 6)
      throw error("TorusMesh: vertex without exactly 6 incident triangles");
}

std::vector<int> TorusMesh::stencil(int i) const {
  if (i < 0 || i >= n_vertices()) throw error("stencil: vertex index out of range");
  return std::vector<int>(stencil_begin(i), stencil_begin(i) + 7);
}

TorusMesh build_uniform(int n_side) { return TorusMesh(n_side); }

}  // namespace sqg
