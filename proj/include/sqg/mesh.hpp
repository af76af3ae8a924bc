#ifndef SQG_MESH_HPP
#define SQG_MESH_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sqg {

/// Error type for all invariant/precondition violations in this library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr double torus_side = 6.283185307179586476925286766559;  // 2*pi
constexpr double torus_area = torus_side * torus_side;           // 4*pi^2

struct Vec2 {
  double x = 0.0, y = 0.0;
};

/// A triangle of the uniform mesh. Every cell is split along the diagonal
/// from its lower-left to its upper-right corner, so each triangle is a
/// translate of one of two reference shapes:
///   lower: (0,0), (h,0), (h,h)      upper: (0,0), (h,h), (0,h)
/// both counter-clockwise with signed area +h^2/2. `cell` is the lattice
/// coordinate of the cell's lower-left corner.
struct Triangle {
  std::array<int, 3> v;   // global vertex ids, local corners as above
  int cell_i1 = 0, cell_i2 = 0;
  bool upper = false;
};

/// Uniform periodic triangulation of the square torus (0, 2pi)^2 with
/// n_side vertices per direction (periodically identified). Immutable
/// after construction.
class TorusMesh {
 public:
  explicit TorusMesh(int n_side);

  int n_side() const { return n_side_; }
  double h() const { return h_; }
  int n_vertices() const { return n_side_ * n_side_; }
  int n_triangles() const { return 2 * n_side_ * n_side_; }

  /// Row-major vertex id: id = i2*n_side + i1, indices taken mod n_side.
  int vertex_id(int i1, int i2) const {
    const int n = n_side_;
    i1 %= n; if (i1 < 0) i1 += n;
    i2 %= n; if (i2 < 0) i2 += n;
    return i2 * n + i1;
  }

  Vec2 vertex(int id) const { return vertices_[static_cast<size_t>(id)]; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }

  /// Index set I(i): the vertices whose basis functions overlap phi_i,
  /// including i itself. Sorted ascending. 7 members on this mesh.
  const int* stencil_begin(int i) const {
    return stencil_.data() + static_cast<size_t>(i) * 7;
  }
  static constexpr int stencil_size = 7;
  std::vector<int> stencil(int i) const;

  /// Triangles incident to vertex i, in ascending triangle-index order
  /// (6 on this mesh). Each entry carries the local corner of i.
  struct IncidentTri {
    int tri;
    int corner;  // 0..2
  };
  const std::array<IncidentTri, 6>& incident(int i) const {
    return incident_[static_cast<size_t>(i)];
  }

 private:
  int n_side_;
  double h_;
  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<int> stencil_;  // 7 per vertex, sorted
  std::vector<std::array<IncidentTri, 6>> incident_;
};

/// Builds the uniform mesh; n_side < 4 is rejected (stencil members would
/// coincide under the periodic wrap).
TorusMesh build_uniform(int n_side);

}  // namespace sqg

#endif  // SQG_MESH_HPP
