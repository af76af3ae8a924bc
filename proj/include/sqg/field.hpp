#ifndef SQG_FIELD_HPP
#define SQG_FIELD_HPP

#include <cmath>
#include <vector>

#include "sqg/mesh.hpp"

namespace sqg {

/// Nodal coefficient vector of a P1 function on the torus mesh.
struct ScalarField {
  const TorusMesh* mesh = nullptr;
  std::vector<double> coeffs;

  ScalarField() = default;
  explicit ScalarField(const TorusMesh& m)
      : mesh(&m), coeffs(static_cast<size_t>(m.n_vertices()), 0.0) {}
  ScalarField(const TorusMesh& m, std::vector<double> c)
      : mesh(&m), coeffs(std::move(c)) {
    if (static_cast<int>(coeffs.size()) != m.n_vertices())
      throw error("ScalarField: coefficient count != vertex count");
  }

  int size() const { return static_cast<int>(coeffs.size()); }
  double& operator[](int i) { return coeffs[static_cast<size_t>(i)]; }
  double operator[](int i) const { return coeffs[static_cast<size_t>(i)]; }
};

/// Componentwise nodal vector field (u1, u2).
struct VectorField2 {
  const TorusMesh* mesh = nullptr;
  std::vector<double> u1, u2;

  VectorField2() = default;
  explicit VectorField2(const TorusMesh& m)
      : mesh(&m),
        u1(static_cast<size_t>(m.n_vertices()), 0.0),
        u2(static_cast<size_t>(m.n_vertices()), 0.0) {}
};

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Lumped-mass mean integral sum_i m_i v_i (= the exact integral of the P1
/// function, since int phi_i = m_i).
inline double lumped_integral(const std::vector<double>& lumped,
                              const std::vector<double>& v) {
  double s = 0.0;
  for (size_t i = 0; i < v.size(); ++i) s += lumped[i] * v[i];
  return s;
}

/// Shifts v by a constant so that sum_i m_i v_i = 0.
inline void project_zero_mean(const std::vector<double>& lumped,
                              std::vector<double>& v) {
  const double shift = lumped_integral(lumped, v) / torus_area;
  for (double& x : v) x -= shift;
}

/// Zero-mean test used by operator preconditions:
/// |sum m_i v_i| <= 1e-12 * ||v||_inf * 4pi^2.
inline bool is_zero_mean(const std::vector<double>& lumped,
                         const std::vector<double>& v, double factor = 1e-12) {
  return std::abs(lumped_integral(lumped, v)) <= factor * max_abs(v) * torus_area;
}

}  // namespace sqg

#endif  // SQG_FIELD_HPP
