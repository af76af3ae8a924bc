#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "sqg/assembly.hpp"
#include "sqg/linsolve.hpp"

using namespace sqg;

namespace {

Eigen::MatrixXd to_dense(const SparseOperator& A) {
  const auto& pat = A.pattern();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(pat.n, pat.n);
  for (int i = 0; i < pat.n; ++i)
    for (int k = pat.row_ptr[static_cast<size_t>(i)]; k < pat.row_ptr[static_cast<size_t>(i) + 1]; ++k)
      D(i, pat.col[static_cast<size_t>(k)]) = A.values()[static_cast<size_t>(k)];
  return D;
}

}  // namespace

TEST_CASE("diagonal system solves in one iteration") {
  const TorusMesh mesh = build_uniform(8);
  const FemOperators ops = FemOperators::build(mesh);
  SparseOperator A(ops.pattern);
  for (int i = 0; i < mesh.n_vertices(); ++i)
    A.at(i, i) = ops.lumped[static_cast<size_t>(i)];
  ScalarField b(mesh);
  for (int i = 0; i < b.size(); ++i) b[i] = std::sin(0.1 * i) + 2.0;
  auto [x, rep] = solve_spd(A, b, 1e-12, 100);
  CHECK(rep.converged);
  CHECK(rep.iterations <= 1);
  for (int i = 0; i < b.size(); ++i)
    CHECK(x[i] == doctest::Approx(b[i] / ops.lumped[static_cast<size_t>(i)]).epsilon(1e-13));
}

TEST_CASE("shifted system matches a dense factorization oracle") {
  const TorusMesh mesh = build_uniform(16);
  const FemOperators ops = FemOperators::build(mesh);
  const int n = mesh.n_vertices();

  SparseOperator A(ops.pattern);
  for (size_t k = 0; k < ops.pattern->col.size(); ++k)
    A.values()[k] = ops.mass.values()[k] + ops.stiffness.values()[k];

  ScalarField f(mesh);
  for (int i = 0; i < n; ++i) {
    const Vec2 p = mesh.vertex(i);
    f[i] = std::sin(p.y) * std::cos(p.x);
  }
  ScalarField b = apply(ops.mass, f);

  auto [x, rep] = solve_spd(A, b, 1e-12, 2000);
  CHECK(rep.converged);
  CHECK(rep.final_residual <= 1e-12);

  const Eigen::MatrixXd Ad = to_dense(A);
  Eigen::Map<const Eigen::VectorXd> bv(b.coeffs.data(), n);
  const Eigen::VectorXd xd = Ad.ldlt().solve(bv);
  double diff = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i) {
    diff += (x[i] - xd(i)) * (x[i] - xd(i));
    scale += xd(i) * xd(i);
  }
  CHECK(std::sqrt(diff / scale) <= 1e-10);
}

TEST_CASE("semi-definite Poisson solve reproduces the eigenmode") {
  double prev = 0.0;
  for (int n_side : {16, 32}) {
    const TorusMesh mesh = build_uniform(n_side);
    const FemOperators ops = FemOperators::build(mesh);
    ScalarField f(mesh);
    for (int i = 0; i < f.size(); ++i) f[i] = std::sin(mesh.vertex(i).x);
    project_zero_mean(ops.lumped, f.coeffs);
    ScalarField b = apply(ops.mass, f);
    auto [x, rep] = solve_spd(ops.stiffness, b, 1e-12, 5000, true, &ops.lumped);
    CHECK(rep.converged);
    // -lap sin x1 = sin x1, so the solution approximates the input
    double diff = 0.0, scale = 0.0;
    for (int i = 0; i < f.size(); ++i) {
      diff += (x[i] - f[i]) * (x[i] - f[i]);
      scale += f[i] * f[i];
    }
    const double rel = std::sqrt(diff / scale);
    CHECK(rel <= 0.05);
    if (prev > 0.0) CHECK(rel <= 0.35 * prev);  // ~ O(h^2)
    CHECK(std::abs(lumped_integral(ops.lumped, x.coeffs)) <=
          1e-10 * max_abs(x.coeffs) * torus_area);
    prev = rel;
  }
}

TEST_CASE("failure modes: non-finite input and iteration cap") {
  const TorusMesh mesh = build_uniform(8);
  const FemOperators ops = FemOperators::build(mesh);
  SparseOperator A(ops.pattern);
  for (size_t k = 0; k < ops.pattern->col.size(); ++k)
    A.values()[k] = ops.mass.values()[k] + ops.stiffness.values()[k];

  ScalarField bad(mesh);
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(solve_spd(A, bad, 1e-10, 100), error);

  ScalarField b(mesh);
  for (int i = 0; i < b.size(); ++i) b[i] = std::cos(0.3 * i);
  auto [x, rep] = solve_spd(A, b, 1e-14, 2);
  CHECK_FALSE(rep.converged);
  CHECK(rep.iterations == 2);
  CHECK(rep.final_residual > 1e-14);
}

TEST_CASE("zero right-hand side short-circuits") {
  const TorusMesh mesh = build_uniform(8);
  const FemOperators ops = FemOperators::build(mesh);
  ScalarField b(mesh);
  auto [x, rep] = solve_spd(ops.stiffness, b, 1e-12, 100, true, &ops.lumped);
  CHECK(rep.converged);
  CHECK(rep.iterations == 0);
  for (int i = 0; i < b.size(); ++i) CHECK(x[i] == 0.0);
}

TEST_CASE("determinism: identical inputs give identical iterates") {
  const TorusMesh mesh = build_uniform(12);
  const FemOperators ops = FemOperators::build(mesh);
  SparseOperator A(ops.pattern);
  for (size_t k = 0; k < ops.pattern->col.size(); ++k)
    A.values()[k] = ops.mass.values()[k] + 0.37 * ops.stiffness.values()[k];
  ScalarField b(mesh);
  for (int i = 0; i < b.size(); ++i) b[i] = std::sin(1.7 * i) * 0.3;
  auto r1 = solve_spd(A, b, 1e-11, 500);
  auto r2 = solve_spd(A, b, 1e-11, 500);
  CHECK(r1.second.iterations == r2.second.iterations);
  for (int i = 0; i < b.size(); ++i) CHECK(r1.first[i] == r2.first[i]);
}
