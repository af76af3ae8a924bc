#ifndef SQG_LINSOLVE_HPP
#define SQG_LINSOLVE_HPP

#include <functional>
#include <vector>

#include "sqg/field.hpp"
#include "sqg/sparse.hpp"

namespace sqg {

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;  // relative l2, ||Ax-b|| / ||b||
  bool converged = false;
};

/// Abstract SPD operator fed to the solver: a matrix-vector product plus
/// the diagonal for the Jacobi preconditioner.
struct LinOp {
  virtual ~LinOp() = default;
  virtual int size() const = 0;
  virtual void apply(const double* x, double* y) const = 0;
  virtual const std::vector<double>& diag() const = 0;
};

struct CsrLinOp final : LinOp {
  const SparseOperator* A;
  std::vector<double> d;
  explicit CsrLinOp(const SparseOperator& a) : A(&a), d(a.diagonal()) {}
  int size() const override { return A->rows(); }
  void apply(const double* x, double* y) const override { A->apply(x, y); }
  const std::vector<double>& diag() const override { return d; }
};

struct StencilLinOp final : LinOp {
  UniformStencil st;
  std::vector<double> d;
  explicit StencilLinOp(UniformStencil s)
      : st(s), d(static_cast<size_t>(s.n_side) * s.n_side, s.w[SC_C]) {}
  int size() const override { return st.n_side * st.n_side; }
  void apply(const double* x, double* y) const override { st.apply(x, y); }
  const std::vector<double>& diag() const override { return d; }
};

struct SolveOptions {
  double tol = 1e-10;     // relative l2 residual
  int max_iter = 0;       // 0 -> 10 * n_side
  bool semi_definite = false;  // kernel = constants; project mean drift
  const std::vector<double>* lumped = nullptr;  // for the final mean projection
  bool warm_start = false;     // use incoming x as initial guess
};

/// Jacobi-preconditioned conjugate gradients for SPD (or, with
/// semi_definite, positive semi-definite with constant kernel) systems.
/// On exit x holds the iterate; the report says whether the true relative
/// residual met tol. Semi-definite solves require b with zero entry sum
/// (equivalently a zero-lumped-mean right-hand side field) and return x
/// projected to zero lumped mean. Fixed reduction orders keep identical
/// inputs giving identical iterates.
SolveReport cg_solve(const LinOp& A, const double* b, std::vector<double>& x,
                     const SolveOptions& opts);

/// The spec'd surface: solve A x = b for a field right-hand side.
std::pair<ScalarField, SolveReport> solve_spd(const SparseOperator& A,
                                              const ScalarField& b, double tol,
                                              int max_iter,
                                              bool semi_definite = false,
                                              const std::vector<double>* lumped = nullptr);

}  // namespace sqg

#endif  // SQG_LINSOLVE_HPP
