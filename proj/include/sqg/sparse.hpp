#ifndef SQG_SPARSE_HPP
#define SQG_SPARSE_HPP

#include <array>
#include <memory>
#include <vector>

#include "sqg/mesh.hpp"

namespace sqg {

/// Shared compressed-row sparsity graph over mesh vertices. Column indices
/// are sorted ascending inside each row; the pattern equals the stencil
/// graph {(i,j) : j in I(i)}.
struct StencilPattern {
  int n = 0;       // number of rows (= vertices)
  int n_side = 0;  // lattice extent, kept for the uniform fast path
  std::vector<int> row_ptr;
  std::vector<int> col;

  static std::shared_ptr<const StencilPattern> build(const TorusMesh& mesh);
};

/// Offset classes of the 7-point stencil, used wherever a per-row entry has
/// to be matched to its lattice offset.
enum StencilClass : int { SC_C = 0, SC_E, SC_W, SC_N, SC_S, SC_NE, SC_SW };

/// Translation-invariant 7-point periodic stencil: one weight per offset
/// class. All operators assembled on the uniform mesh have this form; the
/// solvers use it as the fast matrix-vector kernel.
struct UniformStencil {
  int n_side = 0;
  std::array<double, 7> w{};  // indexed by StencilClass

  void apply(const double* x, double* y) const;
  /// y = (a*this + b*other) x, fused in one sweep.
  static UniformStencil combine(const UniformStencil& A, double a,
                                const UniformStencil& B, double b);
};

/// Symmetric-pattern sparse matrix in compressed-row layout over mesh
/// vertices. Values are stored per (row, sorted column).
class SparseOperator {
 public:
  SparseOperator() = default;
  explicit SparseOperator(std::shared_ptr<const StencilPattern> pat)
      : pat_(std::move(pat)), val_(pat_ ? pat_->col.size() : 0, 0.0) {}

  int rows() const { return pat_ ? pat_->n : 0; }
  const StencilPattern& pattern() const { return *pat_; }
  const std::shared_ptr<const StencilPattern>& pattern_ptr() const { return pat_; }

  double* values() { return val_.data(); }
  const double* values() const { return val_.data(); }

  /// Entry accessor by (row, column id); throws if (i,j) is outside the
  /// pattern.
  double& at(int i, int j);
  double at(int i, int j) const;
  /// Returns the value index of (i,j) or -1.
  int find(int i, int j) const;

  /// y = A x with a fixed (row-major, column-ascending) summation order.
  void apply(const double* x, double* y) const;
  std::vector<double> apply(const std::vector<double>& x) const;

  std::vector<double> row_sums() const;
  std::vector<double> diagonal() const;

  /// Extracts the translation-invariant stencil; throws if any row deviates
  /// from the offset-class weights of row 0 by more than `tol`.
  UniformStencil to_stencil(double tol = 0.0) const;

 private:
  std::shared_ptr<const StencilPattern> pat_;
  std::vector<double> val_;
};

/// Maps each (row, entry) of the pattern to its StencilClass; used to
/// convert between CSR storage and offset-class weights.
std::vector<signed char> classify_entries(const StencilPattern& pat);

}  // namespace sqg

#endif  // SQG_SPARSE_HPP
