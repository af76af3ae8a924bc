#ifndef SQG_ASSEMBLY_HPP
#define SQG_ASSEMBLY_HPP

#include <utility>

#include "sqg/field.hpp"
#include "sqg/sparse.hpp"

namespace sqg {

/// Constant P1 gradients of the barycentric basis on the two reference
/// triangle shapes (lower / upper), scaled by 1/h. grad lambda_c =
/// ref_grad(kind, c) / h.
inline Vec2 ref_grad(bool upper, int corner) {
  // lower: (0,0),(h,0),(h,h); upper: (0,0),(h,h),(0,h)
  static constexpr double gl[3][2] = {{-1.0, 0.0}, {1.0, -1.0}, {0.0, 1.0}};
  static constexpr double gu[3][2] = {{0.0, -1.0}, {1.0, 0.0}, {-1.0, 1.0}};
  const double* g = upper ? gu[corner] : gl[corner];
  return {g[0], g[1]};
}

struct MassMatrices {
  SparseOperator consistent;
  std::vector<double> lumped;  // m_i = row sums = int phi_i
};

/// m_ij = int phi_j phi_i by the closed-form P1 element mass
/// |K|/12 * (1 + delta_ab); lumped m_i are the exact row sums.
MassMatrices assemble_mass(const TorusMesh& mesh,
                           std::shared_ptr<const StencilPattern> pat = nullptr);

/// int grad phi_j . grad phi_i; symmetric positive semi-definite with the
/// constants as kernel.
SparseOperator assemble_stiffness(const TorusMesh& mesh,
                                  std::shared_ptr<const StencilPattern> pat = nullptr);

/// Components of c_ij = int grad(phi_j) phi_i. Skew-symmetric with zero
/// column sums; the (j,i) entry is stored as the exact negation of (i,j) so
/// the discrete conservation identities hold to the last bit.
std::pair<SparseOperator, SparseOperator> assemble_cij(
    const TorusMesh& mesh, std::shared_ptr<const StencilPattern> pat = nullptr);

/// All operators a run needs, assembled once per mesh.
struct FemOperators {
  const TorusMesh* mesh = nullptr;
  std::shared_ptr<const StencilPattern> pattern;
  SparseOperator mass;          // consistent
  std::vector<double> lumped;   // m_i
  SparseOperator stiffness;
  SparseOperator c1, c2;
  // translation-invariant forms for the solver/flux kernels
  UniformStencil mass_st, stiffness_st, c1_st, c2_st;
  // value index of the transposed entry, per pattern entry
  std::vector<int> trans;

  static FemOperators build(const TorusMesh& mesh);
};

/// Matrix-vector product through the spec'd SparseOperator surface.
ScalarField apply(const SparseOperator& op, const ScalarField& f);

}  // namespace sqg

#endif  // SQG_ASSEMBLY_HPP
