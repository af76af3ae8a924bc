#include "sqg/assembly.hpp"

namespace sqg {

namespace {

// Accumulates sum over triangles incident to row i of the pairwise element
// contribution eval(K, corner_of_i, corner_of_j). Rows are filled
// independently, incident triangles visited in ascending index order, so
// assembly is deterministic and repeated runs are bit-identical.
template <typename F>
void assemble_rows(const TorusMesh& mesh, const StencilPattern& pat,
                   SparseOperator& op, F&& eval) {
  for (int i = 0; i < pat.n; ++i) {
    for (const auto& inc : mesh.incident(i)) {
      const Triangle& tri = mesh.triangles()[static_cast<size_t>(inc.tri)];
      for (int c = 0; c < 3; ++c) {
        const int j = tri.v[static_cast<size_t>(c)];
        op.at(i, j) += eval(tri, inc.corner, c);
      }
    }
  }
}

}  // namespace

MassMatrices assemble_mass(const TorusMesh& mesh,
                           std::shared_ptr<const StencilPattern> pat) {
  if (!pat) pat = StencilPattern::build(mesh);
  MassMatrices out;
  out.consistent = SparseOperator(pat);
  const double area = mesh.h() * mesh.h() / 2.0;
  assemble_rows(mesh, *pat, out.consistent,
                [area](const Triangle&, int a, int b) {
                  return (a == b) ? area / 6.0 : area / 12.0;
                });
  out.lumped = out.consistent.row_sums();
  return out;
}

SparseOperator assemble_stiffness(const TorusMesh& mesh,
                                  std::shared_ptr<const StencilPattern> pat) {
  if (!pat) pat = StencilPattern::build(mesh);
  SparseOperator op(pat);
  // |K| grad_a . grad_b = (h^2/2) (ga/h).(gb/h) = ga.gb / 2: h-independent.
  assemble_rows(mesh, *pat, op, [](const Triangle& t, int a, int b) {
    const Vec2 ga = ref_grad(t.upper, a);
    const Vec2 gb = ref_grad(t.upper, b);
    return 0.5 * (ga.x * gb.x + ga.y * gb.y);
  });
  return op;
}

std::pair<SparseOperator, SparseOperator> assemble_cij(
    const TorusMesh& mesh, std::shared_ptr<const StencilPattern> pat) {
  if (!pat) pat = StencilPattern::build(mesh);
  SparseOperator c1(pat), c2(pat);
  // c^K_ab = grad(lambda_b) |K|/3 with grad lambda = ref_grad/h and
  // |K|/3 = h^2/6, so each contribution is ref_grad * h/6.
  const double w = mesh.h() / 6.0;
  assemble_rows(mesh, *pat, c1, [w](const Triangle& t, int, int b) {
    return w * ref_grad(t.upper, b).x;
  });
  assemble_rows(mesh, *pat, c2, [w](const Triangle& t, int, int b) {
    return w * ref_grad(t.upper, b).y;
  });
  // Enforce exact skew-symmetry: mirror the upper triangle with negation so
  // c_ji = -c_ij bit-exactly and column sums cancel against row sums.
  for (int i = 0; i < pat->n; ++i) {
    for (int k = pat->row_ptr[static_cast<size_t>(i)];
         k < pat->row_ptr[static_cast<size_t>(i) + 1]; ++k) {
      const int j = pat->col[static_cast<size_t>(k)];
      if (j > i) {
        c1.at(j, i) = -c1.values()[static_cast<size_t>(k)];
        c2.at(j, i) = -c2.values()[static_cast<size_t>(k)];
      } else if (j == i) {
        c1.values()[static_cast<size_t>(k)] = 0.0;
        c2.values()[static_cast<size_t>(k)] = 0.0;
      }
    }
  }
  return {std::move(c1), std::move(c2)};
}

FemOperators FemOperators::build(const TorusMesh& mesh) {
  FemOperators ops;
  ops.mesh = &mesh;
  ops.pattern = StencilPattern::build(mesh);
  auto mm = assemble_mass(mesh, ops.pattern);
  ops.mass = std::move(mm.consistent);
  ops.lumped = std::move(mm.lumped);
  ops.stiffness = assemble_stiffness(mesh, ops.pattern);
  auto c = assemble_cij(mesh, ops.pattern);
  ops.c1 = std::move(c.first);
  ops.c2 = std::move(c.second);
  ops.mass_st = ops.mass.to_stencil();
  ops.stiffness_st = ops.stiffness.to_stencil();
  ops.c1_st = ops.c1.to_stencil();
  ops.c2_st = ops.c2.to_stencil();
  const auto& pat = *ops.pattern;
  ops.trans.resize(pat.col.size());
  for (int i = 0; i < pat.n; ++i)
    for (int k = pat.row_ptr[static_cast<size_t>(i)]; k < pat.row_ptr[static_cast<size_t>(i) + 1]; ++k)
      ops.trans[static_cast<size_t>(k)] = ops.c1.find(pat.col[static_cast<size_t>(k)], i);
  return ops;
}

ScalarField apply(const SparseOperator& op, const ScalarField& f) {
  if (op.rows() != f.size()) throw error("apply: dimension mismatch");
  ScalarField out(*f.mesh);
  op.apply(f.coeffs.data(), out.coeffs.data());
  return out;
}

}  // namespace sqg
