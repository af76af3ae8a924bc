#ifndef SQG_FRACTIONAL_HPP
#define SQG_FRACTIONAL_HPP

#include <memory>
#include <vector>

#include "sqg/assembly.hpp"
#include "sqg/linsolve.hpp"

namespace sqg {

/// Sinc quadrature nodes y_l = l*k, l = -M..M, for the Dunford-Taylor
/// representations of fractional powers of the Laplacian.
struct SincQuadrature {
  double k = 0.8;
  int M = 12;

  SincQuadrature() = default;
  SincQuadrature(double k_, int M_) : k(k_), M(M_) {
    if (!(k > 0.0) || M < 1) throw error("SincQuadrature: need k > 0, M >= 1");
  }
  int count() const { return 2 * M + 1; }
  double node(int idx) const { return (idx - M) * k; }  // idx = 0..2M

  /// The finer parameter set used to study the L^inf degradation.
  static SincQuadrature fine() { return {0.2, 62}; }
};

/// Fractional exponent in (0,1); the physical SQG case is s = 1/2.
struct FracPower {
  double s = 0.5;
  FracPower() = default;
  explicit FracPower(double s_) : s(s_) {
    if (!(s > 0.0 && s < 1.0)) throw error("FracPower: s must lie in (0,1)");
  }
};

/// Warm-start slots for the per-node auxiliary solves. Callers that apply
/// the same operator to slowly varying data keep one workspace per call
/// site so consecutive solves start from the previous solution.
struct SincWorkspace {
  std::vector<std::vector<double>> slot;
};

struct SincOptions {
  double tol = 1e-10;  // relative residual of each auxiliary solve
  int max_iter = 0;    // 0 -> 50 * n_side
  int threads = 1;     // parallelism across quadrature nodes
  // Append the closed-form geometric sums of the truncated node tails
  // (no extra solves). Off reproduces the raw truncated quadrature.
  bool tail_completion = true;
};

/// Sinc-quadrature realizations of fractional operator applications on a
/// fixed mesh. Precomputes the shifted stencils (M + e^{-y_l} K) once.
class FractionalOps {
 public:
  FractionalOps(const FemOperators& ops, SincQuadrature q, SincOptions opt = {});

  const SincQuadrature& quadrature() const { return q_; }
  SincOptions& options() { return opt_; }
  const SincOptions& options() const { return opt_; }
  const FemOperators& fem() const { return *ops_; }

  /// (-Delta)^{-s} f: for each node solve (e^{y_l} M + K) W = M f (in the
  /// overflow-free scaled form) and accumulate (k/pi) sum e^{(1-s) y_l} W.
  /// f must have zero lumped mean; the result is projected back to zero
  /// lumped mean to guard accumulated round-off.
  std::vector<double> inv_frac_apply(const std::vector<double>& f, FracPower s,
                                     SincWorkspace* ws = nullptr) const;

  /// Vector G with A_{h,k}(V, W) = dot(W, G) for every W: the auxiliary
  /// solves are done once per V and reused against all test functions.
  std::vector<double> frac_action_vector(const std::vector<double>& V, FracPower s,
                                         SincWorkspace* ws = nullptr) const;

  /// A_{h,k}(V, W) = 2 sin(pi s)/pi * k * sum_l e^{s y_l} int (V + Vt_l) W.
  double frac_action_bilinear(const std::vector<double>& V,
                              const std::vector<double>& W, FracPower s,
                              SincWorkspace* ws = nullptr) const;

  /// Mass-lumped nodal actions A_i(Theta) of (-Delta)^s; satisfies
  /// sum_i m_i A_i = 0, the property that keeps the scheme conservative.
  std::vector<double> lumped_frac_action(const std::vector<double>& theta,
                                         FracPower s,
                                         SincWorkspace* ws = nullptr) const;

 private:
  const FemOperators* ops_;
  SincQuadrature q_;
  SincOptions opt_;
  std::vector<UniformStencil> shifted_consistent_;  // normalized M / K shifts
  std::vector<UniformStencil> shifted_lumped_;
  std::vector<double> rhs_scale_;

  void solve_all(const std::vector<double>& rhs, bool lumped,
                 SincWorkspace* ws, std::vector<std::vector<double>>& out) const;
};

/// Dense spectral realization of (-Delta)^r, -1 <= r <= 1, through the
/// generalized eigendecomposition of (stiffness, mass). Test oracle for the
/// sinc-quadrature operators; refuses meshes beyond n_side = 32. When
/// `lumped_pencil` is set the lumped mass replaces the consistent one,
/// matching the discrete operator behind the lumped nodal action.
std::vector<double> spectral_oracle_frac(const FemOperators& ops,
                                         const std::vector<double>& f,
                                         double r_signed,
                                         bool lumped_pencil = false);

}  // namespace sqg

#endif  // SQG_FRACTIONAL_HPP
