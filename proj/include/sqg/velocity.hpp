#ifndef SQG_VELOCITY_HPP
#define SQG_VELOCITY_HPP

#include "sqg/fractional.hpp"

namespace sqg {

enum class VelocityMode { SQG, QG };

/// Constant gradient of the P1 field on each triangle.
void element_gradients(const TorusMesh& mesh, const std::vector<double>& v,
                       std::vector<double>& gx, std::vector<double>& gy);

/// Stream function from the buoyancy: SQG solves (-Delta)^{1/2} Psi = Theta
/// through the sinc quadrature; QG solves -Delta Psi = Theta (zero-mean
/// Poisson). Theta must have zero lumped mean.
std::vector<double> stream_function(const FractionalOps& fops,
                                    const std::vector<double>& theta,
                                    VelocityMode mode,
                                    SincWorkspace* ws = nullptr,
                                    std::vector<double>* poisson_warm = nullptr);

/// Clement interpolant of grad^perp Psi: the element gradients are averaged
/// over each vertex patch with area weights (all |K| equal here), then
/// rotated, u = (-d2 Psi, d1 Psi).
VectorField2 clement_perp_velocity(const TorusMesh& mesh,
                                   const std::vector<double>& psi);

/// Same patch average for |grad v| at the vertices (shared with the
/// Schlieren diagnostic).
std::vector<double> nodal_gradient_magnitude(const TorusMesh& mesh,
                                             const std::vector<double>& v);

}  // namespace sqg

#endif  // SQG_VELOCITY_HPP
