#pragma once

#include <cmath>
#include <cstddef>

#include "slosh/analytic.hpp"
#include "slosh/eigensolve.hpp"
#include "slosh/geometry.hpp"

namespace slosh::testing {

/// Index of the mode whose xi best matches J_0(z01 r / a) in the M_F inner
/// product, and that overlap (|cos| of the angle, in [0, 1]).
struct ModeMatch {
  std::size_t index = 0;
  double overlap = 0.0;
};

inline ModeMatch match_axisymmetric(const Spectrum& spectrum, const OperatorSet& ops, const SurfaceMesh& surface,
                                    double radius) {
  const double z01 = analytic::bessel_jp_root(0, 1);
  VectorXd profile(surface.node_count());
  for (int i = 0; i < profile.size(); ++i) profile[i] = analytic::bessel_j(0, z01 * surface.nodes[i].norm() / radius);
  profile.array() -= ops.surface_weights().dot(profile) / ops.surface_area();
  const auto& m = ops.surface_mass();
  const double pn = std::sqrt(profile.dot(m * profile));
  ModeMatch best;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const VectorXd& xi = spectrum.modes[i].xi;
    const double o = std::abs(xi.dot(m * profile)) / (pn * std::sqrt(xi.dot(m * xi)));
    if (o > best.overlap) best = {i, o};
  }
  return best;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace slosh::testing
