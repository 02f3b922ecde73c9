#pragma once

#include <functional>

#include "bubblezoom/types.hpp"

namespace bz {

struct ExactSolution {
  std::function<double(Point)> value;
  std::function<Vec2(Point)> gradient;
};

// Manufactured solution with boundary layers at x=1 and y=1 for the
// operator -eps Lap u + u_x + u_y:
//   u = 2 sin(x) (1 - exp(-(1-x)/eps)) y^2 (1 - exp(-(1-y)/eps)).
double ex2_exact_value(double eps, Point p);
Vec2 ex2_exact_gradient(double eps, Point p);
/// f = -eps Lap u + u_x + u_y, simplified so the O(1/eps) terms cancel
/// analytically.
double ex2_source(double eps, Point p);
ExactSolution ex2_exact(double eps);

/// Peak position of the pyramid transported by the clockwise rotation
/// a = (y - 1/2, 1/2 - x) with eps = 0, starting at (0.25, 0.75).
Point rotation_peak_oracle(double t);

}  // namespace bz
