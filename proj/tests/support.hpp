#pragma once

#include <cmath>
#include <memory>

#include <bubblezoom/analysis.hpp>

namespace bz::test {

inline std::shared_ptr<const Grid> unit_mesh(int n) {
  return std::make_shared<const Grid>(Grid::build({0.0, 0.0}, {1.0, 1.0}, n, n));
}

inline bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

/// Backward travel time from x to the inflow boundary of the unit square
/// along a constant velocity a.
inline double travel_time(Vec2 a, Point x) {
  double s = INFINITY;
  if (a.x > 0) s = std::min(s, x.x / a.x);
  if (a.x < 0) s = std::min(s, (1.0 - x.x) / -a.x);
  if (a.y > 0) s = std::min(s, x.y / a.y);
  if (a.y < 0) s = std::min(s, (1.0 - x.y) / -a.y);
  return s;
}

/// Midpoint rule on an n x n grid of the unit square.
template <class F>
double integrate_unit_square(F&& f, int n) {
  double sum = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) sum += f(Point{(i + 0.5) / n, (j + 0.5) / n});
  return sum / (static_cast<double>(n) * n);
}

}  // namespace bz::test
