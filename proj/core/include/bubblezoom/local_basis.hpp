#pragma once

#include <array>

#include "bubblezoom/types.hpp"

namespace bz::local {

// Twelve functions live on every element of a bubble-enriched mesh:
//   0..3   bilinear nodal functions, vertices counterclockwise from (0,0)
//   4..7   element bubbles, bubble 4+k driven by nodal function k
//   8..11  patch bubbles restricted to this element, one per side
//          (bottom, right, top, left)
inline constexpr int kNodal = 0;
inline constexpr int kBubble = 4;
inline constexpr int kPatch = 8;
inline constexpr int kCount = 12;

inline constexpr std::array<Point, 4> kVertices{{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}};
inline constexpr std::array<Point, 4> kSideMidpoints{{{0.5, 0.0}, {1.0, 0.5}, {0.5, 1.0}, {0.0, 0.5}}};

/// Bilinear nodal function k on the unit square.
inline double nodal(int k, double xi, double eta) {
  const double sx = k == 1 || k == 2 ? xi : 1.0 - xi;
  const double sy = k >= 2 ? eta : 1.0 - eta;
  return sx * sy;
}

inline Vec2 nodal_gradient(int k, double xi, double eta) {
  const double sx = k == 1 || k == 2 ? xi : 1.0 - xi;
  const double sy = k >= 2 ? eta : 1.0 - eta;
  const double dx = k == 1 || k == 2 ? 1.0 : -1.0;
  const double dy = k >= 2 ? 1.0 : -1.0;
  return {dx * sy, sx * dy};
}

}  // namespace bz::local
