#include "bubblezoom/symmetry.hpp"

#include <cmath>

#include "bubblezoom/local_basis.hpp"

namespace bz {

namespace {

int nearest(const std::array<Point, 4>& pts, Point p) {
  for (int k = 0; k < 4; ++k)
    if (std::abs(pts[k].x - p.x) < 1e-12 && std::abs(pts[k].y - p.y) < 1e-12) return k;
  throw Error("square symmetry maps a reference point off the reference set");
}

}  // namespace

SquareSymmetry::SquareSymmetry(std::array<int, 4> r) : r_(r) {
  for (int k = 0; k < 4; ++k) {
    const int v = nearest(local::kVertices, apply_point(local::kVertices[k]));
    perm_[local::kNodal + k] = local::kNodal + v;
    perm_[local::kBubble + k] = local::kBubble + v;
    perm_[local::kPatch + k] = local::kPatch + nearest(local::kSideMidpoints, apply_point(local::kSideMidpoints[k]));
  }
}

const std::array<SquareSymmetry, 8>& SquareSymmetry::all() {
  static const std::array<SquareSymmetry, 8> group{
      SquareSymmetry({1, 0, 0, 1}),   SquareSymmetry({0, -1, 1, 0}),  SquareSymmetry({-1, 0, 0, -1}),
      SquareSymmetry({0, 1, -1, 0}),  SquareSymmetry({-1, 0, 0, 1}),  SquareSymmetry({1, 0, 0, -1}),
      SquareSymmetry({0, 1, 1, 0}),   SquareSymmetry({0, -1, -1, 0})};
  return group;
}

Vec2 SquareSymmetry::apply_point(Point p) const {
  const Vec2 d = apply_vector({p.x - 0.5, p.y - 0.5});
  return {d.x + 0.5, d.y + 0.5};
}

SquareSymmetry SquareSymmetry::inverse() const {
  // Orthogonal: inverse is the transpose.
  return SquareSymmetry({r_[0], r_[2], r_[1], r_[3]});
}

SquareSymmetry SquareSymmetry::compose(const SquareSymmetry& inner) const {
  const auto& a = r_;
  const auto& b = inner.r_;
  return SquareSymmetry({a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
                         a[2] * b[1] + a[3] * b[3]});
}

std::pair<int, int> SquareSymmetry::map_lattice(int a, int b, int m) const {
  // Work in doubled coordinates centred on the lattice midpoint.
  const int x = 2 * a - m, y = 2 * b - m;
  const int u = r_[0] * x + r_[1] * y;
  const int v = r_[2] * x + r_[3] * y;
  return {(u + m) / 2, (v + m) / 2};
}

std::pair<SquareSymmetry, Vec2> canonicalize_velocity(Vec2 a) {
  for (const auto& g : SquareSymmetry::all()) {
    const Vec2 c = g.inverse().apply_vector(a);
    if (c.x >= c.y && c.y >= 0.0) return {g, c};
  }
  throw Error("velocity canonicalization failed (NaN velocity?)");
}

}  // namespace bz
