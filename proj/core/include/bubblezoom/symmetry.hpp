#pragma once

#include <array>
#include <utility>

#include "bubblezoom/types.hpp"

namespace bz {

/// One of the eight isometries of the unit square, acting about its center.
/// A bubble table computed for velocity a serves velocity R a after
/// relabelling the local functions: table_Ra[pi(i)][pi(j)] = table_a[i][j].
class SquareSymmetry {
 public:
  constexpr SquareSymmetry() = default;

  static const std::array<SquareSymmetry, 8>& all();

  Vec2 apply_vector(Vec2 v) const { return {r_[0] * v.x + r_[1] * v.y, r_[2] * v.x + r_[3] * v.y}; }
  Vec2 apply_point(Point p) const;
  Point inverse_point(Point p) const { return inverse().apply_point(p); }
  SquareSymmetry inverse() const;
  SquareSymmetry compose(const SquareSymmetry& inner) const;  // this after inner

  /// Permutation of the twelve local functions.
  int map_local(int k) const { return perm_[k]; }
  /// Lattice node (a, b) of an m x m lattice on the unit square.
  std::pair<int, int> map_lattice(int a, int b, int m) const;

  bool is_identity() const { return r_ == std::array<int, 4>{1, 0, 0, 1}; }
  bool operator==(const SquareSymmetry& o) const { return r_ == o.r_; }

 private:
  explicit SquareSymmetry(std::array<int, 4> r);
  std::array<int, 4> r_{1, 0, 0, 1};  // row-major 2x2
  std::array<int, 12> perm_{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
};

/// Returns (g, canonical) with a == g.apply_vector(canonical) exactly and
/// canonical.x >= canonical.y >= 0.
std::pair<SquareSymmetry, Vec2> canonicalize_velocity(Vec2 a);

}  // namespace bz
