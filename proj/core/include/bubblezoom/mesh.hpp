#pragma once

#include <array>
#include <functional>
#include <string_view>
#include <vector>

#include "bubblezoom/types.hpp"

namespace bz {

enum class Scheme { galerkin, supg, rfb, bmz };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view name);

/// Sides of a square element, counterclockwise starting at the bottom.
enum class Side : int { bottom = 0, right = 1, top = 2, left = 3 };

/// Two-element patch orientation: horizontal pairs sit side by side (2h x h),
/// vertical pairs are stacked (h x 2h).
enum class PatchOrientation { horizontal, vertical };

struct Element {
  int i = 0;  // lattice column
  int j = 0;  // lattice row
  /// Vertex ids counterclockwise from the lower-left corner.
  std::array<int, 4> vertices{};
  /// Interior edge id per side (indexed by Side), -1 on the domain boundary.
  std::array<int, 4> edges{-1, -1, -1, -1};
};

/// An interior edge and the patch it induces. For horizontal patches
/// elements = {left, right}; for vertical patches elements = {bottom, top}.
struct Edge {
  PatchOrientation orientation = PatchOrientation::horizontal;
  std::array<int, 2> elements{};
};

struct Location {
  int element = -1;
  double xi = 0.0;   // local coordinate in [0,1]
  double eta = 0.0;  // local coordinate in [0,1]
};

/// Predicate on element centers; true keeps the element active.
using ElementMask = std::function<bool(Point)>;

/// Uniform square mesh of an axis-aligned rectangle with an optional
/// active-element mask. Vertices not touched by an active element are not
/// numbered. Immutable after construction.
class Grid {
 public:
  static Grid build(Point origin, Vec2 extent, int nx, int ny, const ElementMask& mask = {});

  Point origin() const { return origin_; }
  Vec2 extent() const { return extent_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double h() const { return h_; }

  int num_vertices() const { return static_cast<int>(vertex_points_.size()); }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  Point vertex(int v) const { return vertex_points_[v]; }
  const Element& element(int e) const { return elements_[e]; }
  const Edge& edge(int s) const { return edges_[s]; }
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool is_boundary_vertex(int v) const { return boundary_[v]; }
  const std::vector<int>& boundary_vertices() const { return boundary_list_; }

  /// Element id at lattice position (i, j), or -1 when inactive/outside.
  int element_at(int i, int j) const;
  /// Vertex id at lattice node (i, j), or -1 when not numbered.
  int vertex_at(int i, int j) const;

  Point element_origin(int e) const;
  Point element_center(int e) const;

  /// Element containing p and its local coordinates. Points on interior
  /// grid lines go to the element with the larger lattice index; throws
  /// InvalidArgument when p is outside the active region.
  Location locate(Point p) const;

 private:
  Point origin_{};
  Vec2 extent_{};
  int nx_ = 0;
  int ny_ = 0;
  double h_ = 0.0;
  std::vector<int> element_lattice_;  // (ny) x (nx) -> element id or -1
  std::vector<int> vertex_lattice_;   // (ny+1) x (nx+1) -> vertex id or -1
  std::vector<Point> vertex_points_;
  std::vector<Element> elements_;
  std::vector<Edge> edges_;
  std::vector<bool> boundary_;
  std::vector<int> boundary_list_;
};

/// Degree-of-freedom layout: vertices, then four bubbles per element, then
/// one patch bubble per interior edge.
struct DofMap {
  Scheme scheme = Scheme::galerkin;
  int num_vertex_dofs = 0;
  int num_element_bubble_dofs = 0;
  int num_patch_bubble_dofs = 0;

  int total() const { return num_vertex_dofs + num_element_bubble_dofs + num_patch_bubble_dofs; }
  bool has_element_bubbles() const { return num_element_bubble_dofs > 0; }
  bool has_patch_bubbles() const { return num_patch_bubble_dofs > 0; }

  int vertex_dof(int v) const { return v; }
  int element_bubble_dof(int e, int k) const { return num_vertex_dofs + 4 * e + k; }
  int patch_bubble_dof(int edge) const {
    return num_vertex_dofs + num_element_bubble_dofs + edge;
  }
};

DofMap dof_layout(const Grid& grid, Scheme scheme);

}  // namespace bz
