#include "bubblezoom/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace bz {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::galerkin: return "galerkin";
    case Scheme::supg: return "supg";
    case Scheme::rfb: return "rfb";
    case Scheme::bmz: return "bmz";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "galerkin") return Scheme::galerkin;
  if (name == "supg") return Scheme::supg;
  if (name == "rfb") return Scheme::rfb;
  if (name == "bmz") return Scheme::bmz;
  throw InvalidArgument("unknown scheme '" + std::string(name) + "'");
}

Grid Grid::build(Point origin, Vec2 extent, int nx, int ny, const ElementMask& mask) {
  if (nx < 1 || ny < 1) throw InvalidArgument("grid needs at least one element per axis");
  if (!(extent.x > 0.0) || !(extent.y > 0.0)) throw InvalidArgument("grid extent must be positive");
  const double hx = extent.x / nx;
  const double hy = extent.y / ny;
  if (std::abs(hx - hy) > 1e-12 * std::max(hx, hy)) {
    std::ostringstream msg;
    msg << "non-square elements: h_x=" << hx << " h_y=" << hy;
    throw InvalidArgument(msg.str());
  }

  Grid g;
  g.origin_ = origin;
  g.extent_ = extent;
  g.nx_ = nx;
  g.ny_ = ny;
  g.h_ = hx;

  g.element_lattice_.assign(static_cast<size_t>(nx) * ny, -1);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Point c{origin.x + (i + 0.5) * g.h_, origin.y + (j + 0.5) * g.h_};
      if (mask && !mask(c)) continue;
      g.element_lattice_[static_cast<size_t>(j) * nx + i] = static_cast<int>(g.elements_.size());
      Element el;
      el.i = i;
      el.j = j;
      g.elements_.push_back(el);
    }
  }
  if (g.elements_.empty()) throw InvalidArgument("mask leaves no active element");

  // Number the vertices touched by active elements, row-major.
  g.vertex_lattice_.assign(static_cast<size_t>(nx + 1) * (ny + 1), -1);
  auto touched = [&](int i, int j) {
    for (int dj = -1; dj <= 0; ++dj)
      for (int di = -1; di <= 0; ++di)
        if (g.element_at(i + di, j + dj) >= 0) return true;
    return false;
  };
  auto fully_surrounded = [&](int i, int j) {
    for (int dj = -1; dj <= 0; ++dj)
      for (int di = -1; di <= 0; ++di)
        if (g.element_at(i + di, j + dj) < 0) return false;
    return true;
  };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      if (!touched(i, j)) continue;
      const int id = static_cast<int>(g.vertex_points_.size());
      g.vertex_lattice_[static_cast<size_t>(j) * (nx + 1) + i] = id;
      g.vertex_points_.push_back({origin.x + i * g.h_, origin.y + j * g.h_});
      const bool on_boundary = !fully_surrounded(i, j);
      g.boundary_.push_back(on_boundary);
      if (on_boundary) g.boundary_list_.push_back(id);
    }
  }

  for (auto& el : g.elements_) {
    el.vertices = {g.vertex_at(el.i, el.j), g.vertex_at(el.i + 1, el.j),
                   g.vertex_at(el.i + 1, el.j + 1), g.vertex_at(el.i, el.j + 1)};
  }

  // Interior edges: vertical edges (horizontal patches) first, then
  // horizontal edges (vertical patches), each in row-major order.
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const int a = g.element_at(i, j), b = g.element_at(i + 1, j);
      if (a < 0 || b < 0) continue;
      const int id = static_cast<int>(g.edges_.size());
      g.edges_.push_back({PatchOrientation::horizontal, {a, b}});
      g.elements_[a].edges[static_cast<int>(Side::right)] = id;
      g.elements_[b].edges[static_cast<int>(Side::left)] = id;
    }
  }
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = g.element_at(i, j), b = g.element_at(i, j + 1);
      if (a < 0 || b < 0) continue;
      const int id = static_cast<int>(g.edges_.size());
      g.edges_.push_back({PatchOrientation::vertical, {a, b}});
      g.elements_[a].edges[static_cast<int>(Side::top)] = id;
      g.elements_[b].edges[static_cast<int>(Side::bottom)] = id;
    }
  }

  // Connectivity through shared edges.
  std::vector<bool> seen(g.elements_.size(), false);
  std::queue<int> todo;
  todo.push(0);
  seen[0] = true;
  size_t reached = 1;
  while (!todo.empty()) {
    const int e = todo.front();
    todo.pop();
    for (int s : g.elements_[e].edges) {
      if (s < 0) continue;
      for (int n : g.edges_[s].elements) {
        if (!seen[n]) {
          seen[n] = true;
          ++reached;
          todo.push(n);
        }
      }
    }
  }
  if (reached != g.elements_.size()) throw InvalidArgument("active element set is disconnected");
  return g;
}

int Grid::element_at(int i, int j) const {
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return -1;
  return element_lattice_[static_cast<size_t>(j) * nx_ + i];
}

int Grid::vertex_at(int i, int j) const {
  if (i < 0 || j < 0 || i > nx_ || j > ny_) return -1;
  return vertex_lattice_[static_cast<size_t>(j) * (nx_ + 1) + i];
}

Point Grid::element_origin(int e) const {
  const auto& el = elements_[e];
  return {origin_.x + el.i * h_, origin_.y + el.j * h_};
}

Point Grid::element_center(int e) const {
  const auto& el = elements_[e];
  return {origin_.x + (el.i + 0.5) * h_, origin_.y + (el.j + 0.5) * h_};
}

namespace {

// Lattice cell index of a coordinate under the half-open rule, snapping
// values within round-off of a grid line onto that line.
int cell_index(double s, int n, double& local) {
  double k = std::floor(s);
  if (s - k > 1.0 - 1e-10) k += 1.0;
  int i = static_cast<int>(k);
  if (i == n) i = n - 1;  // global max boundary belongs to the last cell
  local = std::clamp(s - i, 0.0, 1.0);
  // snap roundoff so vertices and edges land exactly on the cell boundary
  if (local < 1e-10) local = 0.0;
  if (local > 1.0 - 1e-10) local = 1.0;
  return i;
}

}  // namespace

Location Grid::locate(Point p) const {
  const double sx = (p.x - origin_.x) / h_;
  const double sy = (p.y - origin_.y) / h_;
  const double tol = 1e-10;
  if (sx < -tol || sy < -tol || sx > nx_ + tol || sy > ny_ + tol) {
    throw InvalidArgument("point outside the grid");
  }
  double xi = 0.0, eta = 0.0;
  const int i = cell_index(std::max(sx, 0.0), nx_, xi);
  const int j = cell_index(std::max(sy, 0.0), ny_, eta);
  if (int e = element_at(i, j); e >= 0) return {e, xi, eta};

  // On a line bordering an inactive cell: fall back to an active neighbour
  // whose closure contains the point.
  const bool on_x_line = xi == 0.0;
  const bool on_y_line = eta == 0.0;
  for (int dj = 0; dj >= (on_y_line ? -1 : 0); --dj) {
    for (int di = 0; di >= (on_x_line ? -1 : 0); --di) {
      if (int e = element_at(i + di, j + dj); e >= 0) {
        return {e, di < 0 ? 1.0 : xi, dj < 0 ? 1.0 : eta};
      }
    }
  }
  throw InvalidArgument("point lies in an inactive region of the grid");
}

DofMap dof_layout(const Grid& grid, Scheme scheme) {
  DofMap d;
  d.scheme = scheme;
  d.num_vertex_dofs = grid.num_vertices();
  if (scheme == Scheme::rfb || scheme == Scheme::bmz) d.num_element_bubble_dofs = 4 * grid.num_elements();
  if (scheme == Scheme::bmz) d.num_patch_bubble_dofs = grid.num_edges();
  return d;
}

}  // namespace bz
