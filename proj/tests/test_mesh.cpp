#include <doctest.h>

#include <set>

#include "support.hpp"

using namespace bz;

TEST_SUITE("mesh") {

TEST_CASE("unit square counts") {
  const Grid g = Grid::build({0, 0}, {1, 1}, 10, 10);
  CHECK(g.num_vertices() == 121);
  CHECK(g.num_elements() == 100);
  CHECK(g.num_edges() == 180);
  CHECK(g.boundary_vertices().size() == 40);
  CHECK(g.h() == doctest::Approx(0.1));
}

TEST_CASE("L-shaped domain counts") {
  const Problem p = make_example("example3");
  const Grid g = p.domain.mesh(50);
  CHECK(g.num_elements() == 7500);
  // 101^2 lattice nodes minus the 50 x 50 strictly inside the cut quadrant
  CHECK(g.num_vertices() == 101 * 101 - 2500);
  // adjacent active pairs, counted row by row and column by column
  int pairs = 0;
  for (int j = 0; j < 100; ++j)
    for (int i = 0; i < 99; ++i) {
      pairs += g.element_at(i, j) >= 0 && g.element_at(i + 1, j) >= 0;
      pairs += g.element_at(j, i) >= 0 && g.element_at(j, i + 1) >= 0;
    }
  CHECK(g.num_edges() == pairs);
  CHECK(g.element_at(60, 60) == -1);
  CHECK(g.vertex_at(75, 75) == -1);
  CHECK(g.vertex_at(50, 75) >= 0);
  CHECK_FALSE(g.is_boundary_vertex(g.vertex_at(25, 25)));
  CHECK(g.is_boundary_vertex(g.vertex_at(50, 75)));
}

TEST_CASE("elements are counterclockwise and edges point at neighbours") {
  const Grid g = Grid::build({0, 0}, {1, 0.75}, 4, 3);
  for (int e = 0; e < g.num_elements(); ++e) {
    const Element& el = g.element(e);
    const Point o = g.element_origin(e);
    CHECK(g.vertex(el.vertices[0]) == o);
    CHECK(g.vertex(el.vertices[1]).x == doctest::Approx(o.x + g.h()));
    CHECK(g.vertex(el.vertices[2]).y == doctest::Approx(o.y + g.h()));
    CHECK(g.vertex(el.vertices[3]).x == doctest::Approx(o.x));
    CHECK((el.edges[static_cast<int>(Side::left)] < 0) == (el.i == 0));
    CHECK((el.edges[static_cast<int>(Side::top)] < 0) == (el.j == 2));
    if (const int s = el.edges[static_cast<int>(Side::right)]; s >= 0) {
      const Edge& edge = g.edge(s);
      CHECK(edge.orientation == PatchOrientation::horizontal);
      CHECK(edge.elements[0] == e);
      CHECK(edge.elements[1] == g.element_at(el.i + 1, el.j));
    }
    if (const int s = el.edges[static_cast<int>(Side::bottom)]; s >= 0) {
      const Edge& edge = g.edge(s);
      CHECK(edge.orientation == PatchOrientation::vertical);
      CHECK(edge.elements[1] == e);
    }
  }
}

TEST_CASE("locate sends grid lines to the larger index") {
  const Grid g = Grid::build({0, 0}, {1, 1}, 10, 10);
  Location l = g.locate({0.1, 0.1});
  CHECK(l.element == g.element_at(1, 1));
  CHECK(l.xi == doctest::Approx(0.0));
  CHECK(l.eta == doctest::Approx(0.0));

  l = g.locate({1.0, 1.0});
  CHECK(l.element == g.element_at(9, 9));
  CHECK(l.xi == doctest::Approx(1.0));

  l = g.locate({0.25, 0.43});
  CHECK(l.element == g.element_at(2, 4));
  CHECK(l.xi == doctest::Approx(0.5));
  CHECK(l.eta == doctest::Approx(0.3));

  CHECK_THROWS_AS(g.locate({1.01, 0.5}), InvalidArgument);
  const Grid L = make_example("example3").domain.mesh(10);
  CHECK_THROWS_AS(L.locate({1.5, 1.5}), InvalidArgument);
}

TEST_CASE("dof layout sizes") {
  const Grid g = Grid::build({0, 0}, {1, 1}, 10, 10);
  CHECK(dof_layout(g, Scheme::galerkin).total() == 121);
  CHECK(dof_layout(g, Scheme::supg).total() == 121);
  CHECK(dof_layout(g, Scheme::rfb).total() == 521);
  CHECK(dof_layout(g, Scheme::bmz).total() == 701);
  const DofMap d = dof_layout(g, Scheme::bmz);
  CHECK(d.element_bubble_dof(0, 0) == 121);
  CHECK(d.patch_bubble_dof(0) == 521);
  for (int n : {3, 7, 20}) CHECK(dof_layout(Grid::build({0, 0}, {1, 1}, n, n), Scheme::bmz).total() == 7 * n * n + 1);
}

TEST_CASE("scheme names") {
  for (Scheme s : {Scheme::galerkin, Scheme::supg, Scheme::rfb, Scheme::bmz}) CHECK(parse_scheme(to_string(s)) == s);
  CHECK_THROWS_AS(parse_scheme("dg"), InvalidArgument);
}

TEST_CASE("invalid grids") {
  CHECK_THROWS_AS(Grid::build({0, 0}, {1, 1}, 0, 4), InvalidArgument);
  CHECK_THROWS_AS(Grid::build({0, 0}, {1, 2}, 4, 4), InvalidArgument);
  CHECK_THROWS(Grid::build({0, 0}, {1, 1}, 4, 4, [](Point) { return false; }));
}

}
