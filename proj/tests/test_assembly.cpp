#include <doctest.h>

#include <numbers>

#include "support.hpp"

using namespace bz;

namespace {

// -Lap u = 1 on the unit square, u = 0 on the boundary, at the center.
double poisson_center_value() {
  const double pi = std::numbers::pi;
  double sum = 0.0;
  for (int m = 1; m < 2000; m += 2)
    for (int n = 1; n < 2000; n += 2) {
      const double sign = ((m + n) / 2) % 2 == 1 ? 1.0 : -1.0;  // sin(m pi/2) sin(n pi/2)
      sum += sign * 16.0 / (pi * pi * pi * pi * m * n * (m * m + n * n));
    }
  return sum;
}

}  // namespace

TEST_SUITE("assembly") {

TEST_CASE("bilinear element matrices") {
  const double h = 0.3;
  const ElementMatrices m = q1_element_matrices(h, {0.0, 0.0}, Coefficients::constant(1.0, {0, 0}, 0, 0));
  double trace = 0.0, mass_trace = 0.0, mass_sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    trace += m.diffusion(i, i);
    mass_trace += m.mass(i, i);
    double row = 0.0;
    for (int j = 0; j < 4; ++j) {
      row += m.diffusion(i, j);
      mass_sum += m.mass(i, j);
      CHECK(m.diffusion(i, j) == doctest::Approx(m.diffusion(j, i)));
    }
    CHECK(row == doctest::Approx(0.0).scale(1.0));
    CHECK(m.integral(i) == doctest::Approx(h * h / 4));
  }
  CHECK(trace == doctest::Approx(8.0 / 3.0));
  CHECK(mass_trace == doctest::Approx(4 * h * h / 9));
  CHECK(mass_sum == doctest::Approx(h * h));
}

TEST_CASE("advection and reaction blocks against midpoint quadrature") {
  const double h = 0.2;
  const Point o{0.4, 0.2};
  Coefficients k = Coefficients::constant(1.0, {0, 0}, 0.0, 0.0);
  k.constant_velocity.reset();
  k.velocity = [](Point x) { return Vec2{x.y - 0.5, 0.5 - x.x}; };
  k.constant_reaction.reset();
  k.reaction = [](Point x) { return 1.0 + x.x; };
  const ElementMatrices m = q1_element_matrices(h, o, k);
  const int n = 400;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double adv = 0.0, rea = 0.0;
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
          const double xi = (a + 0.5) / n, eta = (b + 0.5) / n;
          const Point x{o.x + h * xi, o.y + h * eta};
          const Vec2 g = local::nodal_gradient(j, xi, eta) * (1.0 / h);
          adv += k.velocity_at(x).dot(g) * local::nodal(i, xi, eta);
          rea += k.reaction_at(x) * local::nodal(j, xi, eta) * local::nodal(i, xi, eta);
        }
      const double area = h * h / (static_cast<double>(n) * n);
      CHECK(m.advection(i, j) == doctest::Approx(adv * area).epsilon(1e-4).scale(1e-3));
      CHECK(m.reaction(i, j) == doctest::Approx(rea * area).epsilon(1e-4));
    }
}

TEST_CASE("Poisson problem converges to the series solution") {
  const auto grid = test::unit_mesh(32);
  const Coefficients k = Coefficients::constant(1.0, {0.0, 0.0}, 0.0, 1.0);
  StabCache cache;
  DiscretizationOptions opts;
  opts.scheme = Scheme::galerkin;
  const Solution s = solve_steady(grid, k, BoundaryData{[](Point) { return 0.0; }}, opts, cache);
  const double center = s.U[grid->vertex_at(16, 16)];
  CHECK(poisson_center_value() == doctest::Approx(0.0736713).epsilon(1e-5));
  CHECK(center == doctest::Approx(poisson_center_value()).epsilon(2e-3));
}

TEST_CASE("local dofs follow the layout") {
  const Grid g = Grid::build({0, 0}, {1, 1}, 3, 3);
  const DofMap d = dof_layout(g, Scheme::bmz);
  const int e = g.element_at(0, 0);
  const auto ids = local_dofs(g, d, e);
  for (int k = 0; k < 4; ++k) {
    CHECK(ids[k] == g.element(e).vertices[k]);
    CHECK(ids[4 + k] == d.element_bubble_dof(e, k));
  }
  CHECK(ids[8 + static_cast<int>(Side::bottom)] == -1);
  CHECK(ids[8 + static_cast<int>(Side::left)] == -1);
  CHECK(ids[8 + static_cast<int>(Side::right)] == d.patch_bubble_dof(g.element(e).edges[1]));
  const auto q1 = local_dofs(g, dof_layout(g, Scheme::galerkin), e);
  CHECK(q1[4] == -1);
  CHECK(q1[8 + static_cast<int>(Side::right)] == -1);
}

TEST_CASE("rfb operator is the leading block of the bmz operator") {
  const Problem p = make_example("example0", {.reaction = 2.0});
  const Grid g = p.domain.mesh(8);
  StabCache cache;
  const BubbleBasis basis = build_bubble_basis(g, p.coeffs, cache);
  const DofMap rfb = dof_layout(g, Scheme::rfb);
  const DofMap bmz = dof_layout(g, Scheme::bmz);
  const SplitOperator a = assemble_operator(g, rfb, p.coeffs, &basis);
  const SplitOperator b = assemble_operator(g, bmz, p.coeffs, &basis);
  const std::array<std::pair<const SparseMatrix*, const SparseMatrix*>, 4> pairs{
      {{&a.diffusion, &b.diffusion}, {&a.advection, &b.advection}, {&a.reaction, &b.reaction}, {&a.mass, &b.mass}}};
  for (const auto& [x, y] : pairs) {
    int mismatches = 0;
    for (int i = 0; i < rfb.total(); ++i)
      for (int j = 0; j < rfb.total(); ++j) mismatches += x->coeff(i, j) != y->coeff(i, j);
    CHECK(mismatches == 0);
  }
  CHECK(a.integral == b.integral.head(rfb.total()));
  const Vector la = assemble_load(g, rfb, p.coeffs, &basis);
  const Vector lb = assemble_load(g, bmz, p.coeffs, &basis);
  CHECK(la == lb.head(rfb.total()));
}

TEST_CASE("loads integrate the source") {
  const Grid g = Grid::build({0, 0}, {1, 1}, 5, 5);
  const Coefficients k = Coefficients::constant(1e-3, {1, 0}, 0, 2.0);
  const Vector b = assemble_load(g, dof_layout(g, Scheme::galerkin), k, nullptr);
  CHECK(b.sum() == doctest::Approx(2.0));
  StabCache cache;
  const BubbleBasis basis = build_bubble_basis(g, k, cache);
  const DofMap d = dof_layout(g, Scheme::bmz);
  const Vector bb = assemble_load(g, d, k, &basis);
  const double h = g.h();
  for (int q = 0; q < 4; ++q) {
    CHECK(bb[d.element_bubble_dof(7, q)] ==
          doctest::Approx(2.0 * h * h * h * basis.tables(7).integral[local::kBubble + q]));
  }
}

TEST_CASE("stabilization parameter") {
  const Vec2 a{1.0, 0.5};
  CHECK(supg_tau(TauRule::classic, 0.1, 1e-3, a) == doctest::Approx(0.1 / (2 * a.norm())));
  CHECK(supg_tau(TauRule::classic, 0.1, 1.0, a) == 0.0);
  StabCache cache;
  const double h = 0.02, eps = 1e-6;
  const TableRef t = cache.get(rescale(eps, a, 0.0, h));
  const ReferenceTables ref = t.reference();
  double s = 0.0;
  for (int k = 0; k < 4; ++k) s += ref.integral[local::kBubble + k];
  CHECK(supg_tau(TauRule::rfb_integral, h, eps, a, &ref) == doctest::Approx(h * s));
  CHECK(test::close_rel(supg_tau(TauRule::rfb_integral, h, eps, a, &ref), h * pyramid_integral(a, 1.0), 0.1));
  CHECK_THROWS_AS(supg_tau(TauRule::rfb_integral, h, eps, a), InvalidArgument);
}

TEST_CASE("SUPG without stabilization is Galerkin") {
  const Grid g = Grid::build({0, 0}, {1, 1}, 6, 6);
  const Coefficients k = Coefficients::constant(1.0, {1.0, 0.5}, 0.3, 1.0);  // Pe_h < 1
  const DofMap d = dof_layout(g, Scheme::supg);
  const SupgSystem s = assemble_supg(g, d, k, TauRule::classic);
  const SplitOperator gal = assemble_operator(g, dof_layout(g, Scheme::galerkin), k, nullptr);
  const SparseMatrix A = s.op.form(k.epsilon), B = gal.form(k.epsilon);
  CHECK((A.storage() - B.storage()).norm() < 1e-14);
  CHECK((s.load - assemble_load(g, d, k, nullptr)).norm() < 1e-14);
  for (double t : s.tau) CHECK(t == 0.0);
}

TEST_CASE("Dirichlet rows") {
  const Grid g = Grid::build({0, 0}, {1, 1}, 4, 4);
  const DofMap d = dof_layout(g, Scheme::galerkin);
  const Coefficients k = Coefficients::constant(1.0, {0, 0}, 0, 1.0);
  SparseMatrix A = assemble_operator(g, d, k, nullptr).form(1.0);
  Vector b = assemble_load(g, d, k, nullptr);
  apply_dirichlet(A, b, g, d, [](Point x) { return x.x + 10 * x.y; });
  for (int v : g.boundary_vertices()) {
    CHECK(A.coeff(v, v) == 1.0);
    CHECK(b[v] == g.vertex(v).x + 10 * g.vertex(v).y);
    double off = 0.0;
    for (int j = 0; j < d.total(); ++j)
      if (j != v) off += std::abs(A.coeff(v, j));
    CHECK(off == 0.0);
  }
}

}
