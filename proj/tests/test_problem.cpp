#include <doctest.h>

#include <numbers>

#include "support.hpp"

using namespace bz;

TEST_SUITE("problem") {

TEST_CASE("example 1 boundary data at the corners") {
  const Problem p = make_example("example1");
  CHECK(p.boundary.g({1.0, 0.0}) == 1.0);
  CHECK(p.boundary.g({0.0, 1.0}) == 0.0);
  CHECK(p.boundary.g({1.0, 1.0}) == 1.0);
  CHECK(p.boundary.g({0.0, 0.0}) == 1.0);
  CHECK(p.boundary.g({0.5, 0.0}) == 1.0);
  CHECK(p.boundary.g({0.0, 0.5}) == 0.0);
  CHECK(p.coeffs.epsilon == 1.0);
  CHECK(p.coeffs.constant_velocity->norm() == doctest::Approx(1e3));
}

TEST_CASE("element Peclet number") {
  CHECK(element_peclet(1e-6, 0.02, {1.0, 0.5}) == doctest::Approx(std::hypot(1.0, 0.5) * 0.02 / 1e-6));
  CHECK(element_peclet(1.0, 0.1, {0.0, 0.0}) == 0.0);
}

TEST_CASE("element means are exact for linear data") {
  const Problem p = make_example("example4");
  const Vec2 a = element_mean_velocity(p.coeffs, {0.3, 0.6}, 0.1);
  CHECK(a.x == doctest::Approx(0.65 - 0.5));
  CHECK(a.y == doctest::Approx(0.5 - 0.35));
  CHECK(element_mean_reaction(p.coeffs, {0.3, 0.6}, 0.1) == 0.0);
}

TEST_CASE("element mean source against a fine midpoint rule") {
  const Problem p = make_example("example2", {.epsilon = 0.05});
  const Point o{0.6, 0.2};
  const double h = 0.1;
  const int n = 200;
  double sum = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) sum += p.coeffs.source_at({o.x + (i + 0.5) * h / n, o.y + (j + 0.5) * h / n}, 0.0);
  CHECK(element_mean_source(p.coeffs, o, h, 0.0) == doctest::Approx(sum / (n * n)).epsilon(1e-5));
}

TEST_CASE("manufactured source matches finite differences of the exact solution") {
  for (double eps : {0.5, 0.1, 0.02}) {
    const double d = 1e-4;
    for (Point x : {Point{0.3, 0.4}, Point{0.9, 0.7}, Point{0.95, 0.95}, Point{0.1, 0.98}}) {
      const auto u = [&](double dx, double dy) { return ex2_exact_value(eps, {x.x + dx, x.y + dy}); };
      const double lap = (u(d, 0) + u(-d, 0) + u(0, d) + u(0, -d) - 4 * u(0, 0)) / (d * d);
      const double ux = (u(d, 0) - u(-d, 0)) / (2 * d);
      const double uy = (u(0, d) - u(0, -d)) / (2 * d);
      const double dg = 1e-6;
      const double gx = (u(dg, 0) - u(-dg, 0)) / (2 * dg);
      const double gy = (u(0, dg) - u(0, -dg)) / (2 * dg);
      const double f = -eps * lap + ux + uy;
      CHECK(ex2_source(eps, x) == doctest::Approx(f).epsilon(1e-5).scale(1.0));
      const Vec2 g = ex2_exact_gradient(eps, x);
      CHECK(g.x == doctest::Approx(gx).epsilon(1e-6));
      CHECK(g.y == doctest::Approx(gy).epsilon(1e-6));
    }
  }
}

TEST_CASE("exact solution vanishes on the boundary") {
  for (double s : {0.0, 0.3, 0.77, 1.0}) {
    CHECK(ex2_exact_value(1e-6, {s, 0.0}) == 0.0);
    CHECK(ex2_exact_value(1e-6, {0.0, s}) == 0.0);
    CHECK(ex2_exact_value(1e-6, {s, 1.0}) == doctest::Approx(0.0));
    CHECK(ex2_exact_value(1e-6, {1.0, s}) == doctest::Approx(0.0));
  }
}

TEST_CASE("rotation oracle follows the characteristic ODE") {
  // RK4 on x' = a(x) with the rotation field
  const Problem p = make_example("example4");
  Point x{0.25, 0.75};
  const double dt = 1e-3;
  double t = 0.0;
  for (double target : {0.7, 2.0, 6.0, 2 * std::numbers::pi}) {
    while (t < target - 1e-12) {
      const double step = std::min(dt, target - t);
      const auto a = [&](Point q) { return p.coeffs.velocity_at(q); };
      const Vec2 k1 = a(x);
      const Vec2 k2 = a(x + k1 * (step / 2));
      const Vec2 k3 = a(x + k2 * (step / 2));
      const Vec2 k4 = a(x + k3 * step);
      x = x + (k1 + k2 * 2 + k3 * 2 + k4) * (step / 6);
      t += step;
    }
    const Point q = rotation_peak_oracle(target);
    CHECK(q.x == doctest::Approx(x.x).epsilon(1e-10));
    CHECK(q.y == doctest::Approx(x.y).epsilon(1e-10));
  }
  CHECK(rotation_peak_oracle(2 * std::numbers::pi).x == doctest::Approx(0.25));
}

TEST_CASE("admissibility warnings flag c - div a / 2 < 0") {
  const Problem rot = make_example("example4");
  CHECK(admissibility_warnings(rot.coeffs, rot.domain.mesh(10)).empty());
  Coefficients k = Coefficients::constant(1e-3, {0, 0}, 0.2, 1.0);
  k.constant_velocity.reset();
  k.velocity = [](Point x) { return Vec2{x.x, 0.0}; };  // div a = 1
  CHECK(admissibility_warnings(k, Grid::build({0, 0}, {1, 1}, 4, 4)).size() == 16);
  k.constant_reaction = 0.6;
  CHECK(admissibility_warnings(k, Grid::build({0, 0}, {1, 1}, 4, 4)).empty());
}

TEST_CASE("coefficient validation") {
  Coefficients k = Coefficients::constant(0.0, {1, 0}, 0, 1);
  CHECK_THROWS_AS(k.validate(), InvalidArgument);
  k = Coefficients::constant(1.0, {1, 0}, 0, 1);
  k.source = nullptr;
  CHECK_THROWS_AS(k.validate(), InvalidArgument);
  CHECK_THROWS_AS(make_example("example9"), InvalidArgument);
}

TEST_CASE("overrides") {
  const Problem p = make_example("example1", {.reaction = 7500.0});
  CHECK(p.coeffs.reaction_at({0.5, 0.5}) == 7500.0);
  const Problem q = make_example("example2", {.source = 2.0});
  CHECK_FALSE(q.exact.has_value());
  const Problem r = make_example("example2", {.epsilon = 0.01});
  REQUIRE(r.exact.has_value());
  CHECK(r.coeffs.epsilon == 0.01);
  CHECK(r.exact->value({0.5, 0.5}) == doctest::Approx(ex2_exact_value(0.01, {0.5, 0.5})));
  CHECK_THROWS_AS(make_example("example3").domain.mesh(0), InvalidArgument);
}

}
