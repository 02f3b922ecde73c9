#include "bubblezoom/problem.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bz {

namespace {

constexpr double kGauss2 = 0.21132486540518711775;  // (1 - 1/sqrt(3)) / 2

constexpr std::array<double, 3> kGauss3Points{0.11270166537925831148, 0.5, 0.88729833462074168852};
constexpr std::array<double, 3> kGauss3Weights{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

template <class F>
auto gauss2_mean(Point o, double h, F&& f) {
  const double q[2] = {kGauss2, 1.0 - kGauss2};
  auto sum = f(Point{o.x + q[0] * h, o.y + q[0] * h});
  sum = sum + f(Point{o.x + q[1] * h, o.y + q[0] * h});
  sum = sum + f(Point{o.x + q[0] * h, o.y + q[1] * h});
  sum = sum + f(Point{o.x + q[1] * h, o.y + q[1] * h});
  return sum * 0.25;
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12; }

}  // namespace

Coefficients Coefficients::constant(double eps, Vec2 a, double c, double f) {
  Coefficients k;
  k.epsilon = eps;
  k.constant_velocity = a;
  k.velocity = [a](Point) { return a; };
  k.constant_reaction = c;
  k.reaction = [c](Point) { return c; };
  k.source = [f](Point, double) { return f; };
  k.steady_source = true;
  return k;
}

void Coefficients::validate() const {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (!constant_velocity && !velocity) throw InvalidArgument("velocity field not set");
  if (!constant_reaction && !reaction) throw InvalidArgument("reaction field not set");
  if (!source) throw InvalidArgument("source field not set");
}

Grid Domain::mesh(int n_per_unit) const {
  if (n_per_unit < 1) throw InvalidArgument("mesh resolution must be positive");
  const double nxd = extent.x * n_per_unit;
  const double nyd = extent.y * n_per_unit;
  const int nx = static_cast<int>(std::lround(nxd));
  const int ny = static_cast<int>(std::lround(nyd));
  if (std::abs(nxd - nx) > 1e-9 || std::abs(nyd - ny) > 1e-9) {
    throw InvalidArgument("domain extent is not a multiple of the mesh size");
  }
  return Grid::build(origin, extent, nx, ny, mask);
}

double element_peclet(double epsilon, double h, Vec2 a) {
  const double speed = a.norm();
  if (speed == 0.0) return 0.0;
  return speed * h / epsilon;
}

Vec2 element_mean_velocity(const Coefficients& coeffs, Point origin, double h) {
  if (coeffs.constant_velocity) return *coeffs.constant_velocity;
  return gauss2_mean(origin, h, [&](Point p) { return coeffs.velocity(p); });
}

double element_mean_reaction(const Coefficients& coeffs, Point origin, double h) {
  if (coeffs.constant_reaction) return *coeffs.constant_reaction;
  return gauss2_mean(origin, h, [&](Point p) { return coeffs.reaction(p); });
}

double element_mean_source(const Coefficients& coeffs, Point origin, double h, double t) {
  double sum = 0.0;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i)
      sum += kGauss3Weights[i] * kGauss3Weights[j] *
             coeffs.source({origin.x + kGauss3Points[i] * h, origin.y + kGauss3Points[j] * h}, t);
  return sum;
}

std::vector<std::string> admissibility_warnings(const Coefficients& coeffs, const Grid& grid) {
  std::vector<std::string> out;
  const double d = 0.25 * grid.h();
  for (int e = 0; e < grid.num_elements(); ++e) {
    const Point c = grid.element_center(e);
    double div = 0.0;
    if (!coeffs.constant_velocity) {
      div = (coeffs.velocity({c.x + d, c.y}).x - coeffs.velocity({c.x - d, c.y}).x) / (2 * d) +
            (coeffs.velocity({c.x, c.y + d}).y - coeffs.velocity({c.x, c.y - d}).y) / (2 * d);
    }
    const double value = coeffs.reaction_at(c) - 0.5 * div;
    if (value < -1e-12) {
      std::ostringstream msg;
      msg << "c - div(a)/2 = " << value << " < 0 at (" << c.x << ", " << c.y << ")";
      out.push_back(msg.str());
    }
  }
  return out;
}

std::vector<std::string> example_names() {
  return {"example0", "example1", "example2", "example3", "example4"};
}

Problem make_example(std::string_view name, const ExampleOverrides& overrides) {
  Problem p;
  p.name = std::string(name);
  p.boundary.g = [](Point) { return 0.0; };
  p.initial.u0 = [](Point) { return 0.0; };

  const auto eps_or = [&](double e) { return overrides.epsilon.value_or(e); };
  if (name == "example0") {
    p.coeffs = Coefficients::constant(eps_or(1e-6), {1.0, 0.5}, 0.0, 1.0);
  } else if (name == "example1") {
    const double s = std::numbers::pi / 6.0;
    p.coeffs = Coefficients::constant(eps_or(1.0), {-1e3 * std::cos(s), -1e3 * std::sin(s)}, 0.0, 0.0);
    // Corner vertices where the two branches disagree take the value 1.
    p.boundary.g = [](Point x) { return (near(x.x, 1.0) || near(x.y, 0.0)) ? 1.0 : 0.0; };
  } else if (name == "example2") {
    const double eps = eps_or(1e-6);
    p.coeffs = Coefficients::constant(eps, {1.0, 1.0}, 0.0, 0.0);
    p.coeffs.source = [eps](Point x, double) { return ex2_source(eps, x); };
    p.exact = ex2_exact(eps);
  } else if (name == "example3") {
    p.domain.extent = {2.0, 2.0};
    p.domain.mask = [](Point c) { return !(c.x > 1.0 && c.y > 1.0); };
    p.coeffs = Coefficients::constant(eps_or(1e-6), {-2.0, 1.0}, 0.0, 1.0);
  } else if (name == "example4") {
    p.coeffs = Coefficients::constant(eps_or(1e-6), {0.0, 0.0}, 0.0, 1.0);
    p.coeffs.constant_velocity.reset();
    p.coeffs.velocity = [](Point x) { return Vec2{x.y - 0.5, 0.5 - x.x}; };
    p.initial.u0 = [](Point x) {
      const double r = 0.1;
      const double d = std::abs(x.x - 0.25) + std::abs(x.y - 0.75);
      return std::max(0.0, 1.0 - d / r);
    };
  } else {
    throw InvalidArgument("unknown example '" + std::string(name) + "'");
  }
  if (overrides.reaction) {
    const double c = *overrides.reaction;
    p.coeffs.constant_reaction = c;
    p.coeffs.reaction = [c](Point) { return c; };
    p.exact.reset();  // the manufactured source assumes c = 0
  }
  if (overrides.source) {
    const double f = *overrides.source;
    p.coeffs.source = [f](Point, double) { return f; };
    p.coeffs.steady_source = true;
    p.exact.reset();
  }
  return p;
}

}  // namespace bz
