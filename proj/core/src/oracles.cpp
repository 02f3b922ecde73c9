#include "bubblezoom/oracles.hpp"

#include <cmath>

namespace bz {

namespace {

// E = exp(-(1-s)/eps) and 1 - E, the latter without cancellation.
struct Layer {
  double e;
  double one_minus_e;
};

Layer layer(double eps, double s) {
  const double z = -(1.0 - s) / eps;
  return {std::exp(z), -std::expm1(z)};
}

}  // namespace

double ex2_exact_value(double eps, Point p) {
  const auto lx = layer(eps, p.x);
  const auto ly = layer(eps, p.y);
  return 2.0 * std::sin(p.x) * lx.one_minus_e * p.y * p.y * ly.one_minus_e;
}

Vec2 ex2_exact_gradient(double eps, Point p) {
  const auto lx = layer(eps, p.x);
  const auto ly = layer(eps, p.y);
  const double X = std::sin(p.x) * lx.one_minus_e;
  const double dX = std::cos(p.x) * lx.one_minus_e - std::sin(p.x) * lx.e / eps;
  const double Y = p.y * p.y * ly.one_minus_e;
  const double dY = 2.0 * p.y * ly.one_minus_e - p.y * p.y * ly.e / eps;
  return {2.0 * dX * Y, 2.0 * X * dY};
}

double ex2_source(double eps, Point p) {
  const auto lx = layer(eps, p.x);
  const auto ly = layer(eps, p.y);
  const double X = std::sin(p.x) * lx.one_minus_e;
  const double Y = p.y * p.y * ly.one_minus_e;
  // (-eps d2 + d) applied to each factor
  const double LX = lx.one_minus_e * (eps * std::sin(p.x) + std::cos(p.x)) + 2.0 * lx.e * std::cos(p.x);
  const double LY = ly.one_minus_e * (2.0 * p.y - 2.0 * eps) + 4.0 * p.y * ly.e;
  return 2.0 * (LX * Y + X * LY);
}

ExactSolution ex2_exact(double eps) {
  return {[eps](Point p) { return ex2_exact_value(eps, p); },
          [eps](Point p) { return ex2_exact_gradient(eps, p); }};
}

Point rotation_peak_oracle(double t) {
  const double u0 = 0.25 - 0.5;
  const double v0 = 0.75 - 0.5;
  const double c = std::cos(t), s = std::sin(t);
  return {0.5 + u0 * c + v0 * s, 0.5 - u0 * s + v0 * c};
}

}  // namespace bz
