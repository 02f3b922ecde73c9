#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bubblezoom/mesh.hpp"
#include "bubblezoom/oracles.hpp"
#include "bubblezoom/types.hpp"

namespace bz {

using ScalarField = std::function<double(Point)>;
using SpaceTimeField = std::function<double(Point, double)>;
using VectorField = std::function<Vec2(Point)>;

/// Coefficients of  -eps Lap u + a.grad u + c u = f.
struct Coefficients {
  double epsilon = 1.0;
  VectorField velocity;
  /// Set when the velocity is constant; lets the bubble cache share one table.
  std::optional<Vec2> constant_velocity;
  ScalarField reaction;
  std::optional<double> constant_reaction;
  SpaceTimeField source;
  /// Set when the source does not depend on t, so loads can be reused.
  bool steady_source = false;

  static Coefficients constant(double eps, Vec2 a, double c, double f);

  Vec2 velocity_at(Point p) const { return constant_velocity ? *constant_velocity : velocity(p); }
  double reaction_at(Point p) const { return constant_reaction ? *constant_reaction : reaction(p); }
  double source_at(Point p, double t) const { return source(p, t); }

  /// Throws InvalidArgument unless epsilon > 0 and all fields are set.
  void validate() const;
};

struct BoundaryData {
  ScalarField g;
};

struct InitialData {
  ScalarField u0;
};

/// Domain description: a rectangle, optionally with a mask on element centers.
struct Domain {
  Point origin{0.0, 0.0};
  Vec2 extent{1.0, 1.0};
  ElementMask mask;

  /// Grid with mesh size h = 1/n_per_unit; extents must be integer
  /// multiples of h.
  Grid mesh(int n_per_unit) const;
};

struct Problem {
  std::string name;
  Domain domain;
  Coefficients coeffs;
  BoundaryData boundary;
  InitialData initial;
  std::optional<ExactSolution> exact;
};

/// |a| h / eps; zero for a = 0.
double element_peclet(double epsilon, double h, Vec2 a);

/// Mean of the velocity over the square [origin, origin + h]^2 by 2x2 Gauss.
Vec2 element_mean_velocity(const Coefficients& coeffs, Point origin, double h);
/// Mean of the reaction over the square by 2x2 Gauss.
double element_mean_reaction(const Coefficients& coeffs, Point origin, double h);
/// Mean of the source at time t over the square by 3x3 Gauss.
double element_mean_source(const Coefficients& coeffs, Point origin, double h, double t);

/// Samples c - div(a)/2 at element centers (central differences for div a)
/// and returns one message per element where it is negative.
std::vector<std::string> admissibility_warnings(const Coefficients& coeffs, const Grid& grid);

/// Optional replacements for the data of a built-in problem.
struct ExampleOverrides {
  std::optional<double> epsilon;
  std::optional<double> reaction;
  std::optional<double> source;  // constant f
};

/// Built-in problems: example0 ... example4. For example2 an epsilon
/// override also rebuilds the matching source and exact solution.
Problem make_example(std::string_view name, const ExampleOverrides& overrides = {});
std::vector<std::string> example_names();

}  // namespace bz
