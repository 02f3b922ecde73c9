#pragma once

#include <vector>

#include "bubblezoom/oracles.hpp"
#include "bubblezoom/problem.hpp"
#include "bubblezoom/solve.hpp"

namespace bz {

/// u_h(p) including every bubble whose support contains p.
double evaluate(const Solution& sol, Point p);
Vec2 evaluate_gradient(const Solution& sol, Point p);

/// Samples per element axis used when none is requested: the bubble
/// lattice size, or 20 for solutions without bubbles.
int default_samples(const Solution& sol);

/// u_h at the (m+1)^2 lattice nodes of element e, row-major.
std::vector<double> element_samples(const Solution& sol, int e, int m);

/// u_h on the global sampling lattice (nx m + 1) x (ny m + 1). Nodes not
/// touched by an active element are marked inactive.
struct LatticeSamples {
  int m = 0;
  int nx = 0;  // lattice cells per axis
  int ny = 0;
  Point origin{};
  double spacing = 0.0;
  std::vector<double> values;
  std::vector<char> active;

  double at(int a, int b) const { return values[static_cast<size_t>(b) * (nx + 1) + a]; }
  bool is_active(int a, int b) const { return active[static_cast<size_t>(b) * (nx + 1) + a] != 0; }
  Point point(int a, int b) const { return {origin.x + a * spacing, origin.y + b * spacing}; }
};

LatticeSamples sample_lattice(const Solution& sol, int m = 0);

struct NormSpec {
  enum class Kind { l1, l2, h1_seminorm, stability_seminorm };
  enum class Region { full, interior };  // interior = [2h, L - 2h] in each axis
  enum class Quadrature {
    automatic,  // nodes for l1/l2, gauss for the gradient norms
    nodes,      // trapezoid rule on the sampling lattice (values only)
    gauss       // 2x2 Gauss per sampling cell
  };
  Kind kind = Kind::l2;
  Region region = Region::full;
  Quadrature quadrature = Quadrature::automatic;
  int samples = 0;  // per element axis; 0 = default_samples
};

/// Norm of exact - u_h. The stability seminorm is
/// (sum_T h ||a . grad(exact - u_h)||^2_T)^(1/2) and needs the velocity.
double error_norm(const Solution& sol, const ExactSolution& exact, const NormSpec& spec,
                  const Coefficients* coeffs = nullptr);

/// log(e_i / e_{i+1}) / log(N_{i+1} / N_i).
std::vector<double> eoc(const std::vector<double>& errors, const std::vector<int>& Ns);

struct Extrema {
  double min = 0.0;
  double max = 0.0;
  Point argmin{};
  Point argmax{};
};

/// Extrema over the sampling lattice (vertices plus m x m samples per
/// element). Ties go to the first node in row-major order.
Extrema extrema(const Solution& sol, int m = 0);

/// Extrema of the vertex values u_L (every bubble vanishes at vertices).
Extrema vertex_extrema(const Solution& sol);

/// Lattice extrema restricted to the elements within `radius` element
/// layers of the one containing `center`; cheap enough to run every step.
Extrema extrema_near(const Solution& sol, Point center, int radius, int m = 0);

}  // namespace bz
