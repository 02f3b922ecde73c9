#include "bubblezoom/analysis.hpp"

#include <cmath>
#include <limits>

namespace bz {

namespace {

constexpr double kGauss2[2] = {0.21132486540518711775, 0.78867513459481288225};

// Bilinear interpolation of bubble k of element e on its reference lattice.
double bubble_value(const BubbleBasis& basis, int e, int k, double xi, double eta, Vec2* grad = nullptr) {
  const int M = basis.M();
  const double sx = xi * M, sy = eta * M;
  const int i = std::min(static_cast<int>(sx), M - 1);
  const int j = std::min(static_cast<int>(sy), M - 1);
  const double s = sx - i, t = sy - j;
  const double u00 = basis.field_at(e, k, i, j), u10 = basis.field_at(e, k, i + 1, j);
  const double u11 = basis.field_at(e, k, i + 1, j + 1), u01 = basis.field_at(e, k, i, j + 1);
  if (grad) {
    *grad = {((1 - t) * (u10 - u00) + t * (u11 - u01)) * M, ((1 - s) * (u01 - u00) + s * (u11 - u10)) * M};
  }
  return (1 - s) * (1 - t) * u00 + s * (1 - t) * u10 + s * t * u11 + (1 - s) * t * u01;
}

}  // namespace

double evaluate(const Solution& sol, Point p) {
  const Grid& grid = *sol.grid;
  const Location loc = grid.locate(p);
  const auto ids = local_dofs(grid, sol.dofs, loc.element);
  double u = 0.0;
  for (int k = 0; k < 4; ++k) u += sol.U[ids[k]] * local::nodal(k, loc.xi, loc.eta);
  if (!sol.basis) return u;
  for (int k = local::kBubble; k < local::kCount; ++k) {
    if (ids[k] < 0) continue;
    u += sol.U[ids[k]] * grid.h() * bubble_value(*sol.basis, loc.element, k, loc.xi, loc.eta);
  }
  return u;
}

namespace {

Extrema scan_elements(const Solution& sol, const std::vector<int>& elements, int m) {
  const Grid& grid = *sol.grid;
  const double dx = grid.h() / m;
  Extrema x;
  x.min = std::numeric_limits<double>::infinity();
  x.max = -std::numeric_limits<double>::infinity();
  for (int e : elements) {
    const auto v = element_samples(sol, e, m);
    const Point o = grid.element_origin(e);
    for (int b = 0; b <= m; ++b)
      for (int a = 0; a <= m; ++a) {
        const double u = v[static_cast<size_t>(b) * (m + 1) + a];
        if (u > x.max) {
          x.max = u;
          x.argmax = {o.x + a * dx, o.y + b * dx};
        }
        if (u < x.min) {
          x.min = u;
          x.argmin = {o.x + a * dx, o.y + b * dx};
        }
      }
  }
  return x;
}

}  // namespace

Vec2 evaluate_gradient(const Solution& sol, Point p) {
  const Grid& grid = *sol.grid;
  const Location loc = grid.locate(p);
  const auto ids = local_dofs(grid, sol.dofs, loc.element);
  Vec2 g{};
  for (int k = 0; k < 4; ++k) g = g + local::nodal_gradient(k, loc.xi, loc.eta) * (sol.U[ids[k]] / grid.h());
  if (!sol.basis) return g;
  for (int k = local::kBubble; k < local::kCount; ++k) {
    if (ids[k] < 0) continue;
    Vec2 gb;
    bubble_value(*sol.basis, loc.element, k, loc.xi, loc.eta, &gb);
    // physical bubble h b(x/h): the factors h and 1/h cancel
    g = g + gb * sol.U[ids[k]];
  }
  return g;
}

int default_samples(const Solution& sol) { return sol.basis ? sol.basis->M() : 20; }

std::vector<double> element_samples(const Solution& sol, int e, int m) {
  const Grid& grid = *sol.grid;
  const auto ids = local_dofs(grid, sol.dofs, e);
  const size_t stride = static_cast<size_t>(m) + 1;
  std::vector<double> out(stride * stride, 0.0);
  for (int b = 0; b <= m; ++b)
    for (int a = 0; a <= m; ++a) {
      const double xi = static_cast<double>(a) / m, eta = static_cast<double>(b) / m;
      double u = 0.0;
      for (int k = 0; k < 4; ++k) u += sol.U[ids[k]] * local::nodal(k, xi, eta);
      out[b * stride + a] = u;
    }
  if (!sol.basis) return out;
  const double h = grid.h();
  const bool native = m == sol.basis->M();
  for (int k = local::kBubble; k < local::kCount; ++k) {
    if (ids[k] < 0) continue;
    const double coef = sol.U[ids[k]] * h;
    if (coef == 0.0) continue;
    const FineField f = sol.basis->field(e, k);
    for (int b = 0; b <= m; ++b)
      for (int a = 0; a <= m; ++a) {
        const double v = native ? f.at(a, b) : f.value({static_cast<double>(a) / m, static_cast<double>(b) / m});
        out[b * stride + a] += coef * v;
      }
  }
  return out;
}

LatticeSamples sample_lattice(const Solution& sol, int m) {
  if (m <= 0) m = default_samples(sol);
  const Grid& grid = *sol.grid;
  LatticeSamples s;
  s.m = m;
  s.nx = grid.nx() * m;
  s.ny = grid.ny() * m;
  s.origin = grid.origin();
  s.spacing = grid.h() / m;
  const size_t n = static_cast<size_t>(s.nx + 1) * (s.ny + 1);
  s.values.assign(n, 0.0);
  s.active.assign(n, 0);
  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto v = element_samples(sol, e, m);
    const auto& el = grid.element(e);
    for (int b = 0; b <= m; ++b)
      for (int a = 0; a <= m; ++a) {
        const size_t idx = static_cast<size_t>(el.j * m + b) * (s.nx + 1) + (el.i * m + a);
        s.values[idx] = v[static_cast<size_t>(b) * (m + 1) + a];
        s.active[idx] = 1;
      }
  }
  return s;
}

double error_norm(const Solution& sol, const ExactSolution& exact, const NormSpec& spec, const Coefficients* coeffs) {
  using Kind = NormSpec::Kind;
  const bool needs_gradient = spec.kind == Kind::h1_seminorm || spec.kind == Kind::stability_seminorm;
  NormSpec::Quadrature quadrature = spec.quadrature;
  if (quadrature == NormSpec::Quadrature::automatic) {
    quadrature = needs_gradient ? NormSpec::Quadrature::gauss : NormSpec::Quadrature::nodes;
  }
  if (needs_gradient && quadrature == NormSpec::Quadrature::nodes) {
    throw InvalidArgument("error_norm: gradient norms need Gauss quadrature");
  }
  if (spec.kind == Kind::stability_seminorm && !coeffs) {
    throw InvalidArgument("error_norm: the stability seminorm needs the velocity");
  }
  const Grid& grid = *sol.grid;
  const int m = spec.samples > 0 ? spec.samples : default_samples(sol);
  const double h = grid.h();
  const double dx = h / m;
  const size_t stride = static_cast<size_t>(m) + 1;

  double sum = 0.0;
  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto& el = grid.element(e);
    if (spec.region == NormSpec::Region::interior &&
        (el.i < 2 || el.j < 2 || el.i + 3 > grid.nx() || el.j + 3 > grid.ny())) {
      continue;
    }
    const auto v = element_samples(sol, e, m);
    const Point o = grid.element_origin(e);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        const double u00 = v[j * stride + i], u10 = v[j * stride + i + 1];
        const double u11 = v[(j + 1) * stride + i + 1], u01 = v[(j + 1) * stride + i];
        if (quadrature == NormSpec::Quadrature::nodes) {
          const double c[4] = {u00, u10, u11, u01};
          for (int q = 0; q < 4; ++q) {
            const Point p{o.x + (i + (q == 1 || q == 2)) * dx, o.y + (j + (q >= 2)) * dx};
            const double err = exact.value(p) - c[q];
            sum += 0.25 * dx * dx * (spec.kind == Kind::l1 ? std::abs(err) : err * err);
          }
          continue;
        }
        for (int qb = 0; qb < 2; ++qb)
          for (int qa = 0; qa < 2; ++qa) {
            const double s = kGauss2[qa], t = kGauss2[qb];
            const Point p{o.x + (i + s) * dx, o.y + (j + t) * dx};
            const double w = 0.25 * dx * dx;
            switch (spec.kind) {
              case Kind::l1:
              case Kind::l2: {
                const double uh = (1 - s) * (1 - t) * u00 + s * (1 - t) * u10 + s * t * u11 + (1 - s) * t * u01;
                const double err = exact.value(p) - uh;
                sum += w * (spec.kind == Kind::l1 ? std::abs(err) : err * err);
                break;
              }
              case Kind::h1_seminorm:
              case Kind::stability_seminorm: {
                const Vec2 gh{((1 - t) * (u10 - u00) + t * (u11 - u01)) / dx,
                              ((1 - s) * (u01 - u00) + s * (u11 - u10)) / dx};
                const Vec2 ge = exact.gradient(p) - gh;
                if (spec.kind == Kind::h1_seminorm) {
                  sum += w * ge.dot(ge);
                } else {
                  const double d = coeffs->velocity_at(p).dot(ge);
                  sum += w * h * d * d;
                }
                break;
              }
            }
          }
      }
  }
  return spec.kind == Kind::l1 ? sum : std::sqrt(sum);
}

std::vector<double> eoc(const std::vector<double>& errors, const std::vector<int>& Ns) {
  if (errors.size() != Ns.size()) throw InvalidArgument("eoc: errors and Ns differ in length");
  std::vector<double> out;
  for (size_t i = 0; i + 1 < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || !(errors[i + 1] > 0.0)) throw InvalidArgument("eoc: errors must be positive");
    if (Ns[i + 1] <= Ns[i]) throw InvalidArgument("eoc: Ns must increase");
    out.push_back(std::log(errors[i] / errors[i + 1]) / std::log(static_cast<double>(Ns[i + 1]) / Ns[i]));
  }
  return out;
}

Extrema extrema(const Solution& sol, int m) {
  const LatticeSamples s = sample_lattice(sol, m);
  Extrema x;
  x.min = std::numeric_limits<double>::infinity();
  x.max = -std::numeric_limits<double>::infinity();
  for (int b = 0; b <= s.ny; ++b)
    for (int a = 0; a <= s.nx; ++a) {
      if (!s.is_active(a, b)) continue;
      const double v = s.at(a, b);
      if (v > x.max) {
        x.max = v;
        x.argmax = s.point(a, b);
      }
      if (v < x.min) {
        x.min = v;
        x.argmin = s.point(a, b);
      }
    }
  return x;
}

Extrema extrema_near(const Solution& sol, Point center, int radius, int m) {
  if (m <= 0) m = default_samples(sol);
  if (radius < 0) throw InvalidArgument("extrema_near: radius must be non-negative");
  const Grid& grid = *sol.grid;
  const auto& c = grid.element(grid.locate(center).element);
  std::vector<int> elements;
  for (int j = c.j - radius; j <= c.j + radius; ++j)
    for (int i = c.i - radius; i <= c.i + radius; ++i) {
      const int e = grid.element_at(i, j);
      if (e >= 0) elements.push_back(e);
    }
  return scan_elements(sol, elements, m);
}

Extrema vertex_extrema(const Solution& sol) {
  const Grid& grid = *sol.grid;
  Extrema x;
  x.min = std::numeric_limits<double>::infinity();
  x.max = -std::numeric_limits<double>::infinity();
  for (int v = 0; v < grid.num_vertices(); ++v) {
    const double u = sol.U[sol.dofs.vertex_dof(v)];
    if (u > x.max) {
      x.max = u;
      x.argmax = grid.vertex(v);
    }
    if (u < x.min) {
      x.min = u;
      x.argmin = grid.vertex(v);
    }
  }
  return x;
}

}  // namespace bz
