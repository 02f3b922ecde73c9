#include "bubblezoom/solve.hpp"

#include <chrono>
#include <cmath>

namespace bz {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// P^T A P
SparseMatrix restrict_to(const SparseMatrix& P, const SparseMatrix& A) {
  if (A.rows() == 0) return A;
  SparseMatrix::Storage r = P.storage().transpose() * A.storage() * P.storage();
  return SparseMatrix(std::move(r));
}

}  // namespace

double max_element_peclet(const Grid& grid, const Coefficients& coeffs) {
  double pe = 0.0;
  for (int e = 0; e < grid.num_elements(); ++e) {
    const Vec2 a = element_mean_velocity(coeffs, grid.element_origin(e), grid.h());
    pe = std::max(pe, element_peclet(coeffs.epsilon, grid.h(), a));
  }
  return pe;
}

SparseMatrix tie_element_bubbles(const DofMap& dofs) {
  const int ne = dofs.num_element_bubble_dofs / 4;
  const int nv = dofs.num_vertex_dofs;
  SparseMatrix P(dofs.total(), nv + ne + dofs.num_patch_bubble_dofs);
  P.reserve(static_cast<size_t>(dofs.total()));
  for (int v = 0; v < nv; ++v) P.add(dofs.vertex_dof(v), v, 1.0);
  for (int e = 0; e < ne; ++e)
    for (int k = 0; k < 4; ++k) P.add(dofs.element_bubble_dof(e, k), nv + e, 1.0);
  for (int s = 0; s < dofs.num_patch_bubble_dofs; ++s) P.add(dofs.patch_bubble_dof(s), nv + ne + s, 1.0);
  P.finalize();
  return P;
}

Vector Discretization::expand(const Vector& u) const { return tied() ? tie * u : u; }

Vector Discretization::reduce(const Vector& U) const {
  if (!tied()) return U;
  // every column of the tie has its first entry at the representative dof
  Vector u = Vector::Zero(tie.cols());
  const auto& P = tie.storage();
  for (int r = P.outerSize() - 1; r >= 0; --r)
    for (SparseMatrix::Storage::InnerIterator it(P, r); it; ++it) u[it.col()] = U[r];
  return u;
}

Vector Discretization::load(const Coefficients& coeffs, double t) const {
  if (scheme == Scheme::supg) return assemble_supg(*grid, dofs, coeffs, tau, cache, t).load;
  Vector b = assemble_load(*grid, dofs, coeffs, basis.get(), t);
  if (tied()) return tie.storage().transpose() * b;
  return b;
}

Discretization discretize(std::shared_ptr<const Grid> grid, const Coefficients& coeffs,
                          const DiscretizationOptions& opts, StabCache& cache) {
  coeffs.validate();
  Discretization d;
  d.grid = std::move(grid);
  d.requested = opts.scheme;
  d.scheme = opts.scheme;
  d.epsilon = coeffs.epsilon;
  d.tau = opts.tau;
  d.cache = &cache;
  if (opts.peclet_guard && opts.scheme != Scheme::galerkin && max_element_peclet(*d.grid, coeffs) < 1.0) {
    d.scheme = Scheme::galerkin;
  }
  d.dofs = dof_layout(*d.grid, d.scheme);

  auto t0 = Clock::now();
  if (d.scheme == Scheme::rfb || d.scheme == Scheme::bmz) {
    d.basis = std::make_shared<const BubbleBasis>(build_bubble_basis(*d.grid, coeffs, cache, opts.patch_velocity));
    d.stats.depth = d.basis->depth();
  }
  d.stats.table_seconds = seconds_since(t0);

  t0 = Clock::now();
  if (d.scheme == Scheme::supg) {
    d.op = assemble_supg(*d.grid, d.dofs, coeffs, opts.tau, &cache).op;
  } else {
    d.op = assemble_operator(*d.grid, d.dofs, coeffs, d.basis.get());
  }
  if (d.scheme == Scheme::rfb && opts.rfb_bubbles == RfbBubbles::single) {
    d.tie = tie_element_bubbles(d.dofs);
    for (SparseMatrix* m : {&d.op.diffusion, &d.op.advection, &d.op.reaction, &d.op.mass, &d.op.stabilization}) {
      *m = restrict_to(d.tie, *m);
    }
    if (d.op.integral.size() > 0) d.op.integral = d.tie.storage().transpose() * d.op.integral;
  }
  d.stats.assembly_seconds = seconds_since(t0);
  return d;
}

Solution solve_steady(std::shared_ptr<const Grid> grid, const Coefficients& coeffs, const BoundaryData& boundary,
                      const DiscretizationOptions& opts, StabCache& cache) {
  Discretization d = discretize(std::move(grid), coeffs, opts, cache);
  auto t0 = Clock::now();
  SparseMatrix A = d.form();
  Vector b = d.load(coeffs, 0.0);
  apply_dirichlet(A, b, *d.grid, d.dofs, boundary.g);
  d.stats.assembly_seconds += seconds_since(t0);

  t0 = Clock::now();
  Solution s;
  s.U = d.expand(solve(A, b, opts.solver, &d.stats.report));
  d.stats.solve_seconds = seconds_since(t0);
  s.grid = d.grid;
  s.requested = d.requested;
  s.scheme = d.scheme;
  s.dofs = d.dofs;
  s.basis = d.basis;
  s.stats = d.stats;
  return s;
}

CrankNicolson::CrankNicolson(const Discretization& disc, const Coefficients& coeffs, const BoundaryData& boundary,
                             double dt)
    : disc_(&disc), coeffs_(&coeffs), boundary_(&boundary), dt_(dt) {
  if (dt == 0.0 || !std::isfinite(dt)) throw InvalidArgument("time step must be finite and nonzero");
  const SparseMatrix A = disc.form();
  SparseMatrix lhs = combine(1.0, disc.op.mass, 0.5 * dt, A);
  rhs_op_ = combine(1.0, disc.op.mass, -0.5 * dt, A);
  apply_dirichlet_rows(lhs, *disc.grid, disc.dofs);
  if (coeffs.steady_source) steady_load_ = disc.load(coeffs, 0.0);
  solver_ = std::make_unique<LinearSolver>(lhs);
}

Vector CrankNicolson::step(const Vector& U, double t, SolveReport* report) const {
  Vector b = rhs_op_ * U + dt_ * (steady_load_ ? *steady_load_ : disc_->load(*coeffs_, t + 0.5 * dt_));
  apply_dirichlet_values(b, *disc_->grid, disc_->dofs, boundary_->g);
  return solver_->solve(b, report);
}

Vector initial_vector(const Grid& grid, const DofMap& dofs, const InitialData& initial) {
  Vector U = Vector::Zero(dofs.total());
  if (!initial.u0) return U;
  for (int v = 0; v < grid.num_vertices(); ++v) U[dofs.vertex_dof(v)] = initial.u0(grid.vertex(v));
  return U;
}

Solution crank_nicolson(std::shared_ptr<const Grid> grid, const Coefficients& coeffs, const BoundaryData& boundary,
                        const InitialData& initial, const TransientOptions& opts, StabCache& cache,
                        const Observer& observer) {
  if (!(opts.dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(opts.T >= opts.dt)) throw InvalidArgument("T must be at least dt");
  const double ratio = opts.T / opts.dt;
  const long steps = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-6 * ratio) {
    throw InvalidArgument("T must be an integer multiple of dt");
  }

  Discretization d = discretize(std::move(grid), coeffs, opts.discretization, cache);
  auto t0 = Clock::now();
  const CrankNicolson cn(d, coeffs, boundary, opts.dt);
  d.stats.assembly_seconds += seconds_since(t0);

  Solution s;
  s.grid = d.grid;
  s.requested = d.requested;
  s.scheme = d.scheme;
  s.dofs = d.dofs;
  s.basis = d.basis;
  s.U = initial_vector(*d.grid, d.dofs, initial);
  s.stats = d.stats;
  if (observer) observer(s, 0);

  Vector u = d.reduce(s.U);
  t0 = Clock::now();
  for (long n = 1; n <= steps; ++n) {
    const double t_prev = (n - 1) * opts.dt;
    try {
      u = cn.step(u, t_prev, &s.stats.report);
      s.U = d.expand(u);
    } catch (const SolverError& e) {
      throw SolverError("time step " + std::to_string(n) + ": " + e.what());
    }
    s.time = n * opts.dt;
    if (observer) observer(s, static_cast<int>(n));
  }
  s.stats.solve_seconds = seconds_since(t0);
  return s;
}

}  // namespace bz
