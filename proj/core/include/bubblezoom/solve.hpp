#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "bubblezoom/assembly.hpp"
#include "bubblezoom/bubbles.hpp"
#include "bubblezoom/linalg.hpp"
#include "bubblezoom/mesh.hpp"
#include "bubblezoom/problem.hpp"

namespace bz {

struct SolveStats {
  double table_seconds = 0.0;
  double assembly_seconds = 0.0;
  double solve_seconds = 0.0;
  int depth = 0;  // recursion levels of the bubble tables, 0 without bubbles
  SolveReport report;
};

/// Discrete solution u_h = u_L + u_B + u_S with everything needed to
/// evaluate it pointwise.
struct Solution {
  std::shared_ptr<const Grid> grid;
  Scheme requested = Scheme::galerkin;
  Scheme scheme = Scheme::galerkin;  // actually used (after the Pe_h < 1 guard)
  DofMap dofs;
  Vector U;
  std::shared_ptr<const BubbleBasis> basis;  // null without bubbles
  double time = 0.0;
  SolveStats stats;
};

/// Element bubble space of the rfb scheme. `single` is the classical RFB
/// space spanned by the one bubble with right-hand side 1, the sum of the
/// four nodal bubbles; its coefficients are stored tied in the four-bubble
/// layout. `nodal` uses the four bubbles independently.
enum class RfbBubbles { single, nodal };

struct DiscretizationOptions {
  Scheme scheme = Scheme::bmz;
  RfbBubbles rfb_bubbles = RfbBubbles::single;
  TauRule tau = TauRule::classic;
  PatchVelocity patch_velocity = PatchVelocity::element;
  SolverOptions solver{};
  /// Fall back to Galerkin when every element has Pe_h < 1.
  bool peclet_guard = true;
};

/// Largest element Peclet number |a_T| h / eps over the mesh.
double max_element_peclet(const Grid& grid, const Coefficients& coeffs);

/// Assembled operator, mass and load of one scheme on one mesh.
struct Discretization {
  std::shared_ptr<const Grid> grid;
  Scheme requested = Scheme::galerkin;
  Scheme scheme = Scheme::galerkin;
  DofMap dofs;
  std::shared_ptr<const BubbleBasis> basis;
  SplitOperator op;
  double epsilon = 1.0;
  TauRule tau = TauRule::classic;
  StabCache* cache = nullptr;
  SolveStats stats;
  /// Prolongation from the solved unknowns to the dof layout when element
  /// bubble coefficients are tied; 0 x 0 otherwise. op and load() act on
  /// the solved unknowns.
  SparseMatrix tie;

  bool tied() const { return tie.rows() > 0; }
  int unknowns() const { return tied() ? tie.cols() : dofs.total(); }
  Vector expand(const Vector& u) const;  // unknowns -> dof layout
  Vector reduce(const Vector& U) const;  // dof layout -> unknowns (exact for tied vectors)

  SparseMatrix form() const { return op.form(epsilon); }
  Vector load(const Coefficients& coeffs, double t) const;
};

/// Prolongation that gives all four element bubbles of an element one
/// shared coefficient. Vertex and patch dofs map to themselves.
SparseMatrix tie_element_bubbles(const DofMap& dofs);

Discretization discretize(std::shared_ptr<const Grid> grid, const Coefficients& coeffs,
                          const DiscretizationOptions& opts, StabCache& cache);

Solution solve_steady(std::shared_ptr<const Grid> grid, const Coefficients& coeffs, const BoundaryData& boundary,
                      const DiscretizationOptions& opts, StabCache& cache);

/// (M + dt/2 A) U^n = (M - dt/2 A) U^{n-1} + dt F(t_{n-1} + dt/2), with the
/// boundary rows replaced by identity rows. Factorizes once; dt may be
/// negative (backward stepping).
class CrankNicolson {
 public:
  CrankNicolson(const Discretization& disc, const Coefficients& coeffs, const BoundaryData& boundary, double dt);

  /// One step from time t; returns U at t + dt. Vectors are in the
  /// discretization's unknowns.
  Vector step(const Vector& U, double t, SolveReport* report = nullptr) const;
  double dt() const { return dt_; }

 private:
  const Discretization* disc_;
  const Coefficients* coeffs_;
  const BoundaryData* boundary_;
  double dt_;
  SparseMatrix rhs_op_;
  std::optional<Vector> steady_load_;
  std::unique_ptr<LinearSolver> solver_;
};

/// Initial coefficient vector: nodal interpolation of u0, bubbles 0.
Vector initial_vector(const Grid& grid, const DofMap& dofs, const InitialData& initial);

using Observer = std::function<void(const Solution&, int step)>;

struct TransientOptions {
  DiscretizationOptions discretization{};
  double dt = 0.01;
  double T = 1.0;
};

/// Runs Crank-Nicolson from t = 0 to T; the observer sees U^0 and every
/// U^n. Returns the final state.
Solution crank_nicolson(std::shared_ptr<const Grid> grid, const Coefficients& coeffs, const BoundaryData& boundary,
                        const InitialData& initial, const TransientOptions& opts, StabCache& cache,
                        const Observer& observer = {});

}  // namespace bz
