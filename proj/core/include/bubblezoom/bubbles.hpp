#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "bubblezoom/linalg.hpp"
#include "bubblezoom/local_basis.hpp"
#include "bubblezoom/mesh.hpp"
#include "bubblezoom/symmetry.hpp"
#include "bubblezoom/types.hpp"

namespace bz {

using LocalMatrix = Eigen::Matrix<double, local::kCount, local::kCount>;
using LocalVector = Eigen::Matrix<double, local::kCount, 1>;

/// Coefficients of a bubble problem posed on a unit reference element.
/// A physical element of size h with data (eps, a, c) maps to (eps/h, a, c h);
/// the Peclet number |a|/eps of the reference problem equals |a| h / eps.
struct ScaledCoefficients {
  double eps = 1.0;
  Vec2 a{};
  double c = 0.0;
  int level = 1;            // 1 for tables used directly by the global mesh
  double physical_h = 1.0;  // size of the elements this problem stands for

  double peclet() const { return a.norm() / eps; }
};

/// Maps (eps, a, c) on elements of size h to the unit reference element.
/// Forms scale as a_h(u,v) = h a_ref, (u,v)_h = h^2 (u,v)_ref.
ScaledCoefficients rescale(double eps, Vec2 a, double c, double h, int level = 1,
                           double physical_h = -1.0);

/// Smallest d >= 0 with pe_h / M^d < 1.
int recursion_depth(double pe_h, int M);

enum class Geometry { element, horizontal_patch, vertical_patch };

/// Uniform grid of squares of side 1/M on the reference domain of a
/// geometry class: (0,1)^2, (0,2)x(0,1) or (0,1)x(0,2).
Grid refine_patch(Geometry geometry, int M);

/// Nodal values of a function on a uniform lattice over [0,lx] x [0,ly],
/// evaluated by bilinear interpolation.
struct FineField {
  int mx = 0;
  int my = 0;
  double lx = 1.0;
  double ly = 1.0;
  std::vector<double> values;  // (my+1) rows of (mx+1), row-major

  FineField() = default;
  FineField(int mx, int my, double lx, double ly);

  double& at(int a, int b) { return values[static_cast<size_t>(b) * (mx + 1) + a]; }
  double at(int a, int b) const { return values[static_cast<size_t>(b) * (mx + 1) + a]; }
  double value(Point p) const;
  Vec2 gradient(Point p) const;
  bool same_lattice(const FineField& o) const;
};

/// Interactions among the twelve local functions of a unit reference
/// element, for one set of scaled coefficients. Row index = test function.
///   diffusion(i,j) = (grad psi_j, grad psi_i)
///   advection(i,j) = (a . grad psi_j, psi_i)
///   mass(i,j)      = (psi_j, psi_i)
///   integral(i)    = (1, psi_i)
/// Bubble functions are the reference ones: a_ref(b, v) = (rhs, v).
struct ElementTable {
  ScaledCoefficients coeffs;
  int M = 20;
  int depth = 1;  // bubble levels from here down, this one included
  double max_residual = 0.0;  // largest relative residual of the local solves
  LocalMatrix diffusion = LocalMatrix::Zero();
  LocalMatrix advection = LocalMatrix::Zero();
  LocalMatrix mass = LocalMatrix::Zero();
  LocalVector integral = LocalVector::Zero();
  /// Nodal parts of the eight bubble functions (local indices 4..11) on the
  /// (M+1)^2 lattice of the element.
  std::array<FineField, 8> fields;

  LocalMatrix form() const { return coeffs.eps * diffusion + advection + coeffs.c * mass; }

  double element_bubble_integral(int k) const { return integral[local::kBubble + k]; }
  /// (1, b_S) over the whole two-element patch.
  double patch_bubble_integral(PatchOrientation o) const;
  /// a(b_S, b_S) over the whole patch.
  double patch_self_form(PatchOrientation o) const;
  /// a(b_S, b_T^k) with T the first (left/bottom) element of the patch.
  double patch_element_form(PatchOrientation o, int k) const;
};

/// Reference-element matrices of the twelve local functions (same
/// conventions as ElementTable), possibly mixed from several tables.
struct ReferenceTables {
  LocalMatrix diffusion = LocalMatrix::Zero();
  LocalMatrix advection = LocalMatrix::Zero();
  LocalMatrix mass = LocalMatrix::Zero();
  LocalVector integral = LocalVector::Zero();
};

/// An ElementTable seen through a square symmetry: local function i of the
/// view is local function g^-1(i) of the stored table.
class TableRef {
 public:
  TableRef() = default;
  TableRef(std::shared_ptr<const ElementTable> table, SquareSymmetry g) : table_(std::move(table)), g_(g) {}

  explicit operator bool() const { return static_cast<bool>(table_); }
  const ElementTable& table() const { return *table_; }
  const std::shared_ptr<const ElementTable>& shared() const { return table_; }
  const SquareSymmetry& symmetry() const { return g_; }

  LocalMatrix diffusion() const { return permute(table_->diffusion); }
  LocalMatrix advection() const { return permute(table_->advection); }
  LocalMatrix mass() const { return permute(table_->mass); }
  LocalVector integral() const;
  ReferenceTables reference() const;
  /// Nodal value of bubble function k (4..11) at lattice node (a, b).
  double field_at(int k, int a, int b) const;
  /// Whole lattice field of bubble function k (4..11).
  FineField field(int k) const;

 private:
  LocalMatrix permute(const LocalMatrix& m) const;
  std::shared_ptr<const ElementTable> table_;
  SquareSymmetry g_;
};

struct StabCacheOptions {
  int M = 20;
  /// Reuse tables across velocities related by a symmetry of the square.
  bool use_symmetry = true;
  SolverOptions solver{};
};

struct StabCacheStats {
  int tables = 0;         // distinct tables computed
  int bubble_solves = 0;  // six per table
  int max_depth = 0;
  double max_residual = 0.0;
};

/// Thread-safe store of ElementTables keyed by (eps, a, c) at fixed M.
class StabCache {
 public:
  explicit StabCache(StabCacheOptions opts = {});

  /// Table for the given coefficients, computing it (and everything below
  /// it) on first use.
  TableRef get(const ScaledCoefficients& sc);
  /// Lookup without computing.
  std::optional<TableRef> find(const ScaledCoefficients& sc) const;
  void insert(std::shared_ptr<const ElementTable> table);

  StabCacheStats stats() const;
  std::vector<std::shared_ptr<const ElementTable>> tables() const;
  const StabCacheOptions& options() const { return opts_; }

 private:
  using Key = std::tuple<double, double, double, double>;
  std::pair<Key, SquareSymmetry> key_for(const ScaledCoefficients& sc) const;

  StabCacheOptions opts_;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const ElementTable>> tables_;
  StabCacheStats stats_;
};

/// Local bubble problems of one geometry class at one level: the fine
/// system is assembled once (plain Galerkin when child is empty, otherwise
/// bubble-enriched with the child tables) and factorized.
class FineSolve {
 public:
  FineSolve(Geometry geometry, const ScaledCoefficients& sc, int M, const std::optional<TableRef>& child,
            const SolverOptions& solver = {});

  const Grid& grid() const { return grid_; }
  const DofMap& dofs() const { return dofs_; }
  bool stabilized() const { return child_.has_value(); }

  /// Bubble with right-hand side (phi_k, v), phi_k the coarse nodal
  /// function k of the unit element (element geometry only).
  Vector solve_nodal_rhs(int k, SolveReport* report = nullptr) const;
  /// Bubble with right-hand side (1, v).
  Vector solve_unit_rhs(SolveReport* report = nullptr) const;
  /// Nodal part of a fine coefficient vector.
  FineField nodal_field(const Vector& coefficients) const;
  /// Local 12-vector of cell (i, j) of this fine grid.
  LocalVector gather(const Vector& coefficients, int i, int j) const;

  /// Physical-scale local matrices shared by every fine cell.
  const LocalMatrix& cell_diffusion() const { return cell_d_; }
  const LocalMatrix& cell_advection() const { return cell_adv_; }
  const LocalMatrix& cell_mass() const { return cell_m_; }
  const LocalVector& cell_integral() const { return cell_int_; }

 private:
  Geometry geometry_;
  ScaledCoefficients sc_;
  int M_;
  std::optional<TableRef> child_;
  Grid grid_;
  DofMap dofs_;
  LocalMatrix cell_d_, cell_adv_, cell_m_;
  LocalVector cell_int_;
  SparseMatrix mass_;
  Vector integral_;
  std::unique_ptr<LinearSolver> solver_;
};

/// One recursion step: solves the six bubble problems of the reference
/// element and its two patches (recursing through the cache when the fine
/// Peclet number |a|/(eps M) is >= 1) and tabulates all interactions.
ElementTable element_contribs(const ScaledCoefficients& sc, StabCache& cache);

/// Nodal part of a single local bubble solve on the whole reference domain
/// of its geometry class. rhs_nodal in 0..3 selects (phi_k, v); -1 selects
/// the constant 1.
FineField solve_local(const ScaledCoefficients& sc, Geometry geometry, int rhs_nodal,
                      const std::optional<TableRef>& child, int M);

enum class Form { operator_form, diffusion, advection, mass };

/// Quadrature (2x2 Gauss per lattice cell) of a form applied to two fields
/// on the same lattice: form(u, v) with u the trial and v the test field.
double pair(Form form, const FineField& u, const FineField& v, const ScaledCoefficients& sc);

/// Integral over the square of side h of the inflow travel-time function
/// solving a . grad b = 1, b = 0 on the inflow boundary.
double pyramid_integral(Vec2 a, double h);

}  // namespace bz
