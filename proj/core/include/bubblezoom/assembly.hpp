#pragma once

#include <array>
#include <functional>
#include <vector>

#include "bubblezoom/bubbles.hpp"
#include "bubblezoom/linalg.hpp"
#include "bubblezoom/mesh.hpp"
#include "bubblezoom/problem.hpp"

namespace bz {

/// Local matrices of one element of size h in physical scale. Row index is
/// the test function, local numbering as in local_basis.hpp.
struct ElementMatrices {
  LocalMatrix diffusion = LocalMatrix::Zero();  // (grad psi_j, grad psi_i)
  LocalMatrix advection = LocalMatrix::Zero();  // (a . grad psi_j, psi_i)
  LocalMatrix reaction = LocalMatrix::Zero();   // (c psi_j, psi_i)
  LocalMatrix mass = LocalMatrix::Zero();       // (psi_j, psi_i)
  LocalVector integral = LocalVector::Zero();   // (1, psi_i)
};

/// Bilinear block for an element of size h. Velocity and reaction are
/// sampled at the 2x2 Gauss points, ordered (q0,q0), (q1,q0), (q0,q1), (q1,q1).
ElementMatrices q1_element_matrices(double h, const std::array<Vec2, 4>& a, const std::array<double, 4>& c);
ElementMatrices q1_element_matrices(double h, Point origin, const Coefficients& coeffs);

/// Adds every entry involving a bubble (index >= 4) from reference tables
/// scaled to element size h. Bubbles scale by h: psi(x) = h b(x/h).
/// c_bar is the reaction frozen on the element.
void add_bubble_entries(ElementMatrices& m, double h, const ReferenceTables& t, double c_bar);

/// Global dof of each local function of element e, -1 when absent.
std::array<int, local::kCount> local_dofs(const Grid& grid, const DofMap& dofs, int e);

/// Globally assembled forms, kept apart so that time stepping and the
/// bubble recursion can recombine them.
struct SplitOperator {
  SparseMatrix diffusion;
  SparseMatrix advection;
  SparseMatrix reaction;
  SparseMatrix mass;
  Vector integral;
  /// Streamline terms of SUPG; empty (0 x 0) for the other schemes.
  SparseMatrix stabilization;

  /// eps D + Adv + R (+ stabilization).
  SparseMatrix form(double eps) const;
};

SplitOperator assemble_split(const Grid& grid, const DofMap& dofs,
                             const std::function<ElementMatrices(int)>& element_matrices);

/// How patch bubbles of variable-velocity problems freeze the velocity.
/// `element` (default) takes every entry of an element from the table of
/// its own mean velocity, so each element matrix is a true Gram-type
/// matrix. `mean` takes entries touching a half patch from the table of
/// the patch mean; the local matrices then mix functions from different
/// tables and the mass matrix can become indefinite, which makes
/// Crank-Nicolson unstable.
enum class PatchVelocity { element, mean };

/// Bubble functions of every element of a global mesh.
class BubbleBasis {
 public:
  /// refs[e][0] serves the element bubbles of e, refs[e][1 + s] the half
  /// patch bubble of side s.
  BubbleBasis(const Grid& grid, double h, std::vector<std::array<TableRef, 5>> refs,
              std::vector<ReferenceTables> tables);

  double h() const { return h_; }
  int M() const { return M_; }
  const ReferenceTables& tables(int e) const { return tables_[e]; }
  const std::array<TableRef, 5>& refs(int e) const { return refs_[e]; }
  /// Reference nodal value of local bubble k (4..11) of element e at node
  /// (a, b) of its (M+1)^2 lattice.
  double field_at(int e, int k, int a, int b) const;
  /// Whole lattice field of local bubble k (4..11) of element e.
  FineField field(int e, int k) const;
  /// Deepest recursion among the tables used.
  int depth() const;

 private:
  double h_;
  int M_ = 0;
  std::vector<std::array<TableRef, 5>> refs_;
  std::vector<ReferenceTables> tables_;
};

BubbleBasis build_bubble_basis(const Grid& grid, const Coefficients& coeffs, StabCache& cache,
                               PatchVelocity mode = PatchVelocity::element);

/// a(., .) and (., .) on the discrete space of a scheme. For rfb and bmz
/// the basis must be given.
SplitOperator assemble_operator(const Grid& grid, const DofMap& dofs, const Coefficients& coeffs,
                                const BubbleBasis* basis);

/// (f(t), psi_i). Bilinear rows by 3x3 Gauss; bubble rows use the element
/// mean of f times the bubble integral.
Vector assemble_load(const Grid& grid, const DofMap& dofs, const Coefficients& coeffs, const BubbleBasis* basis,
                     double t = 0.0);

/// Replaces boundary vertex rows by identity rows and sets the right-hand
/// side to g there. Modifies A in place.
void apply_dirichlet(SparseMatrix& A, Vector& b, const Grid& grid, const DofMap& dofs,
                     const std::function<double(Point)>& g);
/// Row replacement only (for time stepping, where the rhs changes).
void apply_dirichlet_rows(SparseMatrix& A, const Grid& grid, const DofMap& dofs);
void apply_dirichlet_values(Vector& b, const Grid& grid, const DofMap& dofs, const std::function<double(Point)>& g);

enum class TauRule { classic, rfb_integral };

/// Stabilization parameter of an element with mean velocity a.
///   classic:      h / (2|a|) when |a| h / eps >= 1, else 0
///   rfb_integral: (1/|T|) sum_k (1, b_k) with the element bubbles b_k
double supg_tau(TauRule rule, double h, double eps, Vec2 a, const ReferenceTables* element_tables = nullptr);

/// Bilinear system with the streamline test functions v + tau_T a . grad v.
/// On squares Lap u = 0 elementwise, so
///   op.stabilization = sum_T tau_T (a . grad u + c u, a . grad v)_T,
///   op.mass          = (u, v) + sum_T tau_T (u, a . grad v)_T,
///   load             = (f, v) + sum_T tau_T (f, a . grad v)_T.
struct SupgSystem {
  SplitOperator op;
  Vector load;
  std::vector<double> tau;
};

SupgSystem assemble_supg(const Grid& grid, const DofMap& dofs, const Coefficients& coeffs, TauRule rule,
                         StabCache* cache = nullptr, double t = 0.0);

}  // namespace bz
