#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Sparse>

namespace bz {

using Vector = Eigen::VectorXd;

/// Sparse square-or-rectangular matrix with a triplet builder stage and
/// compressed row storage after finalize(). Duplicate triplets are summed.
class SparseMatrix {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

  SparseMatrix() = default;
  SparseMatrix(int rows, int cols);
  explicit SparseMatrix(Storage m);

  void add(int row, int col, double value);
  void reserve(size_t n) { triplets_.reserve(n); }
  void finalize();
  bool finalized() const { return finalized_; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double coeff(int row, int col) const;

  const Storage& storage() const;
  Storage& mutable_storage();

  Vector operator*(const Vector& x) const;

  /// Replaces the row by the identity row (requires a stored diagonal).
  void set_identity_row(int row);

 private:
  int rows_ = 0;
  int cols_ = 0;
  bool finalized_ = false;
  std::vector<Eigen::Triplet<double, int>> triplets_;
  Storage m_;
};

/// a*A + b*B for finalized matrices of equal shape.
SparseMatrix combine(double a, const SparseMatrix& A, double b, const SparseMatrix& B);

struct SolverOptions {
  enum class Method { direct, iterative };
  Method method = Method::direct;
  double tolerance = 1e-10;
  int max_iterations = 5000;
  int refinement_steps = 3;
};

struct SolveReport {
  std::string method;
  double relative_residual = 0.0;
  int iterations = 0;
};

/// Factorizes once, solves many right-hand sides. Sparse LU with partial
/// pivoting by default; BiCGSTAB with ILUT when requested or when the
/// factorization fails. Every solve checks its residual and throws
/// SolverError when it exceeds the tolerance.
class LinearSolver {
 public:
  explicit LinearSolver(const SparseMatrix& A, SolverOptions opts = {});
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  Vector solve(const Vector& b, SolveReport* report = nullptr) const;
  const std::string& method() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Vector solve(const SparseMatrix& A, const Vector& b, SolverOptions opts = {},
             SolveReport* report = nullptr);

void write_matrix_market(const SparseMatrix& A, std::ostream& os);

}  // namespace bz
