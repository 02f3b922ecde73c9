#include "bubblezoom/linalg.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#ifdef BUBBLEZOOM_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include "bubblezoom/types.hpp"

namespace bz {

SparseMatrix::SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), m_(rows, cols) {}

SparseMatrix::SparseMatrix(Storage m)
    : rows_(static_cast<int>(m.rows())), cols_(static_cast<int>(m.cols())), finalized_(true), m_(std::move(m)) {
  m_.makeCompressed();
}

void SparseMatrix::add(int row, int col, double value) {
  if (finalized_) throw Error("SparseMatrix::add after finalize");
  triplets_.emplace_back(row, col, value);
}

void SparseMatrix::finalize() {
  if (finalized_) return;
  m_.resize(rows_, cols_);
  m_.setFromTriplets(triplets_.begin(), triplets_.end());
  m_.makeCompressed();
  triplets_.clear();
  triplets_.shrink_to_fit();
  finalized_ = true;
}

double SparseMatrix::coeff(int row, int col) const { return storage().coeff(row, col); }

const SparseMatrix::Storage& SparseMatrix::storage() const {
  if (!finalized_) throw Error("SparseMatrix used before finalize");
  return m_;
}

SparseMatrix::Storage& SparseMatrix::mutable_storage() {
  if (!finalized_) throw Error("SparseMatrix used before finalize");
  return m_;
}

Vector SparseMatrix::operator*(const Vector& x) const { return storage() * x; }

void SparseMatrix::set_identity_row(int row) {
  auto& m = mutable_storage();
  bool has_diag = false;
  for (Storage::InnerIterator it(m, row); it; ++it) {
    if (it.col() == row) {
      it.valueRef() = 1.0;
      has_diag = true;
    } else {
      it.valueRef() = 0.0;
    }
  }
  if (!has_diag) throw Error("set_identity_row: no stored diagonal in row " + std::to_string(row));
}

SparseMatrix combine(double a, const SparseMatrix& A, double b, const SparseMatrix& B) {
  SparseMatrix::Storage m = a * A.storage() + b * B.storage();
  return SparseMatrix(std::move(m));
}

struct LinearSolver::Impl {
  using ColMajor = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
  SolverOptions opts;
  const SparseMatrix* A = nullptr;
  SparseMatrix::Storage A_copy;
  ColMajor A_col;  // the LU backends may keep pointers into the factorized matrix
  std::string method;
#ifdef BUBBLEZOOM_HAVE_UMFPACK
  Eigen::UmfPackLU<ColMajor> lu;
  static constexpr const char* kLuName = "umfpack-lu";
#else
  Eigen::SparseLU<ColMajor, Eigen::COLAMDOrdering<int>> lu;
  static constexpr const char* kLuName = "sparse-lu";
#endif
  Eigen::BiCGSTAB<SparseMatrix::Storage, Eigen::IncompleteLUT<double, int>> krylov;
  bool use_lu = false;
};

LinearSolver::LinearSolver(const SparseMatrix& A, SolverOptions opts) : impl_(std::make_unique<Impl>()) {
  if (A.rows() != A.cols()) throw InvalidArgument("LinearSolver: matrix is not square");
  impl_->opts = opts;
  impl_->A_copy = A.storage();
  if (opts.method == SolverOptions::Method::direct) {
    impl_->A_col = impl_->A_copy;
    impl_->lu.analyzePattern(impl_->A_col);
    impl_->lu.factorize(impl_->A_col);
    if (impl_->lu.info() == Eigen::Success) {
      impl_->use_lu = true;
      impl_->method = Impl::kLuName;
      return;
    }
  }
  impl_->krylov.preconditioner().setDroptol(1e-6);
  impl_->krylov.preconditioner().setFillfactor(20);
  impl_->krylov.setTolerance(opts.tolerance * 0.1);
  impl_->krylov.setMaxIterations(opts.max_iterations);
  impl_->krylov.compute(impl_->A_copy);
  if (impl_->krylov.info() != Eigen::Success) {
    throw SolverError("sparse factorization failed (structurally singular matrix?)");
  }
  impl_->method = "bicgstab-ilut";
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

const std::string& LinearSolver::method() const { return impl_->method; }

Vector LinearSolver::solve(const Vector& b, SolveReport* report) const {
  const auto& A = impl_->A_copy;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    if (report) *report = {impl_->method, 0.0, 0};
    return Vector::Zero(b.size());
  }
  Vector x;
  int iterations = 0;
  if (impl_->use_lu) {
    x = impl_->lu.solve(b);
    for (int k = 0; k < impl_->opts.refinement_steps; ++k) {
      const Vector r = b - A * x;
      if (r.norm() <= impl_->opts.tolerance * 1e-2 * bnorm) break;
      x += impl_->lu.solve(r);
      ++iterations;
    }
  } else {
    x = impl_->krylov.solve(b);
    iterations = static_cast<int>(impl_->krylov.iterations());
  }
  const double rel = (b - A * x).norm() / bnorm;
  if (report) *report = {impl_->method, rel, iterations};
  if (!(rel <= impl_->opts.tolerance)) {
    std::ostringstream msg;
    msg << impl_->method << " did not reach the residual tolerance: achieved " << rel << " > "
        << impl_->opts.tolerance;
    throw SolverError(msg.str());
  }
  return x;
}

Vector solve(const SparseMatrix& A, const Vector& b, SolverOptions opts, SolveReport* report) {
  return LinearSolver(A, opts).solve(b, report);
}

void write_matrix_market(const SparseMatrix& A, std::ostream& os) {
  const auto& m = A.storage();
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  os << std::setprecision(17);
  for (int r = 0; r < m.outerSize(); ++r)
    for (SparseMatrix::Storage::InnerIterator it(m, r); it; ++it)
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

}  // namespace bz
