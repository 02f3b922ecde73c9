#include "bubblezoom/bubbles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bubblezoom/assembly.hpp"

namespace bz {

namespace {

constexpr double kGauss2 = 0.21132486540518711775;

// Fine cell matrices at one level: bilinear block exact for constant data,
// bubble blocks from the child table when the level is stabilized.
ElementMatrices fine_cell_matrices(const ScaledCoefficients& sc, int M, const std::optional<TableRef>& child) {
  const double delta = 1.0 / M;
  std::array<Vec2, 4> a;
  std::array<double, 4> c;
  a.fill(sc.a);
  c.fill(sc.c);
  ElementMatrices m = q1_element_matrices(delta, a, c);
  if (child) add_bubble_entries(m, delta, child->reference(), sc.c);
  return m;
}

}  // namespace

ScaledCoefficients rescale(double eps, Vec2 a, double c, double h, int level, double physical_h) {
  if (!(h > 0.0)) throw InvalidArgument("rescale: h must be positive");
  return {eps / h, a, c * h, level, physical_h < 0.0 ? h : physical_h};
}

int recursion_depth(double pe_h, int M) {
  if (M < 2) throw InvalidArgument("recursion_depth: M must be at least 2");
  int d = 0;
  while (!(pe_h < 1.0)) {
    pe_h /= M;
    ++d;
  }
  return d;
}

Grid refine_patch(Geometry geometry, int M) {
  if (M < 2) throw InvalidArgument("refine_patch: M must be at least 2");
  switch (geometry) {
    case Geometry::element: return Grid::build({0.0, 0.0}, {1.0, 1.0}, M, M);
    case Geometry::horizontal_patch: return Grid::build({0.0, 0.0}, {2.0, 1.0}, 2 * M, M);
    case Geometry::vertical_patch: return Grid::build({0.0, 0.0}, {1.0, 2.0}, M, 2 * M);
  }
  throw InvalidArgument("refine_patch: unknown geometry");
}

// ---------------------------------------------------------------------------
// FineField

FineField::FineField(int mx_, int my_, double lx_, double ly_)
    : mx(mx_), my(my_), lx(lx_), ly(ly_), values(static_cast<size_t>(mx_ + 1) * (my_ + 1), 0.0) {}

namespace {

struct CellCoord {
  int i, j;
  double s, t;  // local coordinates in the lattice cell
};

CellCoord cell_of(const FineField& f, Point p) {
  const double sx = std::clamp(p.x / f.lx, 0.0, 1.0) * f.mx;
  const double sy = std::clamp(p.y / f.ly, 0.0, 1.0) * f.my;
  const int i = std::min(static_cast<int>(sx), f.mx - 1);
  const int j = std::min(static_cast<int>(sy), f.my - 1);
  return {i, j, sx - i, sy - j};
}

}  // namespace

double FineField::value(Point p) const {
  const auto c = cell_of(*this, p);
  return (1 - c.s) * (1 - c.t) * at(c.i, c.j) + c.s * (1 - c.t) * at(c.i + 1, c.j) + c.s * c.t * at(c.i + 1, c.j + 1) +
         (1 - c.s) * c.t * at(c.i, c.j + 1);
}

Vec2 FineField::gradient(Point p) const {
  const auto c = cell_of(*this, p);
  const double dx = lx / mx, dy = ly / my;
  const double u00 = at(c.i, c.j), u10 = at(c.i + 1, c.j), u11 = at(c.i + 1, c.j + 1), u01 = at(c.i, c.j + 1);
  return {((1 - c.t) * (u10 - u00) + c.t * (u11 - u01)) / dx, ((1 - c.s) * (u01 - u00) + c.s * (u11 - u10)) / dy};
}

bool FineField::same_lattice(const FineField& o) const {
  return mx == o.mx && my == o.my && lx == o.lx && ly == o.ly;
}

// ---------------------------------------------------------------------------
// ElementTable / TableRef

double ElementTable::patch_bubble_integral(PatchOrientation o) const {
  using local::kPatch;
  return o == PatchOrientation::horizontal ? integral[kPatch + 1] + integral[kPatch + 3]
                                           : integral[kPatch + 0] + integral[kPatch + 2];
}

double ElementTable::patch_self_form(PatchOrientation o) const {
  using local::kPatch;
  const LocalMatrix a = form();
  return o == PatchOrientation::horizontal ? a(kPatch + 1, kPatch + 1) + a(kPatch + 3, kPatch + 3)
                                           : a(kPatch + 0, kPatch + 0) + a(kPatch + 2, kPatch + 2);
}

double ElementTable::patch_element_form(PatchOrientation o, int k) const {
  // On the first element of a horizontal patch b_S is its right-side half,
  // on the first element of a vertical patch its top-side half.
  const int s = o == PatchOrientation::horizontal ? local::kPatch + 1 : local::kPatch + 2;
  return form()(local::kBubble + k, s);
}

LocalMatrix TableRef::permute(const LocalMatrix& m) const {
  if (g_.is_identity()) return m;
  LocalMatrix out;
  for (int j = 0; j < local::kCount; ++j)
    for (int i = 0; i < local::kCount; ++i) out(g_.map_local(i), g_.map_local(j)) = m(i, j);
  return out;
}

LocalVector TableRef::integral() const {
  if (g_.is_identity()) return table_->integral;
  LocalVector out;
  for (int i = 0; i < local::kCount; ++i) out(g_.map_local(i)) = table_->integral(i);
  return out;
}

ReferenceTables TableRef::reference() const { return {diffusion(), advection(), mass(), integral()}; }

double TableRef::field_at(int k, int a, int b) const {
  const auto& t = *table_;
  if (k < local::kBubble || k >= local::kCount) throw InvalidArgument("field_at: not a bubble index");
  if (g_.is_identity()) return t.fields[k - local::kBubble].at(a, b);
  const SquareSymmetry inv = g_.inverse();
  const auto [ac, bc] = inv.map_lattice(a, b, t.M);
  return t.fields[inv.map_local(k) - local::kBubble].at(ac, bc);
}

FineField TableRef::field(int k) const {
  const auto& t = *table_;
  if (k < local::kBubble || k >= local::kCount) throw InvalidArgument("field: not a bubble index");
  if (g_.is_identity()) return t.fields[k - local::kBubble];
  const SquareSymmetry inv = g_.inverse();
  const FineField& src = t.fields[inv.map_local(k) - local::kBubble];
  FineField out(t.M, t.M, 1.0, 1.0);
  for (int b = 0; b <= t.M; ++b)
    for (int a = 0; a <= t.M; ++a) {
      const auto [ac, bc] = inv.map_lattice(a, b, t.M);
      out.at(a, b) = src.at(ac, bc);
    }
  return out;
}

// ---------------------------------------------------------------------------
// StabCache

StabCache::StabCache(StabCacheOptions opts) : opts_(opts) {
  if (opts_.M < 2) throw InvalidArgument("StabCache: M must be at least 2");
}

namespace {

// Rounds both components to a multiple of 2^-40 |a| (a power of two), so
// velocities that agree up to quadrature round-off, such as the means of
// mirror-image cells, share one table. Exact under sign flips and swaps.
Vec2 snap_velocity(Vec2 a) {
  const double m = std::max(std::abs(a.x), std::abs(a.y));
  if (m == 0.0 || !std::isfinite(m)) return a;
  const double q = std::ldexp(1.0, std::ilogb(m) - 40);
  return {std::round(a.x / q) * q, std::round(a.y / q) * q};
}

}  // namespace

std::pair<StabCache::Key, SquareSymmetry> StabCache::key_for(const ScaledCoefficients& sc) const {
  if (!opts_.use_symmetry) return {Key{sc.eps, sc.a.x, sc.a.y, sc.c}, SquareSymmetry{}};
  const auto [g, a] = canonicalize_velocity(snap_velocity(sc.a));
  return {Key{sc.eps, a.x, a.y, sc.c}, g};
}

std::optional<TableRef> StabCache::find(const ScaledCoefficients& sc) const {
  const auto [key, g] = key_for(sc);
  std::lock_guard lock(mutex_);
  auto it = tables_.find(key);
  if (it == tables_.end()) return std::nullopt;
  return TableRef(it->second, g);
}

TableRef StabCache::get(const ScaledCoefficients& sc) {
  const auto [key, g] = key_for(sc);
  {
    std::lock_guard lock(mutex_);
    if (auto it = tables_.find(key); it != tables_.end()) return TableRef(it->second, g);
  }
  ScaledCoefficients canonical = sc;
  canonical.a = {std::get<1>(key), std::get<2>(key)};
  auto table = std::make_shared<const ElementTable>(element_contribs(canonical, *this));
  std::lock_guard lock(mutex_);
  auto [it, inserted] = tables_.emplace(key, table);
  if (inserted) {
    stats_.tables += 1;
    stats_.bubble_solves += 6;
    stats_.max_depth = std::max(stats_.max_depth, table->depth);
    stats_.max_residual = std::max(stats_.max_residual, table->max_residual);
  }
  return TableRef(it->second, g);
}

void StabCache::insert(std::shared_ptr<const ElementTable> table) {
  if (table->M != opts_.M) throw InvalidArgument("StabCache::insert: table computed with a different M");
  auto [key, g] = key_for(table->coeffs);
  if (!g.is_identity()) throw InvalidArgument("StabCache::insert: table velocity is not canonical");
  std::lock_guard lock(mutex_);
  tables_.emplace(key, std::move(table));
}

StabCacheStats StabCache::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

std::vector<std::shared_ptr<const ElementTable>> StabCache::tables() const {
  std::lock_guard lock(mutex_);
  std::vector<std::shared_ptr<const ElementTable>> out;
  out.reserve(tables_.size());
  for (const auto& [key, t] : tables_) out.push_back(t);
  return out;
}

// ---------------------------------------------------------------------------
// FineSolve

FineSolve::FineSolve(Geometry geometry, const ScaledCoefficients& sc, int M, const std::optional<TableRef>& child,
                     const SolverOptions& solver)
    : geometry_(geometry), sc_(sc), M_(M), child_(child), grid_(refine_patch(geometry, M)) {
  dofs_ = dof_layout(grid_, child_ ? Scheme::bmz : Scheme::galerkin);
  const ElementMatrices cell = fine_cell_matrices(sc_, M_, child_);
  cell_d_ = cell.diffusion;
  cell_adv_ = cell.advection;
  cell_m_ = cell.mass;
  cell_int_ = cell.integral;
  // Every cell shares one matrix, so assemble the form directly.
  const LocalMatrix cell_k = sc_.eps * cell.diffusion + cell.advection + cell.reaction;
  const int n = dofs_.total();
  SparseMatrix K(n, n);
  mass_ = SparseMatrix(n, n);
  integral_ = Vector::Zero(n);
  const size_t per = dofs_.has_patch_bubbles() ? 144 : dofs_.has_element_bubbles() ? 64 : 16;
  K.reserve(per * grid_.num_elements());
  mass_.reserve(per * grid_.num_elements());
  for (int e = 0; e < grid_.num_elements(); ++e) {
    const auto ids = local_dofs(grid_, dofs_, e);
    for (int i = 0; i < local::kCount; ++i) {
      if (ids[i] < 0) continue;
      integral_[ids[i]] += cell.integral(i);
      for (int j = 0; j < local::kCount; ++j) {
        if (ids[j] < 0) continue;
        K.add(ids[i], ids[j], cell_k(i, j));
        mass_.add(ids[i], ids[j], cell.mass(i, j));
      }
    }
  }
  K.finalize();
  mass_.finalize();
  apply_dirichlet_rows(K, grid_, dofs_);
  try {
    solver_ = std::make_unique<LinearSolver>(K, solver);
  } catch (const SolverError& e) {
    std::ostringstream msg;
    msg << "bubble problem at recursion level " << sc_.level << ": " << e.what();
    throw SolverError(msg.str());
  }
}

namespace {

void zero_boundary(Vector& b, const Grid& grid, const DofMap& dofs) {
  for (int v : grid.boundary_vertices()) b[dofs.vertex_dof(v)] = 0.0;
}

}  // namespace

Vector FineSolve::solve_nodal_rhs(int k, SolveReport* report) const {
  if (geometry_ != Geometry::element) throw InvalidArgument("nodal right-hand sides live on the element domain");
  Vector phi = Vector::Zero(dofs_.total());
  for (int v = 0; v < grid_.num_vertices(); ++v) {
    const Point p = grid_.vertex(v);
    phi[dofs_.vertex_dof(v)] = local::nodal(k, p.x, p.y);
  }
  Vector b = mass_ * phi;
  zero_boundary(b, grid_, dofs_);
  try {
    return solver_->solve(b, report);
  } catch (const SolverError& e) {
    throw SolverError("bubble problem at recursion level " + std::to_string(sc_.level) + ": " + e.what());
  }
}

Vector FineSolve::solve_unit_rhs(SolveReport* report) const {
  Vector b = integral_;
  zero_boundary(b, grid_, dofs_);
  try {
    return solver_->solve(b, report);
  } catch (const SolverError& e) {
    throw SolverError("bubble problem at recursion level " + std::to_string(sc_.level) + ": " + e.what());
  }
}

FineField FineSolve::nodal_field(const Vector& u) const {
  FineField f(grid_.nx(), grid_.ny(), grid_.extent().x, grid_.extent().y);
  for (int b = 0; b <= grid_.ny(); ++b)
    for (int a = 0; a <= grid_.nx(); ++a) f.at(a, b) = u[dofs_.vertex_dof(grid_.vertex_at(a, b))];
  return f;
}

LocalVector FineSolve::gather(const Vector& u, int i, int j) const {
  const auto ids = local_dofs(grid_, dofs_, grid_.element_at(i, j));
  LocalVector out;
  for (int k = 0; k < local::kCount; ++k) out[k] = ids[k] >= 0 ? u[ids[k]] : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Recursion

ElementTable element_contribs(const ScaledCoefficients& sc, StabCache& cache) {
  const int M = cache.options().M;
  const ScaledCoefficients child_sc =
      rescale(sc.eps, sc.a, sc.c, 1.0 / M, sc.level + 1, sc.physical_h / M);
  std::optional<TableRef> child;
  if (!(child_sc.peclet() < 1.0)) child = cache.get(child_sc);

  const auto& solver = cache.options().solver;
  const FineSolve elem(Geometry::element, sc, M, child, solver);
  const FineSolve hpatch(Geometry::horizontal_patch, sc, M, child, solver);
  const FineSolve vpatch(Geometry::vertical_patch, sc, M, child, solver);

  ElementTable t;
  t.coeffs = sc;
  t.M = M;
  t.depth = child ? child->table().depth + 1 : 1;

  // Local 12-vectors of every fine cell of T for each of the twelve
  // functions; column = cell (i, j) -> i + M j.
  const int cells = M * M;
  std::array<Eigen::Matrix<double, local::kCount, Eigen::Dynamic>, local::kCount> G;
  for (auto& g : G) g.setZero(local::kCount, cells);

  const double delta = 1.0 / M;
  for (int j = 0; j < M; ++j)
    for (int i = 0; i < M; ++i)
      for (int k = 0; k < 4; ++k)
        for (int v = 0; v < 4; ++v) {
          const Point p{(i + local::kVertices[v].x) * delta, (j + local::kVertices[v].y) * delta};
          G[k](v, i + M * j) = local::nodal(k, p.x, p.y);
        }

  auto track = [&](const SolveReport& r) { t.max_residual = std::max(t.max_residual, r.relative_residual); };
  SolveReport report;

  for (int k = 0; k < 4; ++k) {
    const Vector u = elem.solve_nodal_rhs(k, &report);
    track(report);
    for (int j = 0; j < M; ++j)
      for (int i = 0; i < M; ++i) G[local::kBubble + k].col(i + M * j) = elem.gather(u, i, j);
    t.fields[k] = elem.nodal_field(u);
  }

  using local::kPatch;
  const Vector uh = hpatch.solve_unit_rhs(&report);
  track(report);
  const Vector uv = vpatch.solve_unit_rhs(&report);
  track(report);
  for (int j = 0; j < M; ++j)
    for (int i = 0; i < M; ++i) {
      G[kPatch + 1].col(i + M * j) = hpatch.gather(uh, i, j);      // T is the left half
      G[kPatch + 3].col(i + M * j) = hpatch.gather(uh, i + M, j);  // T is the right half
      G[kPatch + 2].col(i + M * j) = vpatch.gather(uv, i, j);      // T is the bottom half
      G[kPatch + 0].col(i + M * j) = vpatch.gather(uv, i, j + M);  // T is the top half
    }
  const FineField fh = hpatch.nodal_field(uh);
  const FineField fv = vpatch.nodal_field(uv);
  for (int s = 0; s < 4; ++s) t.fields[4 + s] = FineField(M, M, 1.0, 1.0);
  for (int b = 0; b <= M; ++b)
    for (int a = 0; a <= M; ++a) {
      t.fields[4 + 1].at(a, b) = fh.at(a, b);
      t.fields[4 + 3].at(a, b) = fh.at(a + M, b);
      t.fields[4 + 2].at(a, b) = fv.at(a, b);
      t.fields[4 + 0].at(a, b) = fv.at(a, b + M);
    }

  // Pair through the fine cell matrices (the same ones the fine systems
  // were assembled with).
  std::array<Eigen::Matrix<double, local::kCount, Eigen::Dynamic>, local::kCount> WD, WA, WM;
  for (int k = 0; k < local::kCount; ++k) {
    WD[k] = elem.cell_diffusion() * G[k];
    WA[k] = elem.cell_advection() * G[k];
    WM[k] = elem.cell_mass() * G[k];
    t.integral[k] = (elem.cell_integral().transpose() * G[k]).sum();
  }
  for (int i = 0; i < local::kCount; ++i)
    for (int j = 0; j < local::kCount; ++j) {
      t.diffusion(i, j) = G[i].cwiseProduct(WD[j]).sum();
      t.advection(i, j) = G[i].cwiseProduct(WA[j]).sum();
      t.mass(i, j) = G[i].cwiseProduct(WM[j]).sum();
    }
  return t;
}

FineField solve_local(const ScaledCoefficients& sc, Geometry geometry, int rhs_nodal,
                      const std::optional<TableRef>& child, int M) {
  const FineSolve fs(geometry, sc, M, child);
  if (rhs_nodal >= 0) return fs.nodal_field(fs.solve_nodal_rhs(rhs_nodal));
  return fs.nodal_field(fs.solve_unit_rhs());
}

double pair(Form form, const FineField& u, const FineField& v, const ScaledCoefficients& sc) {
  if (!u.same_lattice(v)) throw InvalidArgument("pair: incompatible lattices");
  const double dx = u.lx / u.mx, dy = u.ly / u.my;
  const double q[2] = {kGauss2, 1.0 - kGauss2};
  const double w = 0.25 * dx * dy;
  double sum = 0.0;
  for (int j = 0; j < u.my; ++j)
    for (int i = 0; i < u.mx; ++i)
      for (int b = 0; b < 2; ++b)
        for (int a = 0; a < 2; ++a) {
          const Point p{(i + q[a]) * dx, (j + q[b]) * dy};
          const double uv = u.value(p), vv = v.value(p);
          switch (form) {
            case Form::mass: sum += w * uv * vv; break;
            case Form::diffusion: sum += w * u.gradient(p).dot(v.gradient(p)); break;
            case Form::advection: sum += w * sc.a.dot(u.gradient(p)) * vv; break;
            case Form::operator_form:
              sum += w * (sc.eps * u.gradient(p).dot(v.gradient(p)) + sc.a.dot(u.gradient(p)) * vv + sc.c * uv * vv);
              break;
          }
        }
  return sum;
}

double pyramid_integral(Vec2 a, double h) {
  const double ax = std::abs(a.x), ay = std::abs(a.y);
  if (ax == 0.0 && ay == 0.0) throw InvalidArgument("pyramid_integral: zero velocity");
  if (ay == 0.0) return h * h * h / (2.0 * ax);
  if (ax == 0.0) return h * h * h / (2.0 * ay);
  // b = min(x/|a1|, y/|a2|) in inflow-corner coordinates.
  const double U = h / ax, V = h / ay;
  const double lo = std::min(U, V), hi = std::max(U, V);
  return ax * ay * (lo * lo * hi / 2.0 - lo * lo * lo / 6.0);
}

}  // namespace bz
