#include "bubblezoom/assembly.hpp"

#include <algorithm>
#include <cmath>

namespace bz {

namespace {

constexpr double kGauss2[2] = {0.21132486540518711775, 0.78867513459481288225};
constexpr double kGauss3[3] = {0.11270166537925831148, 0.5, 0.88729833462074168852};
constexpr double kGauss3W[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

constexpr double kStiffness[4][4] = {
    {4.0, -1.0, -2.0, -1.0}, {-1.0, 4.0, -1.0, -2.0}, {-2.0, -1.0, 4.0, -1.0}, {-1.0, -2.0, -1.0, 4.0}};
constexpr double kMass[4][4] = {{4.0, 2.0, 1.0, 2.0}, {2.0, 4.0, 2.0, 1.0}, {1.0, 2.0, 4.0, 2.0}, {2.0, 1.0, 2.0, 4.0}};

std::array<Point, 4> gauss2_points(Point origin, double h) {
  return {{{origin.x + kGauss2[0] * h, origin.y + kGauss2[0] * h},
           {origin.x + kGauss2[1] * h, origin.y + kGauss2[0] * h},
           {origin.x + kGauss2[0] * h, origin.y + kGauss2[1] * h},
           {origin.x + kGauss2[1] * h, origin.y + kGauss2[1] * h}}};
}

}  // namespace

ElementMatrices q1_element_matrices(double h, const std::array<Vec2, 4>& a, const std::array<double, 4>& c) {
  ElementMatrices m;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      m.diffusion(i, j) = kStiffness[i][j] / 6.0;
      m.mass(i, j) = kMass[i][j] * h * h / 36.0;
    }
    m.integral(i) = 0.25 * h * h;
  }
  for (int q = 0; q < 4; ++q) {
    const double xi = kGauss2[q % 2], eta = kGauss2[q / 2];
    for (int j = 0; j < 4; ++j) {
      const double adv = a[q].dot(local::nodal_gradient(j, xi, eta));
      const double phi_j = local::nodal(j, xi, eta);
      for (int i = 0; i < 4; ++i) {
        const double phi_i = local::nodal(i, xi, eta);
        m.advection(i, j) += 0.25 * h * adv * phi_i;
        m.reaction(i, j) += 0.25 * h * h * c[q] * phi_j * phi_i;
      }
    }
  }
  return m;
}

ElementMatrices q1_element_matrices(double h, Point origin, const Coefficients& coeffs) {
  std::array<Vec2, 4> a;
  std::array<double, 4> c;
  const auto pts = gauss2_points(origin, h);
  for (int q = 0; q < 4; ++q) {
    a[q] = coeffs.velocity_at(pts[q]);
    c[q] = coeffs.reaction_at(pts[q]);
  }
  return q1_element_matrices(h, a, c);
}

void add_bubble_entries(ElementMatrices& m, double h, const ReferenceTables& t, double c_bar) {
  auto s = [h](int k) { return k >= local::kBubble ? h : 1.0; };
  for (int i = 0; i < local::kCount; ++i) {
    for (int j = 0; j < local::kCount; ++j) {
      if (i < local::kBubble && j < local::kBubble) continue;
      const double sij = s(i) * s(j);
      m.diffusion(i, j) = sij * t.diffusion(i, j);
      m.advection(i, j) = h * sij * t.advection(i, j);
      m.mass(i, j) = h * h * sij * t.mass(i, j);
      m.reaction(i, j) = c_bar * m.mass(i, j);
    }
    if (i >= local::kBubble) m.integral(i) = h * h * s(i) * t.integral(i);
  }
}

std::array<int, local::kCount> local_dofs(const Grid& grid, const DofMap& dofs, int e) {
  std::array<int, local::kCount> ids;
  ids.fill(-1);
  const auto& el = grid.element(e);
  for (int k = 0; k < 4; ++k) ids[local::kNodal + k] = dofs.vertex_dof(el.vertices[k]);
  if (dofs.has_element_bubbles())
    for (int k = 0; k < 4; ++k) ids[local::kBubble + k] = dofs.element_bubble_dof(e, k);
  if (dofs.has_patch_bubbles())
    for (int s = 0; s < 4; ++s)
      if (el.edges[s] >= 0) ids[local::kPatch + s] = dofs.patch_bubble_dof(el.edges[s]);
  return ids;
}

SparseMatrix SplitOperator::form(double eps) const {
  SparseMatrix::Storage m = eps * diffusion.storage() + advection.storage() + reaction.storage();
  if (stabilization.rows() > 0) m += stabilization.storage();
  return SparseMatrix(std::move(m));
}

SplitOperator assemble_split(const Grid& grid, const DofMap& dofs,
                             const std::function<ElementMatrices(int)>& element_matrices) {
  const int n = dofs.total();
  SplitOperator op{SparseMatrix(n, n), SparseMatrix(n, n), SparseMatrix(n, n), SparseMatrix(n, n),
                   Vector::Zero(n), SparseMatrix()};
  const size_t per = dofs.has_patch_bubbles() ? 144 : dofs.has_element_bubbles() ? 64 : 16;
  for (auto* m : {&op.diffusion, &op.advection, &op.reaction, &op.mass}) m->reserve(per * grid.num_elements());
  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto ids = local_dofs(grid, dofs, e);
    const ElementMatrices m = element_matrices(e);
    for (int i = 0; i < local::kCount; ++i) {
      if (ids[i] < 0) continue;
      op.integral[ids[i]] += m.integral(i);
      for (int j = 0; j < local::kCount; ++j) {
        if (ids[j] < 0) continue;
        // Keep the full local pattern so every row stores its diagonal.
        op.diffusion.add(ids[i], ids[j], m.diffusion(i, j));
        op.advection.add(ids[i], ids[j], m.advection(i, j));
        op.reaction.add(ids[i], ids[j], m.reaction(i, j));
        op.mass.add(ids[i], ids[j], m.mass(i, j));
      }
    }
  }
  for (auto* m : {&op.diffusion, &op.advection, &op.reaction, &op.mass}) m->finalize();
  return op;
}

// ---------------------------------------------------------------------------
// Bubble basis

BubbleBasis::BubbleBasis(const Grid& grid, double h, std::vector<std::array<TableRef, 5>> refs,
                         std::vector<ReferenceTables> tables)
    : h_(h), refs_(std::move(refs)), tables_(std::move(tables)) {
  if (static_cast<int>(refs_.size()) != grid.num_elements() || refs_.size() != tables_.size()) {
    throw InvalidArgument("BubbleBasis: one entry per element required");
  }
  if (!refs_.empty()) M_ = refs_[0][0].table().M;
}

double BubbleBasis::field_at(int e, int k, int a, int b) const {
  const auto& r = refs_[e];
  if (k < local::kPatch) return r[0].field_at(k, a, b);
  return r[1 + (k - local::kPatch)].field_at(k, a, b);
}

FineField BubbleBasis::field(int e, int k) const {
  const auto& r = refs_[e];
  if (k < local::kPatch) return r[0].field(k);
  return r[1 + (k - local::kPatch)].field(k);
}

int BubbleBasis::depth() const {
  int d = 0;
  for (const auto& r : refs_)
    for (const auto& t : r) d = std::max(d, t.table().depth);
  return d;
}

BubbleBasis build_bubble_basis(const Grid& grid, const Coefficients& coeffs, StabCache& cache, PatchVelocity mode) {
  const double h = grid.h();
  const int ne = grid.num_elements();
  std::vector<Vec2> a_bar(ne);
  std::vector<double> c_bar(ne);
  for (int e = 0; e < ne; ++e) {
    a_bar[e] = element_mean_velocity(coeffs, grid.element_origin(e), h);
    c_bar[e] = element_mean_reaction(coeffs, grid.element_origin(e), h);
  }

  std::vector<std::array<TableRef, 5>> refs(ne);
  std::vector<ReferenceTables> tables(ne);
  for (int e = 0; e < ne; ++e) {
    auto& r = refs[e];
    r[0] = cache.get(rescale(coeffs.epsilon, a_bar[e], c_bar[e], h));
    const auto& el = grid.element(e);
    for (int s = 0; s < 4; ++s) {
      const int edge = el.edges[s];
      if (edge < 0 || mode == PatchVelocity::element) {
        r[1 + s] = r[0];
        continue;
      }
      const auto& pair = grid.edge(edge).elements;
      const int other = pair[0] == e ? pair[1] : pair[0];
      const Vec2 a_patch = (a_bar[e] + a_bar[other]) * 0.5;
      const double c_patch = 0.5 * (c_bar[e] + c_bar[other]);
      r[1 + s] = cache.get(rescale(coeffs.epsilon, a_patch, c_patch, h));
    }

    // Element-bubble and bilinear entries come from the element table;
    // anything touching half patch s from the table of patch s.
    ReferenceTables mixed = r[0].reference();
    bool uniform = true;
    for (int s = 0; s < 4; ++s)
      uniform = uniform && r[1 + s].shared() == r[0].shared() && r[1 + s].symmetry() == r[0].symmetry();
    if (!uniform) {
      std::array<ReferenceTables, 4> patch;
      for (int s = 0; s < 4; ++s) patch[s] = r[1 + s].reference();
      for (int s = 0; s < 4; ++s) {
        const int p = local::kPatch + s;
        for (int k = 0; k < local::kPatch; ++k) {
          mixed.diffusion(p, k) = patch[s].diffusion(p, k);
          mixed.diffusion(k, p) = patch[s].diffusion(k, p);
          mixed.advection(p, k) = patch[s].advection(p, k);
          mixed.advection(k, p) = patch[s].advection(k, p);
          mixed.mass(p, k) = patch[s].mass(p, k);
          mixed.mass(k, p) = patch[s].mass(k, p);
        }
        for (int s2 = 0; s2 < 4; ++s2) {
          const int q = local::kPatch + s2;
          mixed.diffusion(p, q) = 0.5 * (patch[s].diffusion(p, q) + patch[s2].diffusion(p, q));
          mixed.advection(p, q) = 0.5 * (patch[s].advection(p, q) + patch[s2].advection(p, q));
          mixed.mass(p, q) = 0.5 * (patch[s].mass(p, q) + patch[s2].mass(p, q));
        }
        mixed.integral(p) = patch[s].integral(p);
      }
    }
    tables[e] = std::move(mixed);
  }
  return BubbleBasis(grid, h, std::move(refs), std::move(tables));
}

// ---------------------------------------------------------------------------
// Global systems

SplitOperator assemble_operator(const Grid& grid, const DofMap& dofs, const Coefficients& coeffs,
                                const BubbleBasis* basis) {
  if (dofs.has_element_bubbles() && !basis) throw InvalidArgument("assemble_operator: bubble basis required");
  const double h = grid.h();
  return assemble_split(grid, dofs, [&](int e) {
    const Point o = grid.element_origin(e);
    ElementMatrices m = q1_element_matrices(h, o, coeffs);
    if (dofs.has_element_bubbles()) add_bubble_entries(m, h, basis->tables(e), element_mean_reaction(coeffs, o, h));
    return m;
  });
}

Vector assemble_load(const Grid& grid, const DofMap& dofs, const Coefficients& coeffs, const BubbleBasis* basis,
                     double t) {
  if (dofs.has_element_bubbles() && !basis) throw InvalidArgument("assemble_load: bubble basis required");
  const double h = grid.h();
  Vector b = Vector::Zero(dofs.total());
  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto ids = local_dofs(grid, dofs, e);
    const Point o = grid.element_origin(e);
    for (int qb = 0; qb < 3; ++qb)
      for (int qa = 0; qa < 3; ++qa) {
        const double xi = kGauss3[qa], eta = kGauss3[qb];
        const double wf = h * h * kGauss3W[qa] * kGauss3W[qb] * coeffs.source_at({o.x + xi * h, o.y + eta * h}, t);
        for (int i = 0; i < 4; ++i) b[ids[i]] += wf * local::nodal(i, xi, eta);
      }
    if (!dofs.has_element_bubbles()) continue;
    const double f_bar = element_mean_source(coeffs, o, h, t);
    const auto& tab = basis->tables(e);
    for (int i = local::kBubble; i < local::kCount; ++i)
      if (ids[i] >= 0) b[ids[i]] += f_bar * h * h * h * tab.integral(i);
  }
  return b;
}

void apply_dirichlet_rows(SparseMatrix& A, const Grid& grid, const DofMap& dofs) {
  for (int v : grid.boundary_vertices()) A.set_identity_row(dofs.vertex_dof(v));
}

void apply_dirichlet_values(Vector& b, const Grid& grid, const DofMap& dofs, const std::function<double(Point)>& g) {
  for (int v : grid.boundary_vertices()) b[dofs.vertex_dof(v)] = g ? g(grid.vertex(v)) : 0.0;
}

void apply_dirichlet(SparseMatrix& A, Vector& b, const Grid& grid, const DofMap& dofs,
                     const std::function<double(Point)>& g) {
  apply_dirichlet_rows(A, grid, dofs);
  apply_dirichlet_values(b, grid, dofs, g);
}

// ---------------------------------------------------------------------------
// SUPG

double supg_tau(TauRule rule, double h, double eps, Vec2 a, const ReferenceTables* element_tables) {
  switch (rule) {
    case TauRule::classic: {
      const double speed = a.norm();
      if (speed == 0.0 || element_peclet(eps, h, a) < 1.0) return 0.0;
      return h / (2.0 * speed);
    }
    case TauRule::rfb_integral: {
      if (!element_tables) throw InvalidArgument("supg_tau: element bubble tables required");
      double sum = 0.0;
      for (int k = 0; k < 4; ++k) sum += element_tables->integral(local::kBubble + k);
      // (1/h^2) * h^3 * sum of reference integrals
      return h * sum;
    }
  }
  return 0.0;
}

SupgSystem assemble_supg(const Grid& grid, const DofMap& dofs, const Coefficients& coeffs, TauRule rule,
                         StabCache* cache, double t) {
  if (dofs.has_element_bubbles()) throw InvalidArgument("assemble_supg: vertex-only dof layout required");
  if (rule == TauRule::rfb_integral && !cache) throw InvalidArgument("assemble_supg: rfb-integral rule needs a cache");
  const double h = grid.h();
  const int n = dofs.total();
  SupgSystem sys;
  sys.op = assemble_operator(grid, dofs, coeffs, nullptr);
  sys.load = assemble_load(grid, dofs, coeffs, nullptr, t);
  sys.tau.assign(grid.num_elements(), 0.0);

  SparseMatrix S(n, n), Ms(n, n);
  S.reserve(16 * grid.num_elements());
  Ms.reserve(16 * grid.num_elements());
  for (int e = 0; e < grid.num_elements(); ++e) {
    const Point o = grid.element_origin(e);
    const Vec2 a_bar = element_mean_velocity(coeffs, o, h);
    double tau = 0.0;
    if (rule == TauRule::classic) {
      tau = supg_tau(rule, h, coeffs.epsilon, a_bar);
    } else {
      const auto ref = cache->get(rescale(coeffs.epsilon, a_bar, element_mean_reaction(coeffs, o, h), h)).reference();
      tau = supg_tau(rule, h, coeffs.epsilon, a_bar, &ref);
    }
    sys.tau[e] = tau;
    const auto ids = local_dofs(grid, dofs, e);
    for (int q = 0; q < 4; ++q) {
      const double xi = kGauss2[q % 2], eta = kGauss2[q / 2];
      const Point p{o.x + xi * h, o.y + eta * h};
      const Vec2 a = coeffs.velocity_at(p);
      const double c = coeffs.reaction_at(p);
      const double w = tau * 0.25 * h * h;
      for (int i = 0; i < 4; ++i) {
        const double stream_i = a.dot(local::nodal_gradient(i, xi, eta)) / h;
        for (int j = 0; j < 4; ++j) {
          const double phi_j = local::nodal(j, xi, eta);
          const double L_j = a.dot(local::nodal_gradient(j, xi, eta)) / h + c * phi_j;
          S.add(ids[i], ids[j], w * L_j * stream_i);
          Ms.add(ids[i], ids[j], w * phi_j * stream_i);
        }
      }
    }
    for (int qb = 0; qb < 3; ++qb)
      for (int qa = 0; qa < 3; ++qa) {
        const double xi = kGauss3[qa], eta = kGauss3[qb];
        const Point p{o.x + xi * h, o.y + eta * h};
        const double wf = tau * h * h * kGauss3W[qa] * kGauss3W[qb] * coeffs.source_at(p, t);
        const Vec2 a = coeffs.velocity_at(p);
        for (int i = 0; i < 4; ++i) sys.load[ids[i]] += wf * a.dot(local::nodal_gradient(i, xi, eta)) / h;
      }
  }
  S.finalize();
  Ms.finalize();
  sys.op.stabilization = std::move(S);
  sys.op.mass = combine(1.0, sys.op.mass, 1.0, Ms);
  return sys;
}

}  // namespace bz
