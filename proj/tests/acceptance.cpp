/// Acceptance suite for the bubble-enriched solver.
///
/// Runs the reference experiments at full resolution and prints
/// one PASS/FAIL line per criterion, followed by the measured quantities.
///
///   bubblezoom_acceptance            all criteria
///   bubblezoom_acceptance 2 5        selected criteria
///
/// Exit status is 0 when every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <bubblezoom/analysis.hpp>

using namespace bz;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Named range checks; a criterion passes when all of them do.
class Checks {
 public:
  void in_range(const std::string& what, double value, double lo, double hi) {
    const bool ok = value >= lo && value <= hi;
    add(ok, what, value, "[" + num(lo) + ", " + num(hi) + "]");
  }
  void near(const std::string& what, double value, double target, double tol) {
    in_range(what, value, target - tol, target + tol);
  }
  void relative(const std::string& what, double value, double target, double rel) {
    const bool ok = std::abs(value - target) <= rel * std::abs(target);
    add(ok, what, value, num(target) + " +/- " + num(100 * rel) + "%");
  }
  void at_most(const std::string& what, double value, double limit) {
    add(value <= limit, what, value, "<= " + num(limit));
  }
  void at_least(const std::string& what, double value, double limit) {
    add(value >= limit, what, value, ">= " + num(limit));
  }
  void truth(const std::string& what, bool ok) { lines_.push_back(std::string(ok ? "  ok   " : "  FAIL ") + what); ok_ &= ok; }

  bool ok() const { return ok_; }
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }
  void add(bool ok, const std::string& what, double value, const std::string& expected) {
    lines_.push_back(std::string(ok ? "  ok   " : "  FAIL ") + what + " = " + num(value) + "  (expected " + expected + ")");
    ok_ &= ok;
  }
  bool ok_ = true;
  std::vector<std::string> lines_;
};

std::shared_ptr<const Grid> mesh_of(const Problem& p, int n) { return std::make_shared<const Grid>(p.domain.mesh(n)); }

Solution steady(const Problem& p, int n, Scheme s, StabCache& cache) {
  DiscretizationOptions o;
  o.scheme = s;
  return solve_steady(mesh_of(p, n), p.coeffs, p.boundary, o, cache);
}

// ---------------------------------------------------------------------------

void overshoot_contrast(Checks& c) {
  const Problem p = make_example("example0");
  {
    StabCache cache;
    const auto t0 = Clock::now();
    const Extrema e = vertex_extrema(steady(p, 50, Scheme::rfb, cache));
    c.in_range("rfb N=50 max", e.max, 1.6, 2.0);
    c.at_most("rfb N=50 seconds", seconds_since(t0), 60.0);
  }
  for (auto [n, target] : {std::pair{50, 0.982}, std::pair{100, 0.992}}) {
    StabCache cache;
    const auto t0 = Clock::now();
    const Extrema e = vertex_extrema(steady(p, n, Scheme::bmz, cache));
    const std::string tag = "bmz N=" + std::to_string(n);
    c.near(tag + " max", e.max, target, 0.02);
    c.at_least(tag + " min", e.min, -0.02);
    c.at_most(tag + " seconds", seconds_since(t0), 60.0);
  }
}

struct Sweep {
  std::vector<int> N{10, 20, 40, 80};
  std::map<Scheme, std::map<NormSpec::Kind, std::vector<double>>> errors;
  double seconds = 0.0;
};

const Sweep& example2_sweep() {
  static std::optional<Sweep> sweep;
  if (sweep) return *sweep;
  Sweep s;
  const Problem p = make_example("example2");
  const auto t0 = Clock::now();
  for (Scheme scheme : {Scheme::bmz, Scheme::rfb}) {
    for (int n : s.N) {
      StabCache cache;
      const Solution sol = steady(p, n, scheme, cache);
      for (auto kind : {NormSpec::Kind::l2, NormSpec::Kind::l1, NormSpec::Kind::h1_seminorm,
                        NormSpec::Kind::stability_seminorm}) {
        NormSpec spec;
        spec.kind = kind;
        if (kind == NormSpec::Kind::h1_seminorm || kind == NormSpec::Kind::stability_seminorm) {
          spec.region = NormSpec::Region::interior;
        }
        s.errors[scheme][kind].push_back(error_norm(sol, *p.exact, spec, &p.coeffs));
      }
    }
  }
  s.seconds = seconds_since(t0);
  sweep = std::move(s);
  return *sweep;
}

void check_table(Checks& c, NormSpec::Kind kind, const std::vector<double>& reference, double rel,
                 const std::function<void(Checks&, const std::vector<double>&)>& bmz_rates,
                 const std::function<void(Checks&, const std::vector<double>&)>& rfb_rates) {
  const Sweep& s = example2_sweep();
  const auto& bmz = s.errors.at(Scheme::bmz).at(kind);
  for (size_t i = 0; i < s.N.size(); ++i) {
    c.relative("bmz N=" + std::to_string(s.N[i]), bmz[i], reference[i], rel);
  }
  bmz_rates(c, eoc(bmz, s.N));
  if (rfb_rates) rfb_rates(c, eoc(s.errors.at(Scheme::rfb).at(kind), s.N));
  c.at_most("sweep seconds", s.seconds, 600.0);
}

auto first_two_rates(std::string scheme, double target, double tol) {
  return [=](Checks& c, const std::vector<double>& r) {
    c.near(scheme + " eoc 10->20", r[0], target, tol);
    c.near(scheme + " eoc 20->40", r[1], target, tol);
  };
}

void l2_table(Checks& c) {
  check_table(c, NormSpec::Kind::l2, {2.250e-3, 0.564e-3, 0.143e-3, 0.048e-3}, 0.25, first_two_rates("bmz", 1.9, 0.2),
              first_two_rates("rfb", 0.4, 0.2));
}

void l1_table(Checks& c) {
  check_table(c, NormSpec::Kind::l1, {1.810e-3, 0.453e-3, 0.114e-3, 0.029e-3}, 0.25, first_two_rates("bmz", 1.9, 0.2),
              first_two_rates("rfb", 0.9, 0.2));
}

void h1_table(Checks& c) {
  check_table(
      c, NormSpec::Kind::h1_seminorm, {8.078e-2, 5.467e-2, 2.960e-2, 1.604e-2}, 0.30,
      [](Checks& c, const std::vector<double>& r) { c.near("bmz eoc 40->80", r[2], 0.9, 0.2); }, {});
}

void stability_table(Checks& c) {
  check_table(
      c, NormSpec::Kind::stability_seminorm, {2.1481e-2, 1.0281e-2, 0.3936e-2, 0.1508e-2}, 0.30,
      [](Checks& c, const std::vector<double>& r) {
        c.in_range("bmz eoc 10->20", r[0], 1.0, 1.6);
        c.in_range("bmz eoc 20->40", r[1], 1.0, 1.6);
        c.in_range("bmz eoc 40->80", r[2], 1.0, 1.6);
      },
      {});
}

void example1_extrema(Checks& c) {
  const Problem ad = make_example("example1");
  const Problem adr = make_example("example1", {.reaction = 7500.0});
  StabCache cache;
  Extrema e = vertex_extrema(steady(ad, 24, Scheme::bmz, cache));
  c.near("bmz AD min", e.min, -0.0037, 0.003);
  c.near("bmz AD max", e.max, 1.047, 0.03);
  e = vertex_extrema(steady(adr, 24, Scheme::bmz, cache));
  c.near("bmz ADR min", e.min, -0.0006, 0.001);
  c.near("bmz ADR max", e.max, 1.0, 1e-3);
  e = vertex_extrema(steady(ad, 24, Scheme::rfb, cache));
  c.near("rfb AD max", e.max, 1.342, 0.05);
  e = vertex_extrema(steady(adr, 24, Scheme::rfb, cache));
  c.near("rfb ADR min", e.min, -0.335, 0.05);
}

void example3_transient(Checks& c) {
  const Problem p = make_example("example3");
  const auto grid = mesh_of(p, 50);
  for (Scheme s : {Scheme::bmz, Scheme::rfb}) {
    StabCache cache;
    TransientOptions o;
    o.discretization.scheme = s;
    o.dt = 0.02;
    o.T = 0.7;
    std::map<int, double> max_at;
    crank_nicolson(grid, p.coeffs, p.boundary, p.initial, o, cache,
                   [&](const Solution& sol, int n) { max_at[n] = vertex_extrema(sol).max; });
    if (s == Scheme::bmz) {
      c.near("bmz max t=0.7", max_at.at(35), 0.717, 0.02);
      c.near("bmz max t=0.4", max_at.at(20), 0.4, 0.02);
    } else {
      c.near("rfb max t=0.7", max_at.at(35), 0.90, 0.05);
    }
  }
}

void example4_peak(Checks& c) {
  // zero source: the pyramid is transported unchanged
  const Problem p = make_example("example4", {.source = 0.0});
  StabCache cache;
  TransientOptions o;
  o.discretization.scheme = Scheme::bmz;
  o.dt = 0.0025;
  o.T = 6.0;
  double worst = 0.0, best = INFINITY;
  int steps = 0;
  const auto t0 = Clock::now();
  crank_nicolson(mesh_of(p, 80), p.coeffs, p.boundary, p.initial, o, cache, [&](const Solution& sol, int n) {
    if (n == 0) return;
    const Extrema peak = extrema_near(sol, vertex_extrema(sol).argmax, 2);
    const double d = (peak.argmax - rotation_peak_oracle(sol.time)).norm();
    worst = std::max(worst, d);
    best = std::min(best, d);
    ++steps;
  });
  c.truth("steps sampled = " + std::to_string(steps), steps == 2400);
  c.at_most("max peak distance", worst, 0.008);
  c.in_range("min peak distance (informational bound)", best, 0.0, 0.008);
  std::printf("  info run took %.1f s\n", seconds_since(t0));
}

void property_suite(Checks& c) {
  const auto close = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };

  {
    StabCache cache;
    cache.get(rescale(1e-6, {1.0, 0.5}, 0.0, 0.02));
    double worst_energy = 0.0, worst_patch = 0.0, worst_cross = 0.0;
    for (const auto& t : cache.tables()) {
      double energy = 0.0, integral = 0.0;
      for (int k = 0; k < 4; ++k) {
        integral += t->element_bubble_integral(k);
        for (int l = 0; l < 4; ++l) energy += t->coeffs.eps * t->diffusion(4 + k, 4 + l);
      }
      worst_energy = std::max(worst_energy, close(energy, integral));
      for (auto o : {PatchOrientation::horizontal, PatchOrientation::vertical}) {
        worst_patch = std::max(worst_patch, close(t->patch_self_form(o), t->patch_bubble_integral(o)));
        for (int k = 0; k < 4; ++k) {
          worst_cross = std::max(worst_cross, close(t->patch_element_form(o, k), t->element_bubble_integral(k)));
        }
      }
    }
    c.truth("tables checked = " + std::to_string(cache.tables().size()), cache.tables().size() == 4);
    c.at_most("element energy identity, worst level", worst_energy, 1e-6);
    c.at_most("patch energy identity, worst level", worst_patch, 1e-6);
    c.at_most("a(b_S, b_T) vs integral of b_T, worst", worst_cross, 0.02);
  }
  for (double pe : {1e3, 1e6}) {
    StabCache cache;
    const Vec2 a{1.0, 0.5};
    const ElementTable t = element_contribs(rescale(a.norm() / pe, a, 0.0, 1.0), cache);
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += t.element_bubble_integral(k);
    c.at_most("pyramid agreement at Pe " + std::to_string(static_cast<long>(pe)), close(s, pyramid_integral(a, 1.0)),
              0.10);
  }
  for (double pe : {10.0, 100.0}) {
    const Vec2 a{1.0, 0.5};
    const ScaledCoefficients sc = rescale(a.norm() / pe, a, 0.0, 1.0);
    StabCache rec(StabCacheOptions{20}), fine(StabCacheOptions{200});
    const ElementTable x = element_contribs(sc, rec), y = element_contribs(sc, fine);
    double worst = 0.0;
    for (int k = local::kBubble; k < local::kCount; ++k) worst = std::max(worst, close(x.integral[k], y.integral[k]));
    for (auto o : {PatchOrientation::horizontal, PatchOrientation::vertical})
      worst = std::max(worst, close(x.patch_self_form(o), y.patch_self_form(o)));
    c.at_most("recursive vs single-level fine Galerkin at Pe " + std::to_string(static_cast<int>(pe)), worst, 0.01);
  }
  {
    const Problem p = make_example("example0");
    StabCache cache;
    const Solution s = steady(p, 10, Scheme::bmz, cache);
    bool exact = true;
    for (int v = 0; v < s.grid->num_vertices(); ++v) exact &= evaluate(s, s.grid->vertex(v)) == s.U[v];
    c.truth("evaluate(vertex) == vertex coefficient", exact);

    const Problem q = make_example("example0", {.reaction = 1.0});
    const BubbleBasis basis = build_bubble_basis(*s.grid, q.coeffs, cache);
    const DofMap rfb = dof_layout(*s.grid, Scheme::rfb), bmz = dof_layout(*s.grid, Scheme::bmz);
    const SparseMatrix A = assemble_operator(*s.grid, rfb, q.coeffs, &basis).form(q.coeffs.epsilon);
    const SparseMatrix B = assemble_operator(*s.grid, bmz, q.coeffs, &basis).form(q.coeffs.epsilon);
    long mismatches = 0;
    for (int i = 0; i < rfb.total(); ++i)
      for (int j = 0; j < rfb.total(); ++j) mismatches += A.coeff(i, j) != B.coeff(i, j);
    c.truth("rfb matrix equals the leading bmz block entrywise", mismatches == 0);
  }
  {
    const Problem p = make_example("example4", {.source = 0.0});
    StabCache cache;
    const Discretization d = discretize(mesh_of(p, 20), p.coeffs, {}, cache);
    const CrankNicolson fwd(d, p.coeffs, p.boundary, 0.01), bwd(d, p.coeffs, p.boundary, -0.01);
    const Vector u0 = d.reduce(initial_vector(*d.grid, d.dofs, p.initial));
    Vector u = u0;
    for (int n = 0; n < 5; ++n) u = fwd.step(u, n * 0.01);
    for (int n = 5; n > 0; --n) u = bwd.step(u, n * 0.01);
    c.at_most("Crank-Nicolson time reversal error", (u - u0).lpNorm<Eigen::Infinity>(), 1e-8);
  }
}

void recursion_bookkeeping(Checks& c) {
  const Problem p = make_example("example0");
  StabCache cache(StabCacheOptions{20});
  const Solution s = steady(p, 50, Scheme::bmz, cache);
  c.truth("depth = " + std::to_string(s.stats.depth) + " (expected 4)", s.stats.depth == 4);
  c.truth("bubble solves = " + std::to_string(cache.stats().bubble_solves) + " (expected 24)",
          cache.stats().bubble_solves == 24);
}

struct Criterion {
  int id;
  const char* name;
  void (*run)(Checks&);
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "example 0 overshoot contrast", overshoot_contrast},
      {2, "example 2 L2 errors and rates", l2_table},
      {3, "example 2 L1 errors and rates", l1_table},
      {4, "example 2 interior H1 errors", h1_table},
      {5, "example 2 interior stability norm", stability_table},
      {6, "example 1 extrema", example1_extrema},
      {7, "example 3 transient maxima", example3_transient},
      {8, "example 4 peak tracking", example4_peak},
      {9, "property suite", property_suite},
      {10, "recursion bookkeeping", recursion_bookkeeping},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& crit : criteria()) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), crit.id) == selected.end()) continue;
    Checks c;
    const auto t0 = Clock::now();
    try {
      crit.run(c);
    } catch (const std::exception& e) {
      c.truth(std::string("exception: ") + e.what(), false);
    }
    std::printf("criterion %d: %s  %s (%.1f s)\n", crit.id, c.ok() ? "PASS" : "FAIL", crit.name, seconds_since(t0));
    for (const auto& line : c.lines()) std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    failed += !c.ok();
  }
  return failed == 0 ? 0 : 1;
}
