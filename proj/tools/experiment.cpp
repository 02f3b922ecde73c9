#include "experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "export.hpp"

namespace bz::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& key, std::string_view s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t comma = s.find(',', start);
    std::string item = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (item.empty()) throw InvalidArgument(key + ": empty list item in '" + std::string(s) + "'");
    out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || end != v.data() + v.size() || !std::isfinite(x)) {
    throw InvalidArgument(key + ": expected a number, got '" + v + "'");
  }
  return x;
}

int parse_int(const std::string& key, const std::string& v) {
  int x = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || end != v.data() + v.size()) {
    throw InvalidArgument(key + ": expected an integer, got '" + v + "'");
  }
  return x;
}

template <class E>
E parse_choice(const std::string& key, const std::string& v, std::initializer_list<std::pair<const char*, E>> choices) {
  std::string names;
  for (const auto& [name, value] : choices) {
    if (v == name) return value;
    names += names.empty() ? name : std::string("|") + name;
  }
  throw InvalidArgument(key + ": expected " + names + ", got '" + v + "'");
}

std::string_view norm_name(NormSpec::Kind k) {
  switch (k) {
    case NormSpec::Kind::l1: return "l1";
    case NormSpec::Kind::l2: return "l2";
    case NormSpec::Kind::h1_seminorm: return "h1";
    case NormSpec::Kind::stability_seminorm: return "stability";
  }
  return "?";
}

bool is_gradient_norm(NormSpec::Kind k) {
  return k == NormSpec::Kind::h1_seminorm || k == NormSpec::Kind::stability_seminorm;
}

bool known_target(const std::string& t) {
  const auto names = example_names();
  return t == "custom" || std::find(names.begin(), names.end(), t) != names.end();
}

Problem make_problem(const ExperimentConfig& cfg) {
  if (cfg.target == "custom") {
    Problem p;
    p.name = "custom";
    p.coeffs = Coefficients::constant(*cfg.epsilon, *cfg.velocity, cfg.reaction.value_or(0.0), cfg.source.value_or(1.0));
    p.boundary.g = [](Point) { return 0.0; };
    p.initial.u0 = [](Point) { return 0.0; };
    return p;
  }
  Problem p = make_example(cfg.target, {cfg.epsilon, cfg.reaction, cfg.source});
  if (cfg.velocity) {
    const Vec2 a = *cfg.velocity;
    p.coeffs.constant_velocity = a;
    p.coeffs.velocity = [a](Point) { return a; };
  }
  return p;
}

/// Ordered key = value lines.
class Manifest {
 public:
  void add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, format_number(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }

  void write(const std::filesystem::path& path) const {
    std::ofstream os(path);
    for (const auto& [k, v] : entries_) os << k << " = " << v << '\n';
    if (!os) throw Error("cannot write " + path.string());
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  return os;
}

std::string run_name(Scheme s, int N) { return std::string(to_string(s)) + "_N" + std::to_string(N); }

std::string join_numbers(const std::vector<int>& v) {
  std::string out;
  for (int x : v) out += (out.empty() ? "" : ",") + std::to_string(x);
  return out;
}

struct Context {
  const ExperimentConfig& cfg;
  const Problem& problem;
  std::ostream& log;
  Manifest& manifest;
  std::vector<NormSpec::Kind> norms;
};

DiscretizationOptions discretization_options(const ExperimentConfig& cfg, Scheme s) {
  DiscretizationOptions o;
  o.scheme = s;
  o.tau = cfg.tau;
  o.patch_velocity = cfg.patch_velocity;
  o.rfb_bubbles = cfg.rfb_bubbles;
  return o;
}

void record_run(Context& ctx, const std::string& prefix, const Solution& sol, const StabCache& cache,
                double seconds) {
  const StabCacheStats st = cache.stats();
  Manifest& m = ctx.manifest;
  m.add(prefix + ".scheme_used", std::string(to_string(sol.scheme)));
  m.add(prefix + ".dofs", sol.dofs.total());
  m.add(prefix + ".depth", sol.stats.depth);
  m.add(prefix + ".tables", st.tables);
  m.add(prefix + ".bubble_solves", st.bubble_solves);
  m.add(prefix + ".max_table_residual", st.max_residual);
  m.add(prefix + ".solver_method", sol.stats.report.method);
  m.add(prefix + ".solver_residual", sol.stats.report.relative_residual);
  m.add(prefix + ".table_seconds", sol.stats.table_seconds);
  m.add(prefix + ".assembly_seconds", sol.stats.assembly_seconds);
  m.add(prefix + ".solve_seconds", sol.stats.solve_seconds);
  m.add(prefix + ".wall_seconds", seconds);
}

void export_fields(Context& ctx, const Solution& sol, const std::string& name) {
  if (!ctx.cfg.vtk) return;
  const int m = ctx.cfg.samples > 0 ? ctx.cfg.samples : default_samples(sol);
  auto os = open_output(ctx.cfg.out / ("u_" + name + ".vtk"));
  write_vtk(sol, m, ctx.problem.name + " " + name + " t=" + format_number(sol.time), os);
}

void export_matrix(Context& ctx, std::shared_ptr<const Grid> grid, Scheme s, StabCache& cache,
                   const std::string& name) {
  if (!ctx.cfg.mtx) return;
  const Discretization d = discretize(std::move(grid), ctx.problem.coeffs, discretization_options(ctx.cfg, s), cache);
  SparseMatrix A = d.form();
  Vector b = d.load(ctx.problem.coeffs, 0.0);
  apply_dirichlet(A, b, *d.grid, d.dofs, ctx.problem.boundary.g);
  auto os = open_output(ctx.cfg.out / ("A_" + name + ".mtx"));
  write_matrix_market(A, os);
}

std::vector<std::string> extrema_cells(const Solution& sol) {
  const Extrema v = vertex_extrema(sol);
  const Extrema l = extrema(sol);
  return {format_number(v.min), format_number(v.max), format_number(l.min), format_number(l.max)};
}

void run_steady(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  std::ofstream summary_os, norms_os;
  std::optional<CsvWriter> summary, norms;
  if (cfg.csv) {
    summary_os = open_output(cfg.out / "summary.csv");
    summary.emplace(summary_os, std::vector<std::string>{ctx.problem.name + " steady", "M = " + std::to_string(cfg.M)},
                    std::vector<std::string>{"scheme", "N", "h", "dofs", "depth", "bubble_solves", "vertex_min",
                                             "vertex_max", "lattice_min", "lattice_max"});
    if (!ctx.norms.empty()) {
      norms_os = open_output(cfg.out / "norms.csv");
      norms.emplace(norms_os,
                    std::vector<std::string>{ctx.problem.name + " errors of u - u_h",
                                             "eoc = log(e(N_prev)/e(N)) / log(N/N_prev)"},
                    std::vector<std::string>{"scheme", "N", "norm", "region", "error", "eoc"});
    }
  }

  for (Scheme s : cfg.schemes) {
    std::vector<std::vector<double>> errors(ctx.norms.size());
    for (int N : cfg.N) {
      const auto t0 = Clock::now();
      const auto grid = std::make_shared<const Grid>(ctx.problem.domain.mesh(N));
      StabCache cache(StabCacheOptions{cfg.M});
      const Solution sol =
          solve_steady(grid, ctx.problem.coeffs, ctx.problem.boundary, discretization_options(cfg, s), cache);
      const double seconds = seconds_since(t0);
      const std::string name = run_name(s, N);
      record_run(ctx, "run." + name, sol, cache, seconds);

      const Extrema v = vertex_extrema(sol);
      ctx.log << name << ": " << sol.dofs.total() << " dofs, depth " << sol.stats.depth << ", "
              << cache.stats().bubble_solves << " bubble solves, vertex range [" << v.min << ", " << v.max << "] ("
              << seconds << " s)\n";
      if (summary) {
        std::vector<std::string> row{std::string(to_string(s)), std::to_string(N), format_number(grid->h()),
                                     std::to_string(sol.dofs.total()), std::to_string(sol.stats.depth),
                                     std::to_string(cache.stats().bubble_solves)};
        for (auto& c : extrema_cells(sol)) row.push_back(std::move(c));
        summary->row(row);
      }
      for (size_t k = 0; k < ctx.norms.size(); ++k) {
        NormSpec spec;
        spec.kind = ctx.norms[k];
        spec.region = is_gradient_norm(spec.kind) && !cfg.full_norms ? NormSpec::Region::interior
                                                                      : NormSpec::Region::full;
        const double e = error_norm(sol, *ctx.problem.exact, spec, &ctx.problem.coeffs);
        errors[k].push_back(e);
        ctx.manifest.add("run." + name + ".error_" + std::string(norm_name(spec.kind)), e);
        if (norms) {
          const size_t i = errors[k].size() - 1;
          // blank when undefined: first mesh, or an empty interior region on a coarse mesh
          const bool defined = i > 0 && errors[k][i - 1] > 0.0 && e > 0.0;
          const std::string rate = defined ? format_number(eoc({errors[k][i - 1], e}, {cfg.N[i - 1], N})[0]) : "";
          norms->row({std::string(to_string(s)), std::to_string(N), std::string(norm_name(spec.kind)),
                      spec.region == NormSpec::Region::interior ? "interior" : "full", format_number(e), rate});
        }
      }
      export_fields(ctx, sol, name);
      export_matrix(ctx, grid, s, cache, name);
    }
  }
}

void run_transient(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  // the peak oracle holds for the rotating pyramid only
  const bool rotation = cfg.target == "example4" && !cfg.velocity;

  std::ofstream summary_os;
  std::optional<CsvWriter> summary;
  if (cfg.csv) {
    summary_os = open_output(cfg.out / "summary.csv");
    summary.emplace(summary_os,
                    std::vector<std::string>{ctx.problem.name + " final state",
                                             "dt = " + format_number(*cfg.dt) + ", T = " + format_number(*cfg.T)},
                    std::vector<std::string>{"scheme", "N", "t", "dofs", "depth", "bubble_solves", "vertex_min",
                                             "vertex_max", "lattice_min", "lattice_max"});
  }

  for (Scheme s : cfg.schemes) {
    for (int N : cfg.N) {
      const auto t0 = Clock::now();
      const auto grid = std::make_shared<const Grid>(ctx.problem.domain.mesh(N));
      StabCache cache(StabCacheOptions{cfg.M});
      const std::string name = run_name(s, N);

      std::ofstream steps_os;
      std::optional<CsvWriter> steps;
      if (cfg.csv) {
        steps_os = open_output(cfg.out / ("steps_" + name + ".csv"));
        steps.emplace(steps_os,
                      std::vector<std::string>{ctx.problem.name + " " + name + " per step",
                                               "peak = lattice maximum near the vertex argmax",
                                               "distance = |peak position - rotation oracle| (example4 only)"},
                      std::vector<std::string>{"t", "vertex_min", "vertex_max", "argmax_x", "argmax_y", "peak_max",
                                               "peak_x", "peak_y", "oracle_x", "oracle_y", "distance"});
      }
      double worst = 0.0;
      const auto observe = [&](const Solution& sol, int n) {
        const Extrema v = vertex_extrema(sol);
        const Extrema peak = extrema_near(sol, v.argmax, 2, cfg.samples);
        std::vector<std::string> row{format_number(sol.time), format_number(v.min), format_number(v.max),
                                     format_number(v.argmax.x), format_number(v.argmax.y), format_number(peak.max),
                                     format_number(peak.argmax.x), format_number(peak.argmax.y)};
        if (rotation) {
          const Point q = rotation_peak_oracle(sol.time);
          const double d = (peak.argmax - q).norm();
          if (n > 0) worst = std::max(worst, d);
          row.insert(row.end(), {format_number(q.x), format_number(q.y), format_number(d)});
        } else {
          row.insert(row.end(), {"", "", ""});
        }
        if (steps) steps->row(row);
      };

      TransientOptions topts;
      topts.discretization = discretization_options(cfg, s);
      topts.dt = *cfg.dt;
      topts.T = *cfg.T;
      const Solution sol =
          crank_nicolson(grid, ctx.problem.coeffs, ctx.problem.boundary, ctx.problem.initial, topts, cache, observe);
      const double seconds = seconds_since(t0);
      record_run(ctx, "run." + name, sol, cache, seconds);
      if (rotation) ctx.manifest.add("run." + name + ".max_oracle_distance", worst);

      const Extrema v = vertex_extrema(sol);
      ctx.log << name << ": t = " << sol.time << ", depth " << sol.stats.depth << ", vertex range [" << v.min << ", "
              << v.max << "]";
      if (rotation) ctx.log << ", max peak distance " << worst;
      ctx.log << " (" << seconds << " s)\n";
      if (summary) {
        std::vector<std::string> row{std::string(to_string(s)), std::to_string(N), format_number(sol.time),
                                     std::to_string(sol.dofs.total()), std::to_string(sol.stats.depth),
                                     std::to_string(cache.stats().bubble_solves)};
        for (auto& c : extrema_cells(sol)) row.push_back(std::move(c));
        summary->row(row);
      }
      export_fields(ctx, sol, name);
      export_matrix(ctx, grid, s, cache, name);
    }
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys{
      {"scheme", "one scheme: galerkin, supg, rfb or bmz"},
      {"schemes", "comma separated schemes"},
      {"N", "elements per unit length, comma separated for sweeps"},
      {"M", "fine lattice cells per element axis of the bubble problems"},
      {"eps", "diffusion coefficient"},
      {"velocity", "constant velocity ax,ay"},
      {"c", "constant reaction"},
      {"f", "constant source"},
      {"dt", "time step (transient runs)"},
      {"T", "final time (transient runs)"},
      {"out", "output directory"},
      {"export", "comma separated artifacts: csv, vtk, mtx"},
      {"samples", "field samples per element axis (default M)"},
      {"tau", "SUPG parameter: classic or rfb-integral"},
      {"patch-velocity", "velocity freezing of patch bubbles: element or mean"},
      {"rfb-bubbles", "rfb element bubbles: single or nodal"},
      {"norms", "comma separated error norms: l1, l2, h1, stability"},
      {"norm-region", "region of the gradient norms: interior or full"},
  };
  return keys;
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "target") {
    target = value;
  } else if (key == "scheme" || key == "schemes") {
    schemes.clear();
    for (const auto& s : split_list(key, value)) schemes.push_back(parse_scheme(s));
  } else if (key == "N") {
    N.clear();
    for (const auto& s : split_list(key, value)) N.push_back(parse_int(key, s));
  } else if (key == "M") {
    M = parse_int(key, value);
  } else if (key == "eps") {
    epsilon = parse_double(key, value);
  } else if (key == "velocity") {
    const auto parts = split_list(key, value);
    if (parts.size() != 2) throw InvalidArgument("velocity: expected ax,ay");
    velocity = Vec2{parse_double(key, parts[0]), parse_double(key, parts[1])};
  } else if (key == "c") {
    reaction = parse_double(key, value);
  } else if (key == "f") {
    source = parse_double(key, value);
  } else if (key == "dt") {
    dt = parse_double(key, value);
  } else if (key == "T") {
    T = parse_double(key, value);
  } else if (key == "out") {
    if (value.empty()) throw InvalidArgument("out: empty path");
    out = value;
  } else if (key == "export") {
    csv = vtk = mtx = false;
    for (const auto& s : split_list(key, value)) {
      bool& flag = s == "csv" ? csv : s == "vtk" ? vtk : s == "mtx" ? mtx : throw InvalidArgument(
                                                                                  "export: unknown artifact '" + s + "'");
      flag = true;
    }
  } else if (key == "samples") {
    samples = parse_int(key, value);
  } else if (key == "tau") {
    tau = parse_choice<TauRule>(key, value, {{"classic", TauRule::classic}, {"rfb-integral", TauRule::rfb_integral}});
  } else if (key == "patch-velocity") {
    patch_velocity =
        parse_choice<PatchVelocity>(key, value, {{"element", PatchVelocity::element}, {"mean", PatchVelocity::mean}});
  } else if (key == "rfb-bubbles") {
    rfb_bubbles = parse_choice<RfbBubbles>(key, value, {{"single", RfbBubbles::single}, {"nodal", RfbBubbles::nodal}});
  } else if (key == "norms") {
    norms.clear();
    for (const auto& s : split_list(key, value)) {
      norms.push_back(parse_choice<NormSpec::Kind>(key, s,
                                   {{"l1", NormSpec::Kind::l1},
                                    {"l2", NormSpec::Kind::l2},
                                    {"h1", NormSpec::Kind::h1_seminorm},
                                    {"stability", NormSpec::Kind::stability_seminorm}}));
    }
  } else if (key == "norm-region") {
    full_norms = parse_choice<bool>(key, value, {{"interior", false}, {"full", true}});
  } else {
    throw InvalidArgument("unknown configuration key '" + key + "'");
  }
}

void ExperimentConfig::validate() const {
  if (!known_target(target)) throw InvalidArgument("unknown target '" + target + "'");
  if (target == "custom" && (!epsilon || !velocity)) throw InvalidArgument("custom problems need eps and velocity");
  if (target == "example2" && velocity) throw InvalidArgument("example2 fixes the velocity of its exact solution");
  if (epsilon && !(*epsilon > 0.0)) throw InvalidArgument("eps must be positive");
  if (schemes.empty()) throw InvalidArgument("no scheme given");
  if (N.empty()) throw InvalidArgument("no mesh size N given");
  for (int n : N)
    if (n < 1) throw InvalidArgument("N must be positive");
  if (M < 2) throw InvalidArgument("M must be at least 2");
  if (samples < 0) throw InvalidArgument("samples must be non-negative");
  if (dt.has_value() != T.has_value()) throw InvalidArgument("transient runs need both dt and T");
  if (dt && !(*dt > 0.0 && *T > 0.0)) throw InvalidArgument("dt and T must be positive");
  if (!norms.empty() && (target != "example2" || reaction || source || transient())) {
    throw InvalidArgument("error norms need the exact solution of a steady example2 run without c/f overrides");
  }
}

std::map<std::string, std::string> read_config(std::istream& is) {
  std::map<std::string, std::string> out;
  std::string line;
  for (int n = 1; std::getline(is, line); ++n) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw InvalidArgument("config line " + std::to_string(n) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const bool known = key == "target" || std::any_of(config_keys().begin(), config_keys().end(),
                                                      [&](const ConfigKey& k) { return k.name == key; });
    if (!known) throw InvalidArgument("config line " + std::to_string(n) + ": unknown key '" + key + "'");
    out[key] = trim(std::string_view(t).substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot read config file " + path.string());
  return read_config(is);
}

ExperimentConfig with_target_defaults(ExperimentConfig cfg) {
  const std::string& t = cfg.target;
  if (cfg.N.empty()) {
    if (t == "example0" || t == "example3") cfg.N = {50};
    else if (t == "example1") cfg.N = {24};
    else if (t == "example2") cfg.N = {10, 20, 40, 80};
    else if (t == "example4") cfg.N = {80};
    else cfg.N = {20};
  }
  if (!cfg.dt && !cfg.T) {
    if (t == "example3") {
      cfg.dt = 0.02;
      cfg.T = 0.7;
    } else if (t == "example4") {
      cfg.dt = 0.0025;
      cfg.T = 6.0;
    }
  }
  return cfg;
}

int run(const ExperimentConfig& given, std::ostream& log) {
  const ExperimentConfig cfg = with_target_defaults(given);
  cfg.validate();
  const Problem problem = make_problem(cfg);
  problem.coeffs.validate();
  for (const auto& w : admissibility_warnings(problem.coeffs, problem.domain.mesh(cfg.N.front()))) {
    log << "warning: " << w << '\n';
  }
  std::filesystem::create_directories(cfg.out);

  Manifest manifest;
  manifest.add("target", cfg.target);
  std::string schemes;
  for (Scheme s : cfg.schemes) schemes += (schemes.empty() ? "" : ",") + std::string(to_string(s));
  manifest.add("schemes", schemes);
  manifest.add("N", join_numbers(cfg.N));
  manifest.add("M", cfg.M);
  manifest.add("eps", problem.coeffs.epsilon);
  if (problem.coeffs.constant_velocity) {
    manifest.add("velocity", format_number(problem.coeffs.constant_velocity->x) + "," +
                                 format_number(problem.coeffs.constant_velocity->y));
  } else {
    manifest.add("velocity", "variable");
  }
  if (cfg.reaction) manifest.add("c", *cfg.reaction);
  if (cfg.source) manifest.add("f", *cfg.source);
  if (cfg.transient()) {
    manifest.add("dt", *cfg.dt);
    manifest.add("T", *cfg.T);
  }
  manifest.add("tau", cfg.tau == TauRule::classic ? "classic" : "rfb-integral");
  manifest.add("patch-velocity", cfg.patch_velocity == PatchVelocity::element ? "element" : "mean");
  manifest.add("rfb-bubbles", cfg.rfb_bubbles == RfbBubbles::single ? "single" : "nodal");
  manifest.add("samples", cfg.samples);

  Context ctx{cfg, problem, log, manifest, cfg.norms};
  if (ctx.norms.empty() && problem.exact && !cfg.transient()) {
    ctx.norms = {NormSpec::Kind::l2, NormSpec::Kind::l1, NormSpec::Kind::h1_seminorm,
                 NormSpec::Kind::stability_seminorm};
  }
  const auto t0 = Clock::now();
  if (cfg.transient()) {
    run_transient(ctx);
  } else {
    run_steady(ctx);
  }
  manifest.add("total_seconds", seconds_since(t0));
  manifest.write(cfg.out / "manifest.txt");
  return 0;
}

}  // namespace bz::cli
