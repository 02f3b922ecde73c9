#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <bubblezoom/analysis.hpp>
#include <bubblezoom/solve.hpp>

namespace bz::cli {

/// Everything a run needs. Filled from a flat key = value file and/or
/// command line flags through set(); validate() runs before any work.
struct ExperimentConfig {
  std::string target;  // example0 ... example4 or custom
  std::vector<Scheme> schemes{Scheme::bmz};
  std::vector<int> N{};  // empty = per-target default
  int M = 20;
  std::optional<double> epsilon;
  std::optional<Vec2> velocity;
  std::optional<double> reaction;
  std::optional<double> source;
  std::optional<double> dt;
  std::optional<double> T;
  std::filesystem::path out = "bubblezoom-out";
  bool csv = true;
  bool vtk = false;
  bool mtx = false;
  int samples = 0;  // lattice nodes per element axis for fields; 0 = M
  TauRule tau = TauRule::classic;
  PatchVelocity patch_velocity = PatchVelocity::element;
  RfbBubbles rfb_bubbles = RfbBubbles::single;
  std::vector<NormSpec::Kind> norms;  // empty = all four when an exact solution exists
  /// Gradient norms on [2h, 1-2h]^2 unless full_norms is set.
  bool full_norms = false;

  /// Applies one setting; throws InvalidArgument for unknown keys or bad
  /// values. Keys match the long command line flags.
  void set(const std::string& key, const std::string& value);
  void validate() const;
  bool transient() const { return T.has_value(); }
};

struct ConfigKey {
  std::string name;
  std::string help;
};

/// Every key accepted by ExperimentConfig::set except target.
const std::vector<ConfigKey>& config_keys();

/// Reads `key = value` lines; blank lines and lines starting with # are
/// skipped. Throws InvalidArgument with the line number on bad input.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);
std::map<std::string, std::string> read_config(std::istream& is);

/// Fills in the defaults of the target (N, dt, T) that were not given.
ExperimentConfig with_target_defaults(ExperimentConfig cfg);

/// Runs the experiment and writes its artifacts into cfg.out. Progress
/// goes to log. Returns the process exit status.
int run(const ExperimentConfig& cfg, std::ostream& log);

/// %.17g: fixed 17 significant digits, so every double round-trips.
std::string format_number(double v);

}  // namespace bz::cli
