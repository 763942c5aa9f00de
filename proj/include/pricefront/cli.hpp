#pragma once

// Scenario files, the run pipeline and run-directory comparison behind the command-line tool.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pricefront/errors.hpp"
#include "pricefront/fd_oracle.hpp"
#include "pricefront/model.hpp"
#include "pricefront/picard.hpp"

namespace pricefront::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitBlowup = 2;
inline constexpr int kExitSolverFailure = 3;

/// Environment variable naming the root for relative output directories.
inline constexpr const char* kOutputRootEnv = "PRICEFRONT_OUTPUT_ROOT";

/// Malformed scenario text; line() is 1-based, 0 when not tied to a line.
class ScenarioError : public ConfigError {
 public:
  ScenarioError(const std::string& origin, int line, const std::string& msg);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct Scenario {
  std::string name;
  std::filesystem::path base_dir;  // directory of the scenario file
  std::string source = "symmetric";
  std::optional<double> p_hint;
  ModelParams model;
  QuadratureConfig quadrature;
  double t_end = 0.1;
  std::vector<std::string> solvers{"picard"};
  std::string output_dir;
  double output_interval = 0.0;  // 0 means t_end / 200
  std::vector<double> snapshot_times;
  int norm_cadence = 64;
  fd::FdConfig fd;
  std::size_t particles = 100000;
  std::uint64_t seed = 1;
  double particle_dt = 5e-5;
  int bins = 50;
  picard::BlowupThresholds thresholds;
  int bound_suite_first = 50;
  int bound_suite_every = 2000;
  int bound_suite_samples = 5;
  /// Sorted "section.key=value" lines of every key given; hashed into the manifest.
  std::string canonical;

  bool wants(const std::string& solver) const;
};

/// Parse `key = value` lines grouped under [section] headers. '#' and ';' start comments.
Scenario parse_scenario(std::istream& in, const std::string& origin = "scenario");
Scenario load_scenario(const std::filesystem::path& path);

/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const Scenario& s);

/// Output directory: output_dir if absolute, otherwise relative to $PRICEFRONT_OUTPUT_ROOT (or
/// the working directory); defaults to the scenario name.
std::filesystem::path resolve_output_dir(const Scenario& s);

/// Validated initial data described by the scenario.
InitialData load_initial(const Scenario& s);

/// Execute every requested stage. Returns the process exit status.
int run(const std::filesystem::path& scenario_path, std::ostream& log);
int run(const Scenario& scenario, std::ostream& log);

/// Parse and check initial data only.
int validate(const std::filesystem::path& scenario_path, std::ostream& log);

struct CompareReport {
  double t_lo = 0.0, t_hi = 0.0;
  double p_linf = 0.0, p_l1 = 0.0;
  double lambda_linf = 0.0, lambda_l1 = 0.0;
  double profile_linf = 0.0, profile_l1 = 0.0;
  bool profiles_compared = false;
  std::string trajectory_a, trajectory_b;
};

/// Trajectory and final-profile differences between two run directories. `solver_a`/`solver_b`
/// choose which trajectory to read; empty means picard when present, else fd.
CompareReport compare_dirs(const std::filesystem::path& a, const std::filesystem::path& b,
                           const std::string& solver_a = "", const std::string& solver_b = "");
int compare(const std::filesystem::path& a, const std::filesystem::path& b, const std::string& solver_a,
            const std::string& solver_b, std::ostream& out, std::ostream& log);

}  // namespace pricefront::cli
