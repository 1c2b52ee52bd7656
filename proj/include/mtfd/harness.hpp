#pragma once

// Experiment configuration, presets, CSV I/O, experiment runs, the
// verification suite and kernel tables behind the command-line tool.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mtfd/inverse_cg.hpp"

namespace mtfd {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitSuccess = 0,
  kExitUnexpected = 1,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitAcceptance = 4,
  kExitIo = 5,
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class TruthShape { Quadratic, Hat, File };

struct ExperimentConfig {
  std::string id = "custom";
  InverseConfig inverse;
  double t_end = 1.0;
  int n_steps = 50;
  TruthShape truth = TruthShape::Quadratic;
  std::filesystem::path truth_file;
  std::filesystem::path out_dir = "out";
  bool emit_plot_data = true;
  // Acceptance bounds, set by presets.
  std::optional<double> max_rel_error;
  std::optional<int> max_iterations;

  ExperimentConfig() { set_cells(50); }

  TimeGrid time_grid() const { return {t_end, n_steps}; }
  /// Sets the spatial grid and resamples f = sin(π (x - x_lo)/L) on it.
  void set_cells(int cells);
};

/// Named presets ex1a, ex1b, ex2a, ex2b, ex3a, ex3b.
std::vector<std::string> preset_ids();
ExperimentConfig preset(const std::string& id);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Flat `key = value` lines; `#` starts a comment. Throws ConfigError on syntax errors.
KeyValues parse_key_values(std::istream& in);

/// Builds a configuration from key-value pairs. An `example` key starts from that
/// preset; otherwise every experiment field must be given explicitly.
ExperimentConfig config_from_key_values(const KeyValues& kv);

/// Sets the operator terms. Lists pair positionally; `alpha` alone gives unit
/// weights, `q` alone pairs with the current orders (descending).
void apply_orders(ExperimentConfig& cfg, const std::optional<std::string>& alpha,
                  const std::optional<std::string>& q);

/// Applies one key to an existing configuration (also used for CLI overrides).
void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);

ExperimentConfig load_config(const std::filesystem::path& path);

/// Key-value echo of a configuration, in a fixed order.
KeyValues describe(const ExperimentConfig& cfg);

/// g_true on the grid of the configuration.
TimeSeries truth_series(const ExperimentConfig& cfg);

// CSV with a header row, LF endings and 17 significant digits.

struct CsvTable {
  std::vector<std::string> header;
  std::vector<Eigen::VectorXd> columns;
};

std::string format_real(double value);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

struct RunReport {
  KeyValues config;
  int iterations = 0;
  std::string stop_reason;
  std::optional<double> rel_error;
  std::vector<double> residuals;
  double wall_seconds = 0.0;
  bool accepted = true;  // within the preset bounds, if any
};

/// Synthesizes data from g_true, adds noise, reconstructs and writes
/// g_rec.csv, residuals.csv and report.txt into cfg.out_dir.
RunReport run_experiment(const ExperimentConfig& cfg);

void write_report(const std::filesystem::path& path, const RunReport& report);

struct Check {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

enum class SuiteLevel { Quick, Full };

struct SuiteOptions {
  SuiteLevel level = SuiteLevel::Quick;
  std::optional<double> theta0;  // overrides the contour angle of every check
};

/// Runs the property checks; each failure (including raised errors) is recorded.
std::vector<Check> run_verification_suite(const SuiteOptions& options);

void print_checks(std::ostream& out, const std::vector<Check>& checks);

struct KernelTableSpec {
  int n_t = 40;
  int n_tau = 40;
  double t_max = 1.0;
  double tau_max = 1.0;
};

/// Tabulates K(t_i, τ_j), t_i = i t_max/n_t and τ_j = j τ_max/n_tau (i, j >= 1), as CSV:
/// a header `t\tau,τ_1,...`, one row per t, then a `min,<value>` summary line.
/// Returns the minimum table value.
double emit_kernel_table(const MultiTermSpec& spec, const ContourSpec& contour, const KernelTableSpec& grid,
                         const std::filesystem::path& path);

}  // namespace mtfd
