#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cqed/dynamics.hpp"
#include "cqed/params.hpp"

namespace cqed {

enum class Experiment {
  phi_sweep,
  tradeoff,
  steady_state_validation,
  entropy_rate_mc,
  series_check,
  series_oracle,
  bayes_rate_mc,
  bayes_converge,
  state_invariance,
  photocurrent_mean,
  invariants,
};

std::string to_string(Experiment e);
Experiment experiment_from_string(std::string_view name);  // throws ConfigError

enum class OutputFormat { csv, json };

std::string to_string(OutputFormat f);
OutputFormat output_format_from_string(std::string_view name);  // throws ConfigError

/// Fully validated experiment description. Built by validate_config.
struct ExperimentConfig {
  Experiment experiment = Experiment::invariants;
  SystemParams params;
  int n_max = 0;  ///< Fock truncation around Re(alpha); 0 picks recommended_n_max
  double v0_sq = 0.09;
  long n_traj = 10000;
  long n_steps = 100000;
  long slow_steps = 1000;
  double dt = 1e-3;
  double delta_t = 1e-4;  ///< entropy-rate window
  double t_final = 10.0;
  std::uint64_t seed = 1;
  std::string output_path;
  OutputFormat format = OutputFormat::csv;
  int n_terms = 200;
  int phi_points = 5;
  std::vector<double> E_values{2.5, 5.0, 10.0};
  std::vector<double> eta_values;
  double g_true = 0.0;
  double prior_mean = 0.0;
  Integrator integrator = Integrator::kraus;
  long sample_every = 100;
  std::string trace_output;

  /// Canonical key = value lines for the output header.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Parses the flat `key = value` schema ('#' starts a comment). Numbers may be
/// written with pi, e.g. `phi = pi/2` or `phi = 3*pi/8`; lists are comma separated.
/// Unknown keys, missing required keys and out-of-range values throw ConfigError
/// naming the field; g >= 2E throws DomainError.
ExperimentConfig validate_config(std::string_view text);

ExperimentConfig load_config(const std::string& path);

/// Evaluates a product/quotient of numbers and `pi` with an optional sign.
double parse_number(std::string_view text);

using Cell = std::variant<long, double, std::string>;

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, std::string>> notes;  ///< extra header lines (diagnostics)

  bool passed() const;
};

/// Runs one experiment. Deterministic given (config, seed, build).
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Metadata header (config echo, code version, RNG), data section, check lines.
void write_result(std::ostream& os, const ExperimentConfig& config, const ExperimentResult& result,
                  OutputFormat format);

/// Property checks over all modules (cheap versions; steady-state convergence
/// is exercised by steady-state-validation).
std::vector<Check> run_invariant_suite(std::uint64_t seed);

}  // namespace cqed
