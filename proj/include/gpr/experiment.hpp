#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpr/framegen.hpp"
#include "gpr/io.hpp"
#include "gpr/recover.hpp"

namespace gpr {

/// Parsed experiment configuration. Q and P are kept as raw set specs so the
/// report can echo how they were produced.
struct ExperimentConfig {
  int M = 8;
  double C = 4.0;
  io::json T = "full";
  io::json F = "full";
  io::json Q = "full";
  io::json P = "full";
  int trials = 10;
  std::uint64_t seed = 0;
  PhaseMethod method = PhaseMethod::sync;
  double vanish_tolerance = kVanishTolerance;
  double success_tolerance = 1e-6;  ///< phase_distance <= tol * ||x||
  std::optional<int> subspace_dim;
  std::optional<std::uint64_t> spark_trials;  ///< Monte Carlo full-spark check per trial
  std::uint64_t beta_budget = std::uint64_t{1} << 20;
};

ExperimentConfig experiment_config_from_json(const io::json& j);

struct TrialRecord {
  int trial = 0;
  std::string status;
  double phase_distance = 0.0;
  double relative_error = 0.0;
  int component_size = 0;
  int vanishing_vertices = 0;
  std::optional<double> bound;  ///< component_bound with the trial's vanishing count
  std::optional<bool> spark_ok;
  bool success = false;
};

struct ExperimentReport {
  ExperimentConfig config;
  IndexSet Q;
  IndexSet P;
  std::optional<BetaResult> q_beta;
  std::optional<BetaResult> p_beta;
  int lattice_size = 0;
  std::size_t measurement_count = 0;          ///< from the assembled frame
  std::size_t measurement_count_formula = 0;  ///< |Lambda| (1 + 3 |Q| |P|)
  std::optional<SpectralReport> spectral;
  std::string spectral_error;
  bool lattice_exceeds_C_dim = false;
  bool q_pseudorandom = false;
  bool p_pseudorandom = false;
  std::vector<TrialRecord> trials;
  int successes = 0;
  double max_relative_error = 0.0;
  double wall_clock_seconds = 0.0;

  io::json to_json(bool with_timing = true) const;
  std::string summary_csv() const;
};

/// Runs every trial; trial-level failures are recorded, never thrown.
/// Configuration errors throw ValidationError / BudgetError.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Per-trial inputs, derived from (seed, trial) only.
Window trial_window(std::uint64_t seed, int trial, int M);
Signal trial_signal(std::uint64_t seed, int trial, int M);

}  // namespace gpr
