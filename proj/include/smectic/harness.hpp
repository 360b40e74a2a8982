#pragma once

// Convergence studies and the seeded self-verification suite.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "smectic/config.hpp"
#include "smectic/stepper.hpp"

namespace smectic {

struct FieldErrors {
  double q_inf = 0.0;
  double q_l2 = 0.0;
  double q_h1 = 0.0;
  double u_inf = 0.0;
  double u_l2 = 0.0;
  double u_h2 = 0.0;
  double s = 0.0;

  static constexpr int kCount = 7;
  static const char* name(int i);
  double get(int i) const;
  double& get(int i);
};

/// Differences measured on the grid of `a`; `b` must share it.
FieldErrors state_errors(const SolverState& a, const SolverState& b);

/// Samples a fine state at the nodes of a nested coarse grid.
SolverState restrict_state(const SolverState& fine, const GridSpec& coarse);

struct ConvergenceTable {
  std::string parameter;            // "tau" or "h"
  std::vector<double> values;       // step or spacing per row, coarsest first
  std::vector<FieldErrors> errors;  // one per row
  std::vector<FieldErrors> rates;   // between rows k and k+1

  std::string format() const;
};

/// Runs cfg with each fixed tau and with tau_ref, comparing at T_final.
/// Requires tau_ref < min(taus) and T_final / tau integral for every tau.
ConvergenceTable convergence_time(const RunConfig& cfg, std::span<const double> taus, double tau_ref);

/// Runs cfg on each J and on J_ref with fixed tau, comparing the restricted
/// reference with each coarse solution. J values must be nested and the
/// initial data must be a sampled function (not random).
ConvergenceTable convergence_space(const RunConfig& cfg, std::span<const int> Js, int J_ref, double tau);

struct GradientCheckOptions {
  int dim = 2;
  int J = 8;
  std::uint64_t seed = 42;
  double eps = 1e-5;
  /// Test hook: scales the analytic directional derivative by (1 + perturbation).
  double perturbation = 0.0;
};

struct GradientCheckResult {
  double finite_difference = 0.0;
  double analytic = 0.0;
  double rel_error = 0.0;
};

/// Parameters with every coupling term switched on, for the oracle checks.
ModelParams oracle_params(int dim);

GradientCheckResult gradient_check(const GradientCheckOptions& opt);

struct CheckEntry {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct SelfcheckReport {
  std::uint64_t seed = 0;
  std::vector<CheckEntry> entries;

  bool all_passed() const;
  std::string format() const;
};

struct SelfcheckOptions {
  std::uint64_t seed = 42;
  double gradient_perturbation = 0.0;
  int norm_chain_samples = 20;
};

SelfcheckReport selfcheck(const SelfcheckOptions& opt);

}  // namespace smectic
