#pragma once

// First-order relaxed GSAV exponential-integrator time stepping.

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "smectic/energy.hpp"
#include "smectic/grid.hpp"
#include "smectic/qtensor.hpp"
#include "smectic/spectral.hpp"

namespace smectic {

enum class SchemeMode {
  RelaxedGSAV,  // auxiliary variable pulled back toward E1h after every step
  GSAVNoRelax,  // s = s_tilde
  PlainETD,     // g = 1, no auxiliary variable; s is reported as E1h
};

const char* to_string(SchemeMode mode);

struct TimeController {
  enum class Kind { Fixed, Adaptive };
  Kind kind = Kind::Fixed;
  double tau = 1e-2;  // fixed step
  double tau_min = 1e-3;
  double tau_max = 1e-1;
  double alpha = 1e5;

  static TimeController fixed(double tau);
  static TimeController adaptive(double tau_min, double tau_max, double alpha);
  void validate() const;
};

struct StepConfig {
  SchemeMode mode = SchemeMode::RelaxedGSAV;
  ModelParams params;
  TimeController controller;
  bool assert_dissipation = true;
  bool mbp_monitor = false;
  /// Raise kappa1 per step to at least kappa0 / min(g_min, 1).
  bool mbp_enforce_kappa = false;
  /// Recompute every step through the quasi-implicit per-mode solve and compare.
  bool check_form_equivalence = false;
  double blowup_threshold = 1e8;
};

struct SolverState {
  QField Q;
  ScalarField u;
  double s = 0.0;
  double t = 0.0;
  long step_index = 0;
};

/// Builds a state with s = E1h(Q, u), so that g = 1 at the first step.
SolverState make_initial_state(QField Q, ScalarField u, const ModelParams& p, double t = 0.0);

struct StepDiagnostics {
  double g = 1.0;
  double s_tilde = 0.0;
  double xi = 0.0;
  double R = 0.0;
  double e1h = 0.0;
  double s = 0.0;
  double E_modified = 0.0;
  double E_original = 0.0;
  double E_modified_before = 0.0;
  double sup_F = 0.0;
  double max_u = 0.0;
  double min_u = 0.0;
  double tau_used = 0.0;
  double kappa1_used = 0.0;
  double form_residual = 0.0;  // only filled when check_form_equivalence is on
};

/// xi in [0, 1]: 0 if e1_next <= s_tilde, else max(0, 1 - eta0 tau R / (e1_next - s_tilde)).
double relaxation_xi(double e1_next, double s_tilde, double R, double tau, double eta0);

/// (1/tau) (||dQ||^2_{Q1,L} + ||du||^2_{Q1,D}) with the operators built at factor g.
double dissipation_rate(const SpectralPlan& plan, const QField& dQ, const ScalarField& du, double tau,
                        double g, const ModelParams& p);

/// max{tau_min, tau_max / sqrt(1 + alpha dE^2)}.
double adaptive_tau(double dE, const TimeController& ctl);

class Stepper {
 public:
  Stepper(const GridSpec& grid, StepConfig cfg);

  /// Advances state by tau in place.
  StepDiagnostics step(SolverState& state, double tau);

  const StepConfig& config() const { return cfg_; }
  const SpectralPlan& plan() const { return plan_; }

  /// Bound used by kappa1 enforcement; set by the run loop from initial data.
  void set_mbp_bound(double eta) { mbp_eta_ = eta; }
  double g_min() const { return g_min_; }
  double g_max() const { return g_max_; }

 private:
  StepConfig cfg_;
  SpectralPlan plan_;
  std::optional<double> mbp_eta_;
  double g_min_ = std::numeric_limits<double>::infinity();
  double g_max_ = 0.0;
};

struct RunOptions {
  double t_final = 1.0;
  long snapshot_every = 0;  // 0 = no periodic snapshots
};

/// Receives one call per completed step and one per snapshot.
class RunSink {
 public:
  virtual ~RunSink() = default;
  virtual void on_step(const SolverState& state, const StepDiagnostics& diag) = 0;
  virtual void on_snapshot(const SolverState& state) { (void)state; }
};

struct RunSummary {
  long steps = 0;
  double t = 0.0;
  double E_modified_initial = 0.0;
  double E_original_initial = 0.0;
  double e1h_initial = 0.0;
  double sup_F_initial = 0.0;
  StepDiagnostics last;
  double g_min = 1.0;
  double g_max = 1.0;
  double tau_min_used = 0.0;
  double tau_max_used = 0.0;
  double max_energy_increase = -std::numeric_limits<double>::infinity();
  // maximum bound monitor
  double mbp_eta = 0.0;
  double mbp_kappa0 = 0.0;
  long mbp_violations = 0;
  long mbp_first_violation = -1;
  double mbp_max_ratio = 0.0;  // max_n sup|Q^n|_F / eta
};

RunSummary run(SolverState& state, const StepConfig& cfg, const RunOptions& options,
               std::span<RunSink* const> sinks = {});

}  // namespace smectic
