#include "smectic/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "smectic/error.hpp"

namespace smectic {

const char* to_string(SchemeMode mode) {
  switch (mode) {
    case SchemeMode::RelaxedGSAV: return "relaxed";
    case SchemeMode::GSAVNoRelax: return "norelax";
    case SchemeMode::PlainETD: return "plain";
  }
  return "?";
}

TimeController TimeController::fixed(double tau) {
  TimeController c;
  c.kind = Kind::Fixed;
  c.tau = tau;
  c.validate();
  return c;
}

TimeController TimeController::adaptive(double tau_min, double tau_max, double alpha) {
  TimeController c;
  c.kind = Kind::Adaptive;
  c.tau_min = tau_min;
  c.tau_max = tau_max;
  c.alpha = alpha;
  c.validate();
  return c;
}

void TimeController::validate() const {
  if (kind == Kind::Fixed) {
    if (!(tau > 0.0) || !std::isfinite(tau)) fail(ErrorKind::Argument, "tau > 0 required");
    return;
  }
  if (!(tau_min > 0.0 && tau_min <= tau_max) || !std::isfinite(tau_max)) {
    fail(ErrorKind::Argument, "0 < tau_min <= tau_max required");
  }
  if (!(alpha >= 0.0)) fail(ErrorKind::Argument, "alpha >= 0 required");
}

SolverState make_initial_state(QField Q, ScalarField u, const ModelParams& p, double t) {
  SolverState st;
  st.s = e1h(Q, u, p);
  st.Q = std::move(Q);
  st.u = std::move(u);
  st.t = t;
  return st;
}

double relaxation_xi(double e1_next, double s_tilde, double R, double tau, double eta0) {
  if (e1_next <= s_tilde) return 0.0;
  const double xi = 1.0 - eta0 * tau * R / (e1_next - s_tilde);
  return std::clamp(xi, 0.0, 1.0);
}

double dissipation_rate(const SpectralPlan& plan, const QField& dQ, const ScalarField& du, double tau,
                        double g, const ModelParams& p) {
  if (!(tau > 0.0)) fail(ErrorKind::Argument, "tau > 0 required");
  const ModeCoeffs symL = make_symbol(plan, OperatorKind::Elastic, p, g);
  const ModeCoeffs symD = make_symbol(plan, OperatorKind::Bending, p, g);
  return (weighted_norm_squared(plan, dQ, symL, tau, NormKind::Q1) +
          weighted_norm_squared(plan, du, symD, tau, NormKind::Q1)) /
         tau;
}

double adaptive_tau(double dE, const TimeController& ctl) {
  if (ctl.kind != TimeController::Kind::Adaptive) {
    fail(ErrorKind::Argument, "adaptive_tau needs an adaptive controller");
  }
  return std::max(ctl.tau_min, ctl.tau_max / std::sqrt(1.0 + ctl.alpha * dE * dE));
}

// ---------------------------------------------------------------------------

Stepper::Stepper(const GridSpec& grid, StepConfig cfg) : cfg_(std::move(cfg)), plan_(grid) {
  if (cfg_.params.dim != grid.dim) fail(ErrorKind::Argument, "model dimension does not match grid");
}

namespace {

double relative_gap(const Spectrum& a, const Spectrum& b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    diff = std::max(diff, std::abs(a[m] - b[m]));
    scale = std::max(scale, std::abs(a[m]));
  }
  return diff / std::max(scale, 1e-300);
}

void check_blowup(const SolverState& st, const QField& Q, const ScalarField& u, double threshold) {
  double worst = 0.0;
  bool finite = Q.all_finite() && u.all_finite();
  if (finite) worst = std::max(sup_frobenius(Q), norm_inf(u));
  if (!finite || worst > threshold) {
    std::ostringstream msg;
    msg << "numerical blow-up at step " << st.step_index + 1 << " (t = " << st.t << "): ";
    if (!finite) {
      msg << "non-finite field values";
      worst = std::numeric_limits<double>::infinity();
    } else {
      msg << "field magnitude " << worst << " exceeds " << threshold;
    }
    throw BlowupError(st.step_index + 1, worst, msg.str());
  }
}

}  // namespace

StepDiagnostics Stepper::step(SolverState& state, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) fail(ErrorKind::Argument, "tau > 0 required");
  require_same_grid(plan_.grid(), state.u.grid(), "Stepper::step");
  require_same_grid(plan_.grid(), state.Q.grid(), "Stepper::step");

  ModelParams p = cfg_.params;
  const bool plain = cfg_.mode == SchemeMode::PlainETD;

  NonlinearTerms nl = nonlinear_terms(state.Q, state.u, p);
  double g = 1.0;
  if (!plain) {
    try {
      g = g_factor(state.s, nl.e1);
    } catch (const Error& e) {
      throw BlowupError(state.step_index + 1, std::abs(state.s - nl.e1), e.what());
    }
  }
  g_min_ = std::min(g_min_, g);
  g_max_ = std::max(g_max_, g);

  if (cfg_.mbp_enforce_kappa && mbp_eta_) {
    double sup_u2 = 0.0;
    for (double v : state.u.values()) sup_u2 = std::max(sup_u2, v * v);
    const double k0 = kappa0(p, *mbp_eta_, sup_u2);
    const double needed = k0 / std::min(g_min_, 1.0);
    if (!std::isfinite(needed)) {
      throw BlowupError(state.step_index + 1, needed,
                        "stabilization kappa0 / g_min is unbounded (g underflowed to zero)");
    }
    p.kappa1 = std::max(p.kappa1, needed);
  }

  StepDiagnostics diag;
  diag.g = g;
  diag.tau_used = tau;
  diag.kappa1_used = p.kappa1;
  diag.E_modified_before = quadratic_energy(state.Q, state.u, p) + (plain ? nl.e1 : state.s);

  const ModeCoeffs symL = make_symbol(plan_, OperatorKind::Elastic, p, g);
  const ModeCoeffs symD = make_symbol(plan_, OperatorKind::Bending, p, g);

  // Q update, component by component (the linear operator is diagonal in them).
  const GridSpec& grid = plan_.grid();
  QField q_next(grid);
  std::vector<Spectrum> dq_hat;
  double form_gap = 0.0;
  for (int c = 0; c < state.Q.count(); ++c) {
    ScalarField nq = p.kappa1 * state.Q.component(c);
    nq -= nl.H.component(c);
    nq *= g;
    const Spectrum q_hat = plan_.forward(state.Q.component(c));
    const Spectrum n_hat = plan_.forward(nq);
    Spectrum next = etd_update(q_hat, symL, n_hat, tau);
    if (cfg_.check_form_equivalence) {
      form_gap = std::max(form_gap, relative_gap(next, quasi_implicit_update(q_hat, symL, n_hat, tau)));
    }
    q_next.component(c) = plan_.inverse(next);
    for (std::size_t m = 0; m < next.size(); ++m) next[m] -= q_hat[m];
    dq_hat.push_back(std::move(next));
  }

  ScalarField nu = p.kappa2 * state.u;
  nu -= nl.mu;
  nu *= g;
  const Spectrum u_hat = plan_.forward(state.u);
  const Spectrum nu_hat = plan_.forward(nu);
  Spectrum u_next_hat = etd_update(u_hat, symD, nu_hat, tau);
  if (cfg_.check_form_equivalence) {
    form_gap = std::max(form_gap, relative_gap(u_next_hat, quasi_implicit_update(u_hat, symD, nu_hat, tau)));
  }
  ScalarField u_next = plan_.inverse(u_next_hat);
  Spectrum du_hat = u_next_hat;
  for (std::size_t m = 0; m < du_hat.size(); ++m) du_hat[m] -= u_hat[m];

  check_blowup(state, q_next, u_next, cfg_.blowup_threshold);

  const QField dQ = q_next - state.Q;
  const ScalarField du = u_next - state.u;
  diag.s_tilde = state.s + g * (frobenius_inner(nl.H, dQ) + inner(nl.mu, du));
  diag.R = (weighted_norm_squared(plan_, std::span<const Spectrum>(dq_hat), symL, tau, NormKind::Q1) +
            weighted_norm_squared(plan_, du_hat, symD, tau, NormKind::Q1)) /
           tau;
  diag.form_residual = form_gap;

  const double e1_next = e1h(q_next, u_next, p);
  double s_next = 0.0;
  switch (cfg_.mode) {
    case SchemeMode::RelaxedGSAV:
      diag.xi = relaxation_xi(e1_next, diag.s_tilde, diag.R, tau, p.eta0);
      s_next = diag.xi * diag.s_tilde + (1.0 - diag.xi) * e1_next;
      break;
    case SchemeMode::GSAVNoRelax:
      diag.xi = 1.0;
      s_next = diag.s_tilde;
      break;
    case SchemeMode::PlainETD:
      diag.xi = 0.0;
      s_next = e1_next;
      break;
  }
  if (!std::isfinite(s_next)) {
    throw BlowupError(state.step_index + 1, std::abs(s_next), "auxiliary variable became non-finite");
  }

  const double quad = quadratic_energy(q_next, u_next, p);
  diag.e1h = e1_next;
  diag.s = s_next;
  diag.E_modified = quad + s_next;
  diag.E_original = quad + e1_next;
  diag.sup_F = sup_frobenius(q_next);
  diag.max_u = u_next.max();
  diag.min_u = u_next.min();

  if (cfg_.check_form_equivalence && form_gap > 1e-11) {
    std::ostringstream msg;
    msg << "exponential and quasi-implicit forms disagree at step " << state.step_index + 1
        << ": relative gap " << form_gap;
    fail(ErrorKind::Invariant, msg.str());
  }
  if (cfg_.assert_dissipation && !plain) {
    const double before = diag.E_modified_before;
    if (diag.E_modified > before + 1e-10 * (1.0 + std::abs(before))) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "modified energy increased at step " << state.step_index + 1 << ": " << before << " -> "
          << diag.E_modified;
      fail(ErrorKind::Invariant, msg.str());
    }
  }

  state.Q = std::move(q_next);
  state.u = std::move(u_next);
  state.s = s_next;
  state.t += tau;
  ++state.step_index;
  return diag;
}

// ---------------------------------------------------------------------------

RunSummary run(SolverState& state, const StepConfig& cfg, const RunOptions& options,
               std::span<RunSink* const> sinks) {
  cfg.controller.validate();
  if (options.t_final < state.t) fail(ErrorKind::Argument, "T_final precedes the initial time");

  Stepper stepper(state.u.grid(), cfg);
  const ModelParams& p = cfg.params;

  RunSummary summary;
  summary.e1h_initial = e1h(state.Q, state.u, p);
  const double quad0 = quadratic_energy(state.Q, state.u, p);
  summary.E_original_initial = quad0 + summary.e1h_initial;
  summary.E_modified_initial =
      quad0 + (cfg.mode == SchemeMode::PlainETD ? summary.e1h_initial : state.s);
  summary.sup_F_initial = sup_frobenius(state.Q);
  summary.t = state.t;
  summary.last.E_modified = summary.E_modified_initial;
  summary.last.E_original = summary.E_original_initial;
  summary.last.e1h = summary.e1h_initial;
  summary.last.s = state.s;
  summary.last.sup_F = summary.sup_F_initial;

  if (cfg.mbp_monitor || cfg.mbp_enforce_kappa) {
    double sup_u2 = 0.0;
    for (double v : state.u.values()) sup_u2 = std::max(sup_u2, v * v);
    summary.mbp_eta = mbp_eta(p, summary.sup_F_initial, coupling_forcing_bound(state.u, p));
    summary.mbp_kappa0 = kappa0(p, summary.mbp_eta, sup_u2);
    stepper.set_mbp_bound(summary.mbp_eta);
  }

  const bool adaptive = cfg.controller.kind == TimeController::Kind::Adaptive;
  const double t0 = state.t;
  const double T = options.t_final;
  const double span = T - t0;
  double tau = adaptive ? cfg.controller.tau_min : cfg.controller.tau;

  // Fixed stepping: times are t0 + n tau, with one clipped step at the end.
  long fixed_full = 0;
  bool fixed_tail = false;
  if (!adaptive) {
    const double ratio = span / tau;
    fixed_full = static_cast<long>(std::floor(ratio + 1e-9));
    fixed_tail = ratio - static_cast<double>(fixed_full) > 1e-9;
  }

  summary.tau_min_used = std::numeric_limits<double>::infinity();
  summary.tau_max_used = 0.0;
  long n = 0;
  while (true) {
    double step_tau;
    double t_after;
    bool last = false;
    if (!adaptive) {
      if (n < fixed_full) {
        step_tau = tau;
        t_after = t0 + static_cast<double>(n + 1) * tau;
        last = !fixed_tail && n + 1 == fixed_full;
      } else if (fixed_tail && n == fixed_full) {
        step_tau = T - (t0 + static_cast<double>(n) * tau);
        t_after = T;
        last = true;
      } else {
        break;
      }
    } else {
      const double remaining = T - state.t;
      if (remaining <= 1e-12 * std::max(1.0, std::abs(T))) break;
      const double tmin = cfg.controller.tau_min;
      if (remaining <= tau) {
        step_tau = remaining;
        last = true;
      } else if (remaining - tau < tmin) {
        // Keep the final step at least tau_min long.
        step_tau = remaining - tmin >= tmin ? remaining - tmin : remaining;
        last = step_tau == remaining;
      } else {
        step_tau = tau;
      }
      t_after = last ? T : state.t + step_tau;
    }
    if (last) t_after = T;

    StepDiagnostics diag = stepper.step(state, step_tau);
    state.t = t_after;
    ++n;

    summary.max_energy_increase =
        std::max(summary.max_energy_increase, diag.E_modified - diag.E_modified_before);
    summary.tau_min_used = std::min(summary.tau_min_used, step_tau);
    summary.tau_max_used = std::max(summary.tau_max_used, step_tau);
    if (cfg.mbp_monitor && diag.sup_F > summary.mbp_eta * (1.0 + 1e-8)) {
      if (summary.mbp_violations == 0) summary.mbp_first_violation = state.step_index;
      ++summary.mbp_violations;
    }
    if (summary.mbp_eta > 0.0) summary.mbp_max_ratio = std::max(summary.mbp_max_ratio, diag.sup_F / summary.mbp_eta);

    for (RunSink* sink : sinks) sink->on_step(state, diag);
    if (options.snapshot_every > 0 && n % options.snapshot_every == 0) {
      for (RunSink* sink : sinks) sink->on_snapshot(state);
    }
    summary.last = diag;

    if (adaptive) tau = adaptive_tau((diag.E_modified - diag.E_modified_before) / step_tau, cfg.controller);
    if (last) break;
  }

  summary.steps = n;
  summary.t = state.t;
  summary.g_min = std::isfinite(stepper.g_min()) ? stepper.g_min() : 1.0;
  summary.g_max = n > 0 ? stepper.g_max() : 1.0;
  if (n == 0) {
    summary.tau_min_used = 0.0;
  }
  return summary;
}

}  // namespace smectic
