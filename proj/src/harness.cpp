#include "smectic/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "smectic/energy.hpp"
#include "smectic/error.hpp"
#include "smectic/qtensor.hpp"
#include "smectic/spectral.hpp"

namespace smectic {

const char* FieldErrors::name(int i) {
  static const char* const names[] = {"Q_inf", "Q_l2", "Q_H1", "u_inf", "u_l2", "u_H2", "s"};
  return names[i];
}

double FieldErrors::get(int i) const { return const_cast<FieldErrors*>(this)->get(i); }

double& FieldErrors::get(int i) {
  switch (i) {
    case 0: return q_inf;
    case 1: return q_l2;
    case 2: return q_h1;
    case 3: return u_inf;
    case 4: return u_l2;
    case 5: return u_h2;
    default: return s;
  }
}

FieldErrors state_errors(const SolverState& a, const SolverState& b) {
  require_same_grid(a.u.grid(), b.u.grid(), "state_errors");
  const QField eq = a.Q - b.Q;
  const ScalarField eu = a.u - b.u;
  FieldErrors e;
  e.q_inf = sup_frobenius(eq);
  const double q2 = frobenius_inner(eq, eq);
  double grad2 = 0.0;
  for (int axis = 0; axis < a.u.grid().dim; ++axis) {
    QField dq(eq.grid());
    for (int c = 0; c < eq.count(); ++c) dq.component(c) = apply_diff(eq.component(c), axis, DiffKind::Forward);
    grad2 += frobenius_inner(dq, dq);
  }
  e.q_l2 = std::sqrt(q2);
  e.q_h1 = std::sqrt(q2 + grad2);
  e.u_inf = norm_inf(eu);
  e.u_l2 = norm_l2(eu);
  e.u_h2 = norm_h2(eu);
  e.s = std::abs(a.s - b.s);
  return e;
}

SolverState restrict_state(const SolverState& fine, const GridSpec& coarse) {
  const GridSpec& fg = fine.u.grid();
  if (fg.dim != coarse.dim || fg.length != coarse.length || fg.points % coarse.points != 0) {
    fail(ErrorKind::Argument, "restriction needs nested grids of equal extent");
  }
  const int r = fg.points / coarse.points;
  const int J = coarse.points;
  const int K = coarse.dim == 3 ? J : 1;
  auto pick = [&](const ScalarField& f) {
    ScalarField out(coarse);
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < J; ++j)
        for (int i = 0; i < J; ++i) out.at(i, j, k) = f.at(i * r, j * r, k * r);
    return out;
  };
  SolverState st;
  st.u = pick(fine.u);
  st.Q = QField(coarse);
  for (int c = 0; c < st.Q.count(); ++c) st.Q.component(c) = pick(fine.Q.component(c));
  st.s = fine.s;
  st.t = fine.t;
  st.step_index = fine.step_index;
  return st;
}

namespace {

FieldErrors rate_between(const FieldErrors& e0, const FieldErrors& e1, double p0, double p1) {
  FieldErrors r;
  const double lp = std::log(p0 / p1);
  for (int i = 0; i < FieldErrors::kCount; ++i) {
    const double a = e0.get(i), b = e1.get(i);
    r.get(i) = (a > 0.0 && b > 0.0) ? std::log(a / b) / lp : std::nan("");
  }
  return r;
}

void fill_rates(ConvergenceTable& t) {
  for (std::size_t k = 0; k + 1 < t.values.size(); ++k) {
    t.rates.push_back(rate_between(t.errors[k], t.errors[k + 1], t.values[k], t.values[k + 1]));
  }
}

SolverState run_fixed(const RunConfig& base, double tau) {
  RunConfig cfg = base;
  cfg.controller = TimeController::fixed(tau);
  validate(cfg);
  SolverState st = initial_state(cfg);
  RunOptions opt;
  opt.t_final = cfg.T_final;
  run(st, cfg.step_config(), opt);
  return st;
}

}  // namespace

std::string ConvergenceTable::format() const {
  std::string out;
  char buf[64];
  out += parameter;
  for (int i = 0; i < FieldErrors::kCount; ++i) {
    std::snprintf(buf, sizeof buf, "  %10s %6s", FieldErrors::name(i), "rate");
    out += buf;
  }
  out += "\n";
  for (std::size_t k = 0; k < values.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%-10.4g", values[k]);
    out += buf;
    for (int i = 0; i < FieldErrors::kCount; ++i) {
      std::snprintf(buf, sizeof buf, "  %10.3e", errors[k].get(i));
      out += buf;
      if (k == 0) {
        std::snprintf(buf, sizeof buf, " %6s", "-");
      } else {
        std::snprintf(buf, sizeof buf, " %6.2f", rates[k - 1].get(i));
      }
      out += buf;
    }
    out += "\n";
  }
  return out;
}

ConvergenceTable convergence_time(const RunConfig& cfg, std::span<const double> taus, double tau_ref) {
  if (taus.empty()) fail(ErrorKind::Argument, "empty time-step ladder");
  std::vector<double> ladder(taus.begin(), taus.end());
  std::sort(ladder.begin(), ladder.end(), std::greater<>());
  if (std::adjacent_find(ladder.begin(), ladder.end()) != ladder.end()) {
    fail(ErrorKind::Argument, "time-step ladder has repeated entries");
  }
  if (!(tau_ref > 0.0) || !(tau_ref < ladder.back())) {
    fail(ErrorKind::Argument, "reference step must be positive and below every ladder step");
  }
  auto check_divides = [&](double tau) {
    const double n = cfg.T_final / tau;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) {
      fail(ErrorKind::Argument, "time step " + std::to_string(tau) + " does not divide T_final");
    }
  };
  for (double tau : ladder) check_divides(tau);
  check_divides(tau_ref);

  const SolverState ref = run_fixed(cfg, tau_ref);
  ConvergenceTable t;
  t.parameter = "tau";
  for (double tau : ladder) {
    t.values.push_back(tau);
    t.errors.push_back(state_errors(run_fixed(cfg, tau), ref));
  }
  fill_rates(t);
  return t;
}

ConvergenceTable convergence_space(const RunConfig& cfg, std::span<const int> Js, int J_ref, double tau) {
  if (Js.empty()) fail(ErrorKind::Argument, "empty grid ladder");
  if (cfg.init_q == InitQ::Random || cfg.init_u == InitU::Random) {
    fail(ErrorKind::Argument, "space convergence needs sampled (non-random) initial data");
  }
  std::vector<int> ladder(Js.begin(), Js.end());
  std::sort(ladder.begin(), ladder.end());
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const int next = k + 1 < ladder.size() ? ladder[k + 1] : J_ref;
    if (next % ladder[k] != 0 || next < ladder[k]) {
      fail(ErrorKind::Argument, "grid ladder is not nested: " + std::to_string(ladder[k]) + " does not divide " +
                                    std::to_string(next));
    }
  }
  RunConfig ref_cfg = cfg;
  ref_cfg.J = J_ref;
  const SolverState ref = run_fixed(ref_cfg, tau);

  ConvergenceTable t;
  t.parameter = "h";
  for (int J : ladder) {
    RunConfig c = cfg;
    c.J = J;
    const SolverState coarse = run_fixed(c, tau);
    t.values.push_back(c.L / J);
    t.errors.push_back(state_errors(coarse, restrict_state(ref, c.grid())));
  }
  fill_rates(t);
  return t;
}

// ---------------------------------------------------------------------------

ModelParams oracle_params(int dim) {
  ModelParams p;
  p.dim = dim;
  p.B = dim == 3 ? 1.0 : 0.0;
  p.b = 0.5;
  p.q = 2.0;
  p.B0 = 0.05;
  return p.validated();
}

namespace {

ScalarField random_field(const GridSpec& g, std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> dist(-amp, amp);
  ScalarField f(g);
  for (double& v : f.values()) v = dist(rng);
  return f;
}

QField random_q(const GridSpec& g, std::mt19937_64& rng, double amp) {
  QField q(g);
  for (int c = 0; c < q.count(); ++c) q.component(c) = random_field(g, rng, amp);
  return q;
}

double rel(double a, double b, double scale) { return std::abs(a - b) / std::max(scale, 1e-300); }

}  // namespace

GradientCheckResult gradient_check(const GradientCheckOptions& opt) {
  const GridSpec grid = GridSpec::make(opt.dim, opt.J, 2.0 * 3.141592653589793);
  const ModelParams p = oracle_params(opt.dim);
  std::mt19937_64 rng(opt.seed);
  const QField Q = random_q(grid, rng, 0.5);
  const ScalarField u = random_field(grid, rng, 0.5);
  QField dQ = random_q(grid, rng, 1.0);
  ScalarField du = random_field(grid, rng, 1.0);
  const double norm = std::sqrt(frobenius_inner(dQ, dQ) + inner(du, du));
  dQ *= 1.0 / norm;
  du *= 1.0 / norm;

  const double ep = e1h(Q + opt.eps * dQ, u + opt.eps * du, p);
  const double em = e1h(Q - opt.eps * dQ, u - opt.eps * du, p);
  const NonlinearTerms nl = nonlinear_terms(Q, u, p);

  GradientCheckResult r;
  r.finite_difference = (ep - em) / (2.0 * opt.eps);
  r.analytic = (frobenius_inner(nl.H, dQ) + inner(nl.mu, du)) * (1.0 + opt.perturbation);
  r.rel_error = rel(r.analytic, r.finite_difference, std::abs(r.finite_difference));
  return r;
}

bool SelfcheckReport::all_passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const CheckEntry& e) { return e.passed; });
}

std::string SelfcheckReport::format() const {
  std::string out;
  char buf[160];
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof buf, "%-4s %-28s residual %.3e  tolerance %.1e\n", e.passed ? "PASS" : "FAIL",
                  e.name.c_str(), e.residual, e.tolerance);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "seed %llu: %s\n", static_cast<unsigned long long>(seed),
                all_passed() ? "all checks passed" : "FAILURES");
  out += buf;
  return out;
}

SelfcheckReport selfcheck(const SelfcheckOptions& opt) {
  SelfcheckReport report;
  report.seed = opt.seed;
  auto add = [&](std::string name, double residual, double tol) {
    report.entries.push_back({std::move(name), residual, tol, std::isfinite(residual) && residual <= tol});
  };
  std::mt19937_64 rng(opt.seed);
  const double L = 2.0 * 3.141592653589793;

  for (int dim : {2, 3}) {
    const GridSpec g = GridSpec::make(dim, dim == 2 ? 16 : 8, L);
    const std::string tag = "_" + std::to_string(dim) + "d";
    const ScalarField f = random_field(g, rng, 1.0);
    const ScalarField h = random_field(g, rng, 1.0);

    // <lap f, h> = -[grad f, grad h]
    const VectorField gf = gradient(f), gh = gradient(h);
    const double lhs = inner(laplacian(f), h), rhs = -inner(gf, gh);
    add("sbp_laplacian" + tag, rel(lhs, rhs, norm_l2(laplacian(f)) * norm_l2(h)), 1e-12);

    // <div v, f> = -[v, grad f]
    VectorField v;
    for (int a = 0; a < dim; ++a) v.components.push_back(random_field(g, rng, 1.0));
    add("sbp_divergence" + tag, rel(inner(divergence(v), f), -inner(v, gf), norm_l2(divergence(v)) * norm_l2(f) + std::sqrt(inner(v, v) * inner(gf, gf))), 1e-12);

    // Hessian components self-adjoint; hessian_adjoint is the adjoint of hessian.
    const SymMatrixField Hf = hessian(f), Hh = hessian(h);
    double worst = 0.0;
    for (int c = 0; c < Hf.count(); ++c) {
      const double a1 = inner(Hf.component(c), h), a2 = inner(f, Hh.component(c));
      worst = std::max(worst, rel(a1, a2, norm_l2(Hf.component(c)) * norm_l2(h)));
    }
    add("hessian_self_adjoint" + tag, worst, 1e-12);
    SymMatrixField T(g);
    for (int c = 0; c < T.count(); ++c) T.component(c) = random_field(g, rng, 1.0);
    const double ha = frobenius_inner(Hf, T), hb = inner(f, hessian_adjoint(T));
    add("hessian_adjoint" + tag, rel(ha, hb, std::sqrt(frobenius_inner(Hf, Hf) * frobenius_inner(T, T))), 1e-12);

    const SpectralPlan plan(g);
    add("parseval" + tag, parseval_check(plan, f), 1e-12);
    const ScalarField back = plan.inverse(plan.forward(f));
    add("fft_round_trip" + tag, norm_inf(back - f) / norm_inf(f), 1e-13);

    GradientCheckOptions gopt;
    gopt.dim = dim;
    gopt.seed = rng();
    gopt.perturbation = opt.gradient_perturbation;
    add("gradient_oracle" + tag, gradient_check(gopt).rel_error, 1e-6);

    // One step through both update forms.
    const ModelParams p = oracle_params(dim);
    StepConfig sc;
    sc.params = p;
    sc.check_form_equivalence = true;
    sc.assert_dissipation = false;
    Stepper stepper(g, sc);
    SolverState st = make_initial_state(random_q(g, rng, 0.3), random_field(g, rng, 0.3), p);
    st.s += 0.1;  // g != 1
    const StepDiagnostics d = stepper.step(st, 0.1);
    add("form_equivalence" + tag, d.form_residual, 1e-11);
  }

  // (Q(z) + z) phi1(-z) = 1
  double worst_identity = 0.0;
  for (double e = -12.0; e <= 3.0; e += 0.05) {
    const double z = std::pow(10.0, e);
    worst_identity = std::max(worst_identity, std::abs((qfun(z) + z) * phi1(-z) - 1.0));
  }
  add("exp_identity", worst_identity, 1e-12);

  // ||U||_Q <= ||U|| <= ||U||_Q1 <= ||U||_op for g kappa >= 2, tau <= 1.
  {
    const GridSpec g = GridSpec::make(2, 16, L);
    const SpectralPlan plan(g);
    const ModelParams p = ModelParams{}.validated();
    std::uniform_real_distribution<double> tau_dist(-3.0, 0.0), g_dist(0.25, 4.0);
    double worst = -1.0;
    for (int n = 0; n < opt.norm_chain_samples; ++n) {
      const double tau = std::pow(10.0, tau_dist(rng));
      const double gval = g_dist(rng);
      const ScalarField U = random_field(g, rng, 1.0);
      const Spectrum hat = plan.forward(U);
      for (auto kind : {OperatorKind::Elastic, OperatorKind::Bending}) {
        const ModeCoeffs sym = make_symbol(plan, kind, p, gval);
        const double nq = weighted_norm_squared(plan, hat, sym, tau, NormKind::Q);
        const double n0 = weighted_norm_squared(plan, hat, sym, tau, NormKind::Plain);
        const double n1 = weighted_norm_squared(plan, hat, sym, tau, NormKind::Q1);
        const double nop = weighted_norm_squared(plan, hat, sym, tau, NormKind::Operator);
        const double scale = std::max(n0, 1e-300);
        worst = std::max({worst, (nq - n0) / scale, (n0 - n1) / scale, (n1 - nop) / scale});
      }
    }
    // residual = largest relative violation (negative means strict)
    add("norm_chain", std::max(worst, 0.0), 1e-14);
  }
  return report;
}

}  // namespace smectic
