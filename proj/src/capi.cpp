#include "smectic/smectic.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "smectic/config.hpp"
#include "smectic/error.hpp"
#include "smectic/harness.hpp"
#include "smectic/io.hpp"
#include "smectic/stepper.hpp"

struct smectic_config {
  smectic::RunConfig cfg;
};

struct smectic_solver {
  smectic::RunConfig cfg;
  smectic::SolverState state;
  std::unique_ptr<smectic::Stepper> stepper;
};

struct smectic_report {
  bool passed = true;
  std::string text;
  std::vector<smectic::FieldErrors> errors;
  std::vector<smectic::FieldErrors> rates;
  double value = 0.0;
};

namespace {

thread_local std::string last_error;

smectic_status status_of(smectic::ErrorKind kind) {
  using smectic::ErrorKind;
  switch (kind) {
    case ErrorKind::Argument: return SMECTIC_ERR_ARGUMENT;
    case ErrorKind::Constraint: return SMECTIC_ERR_CONSTRAINT;
    case ErrorKind::Parameter: return SMECTIC_ERR_PARAMETER;
    case ErrorKind::Numerical: return SMECTIC_ERR_NUMERICAL;
    case ErrorKind::Blowup: return SMECTIC_ERR_BLOWUP;
    case ErrorKind::Invariant: return SMECTIC_ERR_INVARIANT;
    case ErrorKind::Config: return SMECTIC_ERR_CONFIG;
    case ErrorKind::Io: return SMECTIC_ERR_IO;
    case ErrorKind::Internal: return SMECTIC_ERR_INTERNAL;
  }
  return SMECTIC_ERR_INTERNAL;
}

smectic_status set_error(smectic_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class F>
smectic_status guarded(F&& body) {
  try {
    body();
    return SMECTIC_OK;
  } catch (const smectic::Error& e) {
    return set_error(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SMECTIC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SMECTIC_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(SMECTIC_ERR_INTERNAL, "unknown exception");
  }
}

smectic_status null_arg(const char* what) {
  return set_error(SMECTIC_ERR_ARGUMENT, std::string(what) + " must not be NULL");
}

smectic_status copy_string(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf || cap < s.size() + 1) {
    return set_error(SMECTIC_ERR_BUFFER, "buffer of " + std::to_string(cap) + " bytes is too small, need " +
                                             std::to_string(s.size() + 1));
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return SMECTIC_OK;
}

smectic::ScalarField* find_field(smectic::SolverState& st, const std::string& name) {
  if (name == "u") return &st.u;
  const bool three = st.u.grid().dim == 3;
  const char* const names2[] = {"q11", "q12"};
  const char* const names3[] = {"q11", "q22", "q12", "q13", "q23"};
  for (int c = 0; c < st.Q.count(); ++c) {
    if (name == (three ? names3[c] : names2[c])) return &st.Q.component(c);
  }
  return nullptr;
}

void fill_step_info(const smectic::SolverState& st, const smectic::StepDiagnostics& d, smectic_step_info* info) {
  if (!info) return;
  info->step = st.step_index;
  info->t = st.t;
  info->tau = d.tau_used;
  info->g = d.g;
  info->s_tilde = d.s_tilde;
  info->xi = d.xi;
  info->R = d.R;
  info->e1h = d.e1h;
  info->s = d.s;
  info->E_modified = d.E_modified;
  info->E_original = d.E_original;
  info->sup_F = d.sup_F;
  info->max_u = d.max_u;
  info->min_u = d.min_u;
}

smectic_report* table_report(const smectic::ConvergenceTable& t) {
  auto* r = new smectic_report;
  r->text = t.format();
  r->errors = t.errors;
  r->rates = t.rates;
  return r;
}

smectic_status copy_table(const std::vector<smectic::FieldErrors>& rows, double* out, size_t len) {
  const size_t need = rows.size() * smectic::FieldErrors::kCount;
  if (!out || len < need) {
    return set_error(SMECTIC_ERR_BUFFER, "need " + std::to_string(need) + " doubles");
  }
  for (size_t k = 0; k < rows.size(); ++k) {
    for (int i = 0; i < smectic::FieldErrors::kCount; ++i) out[k * smectic::FieldErrors::kCount + i] = rows[k].get(i);
  }
  return SMECTIC_OK;
}

}  // namespace

extern "C" {

const char* smectic_version(void) { return "1.0.0"; }

const char* smectic_last_error(void) { return last_error.c_str(); }

const char* smectic_status_name(smectic_status status) {
  switch (status) {
    case SMECTIC_OK: return "ok";
    case SMECTIC_ERR_ARGUMENT: return "argument error";
    case SMECTIC_ERR_CONFIG: return "config error";
    case SMECTIC_ERR_PARAMETER: return "parameter error";
    case SMECTIC_ERR_CONSTRAINT: return "constraint error";
    case SMECTIC_ERR_NUMERICAL: return "numerical error";
    case SMECTIC_ERR_BLOWUP: return "numerical blow-up";
    case SMECTIC_ERR_INVARIANT: return "invariant violation";
    case SMECTIC_ERR_IO: return "i/o error";
    case SMECTIC_ERR_BUFFER: return "buffer too small";
    case SMECTIC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

smectic_status smectic_config_preset(const char* name, smectic_config** out) {
  if (!name) return null_arg("name");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new smectic_config{smectic::preset(name)}; });
}

smectic_status smectic_config_parse(const char* text, smectic_config** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new smectic_config{smectic::load_config(text)}; });
}

smectic_status smectic_config_clone(const smectic_config* cfg, smectic_config** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new smectic_config{cfg->cfg}; });
}

smectic_status smectic_config_set(smectic_config* cfg, const char* key, const char* value) {
  if (!cfg) return null_arg("cfg");
  if (!key) return null_arg("key");
  if (!value) return null_arg("value");
  return guarded([&] { smectic::set_value(cfg->cfg, key, value); });
}

smectic_status smectic_config_validate(smectic_config* cfg) {
  if (!cfg) return null_arg("cfg");
  return guarded([&] { smectic::validate(cfg->cfg); });
}

smectic_status smectic_config_get(const smectic_config* cfg, const char* key, char* buf, size_t cap,
                                  size_t* needed) {
  if (!cfg) return null_arg("cfg");
  if (!key) return null_arg("key");
  std::string value;
  const smectic_status st = guarded([&] { value = smectic::get_value(cfg->cfg, key); });
  if (st != SMECTIC_OK) return st;
  return copy_string(value, buf, cap, needed);
}

smectic_status smectic_config_to_text(const smectic_config* cfg, char* buf, size_t cap, size_t* needed) {
  if (!cfg) return null_arg("cfg");
  return copy_string(smectic::save_config(cfg->cfg), buf, cap, needed);
}

void smectic_config_destroy(smectic_config* cfg) { delete cfg; }

smectic_status smectic_solver_create(const smectic_config* cfg, smectic_solver** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto s = std::make_unique<smectic_solver>();
    s->cfg = cfg->cfg;
    smectic::validate(s->cfg);
    s->state = smectic::initial_state(s->cfg);
    *out = s.release();
  });
}

smectic_status smectic_solver_step(smectic_solver* solver, double tau, smectic_step_info* info) {
  if (!solver) return null_arg("solver");
  return guarded([&] {
    if (!solver->stepper) {
      solver->stepper = std::make_unique<smectic::Stepper>(solver->cfg.grid(), solver->cfg.step_config());
    }
    const smectic::StepDiagnostics d = solver->stepper->step(solver->state, tau);
    fill_step_info(solver->state, d, info);
  });
}

smectic_status smectic_solver_run(smectic_solver* solver, const char* out_dir, smectic_run_info* info) {
  if (!solver) return null_arg("solver");
  if (!out_dir) return null_arg("out_dir");
  if (info) {
    *info = smectic_run_info{};
    info->blowup_step = -1;
  }
  try {
    const smectic::RunSummary s = smectic::run_to_directory(solver->state, solver->cfg, out_dir);
    if (info) {
      info->steps = s.steps;
      info->t = s.t;
      info->E_modified_initial = s.E_modified_initial;
      info->E_modified_final = s.last.E_modified;
      info->E_original_final = s.last.E_original;
      info->max_energy_increase = s.steps > 0 ? s.max_energy_increase : 0.0;
      info->g_min = s.g_min;
      info->g_max = s.g_max;
      info->tau_min_used = s.tau_min_used;
      info->tau_max_used = s.tau_max_used;
      info->mbp_eta = s.mbp_eta;
      info->mbp_kappa0 = s.mbp_kappa0;
      info->mbp_violations = s.mbp_violations;
    }
    return SMECTIC_OK;
  } catch (const smectic::BlowupError& e) {
    if (info) info->blowup_step = e.step();
    return set_error(SMECTIC_ERR_BLOWUP, e.what());
  } catch (...) {
    return guarded([] { throw; });
  }
}

smectic_status smectic_solver_time(const smectic_solver* solver, double* t, double* s, long* step) {
  if (!solver) return null_arg("solver");
  if (t) *t = solver->state.t;
  if (s) *s = solver->state.s;
  if (step) *step = solver->state.step_index;
  return SMECTIC_OK;
}

smectic_status smectic_solver_energy(const smectic_solver* solver, double* modified, double* original) {
  if (!solver) return null_arg("solver");
  return guarded([&] {
    const smectic::ModelParams p = solver->cfg.step_config().params;
    const double quad = smectic::quadratic_energy(solver->state.Q, solver->state.u, p);
    if (modified) *modified = quad + solver->state.s;
    if (original) *original = quad + smectic::e1h(solver->state.Q, solver->state.u, p);
  });
}

size_t smectic_solver_field_size(const smectic_solver* solver) {
  return solver ? solver->state.u.size() : 0;
}

smectic_status smectic_solver_get_field(const smectic_solver* solver, const char* name, double* out,
                                        size_t len) {
  if (!solver) return null_arg("solver");
  if (!name) return null_arg("name");
  auto* f = find_field(const_cast<smectic::SolverState&>(solver->state), name);
  if (!f) return set_error(SMECTIC_ERR_ARGUMENT, std::string("unknown field '") + name + "'");
  if (!out || len < f->size()) return set_error(SMECTIC_ERR_BUFFER, "need " + std::to_string(f->size()) + " doubles");
  std::memcpy(out, f->values().data(), f->size() * sizeof(double));
  return SMECTIC_OK;
}

smectic_status smectic_solver_set_field(smectic_solver* solver, const char* name, const double* values,
                                        size_t len) {
  if (!solver) return null_arg("solver");
  if (!name) return null_arg("name");
  if (!values) return null_arg("values");
  auto* f = find_field(solver->state, name);
  if (!f) return set_error(SMECTIC_ERR_ARGUMENT, std::string("unknown field '") + name + "'");
  if (len != f->size()) return set_error(SMECTIC_ERR_ARGUMENT, "field length must be " + std::to_string(f->size()));
  return guarded([&] {
    for (size_t n = 0; n < len; ++n) {
      if (!std::isfinite(values[n])) smectic::fail(smectic::ErrorKind::Argument, "field values must be finite");
    }
    std::memcpy(f->values().data(), values, len * sizeof(double));
    solver->state.s = smectic::e1h(solver->state.Q, solver->state.u, solver->cfg.step_config().params);
  });
}

void smectic_solver_destroy(smectic_solver* solver) { delete solver; }

smectic_status smectic_conv_time(const smectic_config* cfg, const double* taus, size_t n, double tau_ref,
                                 smectic_report** out) {
  if (!cfg) return null_arg("cfg");
  if (!taus) return null_arg("taus");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = table_report(smectic::convergence_time(cfg->cfg, std::span<const double>(taus, n), tau_ref));
  });
}

smectic_status smectic_conv_space(const smectic_config* cfg, const int* Js, size_t n, int J_ref, double tau,
                                  smectic_report** out) {
  if (!cfg) return null_arg("cfg");
  if (!Js) return null_arg("Js");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = table_report(smectic::convergence_space(cfg->cfg, std::span<const int>(Js, n), J_ref, tau));
  });
}

smectic_status smectic_selfcheck(uint64_t seed, double gradient_perturbation, smectic_report** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    smectic::SelfcheckOptions opt;
    opt.seed = seed;
    opt.gradient_perturbation = gradient_perturbation;
    const smectic::SelfcheckReport rep = smectic::selfcheck(opt);
    auto* r = new smectic_report;
    r->passed = rep.all_passed();
    r->text = rep.format();
    *out = r;
  });
}

smectic_status smectic_gradcheck(int dim, int J, uint64_t seed, double eps, smectic_report** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    smectic::GradientCheckOptions opt;
    opt.dim = dim;
    opt.J = J;
    opt.seed = seed;
    opt.eps = eps;
    if (dim != 2 && dim != 3) smectic::fail(smectic::ErrorKind::Argument, "dim must be 2 or 3");
    const smectic::GradientCheckResult g = smectic::gradient_check(opt);
    auto* r = new smectic_report;
    r->value = g.rel_error;
    r->passed = g.rel_error <= 1e-6;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%s gradient check d=%d J=%d seed=%llu eps=%.1e: finite difference %.15e, analytic %.15e, "
                  "relative error %.3e (tolerance 1e-6)\n",
                  r->passed ? "PASS" : "FAIL", dim, J, static_cast<unsigned long long>(seed), eps,
                  g.finite_difference, g.analytic, g.rel_error);
    r->text = buf;
    *out = r;
  });
}

int smectic_report_passed(const smectic_report* report) { return report && report->passed ? 1 : 0; }

const char* smectic_report_text(const smectic_report* report) { return report ? report->text.c_str() : ""; }

size_t smectic_report_rows(const smectic_report* report) { return report ? report->errors.size() : 0; }

smectic_status smectic_report_errors(const smectic_report* report, double* out, size_t len) {
  if (!report) return null_arg("report");
  return copy_table(report->errors, out, len);
}

smectic_status smectic_report_rates(const smectic_report* report, double* out, size_t len) {
  if (!report) return null_arg("report");
  return copy_table(report->rates, out, len);
}

double smectic_report_value(const smectic_report* report) { return report ? report->value : 0.0; }

void smectic_report_destroy(smectic_report* report) { delete report; }

}  // extern "C"
