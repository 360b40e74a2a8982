// Command-line front end. Talks to the solver exclusively through smectic.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smectic/smectic.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBlowup = 3;
constexpr int kExitInvariant = 4;

int exit_code(smectic_status st) {
  switch (st) {
    case SMECTIC_OK: return kExitOk;
    case SMECTIC_ERR_CONFIG:
    case SMECTIC_ERR_PARAMETER:
    case SMECTIC_ERR_ARGUMENT: return kExitConfig;
    case SMECTIC_ERR_BLOWUP:
    case SMECTIC_ERR_NUMERICAL: return kExitBlowup;
    case SMECTIC_ERR_INVARIANT: return kExitInvariant;
    default: return kExitFailure;
  }
}

int report_error(smectic_status st) {
  std::fprintf(stderr, "smectic: %s: %s\n", smectic_status_name(st), smectic_last_error());
  return exit_code(st);
}

struct Handle {
  smectic_config* cfg = nullptr;
  ~Handle() { smectic_config_destroy(cfg); }
};

struct ConfigOptions {
  std::string preset;
  std::string config_file;
  std::vector<std::string> sets;
};

void add_config_options(CLI::App* app, ConfigOptions& o, const std::string& default_preset) {
  o.preset = default_preset;
  app->add_option("--preset", o.preset, "Preset to start from (conv2d, dynamics2d, target2d, smectic3d)")
      ->capture_default_str();
  app->add_option("--config", o.config_file, "Config file (key = value lines); replaces the preset");
  app->add_option("--set", o.sets, "Override one key, key=value (repeatable)")->take_all();
}

smectic_status build_config(const ConfigOptions& o, Handle& h) {
  smectic_status st;
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) {
      std::fprintf(stderr, "smectic: cannot read config file %s\n", o.config_file.c_str());
      return SMECTIC_ERR_CONFIG;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    st = smectic_config_parse(ss.str().c_str(), &h.cfg);
  } else {
    st = smectic_config_preset(o.preset.c_str(), &h.cfg);
  }
  if (st != SMECTIC_OK) return st;
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "smectic: --set expects key=value, got '%s'\n", kv.c_str());
      return SMECTIC_ERR_CONFIG;
    }
    st = smectic_config_set(h.cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (st != SMECTIC_OK) return st;
  }
  return smectic_config_validate(h.cfg);
}

std::string config_text(const smectic_config* cfg) {
  size_t need = 0;
  smectic_config_to_text(cfg, nullptr, 0, &need);
  std::string text(need, '\0');
  smectic_config_to_text(cfg, text.data(), text.size(), &need);
  text.resize(need - 1);
  return text;
}

int print_report(smectic_report* r) {
  std::fputs(smectic_report_text(r), stdout);
  const int ok = smectic_report_passed(r);
  smectic_report_destroy(r);
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relaxed GSAV exponential-integrator solver for smectic-A Q-tensor dynamics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(smectic_version()));

  // run
  ConfigOptions run_opts;
  unsigned long long run_seed = 0;
  std::string run_out;
  auto* run = app.add_subcommand("run", "Run a configuration and write diagnostics and snapshots");
  add_config_options(run, run_opts, "dynamics2d");
  run->add_option("--seed", run_seed, "Seed for random initial data")->required();
  run->add_option("--out", run_out, "Output directory")->required();

  // preset
  ConfigOptions preset_opts;
  auto* preset = app.add_subcommand("preset", "Print a preset as config text");
  preset->add_option("name", preset_opts.preset, "Preset name")->required();
  preset->add_option("--set", preset_opts.sets, "Override one key, key=value (repeatable)")->take_all();

  // conv-time
  ConfigOptions ct_opts;
  std::vector<double> ct_taus = {1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512, 1.0 / 1024, 1.0 / 2048};
  double ct_ref = 1.0 / 8192;
  auto* conv_time = app.add_subcommand("conv-time", "Temporal convergence study against a fine-step reference");
  add_config_options(conv_time, ct_opts, "conv2d");
  conv_time->add_option("--taus", ct_taus, "Time-step ladder")->capture_default_str();
  conv_time->add_option("--tau-ref", ct_ref, "Reference time step")->capture_default_str();

  // conv-space
  ConfigOptions cs_opts;
  std::vector<int> cs_js = {16, 32, 64, 128};
  int cs_ref = 256;
  double cs_tau = 1e-4;
  auto* conv_space = app.add_subcommand("conv-space", "Spatial convergence study against a fine-grid reference");
  add_config_options(conv_space, cs_opts, "conv2d");
  conv_space->add_option("--J", cs_js, "Nested grid ladder")->capture_default_str();
  conv_space->add_option("--J-ref", cs_ref, "Reference grid")->capture_default_str();
  conv_space->add_option("--tau", cs_tau, "Time step used on every grid")->capture_default_str();

  // gradcheck
  int gc_dim = 2, gc_J = 8;
  unsigned long long gc_seed = 42;
  double gc_eps = 1e-5;
  auto* gradcheck = app.add_subcommand("gradcheck", "Compare the analytic gradient with central differences");
  gradcheck->add_option("--dim", gc_dim, "Dimension")->check(CLI::IsMember({2, 3}))->capture_default_str();
  gradcheck->add_option("--J", gc_J, "Points per axis")->capture_default_str();
  gradcheck->add_option("--seed", gc_seed, "Seed")->capture_default_str();
  gradcheck->add_option("--eps", gc_eps, "Finite-difference step")->capture_default_str();

  // selfcheck
  unsigned long long sc_seed = 42;
  double sc_perturb = 0.0;
  auto* selfcheck = app.add_subcommand("selfcheck", "Run the seeded oracle suite");
  selfcheck->add_option("--seed", sc_seed, "Seed")->capture_default_str();
  selfcheck->add_option("--perturb-gradient", sc_perturb, "Relative perturbation of the analytic gradient");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (run->parsed()) {
    Handle h;
    run_opts.sets.push_back("seed=" + std::to_string(run_seed));
    run_opts.sets.push_back("out=" + run_out);
    smectic_status st = build_config(run_opts, h);
    if (st != SMECTIC_OK) return report_error(st);
    smectic_solver* solver = nullptr;
    st = smectic_solver_create(h.cfg, &solver);
    if (st != SMECTIC_OK) return report_error(st);
    smectic_run_info info{};
    st = smectic_solver_run(solver, run_out.c_str(), &info);
    smectic_solver_destroy(solver);
    if (st != SMECTIC_OK) return report_error(st);
    std::printf("steps %ld  t %.6g\n", info.steps, info.t);
    std::printf("modified energy %.10g -> %.10g  (largest step increase %.3e)\n", info.E_modified_initial,
                info.E_modified_final, info.max_energy_increase);
    std::printf("original energy %.10g\n", info.E_original_final);
    std::printf("g in [%.6g, %.6g]  tau in [%.6g, %.6g]\n", info.g_min, info.g_max, info.tau_min_used,
                info.tau_max_used);
    if (info.mbp_eta > 0.0) {
      std::printf("max bound eta %.6g  kappa0 %.6g  violations %ld\n", info.mbp_eta, info.mbp_kappa0,
                  info.mbp_violations);
    }
    std::printf("outputs in %s\n", run_out.c_str());
    return kExitOk;
  }

  if (preset->parsed()) {
    Handle h;
    const smectic_status st = build_config(preset_opts, h);
    if (st != SMECTIC_OK) return report_error(st);
    std::fputs(config_text(h.cfg).c_str(), stdout);
    return kExitOk;
  }

  if (conv_time->parsed()) {
    Handle h;
    smectic_status st = build_config(ct_opts, h);
    if (st != SMECTIC_OK) return report_error(st);
    smectic_report* r = nullptr;
    st = smectic_conv_time(h.cfg, ct_taus.data(), ct_taus.size(), ct_ref, &r);
    if (st != SMECTIC_OK) return report_error(st);
    return print_report(r);
  }

  if (conv_space->parsed()) {
    Handle h;
    smectic_status st = build_config(cs_opts, h);
    if (st != SMECTIC_OK) return report_error(st);
    smectic_report* r = nullptr;
    st = smectic_conv_space(h.cfg, cs_js.data(), cs_js.size(), cs_ref, cs_tau, &r);
    if (st != SMECTIC_OK) return report_error(st);
    return print_report(r);
  }

  if (gradcheck->parsed()) {
    smectic_report* r = nullptr;
    const smectic_status st = smectic_gradcheck(gc_dim, gc_J, gc_seed, gc_eps, &r);
    if (st != SMECTIC_OK) return report_error(st);
    return print_report(r);
  }

  if (selfcheck->parsed()) {
    smectic_report* r = nullptr;
    const smectic_status st = smectic_selfcheck(sc_seed, sc_perturb, &r);
    if (st != SMECTIC_OK) return report_error(st);
    return print_report(r);
  }
  return kExitFailure;
}
