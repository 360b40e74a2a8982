#pragma once

// Run configuration: flat `key = value` text, experiment presets and the
// initial-data generators they select.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "smectic/energy.hpp"
#include "smectic/grid.hpp"
#include "smectic/stepper.hpp"

namespace smectic {

enum class InitQ {
  Zero,
  Random,    // uniform in [-q_amplitude, q_amplitude] per compact component
  Director,  // q_amplitude (n n^T - I/d), n = (cos(x+y), sin(x+y), 0)
};

enum class InitU {
  Zero,
  Layers,      // u_amplitude cos(2 pi m x / L)
  Target,      // u_amplitude sum_axes cos(2 pi m x_i / L)
  Separable,   // u_amplitude prod_axes cos(2 pi m x_i / L)
  Random,      // uniform in [-u_amplitude, u_amplitude]
};

struct RunConfig {
  int d = 2;
  int J = 128;
  double L = 6.283185307179586;
  ModelParams params;
  SchemeMode mode = SchemeMode::RelaxedGSAV;
  TimeController controller;
  double T_final = 1.0;
  std::uint64_t seed = 0;
  InitQ init_q = InitQ::Random;
  double q_amplitude = 0.05;
  InitU init_u = InitU::Zero;
  double u_amplitude = 0.25;
  int u_modes = 5;  // m above
  long snapshot_every = 0;
  bool assert_dissipation = true;
  bool mbp_monitor = false;
  bool mbp_enforce_kappa = false;
  std::string out;

  GridSpec grid() const { return GridSpec::make(d, J, L); }
  StepConfig step_config() const;
};

/// Names of every accepted key, in canonical order.
const std::vector<std::string>& config_keys();

/// Parses text over the defaults. Keys d, J, L and T_final must be present.
/// The result is validated.
RunConfig load_config(std::string_view text);

/// Canonical text containing every key; load_config(save_config(c)) == c.
std::string save_config(const RunConfig& cfg);

/// Assigns one key from its textual value. Unknown keys and malformed values
/// raise Config errors naming the key. Does not validate cross-key constraints.
void set_value(RunConfig& cfg, std::string_view key, std::string_view value);
std::string get_value(const RunConfig& cfg, std::string_view key);

/// Checks every constraint and fills derived parameters (params.dim, s_plus).
void validate(RunConfig& cfg);

/// conv2d, dynamics2d, target2d or smectic3d; validated.
RunConfig preset(std::string_view name);
const std::vector<std::string>& preset_names();

const char* to_string(InitQ kind);
const char* to_string(InitU kind);

QField initial_q(const RunConfig& cfg);
ScalarField initial_u(const RunConfig& cfg);
/// Initial fields with s = E1h at t = 0.
SolverState initial_state(const RunConfig& cfg);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace smectic
