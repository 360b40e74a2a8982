#include "smectic/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>

#include "smectic/error.hpp"

namespace smectic {

namespace {

[[noreturn]] void config_error(std::string_view key, const std::string& what) {
  fail(ErrorKind::Config, std::string(key) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    config_error(key, "expected a finite number, got '" + std::string(text) + "'");
  }
  return v;
}

template <class Int>
Int parse_int(std::string_view key, std::string_view text) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    config_error(key, "expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  config_error(key, "expected true or false, got '" + std::string(text) + "'");
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

template <class Enum, std::size_t N>
Enum parse_enum(std::string_view key, std::string_view text,
                const std::pair<const char*, Enum> (&table)[N]) {
  for (const auto& [name, value] : table) {
    if (text == name) return value;
  }
  std::string allowed;
  for (const auto& entry : table) allowed += std::string(allowed.empty() ? "" : ", ") + entry.first;
  config_error(key, "expected one of {" + allowed + "}, got '" + std::string(text) + "'");
}

constexpr std::pair<const char*, SchemeMode> kModes[] = {
    {"relaxed", SchemeMode::RelaxedGSAV},
    {"norelax", SchemeMode::GSAVNoRelax},
    {"plain", SchemeMode::PlainETD},
};
constexpr std::pair<const char*, TimeController::Kind> kControllers[] = {
    {"fixed", TimeController::Kind::Fixed},
    {"adaptive", TimeController::Kind::Adaptive},
};
constexpr std::pair<const char*, InitQ> kInitQ[] = {
    {"zero", InitQ::Zero},
    {"random", InitQ::Random},
    {"director", InitQ::Director},
};
constexpr std::pair<const char*, InitU> kInitU[] = {
    {"zero", InitU::Zero},         {"layers", InitU::Layers}, {"target", InitU::Target},
    {"separable", InitU::Separable}, {"random", InitU::Random},
};

template <class Enum, std::size_t N>
std::string enum_name(Enum v, const std::pair<const char*, Enum> (&table)[N]) {
  for (const auto& [name, value] : table) {
    if (value == v) return name;
  }
  return "?";
}

struct KeyHandler {
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

using Table = std::vector<std::pair<std::string, KeyHandler>>;

KeyHandler real(double RunConfig::*m) {
  return {[m](RunConfig& c, std::string_view v) { c.*m = parse_double("", v); },
          [m](const RunConfig& c) { return format_double(c.*m); }};
}
KeyHandler param(double ModelParams::*m) {
  return {[m](RunConfig& c, std::string_view v) { c.params.*m = parse_double("", v); },
          [m](const RunConfig& c) { return format_double(c.params.*m); }};
}
KeyHandler ctl(double TimeController::*m) {
  return {[m](RunConfig& c, std::string_view v) { c.controller.*m = parse_double("", v); },
          [m](const RunConfig& c) { return format_double(c.controller.*m); }};
}
KeyHandler flag(bool RunConfig::*m) {
  return {[m](RunConfig& c, std::string_view v) { c.*m = parse_bool("", v); },
          [m](const RunConfig& c) { return std::string(c.*m ? "true" : "false"); }};
}

const Table& table() {
  static const Table t = {
      {"d", {[](RunConfig& c, std::string_view v) { c.d = parse_int<int>("", v); },
             [](const RunConfig& c) { return std::to_string(c.d); }}},
      {"J", {[](RunConfig& c, std::string_view v) { c.J = parse_int<int>("", v); },
             [](const RunConfig& c) { return std::to_string(c.J); }}},
      {"L", real(&RunConfig::L)},
      {"K", param(&ModelParams::K)},
      {"A", param(&ModelParams::A)},
      {"B", param(&ModelParams::B)},
      {"C", param(&ModelParams::C)},
      {"a", param(&ModelParams::a)},
      {"b", param(&ModelParams::b)},
      {"c", param(&ModelParams::c)},
      {"q", param(&ModelParams::q)},
      {"B0", param(&ModelParams::B0)},
      {"kappa1", param(&ModelParams::kappa1)},
      {"kappa2", param(&ModelParams::kappa2)},
      {"eta0", param(&ModelParams::eta0)},
      {"mode", {[](RunConfig& c, std::string_view v) { c.mode = parse_enum("", v, kModes); },
                [](const RunConfig& c) { return enum_name(c.mode, kModes); }}},
      {"controller",
       {[](RunConfig& c, std::string_view v) { c.controller.kind = parse_enum("", v, kControllers); },
        [](const RunConfig& c) { return enum_name(c.controller.kind, kControllers); }}},
      {"tau", ctl(&TimeController::tau)},
      {"tau_min", ctl(&TimeController::tau_min)},
      {"tau_max", ctl(&TimeController::tau_max)},
      {"alpha", ctl(&TimeController::alpha)},
      {"T_final", real(&RunConfig::T_final)},
      {"seed", {[](RunConfig& c, std::string_view v) { c.seed = parse_int<std::uint64_t>("", v); },
                [](const RunConfig& c) { return std::to_string(c.seed); }}},
      {"init_q", {[](RunConfig& c, std::string_view v) { c.init_q = parse_enum("", v, kInitQ); },
                  [](const RunConfig& c) { return enum_name(c.init_q, kInitQ); }}},
      {"q_amplitude", real(&RunConfig::q_amplitude)},
      {"init_u", {[](RunConfig& c, std::string_view v) { c.init_u = parse_enum("", v, kInitU); },
                  [](const RunConfig& c) { return enum_name(c.init_u, kInitU); }}},
      {"u_amplitude", real(&RunConfig::u_amplitude)},
      {"u_modes", {[](RunConfig& c, std::string_view v) { c.u_modes = parse_int<int>("", v); },
                   [](const RunConfig& c) { return std::to_string(c.u_modes); }}},
      {"snapshot_every",
       {[](RunConfig& c, std::string_view v) { c.snapshot_every = parse_int<long>("", v); },
        [](const RunConfig& c) { return std::to_string(c.snapshot_every); }}},
      {"assert_dissipation", flag(&RunConfig::assert_dissipation)},
      {"mbp_monitor", flag(&RunConfig::mbp_monitor)},
      {"mbp_enforce_kappa", flag(&RunConfig::mbp_enforce_kappa)},
      {"out", {[](RunConfig& c, std::string_view v) { c.out = std::string(v); },
               [](const RunConfig& c) { return c.out; }}},
  };
  return t;
}

const KeyHandler& handler(std::string_view key) {
  for (const auto& [name, h] : table()) {
    if (name == key) return h;
  }
  config_error(key, "unknown key");
}

}  // namespace

// ---------------------------------------------------------------------------

StepConfig RunConfig::step_config() const {
  StepConfig sc;
  sc.mode = mode;
  sc.params = params;
  sc.params.dim = d;
  sc.controller = controller;
  sc.assert_dissipation = assert_dissipation;
  sc.mbp_monitor = mbp_monitor;
  sc.mbp_enforce_kappa = mbp_enforce_kappa;
  return sc;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& entry : table()) k.push_back(entry.first);
    return k;
  }();
  return keys;
}

void set_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  const KeyHandler& h = handler(key);
  try {
    h.set(cfg, trim(value));
  } catch (const Error& e) {
    std::string msg = e.what();
    if (msg.rfind(": ", 0) == 0) msg = msg.substr(2);
    config_error(key, msg);
  }
}

std::string get_value(const RunConfig& cfg, std::string_view key) { return handler(key).get(cfg); }

void validate(RunConfig& cfg) {
  if (cfg.d != 2 && cfg.d != 3) config_error("d", "must be 2 or 3");
  if (cfg.J < 4) config_error("J", "J >= 4 required");
  if (!(cfg.L > 0.0)) config_error("L", "L > 0 required");
  cfg.params.dim = cfg.d;
  try {
    cfg.params = cfg.params.validated();
  } catch (const Error& e) {
    fail(ErrorKind::Config, std::string("model parameters: ") + e.what());
  }
  if (cfg.controller.kind == TimeController::Kind::Fixed) {
    if (!(cfg.controller.tau > 0.0)) config_error("tau", "tau > 0 required");
  } else {
    if (!(cfg.controller.tau_min > 0.0)) config_error("tau_min", "tau_min > 0 required");
    if (!(cfg.controller.tau_max >= cfg.controller.tau_min)) {
      config_error("tau_max", "tau_max >= tau_min required");
    }
    if (!(cfg.controller.alpha >= 0.0)) config_error("alpha", "alpha >= 0 required");
  }
  if (!(cfg.T_final >= 0.0)) config_error("T_final", "T_final >= 0 required");
  if (!(cfg.q_amplitude >= 0.0)) config_error("q_amplitude", "q_amplitude >= 0 required");
  if (!(cfg.u_amplitude >= 0.0)) config_error("u_amplitude", "u_amplitude >= 0 required");
  if (cfg.u_modes < 0) config_error("u_modes", "u_modes >= 0 required");
  if (cfg.snapshot_every < 0) config_error("snapshot_every", "snapshot_every >= 0 required");
  if (cfg.out.find('\n') != std::string::npos) config_error("out", "must be a single line");
}

RunConfig load_config(std::string_view text) {
  RunConfig cfg;
  std::map<std::string, int, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::Config, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (seen.count(key)) config_error(key, "duplicate key on line " + std::to_string(line_no));
    seen[key] = static_cast<int>(line_no);
    set_value(cfg, key, line.substr(eq + 1));
  }
  for (const char* required : {"d", "J", "L", "T_final"}) {
    if (!seen.count(required)) config_error(required, "missing required key");
  }
  validate(cfg);
  return cfg;
}

std::string save_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [key, h] : table()) out += key + " = " + h.get(cfg) + "\n";
  return out;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return save_config(a) == save_config(b); }

// ---------------------------------------------------------------------------

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"conv2d", "dynamics2d", "target2d", "smectic3d"};
  return names;
}

RunConfig preset(std::string_view name) {
  RunConfig c;
  c.d = 2;
  c.L = 2.0 * std::numbers::pi;
  // Shared physical block: T = -1, T1* = 0, T2* = 4.
  c.params.K = 0.1;
  c.params.A = -1.0;
  c.params.C = 2.0;
  c.params.a = -5.0;
  c.params.b = 0.0;
  c.params.c = 5.0;
  c.params.q = 5.0;
  c.params.B0 = 7e-5;
  c.params.kappa1 = 8.0;
  c.params.kappa2 = 8.0;
  c.params.eta0 = 0.95;

  if (name == "conv2d") {
    c.J = 128;
    c.init_q = InitQ::Director;
    c.q_amplitude = 1.0;
    c.init_u = InitU::Layers;
    c.u_amplitude = 0.25;
    c.u_modes = 5;
    c.controller = TimeController::fixed(1.0 / 64.0);
    c.T_final = 1.0;
  } else if (name == "dynamics2d") {
    c.J = 128;
    c.init_q = InitQ::Random;
    c.q_amplitude = 0.05;
    c.init_u = InitU::Zero;
    c.controller = TimeController::fixed(1.0 / 32.0);
    c.T_final = 50.0;
    c.mbp_monitor = true;
  } else if (name == "target2d") {
    c.J = 100;
    c.init_q = InitQ::Random;
    c.q_amplitude = 0.05;
    c.init_u = InitU::Target;
    c.u_amplitude = 0.25;
    c.u_modes = 5;
    c.controller = TimeController::adaptive(1e-3, 0.1, 1e5);
    c.controller.tau = 1e-3;
    c.T_final = 200.0;
  } else if (name == "smectic3d") {
    c.d = 3;
    c.J = 64;
    c.params.B = 1.0;
    c.init_q = InitQ::Random;
    c.q_amplitude = 0.05;
    c.init_u = InitU::Separable;
    c.u_amplitude = 0.25;
    c.u_modes = 5;
    c.controller = TimeController::fixed(1.0 / 32.0);
    c.T_final = 100.0;
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    fail(ErrorKind::Config, "unknown preset '" + std::string(name) + "' (known: " + known + ")");
  }
  validate(c);
  return c;
}

const char* to_string(InitQ kind) {
  for (const auto& [name, value] : kInitQ) {
    if (value == kind) return name;
  }
  return "?";
}

const char* to_string(InitU kind) {
  for (const auto& [name, value] : kInitU) {
    if (value == kind) return name;
  }
  return "?";
}

// ---------------------------------------------------------------------------

QField initial_q(const RunConfig& cfg) {
  const GridSpec grid = cfg.grid();
  QField Q(grid);
  switch (cfg.init_q) {
    case InitQ::Zero:
      break;
    case InitQ::Random: {
      std::mt19937_64 rng(cfg.seed);
      std::uniform_real_distribution<double> dist(-cfg.q_amplitude, cfg.q_amplitude);
      for (int c = 0; c < Q.count(); ++c) {
        for (double& v : Q.component(c).values()) v = dist(rng);
      }
      break;
    }
    case InitQ::Director: {
      const double s = cfg.q_amplitude;
      const double third = 1.0 / cfg.d;
      auto angle = [](double x, double y) { return x + y; };
      Q.component(0) = sample(grid, [&](double x, double y, double) {
        const double c = std::cos(angle(x, y));
        return s * (c * c - third);
      });
      if (cfg.d == 2) {
        Q.component(1) = sample(grid, [&](double x, double y, double) {
          const double t = angle(x, y);
          return s * std::cos(t) * std::sin(t);
        });
      } else {
        Q.component(1) = sample(grid, [&](double x, double y, double) {
          const double v = std::sin(angle(x, y));
          return s * (v * v - third);
        });
        Q.component(2) = sample(grid, [&](double x, double y, double) {
          const double t = angle(x, y);
          return s * std::cos(t) * std::sin(t);
        });
        // n3 = 0: q13 = q23 = 0
      }
      break;
    }
  }
  return Q;
}

ScalarField initial_u(const RunConfig& cfg) {
  const GridSpec grid = cfg.grid();
  const double A = cfg.u_amplitude;
  const double k = 2.0 * std::numbers::pi * cfg.u_modes / cfg.L;
  const int d = cfg.d;
  switch (cfg.init_u) {
    case InitU::Zero:
      return ScalarField(grid);
    case InitU::Layers:
      return sample(grid, [&](double x, double, double) { return A * std::cos(k * x); });
    case InitU::Target:
      return sample(grid, [&](double x, double y, double z) {
        return A * (std::cos(k * x) + std::cos(k * y) + (d == 3 ? std::cos(k * z) : 0.0));
      });
    case InitU::Separable:
      return sample(grid, [&](double x, double y, double z) {
        return A * std::cos(k * x) * std::cos(k * y) * (d == 3 ? std::cos(k * z) : 1.0);
      });
    case InitU::Random: {
      ScalarField u(grid);
      // Offset stream so Q and u are independent when both are random.
      std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
      std::uniform_real_distribution<double> dist(-A, A);
      for (double& v : u.values()) v = dist(rng);
      return u;
    }
  }
  return ScalarField(grid);
}

SolverState initial_state(const RunConfig& cfg) {
  RunConfig c = cfg;
  validate(c);
  return make_initial_state(initial_q(c), initial_u(c), c.step_config().params, 0.0);
}

}  // namespace smectic
