#include <cmath>
#include <string>

#include "doctest.h"
#include "smectic/config.hpp"
#include "smectic/error.hpp"

using namespace smectic;

namespace {

std::string error_text(const std::string& cfg_text) {
  try {
    load_config(cfg_text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

}  // namespace

TEST_CASE("minimal config uses defaults") {
  const RunConfig c = load_config("d = 2\nJ = 16\nL = 6.0\nT_final = 0.5\n");
  CHECK(c.d == 2);
  CHECK(c.J == 16);
  CHECK(c.L == 6.0);
  CHECK(c.T_final == 0.5);
  CHECK(c.params.s_plus == doctest::Approx(1.0));
  CHECK(c.mode == SchemeMode::RelaxedGSAV);
  CHECK(c.grid().spacing() == doctest::Approx(6.0 / 16));
}

TEST_CASE("comments, whitespace and value forms") {
  const RunConfig c = load_config(
      "# header\n  d=3 \nJ = 8 # trailing\nL = 1\nT_final = 1\nB = 1\nmode = norelax\n"
      "controller = adaptive\ntau_min = 1e-3\ntau_max = 0.05\nmbp_monitor = yes\n\n");
  CHECK(c.d == 3);
  CHECK(c.params.dim == 3);
  CHECK(c.mode == SchemeMode::GSAVNoRelax);
  CHECK(c.controller.kind == TimeController::Kind::Adaptive);
  CHECK(c.controller.tau_max == 0.05);
  CHECK(c.mbp_monitor);
}

TEST_CASE("errors name the offending key") {
  CHECK(error_text("d = 2\nJ = 16\nL = 1\n").find("T_final") != std::string::npos);
  CHECK(error_text("d = 2\nJ = 16\nL = 1\nT_final = 1\nfoo = 3\n").find("foo") != std::string::npos);
  CHECK(error_text("d = 2\nJ = 16\nJ = 32\nL = 1\nT_final = 1\n").find("duplicate") != std::string::npos);
  CHECK(error_text("d = 2\nJ = sixteen\nL = 1\nT_final = 1\n").find("J") != std::string::npos);
  CHECK(error_text("d = 2\nJ = 16\nL = 1\nT_final = 1\nmode = fast\n").find("mode") != std::string::npos);
  CHECK(error_text("d = 2\nJ = 16\nL = 1\nT_final = 1\ntau = -1\n").find("tau") != std::string::npos);
  CHECK(error_text("d = 4\nJ = 16\nL = 1\nT_final = 1\n").find("d") != std::string::npos);
  CHECK(error_text("d = 2\nJ = 16\nL = 1\nT_final = 1\nA = 0\n").find("A < 0 required for d=2") != std::string::npos);
  CHECK(error_text("d = 2\nJ 16\n").find("line 2") != std::string::npos);
}

TEST_CASE("save and load round trip exactly") {
  for (const auto& name : preset_names()) {
    RunConfig c = preset(name);
    c.params.B0 = 0.1 + 0.2;  // not representable in short decimal
    c.seed = 18446744073709551615ull;
    c.out = "some dir/out";
    const RunConfig back = load_config(save_config(c));
    CHECK(back == c);
    CHECK(back.params.B0 == c.params.B0);
    CHECK(save_config(back) == save_config(c));
    for (const auto& key : config_keys()) CHECK(get_value(back, key) == get_value(c, key));
  }
}

TEST_CASE("set and get") {
  RunConfig c = preset("dynamics2d");
  set_value(c, "kappa1", "3.5");
  CHECK(c.params.kappa1 == 3.5);
  CHECK(get_value(c, "kappa1") == "3.5");
  set_value(c, "init_u", "layers");
  CHECK(c.init_u == InitU::Layers);
  CHECK_THROWS_AS(set_value(c, "nope", "1"), Error);
  CHECK_THROWS_AS(set_value(c, "assert_dissipation", "maybe"), Error);
  CHECK_THROWS_AS(get_value(c, "nope"), Error);
}

TEST_CASE("presets") {
  const RunConfig conv = preset("conv2d");
  CHECK(conv.d == 2);
  CHECK(conv.L == doctest::Approx(2 * 3.141592653589793));
  CHECK(conv.init_q == InitQ::Director);
  const RunConfig dyn = preset("dynamics2d");
  CHECK(dyn.init_q == InitQ::Random);
  CHECK(dyn.q_amplitude == 0.05);
  CHECK(dyn.mbp_monitor);
  const RunConfig tgt = preset("target2d");
  CHECK(tgt.controller.kind == TimeController::Kind::Adaptive);
  CHECK(tgt.controller.tau_min == 1e-3);
  CHECK(tgt.controller.tau_max == 0.1);
  CHECK(tgt.controller.alpha == 1e5);
  const RunConfig s3 = preset("smectic3d");
  CHECK(s3.d == 3);
  CHECK(s3.params.B == 1.0);
  for (const auto& name : preset_names()) {
    const RunConfig c = preset(name);
    CHECK(c.params.K == 0.1);
    CHECK(c.params.A == -1.0);
    CHECK(c.params.C == 2.0);
    CHECK(c.params.a == -5.0);
    CHECK(c.params.c == 5.0);
    CHECK(c.params.q == 5.0);
    CHECK(c.params.B0 == 7e-5);
    CHECK(c.params.kappa1 == 8.0);
    CHECK(c.params.kappa2 == 8.0);
  }
  CHECK_THROWS_AS(preset("nope"), Error);
}

TEST_CASE("initial data generators") {
  RunConfig c = preset("dynamics2d");
  c.J = 16;
  const QField q1 = initial_q(c), q2 = initial_q(c);
  for (int k = 0; k < q1.count(); ++k) {
    CHECK(norm_inf(q1.component(k) - q2.component(k)) == 0.0);
    CHECK(norm_inf(q1.component(k)) <= c.q_amplitude);
    CHECK(norm_inf(q1.component(k)) > 0.5 * c.q_amplitude);
  }
  c.seed = 99;
  CHECK(norm_inf(initial_q(c).component(0) - q1.component(0)) > 0.0);

  c.init_q = InitQ::Director;
  c.q_amplitude = 0.8;
  const QField dq = initial_q(c);
  const ScalarField lam = largest_eigenvalue(dq);
  for (std::size_t n = 0; n < lam.size(); ++n) CHECK(lam[n] == doctest::Approx(0.4));

  c.init_u = InitU::Layers;
  c.u_modes = 3;
  c.u_amplitude = 0.25;
  const ScalarField u = initial_u(c);
  const double h = c.grid().spacing();
  CHECK(u.at(1, 5) == doctest::Approx(0.25 * std::cos(3 * h)));
  // periodic: J shifts in x give the same sample; the sequence has period J/gcd
  CHECK(u.max() == doctest::Approx(0.25));

  c.init_u = InitU::Target;
  const ScalarField t = initial_u(c);
  CHECK(t.at(2, 3) == doctest::Approx(0.25 * (std::cos(6 * h) + std::cos(9 * h))));

  c.init_u = InitU::Zero;
  const SolverState st = initial_state(c);
  CHECK(norm_inf(st.u) == 0.0);
  CHECK(st.s == doctest::Approx(e1h(st.Q, st.u, c.params)));
  CHECK(st.t == 0.0);

  RunConfig s3 = preset("smectic3d");
  s3.J = 8;
  s3.init_u = InitU::Separable;
  const ScalarField sep = initial_u(s3);
  const double h3 = s3.grid().spacing();
  const double m = s3.u_modes;
  CHECK(sep.at(1, 2, 3) == doctest::Approx(s3.u_amplitude * std::cos(m * h3) * std::cos(2 * m * h3) * std::cos(3 * m * h3)));
}
