#include <cmath>
#include <vector>

#include "doctest.h"
#include "smectic/config.hpp"
#include "smectic/error.hpp"
#include "smectic/harness.hpp"

using namespace smectic;

TEST_CASE("state errors") {
  RunConfig c = preset("conv2d");
  c.J = 16;
  const SolverState a = initial_state(c);
  const FieldErrors zero = state_errors(a, a);
  for (int i = 0; i < FieldErrors::kCount; ++i) CHECK(zero.get(i) == 0.0);

  SolverState b = a;
  b.u += ScalarField(b.u.grid(), 0.5);
  b.s += 2.0;
  const FieldErrors e = state_errors(a, b);
  CHECK(e.u_inf == doctest::Approx(0.5));
  CHECK(e.u_l2 == doctest::Approx(0.5 * std::sqrt(a.u.grid().volume())));
  CHECK(e.u_h2 == doctest::Approx(e.u_l2));  // constant shift has no derivatives
  CHECK(e.s == doctest::Approx(2.0));
  CHECK(e.q_inf == 0.0);
  CHECK(std::string(FieldErrors::name(0)).size() > 0);
}

TEST_CASE("restriction samples nested nodes") {
  RunConfig c = preset("conv2d");
  c.J = 32;
  const SolverState fine = initial_state(c);
  const SolverState coarse = restrict_state(fine, GridSpec::make(2, 8, c.L));
  CHECK(coarse.u.at(1, 2) == fine.u.at(4, 8));
  CHECK(coarse.Q.component(1).at(3, 1) == fine.Q.component(1).at(12, 4));
  CHECK(coarse.s == fine.s);
  CHECK_THROWS_AS(restrict_state(fine, GridSpec::make(2, 12, c.L)), Error);
}

TEST_CASE("time convergence ladder is first order on a short run") {
  RunConfig c = preset("conv2d");
  c.J = 16;
  c.T_final = 0.25;
  const std::vector<double> taus = {1.0 / 16, 1.0 / 32, 1.0 / 64};
  const ConvergenceTable t = convergence_time(c, taus, 1.0 / 1024);
  REQUIRE(t.errors.size() == 3);
  REQUIRE(t.rates.size() == 2);
  CHECK(t.values.front() == 1.0 / 16);
  for (int i : {0, 3}) {
    CHECK(t.rates[1].get(i) > 0.8);
    CHECK(t.rates[1].get(i) < 1.4);
  }
  CHECK(!t.format().empty());
  const std::vector<double> bad = {0.1};
  CHECK_THROWS_AS(convergence_time(c, bad, 1.0 / 1024), Error);
  const std::vector<double> coarse_ref = {1.0 / 16};
  CHECK_THROWS_AS(convergence_time(c, coarse_ref, 1.0 / 8), Error);
}

TEST_CASE("space convergence rejects unusable setups") {
  RunConfig c = preset("dynamics2d");
  c.T_final = 0.01;
  const std::vector<int> Js = {8, 16};
  CHECK_THROWS_AS(convergence_space(c, Js, 32, 1e-3), Error);  // random data
  RunConfig d = preset("conv2d");
  d.T_final = 0.01;
  const std::vector<int> not_nested = {8, 12};
  CHECK_THROWS_AS(convergence_space(d, not_nested, 48, 1e-3), Error);
}

TEST_CASE("gradient check and its perturbation hook") {
  for (int dim : {2, 3}) {
    GradientCheckOptions opt;
    opt.dim = dim;
    opt.J = dim == 2 ? 8 : 6;
    const GradientCheckResult r = gradient_check(opt);
    CHECK(r.rel_error < 1e-6);
    opt.perturbation = 1e-3;
    const GradientCheckResult bad = gradient_check(opt);
    CHECK(bad.rel_error > 5e-4);
  }
  const ModelParams p = oracle_params(3);
  CHECK(p.B == 1.0);
  CHECK(p.q > 0.0);
}

TEST_CASE("selfcheck passes and catches a broken gradient") {
  SelfcheckOptions opt;
  opt.norm_chain_samples = 5;
  const SelfcheckReport ok = selfcheck(opt);
  CHECK(ok.all_passed());
  CHECK(ok.entries.size() >= 10);
  CHECK(ok.format().find("FAIL") == std::string::npos);
  opt.gradient_perturbation = 1e-2;
  const SelfcheckReport bad = selfcheck(opt);
  CHECK(!bad.all_passed());
  CHECK(bad.format().find("FAIL") != std::string::npos);
}
