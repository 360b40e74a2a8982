#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "smectic/smectic.h"

namespace fs = std::filesystem;

namespace {

smectic_config* small_config() {
  smectic_config* cfg = nullptr;
  REQUIRE(smectic_config_preset("dynamics2d", &cfg) == SMECTIC_OK);
  REQUIRE(smectic_config_set(cfg, "J", "16") == SMECTIC_OK);
  REQUIRE(smectic_config_set(cfg, "T_final", "0.1") == SMECTIC_OK);
  REQUIRE(smectic_config_set(cfg, "tau", "0.025") == SMECTIC_OK);
  REQUIRE(smectic_config_validate(cfg) == SMECTIC_OK);
  return cfg;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::strlen(smectic_version()) > 0);
  CHECK(std::string(smectic_status_name(SMECTIC_OK)) == "ok");
  CHECK(std::string(smectic_status_name(SMECTIC_ERR_BLOWUP)).size() > 0);
}

TEST_CASE("config handles") {
  smectic_config* cfg = nullptr;
  CHECK(smectic_config_preset("nope", &cfg) == SMECTIC_ERR_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(std::string(smectic_last_error()).find("nope") != std::string::npos);
  CHECK(smectic_config_preset(nullptr, &cfg) == SMECTIC_ERR_ARGUMENT);

  cfg = small_config();
  size_t need = 0;
  CHECK(smectic_config_get(cfg, "J", nullptr, 0, &need) == SMECTIC_ERR_BUFFER);
  CHECK(need == 3);
  char buf[8];
  CHECK(smectic_config_get(cfg, "J", buf, sizeof buf, &need) == SMECTIC_OK);
  CHECK(std::string(buf) == "16");
  CHECK(smectic_config_get(cfg, "bogus", buf, sizeof buf, &need) == SMECTIC_ERR_CONFIG);

  CHECK(smectic_config_to_text(cfg, nullptr, 0, &need) == SMECTIC_ERR_BUFFER);
  std::string text(need, '\0');
  CHECK(smectic_config_to_text(cfg, text.data(), text.size(), &need) == SMECTIC_OK);
  text.resize(need - 1);
  smectic_config* parsed = nullptr;
  CHECK(smectic_config_parse(text.c_str(), &parsed) == SMECTIC_OK);
  smectic_config* copy = nullptr;
  CHECK(smectic_config_clone(parsed, &copy) == SMECTIC_OK);
  CHECK(smectic_config_get(copy, "tau", buf, sizeof buf, &need) == SMECTIC_OK);
  CHECK(std::string(buf) == "0.025");

  CHECK(smectic_config_set(copy, "A", "0") == SMECTIC_OK);
  CHECK(smectic_config_validate(copy) == SMECTIC_ERR_CONFIG);
  CHECK(std::string(smectic_last_error()).find("A < 0 required for d=2") != std::string::npos);
  CHECK(smectic_config_parse("d = 2\n", &parsed) != SMECTIC_OK);

  smectic_config_destroy(copy);
  smectic_config_destroy(parsed);
  smectic_config_destroy(cfg);
  smectic_config_destroy(nullptr);
}

TEST_CASE("solver stepping and fields") {
  smectic_config* cfg = small_config();
  smectic_solver* s = nullptr;
  REQUIRE(smectic_solver_create(cfg, &s) == SMECTIC_OK);
  const size_t n = smectic_solver_field_size(s);
  CHECK(n == 256);
  std::vector<double> q11(n);
  CHECK(smectic_solver_get_field(s, "q11", q11.data(), n) == SMECTIC_OK);
  CHECK(smectic_solver_get_field(s, "q11", q11.data(), n - 1) == SMECTIC_ERR_BUFFER);
  CHECK(smectic_solver_get_field(s, "q22", q11.data(), n) == SMECTIC_ERR_ARGUMENT);

  double mod0 = 0, orig0 = 0;
  CHECK(smectic_solver_energy(s, &mod0, &orig0) == SMECTIC_OK);
  CHECK(mod0 == doctest::Approx(orig0));
  smectic_step_info info{};
  for (int k = 0; k < 3; ++k) {
    CHECK(smectic_solver_step(s, 0.025, &info) == SMECTIC_OK);
    CHECK(info.E_modified <= mod0 + 1e-12);
    mod0 = info.E_modified;
  }
  CHECK(info.step == 3);
  double t = 0, sv = 0;
  long step = 0;
  CHECK(smectic_solver_time(s, &t, &sv, &step) == SMECTIC_OK);
  CHECK(t == doctest::Approx(0.075));
  CHECK(step == 3);
  CHECK(sv == info.s);
  CHECK(smectic_solver_step(s, -1.0, &info) == SMECTIC_ERR_ARGUMENT);

  std::vector<double> zero(n, 0.0);
  CHECK(smectic_solver_set_field(s, "u", zero.data(), n) == SMECTIC_OK);
  std::vector<double> back(n, 1.0);
  CHECK(smectic_solver_get_field(s, "u", back.data(), n) == SMECTIC_OK);
  CHECK(back == zero);
  smectic_solver_destroy(s);
  smectic_config_destroy(cfg);
}

TEST_CASE("solver run writes outputs and maps blow-up") {
  const fs::path dir = fs::temp_directory_path() / "smectic_capi_run";
  fs::remove_all(dir);
  smectic_config* cfg = small_config();
  smectic_solver* s = nullptr;
  REQUIRE(smectic_solver_create(cfg, &s) == SMECTIC_OK);
  smectic_run_info info{};
  CHECK(smectic_solver_run(s, dir.string().c_str(), &info) == SMECTIC_OK);
  CHECK(info.steps == 4);
  CHECK(info.t == doctest::Approx(0.1));
  CHECK(info.blowup_step == -1);
  CHECK(info.E_modified_final <= info.E_modified_initial);
  CHECK(fs::exists(dir / "diagnostics.csv"));
  CHECK(fs::exists(dir / "summary.json"));
  smectic_solver_destroy(s);

  // plain mode with a huge step and tiny stabilization diverges
  CHECK(smectic_config_set(cfg, "mode", "plain") == SMECTIC_OK);
  CHECK(smectic_config_set(cfg, "kappa1", "1e-6") == SMECTIC_OK);
  CHECK(smectic_config_set(cfg, "kappa2", "1e-6") == SMECTIC_OK);
  CHECK(smectic_config_set(cfg, "q_amplitude", "3") == SMECTIC_OK);
  CHECK(smectic_config_set(cfg, "tau", "5") == SMECTIC_OK);
  CHECK(smectic_config_set(cfg, "T_final", "500") == SMECTIC_OK);
  REQUIRE(smectic_solver_create(cfg, &s) == SMECTIC_OK);
  const smectic_status st = smectic_solver_run(s, (dir / "blow").string().c_str(), &info);
  CHECK(st == SMECTIC_ERR_BLOWUP);
  CHECK(info.blowup_step >= 1);
  smectic_solver_destroy(s);
  smectic_config_destroy(cfg);
}

TEST_CASE("reports") {
  smectic_report* r = nullptr;
  REQUIRE(smectic_gradcheck(2, 8, 42, 1e-5, &r) == SMECTIC_OK);
  CHECK(smectic_report_passed(r) == 1);
  CHECK(smectic_report_value(r) < 1e-6);
  smectic_report_destroy(r);

  REQUIRE(smectic_selfcheck(42, 0.0, &r) == SMECTIC_OK);
  CHECK(smectic_report_passed(r) == 1);
  CHECK(std::string(smectic_report_text(r)).find("PASS") != std::string::npos);
  smectic_report_destroy(r);

  smectic_config* cfg = nullptr;
  REQUIRE(smectic_config_preset("conv2d", &cfg) == SMECTIC_OK);
  smectic_config_set(cfg, "J", "16");
  smectic_config_set(cfg, "T_final", "0.125");
  const double taus[] = {1.0 / 16, 1.0 / 32};
  REQUIRE(smectic_conv_time(cfg, taus, 2, 1.0 / 256, &r) == SMECTIC_OK);
  CHECK(smectic_report_rows(r) == 2);
  std::vector<double> errs(2 * 7), rates(7);
  CHECK(smectic_report_errors(r, errs.data(), errs.size()) == SMECTIC_OK);
  CHECK(smectic_report_rates(r, rates.data(), rates.size()) == SMECTIC_OK);
  CHECK(errs[0] > errs[7]);
  CHECK(rates[0] > 0.5);
  smectic_report_destroy(r);
  smectic_config_destroy(cfg);
}
