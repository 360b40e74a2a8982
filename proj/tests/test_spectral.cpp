#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "smectic/error.hpp"
#include "smectic/spectral.hpp"

using namespace smectic;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField random_field(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField f(g);
  for (double& v : f.values()) v = dist(rng);
  return f;
}

// Direct O(N^2) DFT coefficient with the same 1/J^d scaling.
std::complex<double> naive_coeff(const ScalarField& f, std::array<int, 3> k) {
  const GridSpec& g = f.grid();
  const int J = g.points;
  std::complex<double> sum = 0.0;
  const int nz = g.dim == 3 ? J : 1;
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < J; ++y)
      for (int x = 0; x < J; ++x) {
        const double ph = -2 * kPi * (double(k[0]) * x + double(k[1]) * y + double(k[2]) * z) / J;
        sum += f.at(x, y, z) * std::polar(1.0, ph);
      }
  return sum / std::pow(double(J), g.dim);
}

}  // namespace

TEST_CASE("phi functions") {
  CHECK(phi1(0.0) == 1.0);
  CHECK(phi1(-1.0) == doctest::Approx(1 - std::exp(-1.0)));
  CHECK(phi1(-1e-12) == doctest::Approx(1.0));
  CHECK(phi1(-800.0) == doctest::Approx(1.0 / 800));
  CHECK(qfun(0.0) == 1.0);
  CHECK(qfun(1.0) == doctest::Approx(0.581977).epsilon(1e-6));
  CHECK(qfun(1e-10) == doctest::Approx(1.0));
  CHECK(qfun(800.0) == doctest::Approx(0.0));
  CHECK(std::isfinite(qfun(1e6)));
  CHECK(q1fun(0.0) == 1.0);
  // q1 = z (1/(e^z - 1) + 1/2) = (z/2) coth(z/2) >= 1
  for (double z : {1e-6, 0.3, 1.0, 5.0, 40.0, 700.0, 2000.0}) {
    CHECK(q1fun(z) == doctest::Approx(z / 2 / std::tanh(z / 2)).epsilon(1e-12));
    CHECK(q1fun(z) >= 1.0);
    CHECK(qfun(z) * phi1(-z) == doctest::Approx(std::exp(-z)).epsilon(1e-12));
  }
}

TEST_CASE("eigenvalues match the stencil applied to plane waves") {
  const GridSpec g = GridSpec::make(2, 8, 2 * kPi);
  const SpectralPlan plan(g);
  CHECK(plan.mode_count() == 8 * 5);
  const double h = g.spacing();
  for (std::size_t m = 0; m < plan.mode_count(); ++m) {
    const auto k = plan.wave_numbers(m);
    CHECK(k[0] >= 0);
    CHECK(k[0] <= 4);
    const ScalarField c = sample(g, [&](double x, double y, double) { return std::cos(k[0] * x + k[1] * y); });
    const ScalarField lap = laplacian(c);
    double expect = 0.0;
    for (int a = 0; a < 2; ++a) expect += 4 / (h * h) * std::pow(std::sin(kPi * k[a] / 8), 2);
    CHECK(plan.lambda()[m] == doctest::Approx(expect).epsilon(1e-13));
    for (std::size_t n = 0; n < g.size(); ++n) CHECK(lap[n] == doctest::Approx(-expect * c[n]).epsilon(1e-10).scale(1.0));
  }
  // Nyquist in both directions
  double lmax = 0.0;
  for (double l : plan.lambda()) lmax = std::max(lmax, l);
  CHECK(lmax == doctest::Approx(2 * 64 / (kPi * kPi)));
}

TEST_CASE("forward transform agrees with a direct DFT and round trips") {
  for (int dim : {2, 3}) {
    const GridSpec g = GridSpec::make(dim, dim == 2 ? 8 : 4, 1.7);
    const SpectralPlan plan(g);
    const ScalarField f = random_field(g, 17 + dim);
    const Spectrum fh = plan.forward(f);
    REQUIRE(fh.size() == plan.mode_count());
    for (std::size_t m = 0; m < plan.mode_count(); m += 3) {
      const auto ref = naive_coeff(f, plan.wave_numbers(m));
      CHECK(std::abs(fh[m] - ref) < 1e-13);
    }
    const ScalarField back = plan.inverse(fh);
    for (std::size_t n = 0; n < g.size(); ++n) CHECK(back[n] == doctest::Approx(f[n]).epsilon(1e-13));
    CHECK(parseval_check(plan, f) < 1e-13);
    ModeCoeffs unit{std::vector<double>(plan.mode_count(), 1.0)};
    CHECK(weighted_norm_squared(plan, f, unit, 0.1, NormKind::Plain) == doctest::Approx(inner(f, f)).epsilon(1e-13));
  }
  const SpectralPlan p8(GridSpec::make(2, 8, 1.0));
  CHECK_THROWS_AS(p8.inverse(Spectrum(3)), Error);
}

TEST_CASE("multiplicities count each mode once over the full spectrum") {
  const GridSpec g = GridSpec::make(3, 6, 1.0);
  const SpectralPlan plan(g);
  double total = 0.0;
  for (double m : plan.multiplicity()) {
    CHECK((m == 1.0 || m == 2.0));
    total += m;
  }
  CHECK(total == doctest::Approx(double(g.size())));
}

TEST_CASE("symbols") {
  const GridSpec g = GridSpec::make(2, 8, 2 * kPi);
  const SpectralPlan plan(g);
  ModelParams p = ModelParams{}.validated();
  const ModeCoeffs L = make_symbol(plan, OperatorKind::Elastic, p, 0.5);
  const ModeCoeffs D = make_symbol(plan, OperatorKind::Bending, p, 2.0);
  for (std::size_t m = 0; m < plan.mode_count(); ++m) {
    const double l = plan.lambda()[m];
    CHECK(L.symbol[m] == doctest::Approx(p.K * l + 0.5 * p.kappa1));
    CHECK(D.symbol[m] == doctest::Approx(2 * p.B0 * l * l + 2.0 * p.kappa2));
  }
}

TEST_CASE("exponential update per mode") {
  const GridSpec g = GridSpec::make(2, 8, 1.0);
  const SpectralPlan plan(g);
  const std::size_t M = plan.mode_count();
  ModeCoeffs s{std::vector<double>(M, 2.0)};
  Spectrum v(M, {1.0, -0.5}), N(M, {0.0, 0.0});
  const double tau = 0.3;
  Spectrum w = etd_update(v, s, N, tau);
  CHECK(std::abs(w[7] - std::exp(-0.6) * v[7]) < 1e-15);
  // fixed point: N = s v
  for (auto& x : N) x = 2.0 * std::complex<double>(1.0, -0.5);
  w = etd_update(v, s, N, tau);
  CHECK(std::abs(w[3] - v[3]) < 1e-14);
  // zero symbol: v + tau N
  ModeCoeffs zero{std::vector<double>(M, 0.0)};
  w = etd_update(v, zero, N, tau);
  CHECK(std::abs(w[0] - (v[0] + tau * N[0])) < 1e-15);
}

TEST_CASE("quasi-implicit form equals the exponential update") {
  const GridSpec g = GridSpec::make(2, 16, 2 * kPi);
  const SpectralPlan plan(g);
  const ModelParams p = ModelParams{}.validated();
  const ScalarField f = random_field(g, 3), n = random_field(g, 4);
  for (double tau : {1e-4, 1e-2, 1.0, 50.0}) {
    for (auto kind : {OperatorKind::Elastic, OperatorKind::Bending}) {
      const ModeCoeffs s = make_symbol(plan, kind, p, 0.7);
      const Spectrum a = etd_update(plan.forward(f), s, plan.forward(n), tau);
      const Spectrum b = quasi_implicit_update(plan.forward(f), s, plan.forward(n), tau);
      double num = 0.0, den = 0.0;
      for (std::size_t m = 0; m < a.size(); ++m) {
        num = std::max(num, std::abs(a[m] - b[m]));
        den = std::max(den, std::abs(a[m]));
      }
      CHECK(num <= 1e-12 * den);
    }
  }
}

TEST_CASE("weighted norms") {
  CHECK(mode_weight(NormKind::Plain, 3.0, 0.5) == 1.0);
  CHECK(mode_weight(NormKind::Operator, 3.0, 0.5) == 3.0);
  CHECK(mode_weight(NormKind::Q, 2.0, 0.5) == doctest::Approx(qfun(1.0)));
  CHECK(mode_weight(NormKind::Q1, 2.0, 0.5) == doctest::Approx(qfun(1.0) + 0.5));

  const GridSpec g = GridSpec::make(2, 16, 2 * kPi);
  const SpectralPlan plan(g);
  const ModelParams p = ModelParams{}.validated();
  const ModeCoeffs L = make_symbol(plan, OperatorKind::Elastic, p, 1.0);
  // single mode cos(2x) cos(y): weight evaluated at its own symbol, times ||f||^2
  const ScalarField f = sample(g, [](double x, double y, double) { return std::cos(2 * x) * std::cos(y); });
  const double lam = 4 / std::pow(g.spacing(), 2) * (std::pow(std::sin(2 * kPi / 16), 2) + std::pow(std::sin(kPi / 16), 2));
  const double sym = p.K * lam + p.kappa1;
  const double tau = 0.2;
  for (auto kind : {NormKind::Plain, NormKind::Q, NormKind::Q1, NormKind::Operator}) {
    CHECK(weighted_norm_squared(plan, f, L, tau, kind) ==
          doctest::Approx(mode_weight(kind, sym, tau) * inner(f, f)).epsilon(1e-12));
  }
  // operator norm equals <(K(-lap) + kappa1) f, f>
  const ScalarField r = random_field(g, 9);
  CHECK(weighted_norm_squared(plan, r, L, tau, NormKind::Operator) ==
        doctest::Approx(-p.K * inner(laplacian(r), r) + p.kappa1 * inner(r, r)).epsilon(1e-12));

  // tensor norm is the Frobenius sum with weight 2 on the packed 2D components
  QField q(g);
  q.component(0) = r;
  q.component(1) = random_field(g, 10);
  const double scalar_sum = weighted_norm_squared(plan, q.component(0), L, tau, NormKind::Q1) +
                            weighted_norm_squared(plan, q.component(1), L, tau, NormKind::Q1);
  CHECK(weighted_norm_squared(plan, q, L, tau, NormKind::Q1) == doctest::Approx(2 * scalar_sum).epsilon(1e-12));
  CHECK(weighted_norm_squared(plan, q, L, tau, NormKind::Plain) == doctest::Approx(frobenius_inner(q, q)).epsilon(1e-12));
}
