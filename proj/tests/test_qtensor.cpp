#include <cmath>
#include <random>

#include "doctest.h"
#include "smectic/error.hpp"
#include "smectic/qtensor.hpp"

using namespace smectic;

namespace {

QField random_q(const GridSpec& g, std::uint64_t seed, double amp = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amp, amp);
  QField q(g);
  for (int c = 0; c < q.count(); ++c)
    for (double& v : q.component(c).values()) v = dist(rng);
  return q;
}

// Full d x d matrix at point n, assembled directly from the packing rule.
std::vector<std::vector<double>> brute_matrix(const QField& q, std::size_t n) {
  const int d = q.dim();
  std::vector<std::vector<double>> m(d, std::vector<double>(d, 0.0));
  if (d == 2) {
    m[0][0] = q.component(0)[n];
    m[1][1] = -q.component(0)[n];
    m[0][1] = m[1][0] = q.component(1)[n];
  } else {
    m[0][0] = q.component(0)[n];
    m[1][1] = q.component(1)[n];
    m[2][2] = -q.component(0)[n] - q.component(1)[n];
    m[0][1] = m[1][0] = q.component(2)[n];
    m[0][2] = m[2][0] = q.component(3)[n];
    m[1][2] = m[2][1] = q.component(4)[n];
  }
  return m;
}

double brute_frobenius(const QField& a, const QField& b) {
  double sum = 0.0;
  for (std::size_t n = 0; n < a.grid().size(); ++n) {
    const auto ma = brute_matrix(a, n), mb = brute_matrix(b, n);
    for (int i = 0; i < a.dim(); ++i)
      for (int j = 0; j < a.dim(); ++j) sum += ma[i][j] * mb[i][j];
  }
  return sum * a.grid().cell_volume();
}

}  // namespace

TEST_CASE("compact packing round trips") {
  const GridSpec g2 = GridSpec::make(2, 4, 1.0);
  QField q(g2);
  q.component(0) = ScalarField(g2, 0.3);
  q.component(1) = ScalarField(g2, -0.1);
  const SymMatrixField m = to_full(q);
  CHECK(m(0, 0)[0] == 0.3);
  CHECK(m(1, 1)[0] == -0.3);
  CHECK(m(0, 1)[0] == -0.1);
  CHECK(m(1, 0)[0] == -0.1);

  for (int dim : {2, 3}) {
    const GridSpec g = GridSpec::make(dim, 4, 1.0);
    const QField r = random_q(g, 9);
    const QField back = from_full(to_full(r));
    for (int c = 0; c < r.count(); ++c)
      for (std::size_t n = 0; n < g.size(); ++n) CHECK(back.component(c)[n] == r.component(c)[n]);
    const SymMatrixField full = to_full(r);
    for (std::size_t n = 0; n < g.size(); ++n) {
      double tr = 0.0;
      for (int k = 0; k < dim; ++k) tr += full(k, k)[n];
      CHECK(tr == 0.0);
    }
    const QField zero = from_full(SymMatrixField(g));
    CHECK(sup_frobenius(zero) == 0.0);
  }
}

TEST_CASE("from_full rejects a traced matrix") {
  const GridSpec g = GridSpec::make(3, 4, 1.0);
  SymMatrixField m(g);
  m(0, 0) = ScalarField(g, 1.0);
  try {
    from_full(m);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Constraint);
  }
}

TEST_CASE("deviatoric projection") {
  const GridSpec g = GridSpec::make(3, 4, 1.0);
  SymMatrixField id(g);
  for (int k = 0; k < 3; ++k) id(k, k) = ScalarField(g, 1.0);
  CHECK(sup_frobenius(dev(id)) == 0.0);

  SymMatrixField diag(g);
  diag(0, 0) = ScalarField(g, 1.0);
  diag(1, 1) = ScalarField(g, 2.0);
  diag(2, 2) = ScalarField(g, 3.0);
  const SymMatrixField dd = dev(diag);
  CHECK(dd(0, 0)[5] == doctest::Approx(-1.0));
  CHECK(dd(1, 1)[5] == doctest::Approx(0.0));
  CHECK(dd(2, 2)[5] == doctest::Approx(1.0));

  const SymMatrixField traceless = to_full(random_q(g, 4));
  const SymMatrixField same = dev(traceless);
  for (int c = 0; c < same.count(); ++c)
    for (std::size_t n = 0; n < g.size(); ++n) CHECK(same.component(c)[n] == doctest::Approx(traceless.component(c)[n]));

  SymMatrixField r(g);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (int c = 0; c < r.count(); ++c)
    for (double& v : r.component(c).values()) v = dist(rng);
  const SymMatrixField d1 = dev(r), d2 = dev(d1);
  for (int c = 0; c < d1.count(); ++c)
    for (std::size_t n = 0; n < g.size(); ++n) CHECK(d2.component(c)[n] == doctest::Approx(d1.component(c)[n]));
  for (std::size_t n = 0; n < g.size(); ++n) CHECK(d1(0, 0)[n] + d1(1, 1)[n] + d1(2, 2)[n] == doctest::Approx(0.0));
}

TEST_CASE("trace invariants") {
  const GridSpec g = GridSpec::make(3, 4, 1.0);
  const QField zero(g);
  CHECK(norm_inf(trQ2(zero)) == 0.0);
  CHECK(norm_inf(trQ3(zero)) == 0.0);

  // Uniaxial s (n n^T - I/3), n = e1, s = 1: diag(2/3, -1/3, -1/3)
  QField uni(g);
  uni.component(0) = ScalarField(g, 2.0 / 3.0);
  uni.component(1) = ScalarField(g, -1.0 / 3.0);
  CHECK(trQ2(uni)[0] == doctest::Approx(2.0 / 3.0));
  CHECK(trQ3(uni)[0] == doctest::Approx(8.0 / 27 - 2.0 / 27));

  const QField r = random_q(g, 12);
  const ScalarField t2 = trQ2(r);
  const SymMatrixField sq = q_squared(r);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto m = brute_matrix(r, n);
    double fro = 0.0, cube = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        fro += m[i][j] * m[i][j];
        double sq_ij = 0.0;
        for (int k = 0; k < 3; ++k) sq_ij += m[i][k] * m[k][j];
        CHECK(sq(i, j)[n] == doctest::Approx(sq_ij));
        cube += sq_ij * m[j][i];
      }
    CHECK(t2[n] == doctest::Approx(fro));
    CHECK(t2[n] >= 0.0);
    CHECK(trQ3(r)[n] == doctest::Approx(cube));
  }

  const GridSpec g2 = GridSpec::make(2, 4, 1.0);
  try {
    trQ3(QField(g2));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Argument);
  }
}

TEST_CASE("coupling tensor M") {
  for (int dim : {2, 3}) {
    const GridSpec g = GridSpec::make(dim, 4, 1.0);
    const SymMatrixField m0 = m_tensor(QField(g), 1.0);
    CHECK(frobenius_inner(m0, m0) == doctest::Approx(1.0 / dim * g.volume()));
    const SymMatrixField m = m_tensor(random_q(g, 5), 0.7);
    for (std::size_t n = 0; n < g.size(); ++n) {
      double tr = 0.0;
      for (int k = 0; k < dim; ++k) tr += m(k, k)[n];
      CHECK(tr == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(m_tensor(QField(g), 0.0), Error);
  }
  // Q = s (n n^T - I/2) with n = (cos t, sin t) gives M = n n^T
  const GridSpec g = GridSpec::make(2, 4, 1.0);
  const double s = 0.8, t = 0.4;
  QField q(g);
  q.component(0) = ScalarField(g, s * (std::cos(t) * std::cos(t) - 0.5));
  q.component(1) = ScalarField(g, s * std::cos(t) * std::sin(t));
  const SymMatrixField m = m_tensor(q, s);
  CHECK(m(0, 0)[0] == doctest::Approx(std::cos(t) * std::cos(t)));
  CHECK(m(1, 1)[0] == doctest::Approx(std::sin(t) * std::sin(t)));
  CHECK(m(0, 1)[0] == doctest::Approx(std::cos(t) * std::sin(t)));
}

TEST_CASE("Frobenius pairing matches the full-matrix sum") {
  const GridSpec g2 = GridSpec::make(2, 4, 1.0);
  QField q(g2);
  q.component(0) = ScalarField(g2, 0.3);
  q.component(1) = ScalarField(g2, -0.1);
  CHECK(frobenius_inner(q, q) == doctest::Approx(0.2));
  CHECK(frobenius_inner(QField(g2), QField(g2)) == 0.0);

  for (int dim : {2, 3}) {
    const GridSpec g = GridSpec::make(dim, 5, 1.3);
    const QField a = random_q(g, 1), b = random_q(g, 2);
    const double oracle = brute_frobenius(a, b);
    CHECK(std::abs(frobenius_inner(a, b) - oracle) <= 1e-13 * std::abs(oracle));
    CHECK(frobenius_inner(to_full(a), to_full(b)) == doctest::Approx(oracle).epsilon(1e-13));
    double sup = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) sup = std::max(sup, std::sqrt(frobenius_point(a, a, n)));
    CHECK(sup_frobenius(a) == doctest::Approx(sup));
    CHECK(sup_frobenius(a) * sup_frobenius(a) >= frobenius_inner(a, a) / g.volume());
  }
  CHECK_THROWS_AS(frobenius_inner(QField(g2), QField(GridSpec::make(2, 6, 1.0))), Error);
}

TEST_CASE("largest eigenvalue") {
  const GridSpec g2 = GridSpec::make(2, 4, 1.0);
  QField q(g2);
  q.component(0) = ScalarField(g2, 0.3);
  q.component(1) = ScalarField(g2, 0.4);
  CHECK(largest_eigenvalue(q)[0] == doctest::Approx(0.5));

  const GridSpec g3 = GridSpec::make(3, 4, 1.0);
  QField u(g3);
  u.component(0) = ScalarField(g3, -1.0 / 3.0);
  u.component(1) = ScalarField(g3, 2.0 / 3.0);
  CHECK(largest_eigenvalue(u)[0] == doctest::Approx(2.0 / 3.0));
  const QField r = random_q(g3, 8);
  const ScalarField lam = largest_eigenvalue(r);
  for (std::size_t n = 0; n < g3.size(); ++n) {
    // characteristic polynomial vanishes: det(Q - lam I) = 0
    const auto m = brute_matrix(r, n);
    const double l = lam[n];
    const double a = m[0][0] - l, b = m[1][1] - l, c = m[2][2] - l;
    const double det = a * (b * c - m[1][2] * m[1][2]) - m[0][1] * (m[0][1] * c - m[1][2] * m[0][2]) +
                       m[0][2] * (m[0][1] * m[1][2] - b * m[0][2]);
    CHECK(std::abs(det) < 1e-12);
    CHECK(l >= -1e-15);
  }
}
