#include "smectic/energy.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "smectic/error.hpp"

namespace smectic {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    fail(ErrorKind::Parameter, std::string(name) + " > 0 required (got " + std::to_string(v) + ")");
  }
}

double b_dim(const ModelParams& p) { return p.dim == 3 ? std::abs(p.B) / std::sqrt(6.0) : 0.0; }

// Per-point algebra shared by e1h and nonlinear_terms.
struct PointState {
  Mat3 Q;
  Mat3 M;
  double trq2 = 0.0;
  double trq3 = 0.0;
  double md = 0.0;  // M : D^2u
  double mm = 0.0;  // |M|^2
};

PointState evaluate_point(const QField& q, const SymMatrixField& hess, std::size_t n,
                          const ModelParams& p) {
  const int d = q.dim();
  PointState ps;
  ps.Q = unpack(q, n);
  const Mat3 D = unpack(hess, n);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double qij = ps.Q.m[i][j];
      ps.trq2 += qij * qij;
      const double mij = qij / p.s_plus + (i == j ? 1.0 / d : 0.0);
      ps.M.m[i][j] = mij;
      ps.md += mij * D.m[i][j];
      ps.mm += mij * mij;
    }
  }
  if (d == 3) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) ps.trq3 += ps.Q.m[i][j] * ps.Q.m[j][k] * ps.Q.m[k][i];
  }
  return ps;
}

double bulk_nematic(const ModelParams& p, double trq2, double trq3) {
  double f = 0.5 * p.A * trq2 + 0.25 * p.C * trq2 * trq2;
  if (p.dim == 3) f -= p.B / 3.0 * trq3;
  return f;
}

double bulk_smectic(const ModelParams& p, double u) {
  const double u2 = u * u;
  return 0.5 * p.a * u2 + p.b / 3.0 * u2 * u + 0.25 * p.c * u2 * u2;
}

void require_compatible(const QField& q, const ScalarField& u, const ModelParams& p) {
  require_same_grid(q.grid(), u.grid(), "energy");
  if (q.dim() != p.dim) fail(ErrorKind::Argument, "model dimension does not match grid dimension");
  if (!(p.s_plus > 0.0)) fail(ErrorKind::Parameter, "model parameters were not validated (s_plus unset)");
}

}  // namespace

double s_plus(double A, double B, double C, int dim) {
  require_positive(C, "C");
  if (dim == 2) {
    if (!(A < 0.0)) fail(ErrorKind::Parameter, "A < 0 required for d=2 (got A=" + std::to_string(A) + ")");
    return std::sqrt(-2.0 * A / C);
  }
  if (dim == 3) {
    if (!(A < B * B / (27.0 * C))) {
      fail(ErrorKind::Parameter, "A < B^2/(27C) required for d=3");
    }
    const double sp = (B + std::sqrt(B * B - 24.0 * A * C)) / (4.0 * C);
    if (!(sp > 0.0)) fail(ErrorKind::Parameter, "s_plus must be positive for d=3");
    return sp;
  }
  fail(ErrorKind::Parameter, "dimension must be 2 or 3");
}

ModelParams ModelParams::validated() const {
  ModelParams p = *this;
  if (dim != 2 && dim != 3) fail(ErrorKind::Parameter, "d must be 2 or 3");
  require_positive(K, "K");
  require_positive(C, "C");
  require_positive(c, "c");
  require_positive(B0, "B0");
  require_positive(kappa1, "kappa1");
  require_positive(kappa2, "kappa2");
  if (dim == 3) require_positive(B, "B");
  if (!(q >= 0.0) || !std::isfinite(q)) fail(ErrorKind::Parameter, "q >= 0 required");
  if (!(eta0 >= 0.0 && eta0 <= 1.0)) fail(ErrorKind::Parameter, "eta0 in [0,1] required");
  for (double v : {A, a, b}) {
    if (!std::isfinite(v)) fail(ErrorKind::Parameter, "model constants must be finite");
  }
  p.s_plus = smectic::s_plus(A, B, C, dim);
  return p;
}

ScalarField f_bn_density(const QField& q, const ModelParams& p) {
  ScalarField out(q.grid());
  const ScalarField t2 = trQ2(q);
  const ScalarField t3 = p.dim == 3 ? trQ3(q) : ScalarField(q.grid());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = bulk_nematic(p, t2[n], t3[n]);
  return out;
}

ScalarField f_s_density(const ScalarField& u, const ModelParams& p) {
  ScalarField out(u.grid());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = bulk_smectic(p, u[n]);
  return out;
}

double e1h(const QField& q, const ScalarField& u, const ModelParams& p) {
  require_compatible(q, u, p);
  const SymMatrixField hess = hessian(u);
  double cross = 0.0, mu2 = 0.0, bulk = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    const PointState ps = evaluate_point(q, hess, n, p);
    cross += ps.md * u[n];
    mu2 += ps.mm * u[n] * u[n];
    bulk += bulk_nematic(p, ps.trq2, ps.trq3) + bulk_smectic(p, u[n]);
  }
  const double q2 = p.q * p.q;
  return u.grid().cell_volume() * (2.0 * p.B0 * q2 * cross + p.B0 * q2 * q2 * mu2 + bulk);
}

NonlinearTerms nonlinear_terms(const QField& q, const ScalarField& u, const ModelParams& p) {
  require_compatible(q, u, p);
  const GridSpec& grid = u.grid();
  const int d = grid.dim;
  const double q2 = p.q * p.q;
  const double coupling_q = 2.0 * p.B0 * q2 / p.s_plus;
  const double coupling_qq = 2.0 * p.B0 * q2 * q2 / (p.s_plus * p.s_plus);

  const SymMatrixField hess = hessian(u);
  NonlinearTerms out{0.0, QField(grid), ScalarField(grid)};
  SymMatrixField mu_weighted(grid);  // M u, fed to the double divergence
  double cross = 0.0, mu2 = 0.0, bulk = 0.0;

  for (std::size_t n = 0; n < u.size(); ++n) {
    const PointState ps = evaluate_point(q, hess, n, p);
    const double un = u[n];
    cross += ps.md * un;
    mu2 += ps.mm * un * un;
    bulk += bulk_nematic(p, ps.trq2, ps.trq3) + bulk_smectic(p, un);

    const Mat3 D = unpack(hess, n);
    double trD = 0.0;
    for (int i = 0; i < d; ++i) trD += D.m[i][i];

    Mat3 H;
    const double poly = p.A + p.C * ps.trq2 + coupling_qq * un * un;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        H.m[i][j] = poly * ps.Q.m[i][j] + coupling_q * un * (D.m[i][j] - (i == j ? trD / d : 0.0));
      }
    }
    if (d == 3) {
      Mat3 QQ;
      double trqq = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          for (int k = 0; k < 3; ++k) QQ.m[i][j] += ps.Q.m[i][k] * ps.Q.m[k][j];
        }
      for (int i = 0; i < 3; ++i) trqq += QQ.m[i][i];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) H.m[i][j] -= p.B * (QQ.m[i][j] - (i == j ? trqq / 3.0 : 0.0));
    }
    pack(H, out.H, n);

    out.mu[n] = p.a * un + p.b * un * un + p.c * un * un * un + 2.0 * p.B0 * q2 * ps.md +
                2.0 * p.B0 * q2 * q2 * ps.mm * un;
    Mat3 Mu = ps.M;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) Mu.m[i][j] *= un;
    pack(Mu, mu_weighted, n);
  }
  out.mu.add_scaled(2.0 * p.B0 * q2, hessian_adjoint(mu_weighted));
  out.e1 = grid.cell_volume() * (2.0 * p.B0 * q2 * cross + p.B0 * q2 * q2 * mu2 + bulk);
  return out;
}

QField grad_q(const QField& q, const ScalarField& u, const ModelParams& p) {
  return nonlinear_terms(q, u, p).H;
}

ScalarField grad_u(const QField& q, const ScalarField& u, const ModelParams& p) {
  return nonlinear_terms(q, u, p).mu;
}

double g_factor(double s, double e1) {
  const double g = std::exp(s - e1);
  if (!std::isfinite(g) || std::isnan(s - e1)) {
    fail(ErrorKind::Numerical, "relaxation factor exp(s - E1h) is not finite (s - E1h = " +
                                   std::to_string(s - e1) + ")");
  }
  return g;
}

StabilizedNonlinear stabilized_nonlinear(const QField& q, const ScalarField& u, double s,
                                         const ModelParams& p) {
  NonlinearTerms nl = nonlinear_terms(q, u, p);
  StabilizedNonlinear out;
  out.g = g_factor(s, nl.e1);
  out.nq = p.kappa1 * q;
  out.nq -= nl.H;
  out.nq *= out.g;
  out.nu = p.kappa2 * u;
  out.nu -= nl.mu;
  out.nu *= out.g;
  return out;
}

double quadratic_energy(const QField& q, const ScalarField& u, const ModelParams& p) {
  require_same_grid(q.grid(), u.grid(), "quadratic_energy");
  double grad2 = 0.0;
  for (int axis = 0; axis < q.dim(); ++axis) {
    QField dq(q.grid());
    for (int c = 0; c < q.count(); ++c) dq.component(c) = apply_diff(q.component(c), axis, DiffKind::Forward);
    grad2 += frobenius_inner(dq, dq);
  }
  const ScalarField lap = laplacian(u);
  return 0.5 * p.K * grad2 + p.B0 * inner(lap, lap);
}

double modified_energy(const QField& q, const ScalarField& u, double s, const ModelParams& p) {
  return quadratic_energy(q, u, p) + s;
}

double original_energy(const QField& q, const ScalarField& u, const ModelParams& p) {
  return quadratic_energy(q, u, p) + e1h(q, u, p);
}

// ---------------------------------------------------------------------------

double mbp_cubic(const ModelParams& p, double xi, double forcing) {
  return -p.A * xi + b_dim(p) * xi * xi - p.C * xi * xi * xi + forcing;
}

double coupling_forcing_bound(const ScalarField& u, const ModelParams& p) {
  if (!(p.s_plus > 0.0)) fail(ErrorKind::Parameter, "model parameters were not validated (s_plus unset)");
  const int d = u.grid().dim;
  const SymMatrixField hess = hessian(u);
  const double coef = 2.0 * p.B0 * p.q * p.q / p.s_plus;
  double best = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    Mat3 D = unpack(hess, n);
    double tr = 0.0;
    for (int i = 0; i < d; ++i) tr += D.m[i][i];
    double f2 = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const double t = coef * u[n] * (D.m[i][j] - (i == j ? tr / d : 0.0));
        f2 += t * t;
      }
    best = std::max(best, f2);
  }
  return std::sqrt(best);
}

double mbp_eta(const ModelParams& p, double sup_q0, double forcing) {
  if (forcing < 0.0) fail(ErrorKind::Argument, "forcing bound S must be non-negative");
  if (sup_q0 < 0.0) fail(ErrorKind::Argument, "sup |Q0|_F must be non-negative");
  if (!(p.C > 0.0)) fail(ErrorKind::Internal, "cubic has no positive root without C > 0");

  const double bd = b_dim(p);
  auto f = [&](double xi) { return mbp_cubic(p, xi, forcing); };

  // All real roots of C xi^3 - b xi^2 + A xi - S lie within this Cauchy bound.
  const double upper = 1.0 + std::max({std::abs(p.A), bd, forcing}) / p.C;

  // Split [0, upper] at critical points (roots of -A + 2 b xi - 3 C xi^2) so
  // each piece is monotone, then scan from the right for the last sign change.
  std::vector<double> knots{0.0, upper};
  const double disc = 4.0 * bd * bd - 12.0 * p.C * p.A;
  if (disc >= 0.0) {
    for (double r : {(2.0 * bd - std::sqrt(disc)) / (6.0 * p.C), (2.0 * bd + std::sqrt(disc)) / (6.0 * p.C)}) {
      if (r > 0.0 && r < upper) knots.push_back(r);
    }
  }
  std::sort(knots.begin(), knots.end());

  double root = 0.0;
  for (std::size_t k = knots.size() - 1; k > 0; --k) {
    double lo = knots[k - 1];
    double hi = knots[k];
    if (f(lo) > 0.0) {
      if (f(hi) > 0.0) fail(ErrorKind::Internal, "cubic stays positive at the Cauchy bound");
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
      }
      root = hi;
      break;
    }
  }
  return std::max(sup_q0, root);
}

double kappa0(const ModelParams& p, double eta, double sup_u2) {
  const double bd = b_dim(p);
  const double first = p.A + 2.0 * p.B0 * std::pow(p.q, 4) * sup_u2 / (p.s_plus * p.s_plus) + p.C * eta * eta;
  // Convex quadratic in xi: its maximum over [0, eta] sits at an endpoint.
  const double second = std::max(p.A, p.A - 2.0 * bd * eta + 3.0 * p.C * eta * eta);
  return std::max(first, second);
}

}  // namespace smectic
