#pragma once

// Bulk densities, the discrete nonlinear energy E1h, its exact discrete
// gradients, the exponential relaxation factor and the maximum-bound
// calculator for the stabilization parameter.

#include "smectic/grid.hpp"
#include "smectic/qtensor.hpp"

namespace smectic {

struct ModelParams {
  int dim = 2;
  double K = 0.1;    // elastic constant
  double A = -1.0;   // rescaled nematic temperature
  double B = 0.0;    // cubic bulk constant, used for d = 3 only
  double C = 2.0;    // quartic bulk constant
  double a = -5.0;   // smectic temperature parameter
  double b = 0.0;
  double c = 5.0;
  double q = 5.0;    // layer wave number
  double B0 = 7e-5;  // coupling strength
  double kappa1 = 8.0;
  double kappa2 = 8.0;
  double eta0 = 0.95;  // share of the dissipation budget the relaxation may spend

  double s_plus = 0.0;  // derived, see validated()

  /// Checks positivity and the ordered-phase regime, and fills s_plus.
  ModelParams validated() const;
};

/// Equilibrium uniaxial order: sqrt(-2A/C) in 2D, (B + sqrt(B^2 - 24AC)) / (4C) in 3D.
double s_plus(double A, double B, double C, int dim);

ScalarField f_bn_density(const QField& q, const ModelParams& p);
ScalarField f_s_density(const ScalarField& u, const ModelParams& p);

/// 2B0 q^2 <D^2u, M u> + B0 q^4 ||M u||^2 + <f_bn, 1> + <f_s, 1>.
double e1h(const QField& q, const ScalarField& u, const ModelParams& p);

/// Discrete variations of e1h. H is the traceless part of dE1/dQ, mu = dE1/du,
/// both exact gradients of e1h with respect to <.,.>_h.
struct NonlinearTerms {
  double e1 = 0.0;
  QField H;
  ScalarField mu;
};

NonlinearTerms nonlinear_terms(const QField& q, const ScalarField& u, const ModelParams& p);
QField grad_q(const QField& q, const ScalarField& u, const ModelParams& p);
ScalarField grad_u(const QField& q, const ScalarField& u, const ModelParams& p);

/// exp(s - e1), evaluated from the difference. Throws Numerical on overflow;
/// underflow to zero is returned as is.
double g_factor(double s, double e1);

struct StabilizedNonlinear {
  QField nq;       // g (kappa1 Q - H)
  ScalarField nu;  // g (kappa2 u - mu)
  double g = 1.0;
};

StabilizedNonlinear stabilized_nonlinear(const QField& q, const ScalarField& u, double s,
                                         const ModelParams& p);

/// (K/2) ||grad_h Q||^2 + B0 ||lap_h u||^2.
double quadratic_energy(const QField& q, const ScalarField& u, const ModelParams& p);
double modified_energy(const QField& q, const ScalarField& u, double s, const ModelParams& p);
double original_energy(const QField& q, const ScalarField& u, const ModelParams& p);

// ---------------------------------------------------------------------------
// Maximum bound calculator

/// f_d(xi) = -A xi + b_d xi^2 - C xi^3 + S, b_2 = 0, b_3 = |B|/sqrt(6).
double mbp_cubic(const ModelParams& p, double xi, double forcing);

/// sup_x |(2 B0 q^2 / s_plus) dev(u D^2 u)|_F, the forcing bound S.
double coupling_forcing_bound(const ScalarField& u, const ModelParams& p);

/// max(sup_Q0, smallest xi* >= 0 past which f_d stays non-positive).
double mbp_eta(const ModelParams& p, double sup_q0, double forcing);

/// Stabilization threshold: max{ A + 2B0 q^4 sup_u2 / s_plus^2 + C eta^2,
///                               max_{xi in [0,eta]} (A - 2 b_d xi + 3 C xi^2) }.
double kappa0(const ModelParams& p, double eta, double sup_u2);

}  // namespace smectic
