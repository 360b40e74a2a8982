#pragma once

// Exact diagonalization of the constant-coefficient periodic difference
// operators by the real-input DFT, and the scalar functions of those
// operators needed by the exponential integrator.
//
// The DFT is used strictly as a diagonalizer of the circulant finite-difference
// operators: the symbol of -lap_h is the second-difference symbol
//   lambda(k) = (4/h^2) sum_i sin^2(pi k_i / J),
// not the spectral k^2.

#include <array>
#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "smectic/energy.hpp"
#include "smectic/grid.hpp"
#include "smectic/qtensor.hpp"

namespace smectic {

/// (e^z - 1) / z, z <= 0 in practice; phi1(0) = 1.
double phi1(double z);
/// z / (e^z - 1) for z >= 0; qfun(0) = 1.
double qfun(double z);
/// qfun(z) + z/2.
double q1fun(double z);

/// Half-spectrum coefficients of a real field, forward transform scaled by 1/J^d.
using Spectrum = std::vector<std::complex<double>>;

class SpectralPlan {
 public:
  explicit SpectralPlan(const GridSpec& grid);
  ~SpectralPlan();
  SpectralPlan(SpectralPlan&&) noexcept;
  SpectralPlan& operator=(SpectralPlan&&) noexcept;
  SpectralPlan(const SpectralPlan&) = delete;
  SpectralPlan& operator=(const SpectralPlan&) = delete;

  const GridSpec& grid() const;
  std::size_t mode_count() const;
  /// Eigenvalue of -lap_h for every stored mode.
  std::span<const double> lambda() const;
  /// Parseval multiplicity of every stored mode (1 or 2, from Hermitian symmetry).
  std::span<const double> multiplicity() const;
  /// Integer wave numbers (kx, ky, kz) of stored mode m, kx in [0, J/2].
  std::array<int, 3> wave_numbers(std::size_t m) const;

  Spectrum forward(const ScalarField& f) const;
  ScalarField inverse(const Spectrum& coeffs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class OperatorKind {
  Elastic,  // K lambda + g kappa1        (acts on Q)
  Bending,  // 2 B0 lambda^2 + g kappa2   (acts on u)
};

/// Per-mode symbol of a stabilized linear operator.
struct ModeCoeffs {
  std::vector<double> symbol;
};

ModeCoeffs make_symbol(const SpectralPlan& plan, OperatorKind kind, const ModelParams& p, double g);

/// e^{-tau s} v + tau phi1(-tau s) N per mode.
Spectrum etd_update(const Spectrum& field_hat, const ModeCoeffs& symbol, const Spectrum& nonlin_hat,
                    double tau);
/// Solves (Q(tau s)/tau)(w - v) + s w = N per mode.
Spectrum quasi_implicit_update(const Spectrum& field_hat, const ModeCoeffs& symbol,
                               const Spectrum& nonlin_hat, double tau);

enum class NormKind {
  Plain,     // ||v||_h^2
  Q,         // <Q(tau S) v, v>
  Q1,        // <Q1(tau S) v, v>
  Operator,  // <S v, v>
};

double mode_weight(NormKind kind, double symbol, double tau);

/// Squared weighted norm by Parseval: L^d sum_k w(k) |v_k|^2 (Frobenius over
/// components for tensor fields).
double weighted_norm_squared(const SpectralPlan& plan, const ScalarField& v, const ModeCoeffs& symbol,
                             double tau, NormKind kind);
double weighted_norm_squared(const SpectralPlan& plan, const QField& v, const ModeCoeffs& symbol,
                             double tau, NormKind kind);
double weighted_norm_squared(const SpectralPlan& plan, const Spectrum& v_hat, const ModeCoeffs& symbol,
                             double tau, NormKind kind);
double weighted_norm_squared(const SpectralPlan& plan, std::span<const Spectrum> q_hat,
                             const ModeCoeffs& symbol, double tau, NormKind kind);

/// |<f,f>_h - L^d sum |f_k|^2| / max(<f,f>_h, tiny).
double parseval_check(const SpectralPlan& plan, const ScalarField& f);

}  // namespace smectic
