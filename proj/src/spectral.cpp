#include "smectic/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "smectic/error.hpp"

namespace smectic {

double phi1(double z) {
  if (z == 0.0) return 1.0;
  return std::expm1(z) / z;
}

double qfun(double z) {
  if (z == 0.0) return 1.0;
  if (z < 1.0) return z / std::expm1(z);
  // z e^{-z} / (1 - e^{-z}) keeps e^z from overflowing.
  return z * std::exp(-z) / -std::expm1(-z);
}

double q1fun(double z) { return qfun(z) + 0.5 * z; }

// ---------------------------------------------------------------------------

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct SpectralPlan::Impl {
  GridSpec grid;
  std::size_t real_size = 0;
  std::size_t modes = 0;
  int half = 0;  // J/2 + 1
  std::vector<double> lambda;
  std::vector<double> multiplicity;
  double* real_buf = nullptr;
  fftw_complex* spec_buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (real_buf) fftw_free(real_buf);
    if (spec_buf) fftw_free(spec_buf);
  }
};

SpectralPlan::SpectralPlan(const GridSpec& grid) : impl_(std::make_unique<Impl>()) {
  Impl& im = *impl_;
  im.grid = grid;
  const int J = grid.points;
  im.half = J / 2 + 1;
  im.real_size = grid.size();
  im.modes = im.real_size / J * im.half;

  {
    std::lock_guard lock(planner_mutex());
    im.real_buf = fftw_alloc_real(im.real_size);
    im.spec_buf = fftw_alloc_complex(im.modes);
    std::vector<int> dims(grid.dim, J);
    im.fwd = fftw_plan_dft_r2c(grid.dim, dims.data(), im.real_buf, im.spec_buf, FFTW_ESTIMATE);
    im.bwd = fftw_plan_dft_c2r(grid.dim, dims.data(), im.spec_buf, im.real_buf, FFTW_ESTIMATE);
  }
  if (!im.fwd || !im.bwd) fail(ErrorKind::Internal, "FFT planning failed");

  const double h = grid.spacing();
  const double scale = 4.0 / (h * h);
  im.lambda.resize(im.modes);
  im.multiplicity.resize(im.modes);
  for (std::size_t m = 0; m < im.modes; ++m) {
    const auto k = wave_numbers(m);
    double s = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      const double v = std::sin(std::numbers::pi * k[a] / J);
      s += v * v;
    }
    im.lambda[m] = scale * s;
    const bool self_conjugate = k[0] == 0 || 2 * k[0] == J;
    im.multiplicity[m] = self_conjugate ? 1.0 : 2.0;
  }
}

SpectralPlan::~SpectralPlan() = default;
SpectralPlan::SpectralPlan(SpectralPlan&&) noexcept = default;
SpectralPlan& SpectralPlan::operator=(SpectralPlan&&) noexcept = default;

const GridSpec& SpectralPlan::grid() const { return impl_->grid; }
std::size_t SpectralPlan::mode_count() const { return impl_->modes; }
std::span<const double> SpectralPlan::lambda() const { return impl_->lambda; }
std::span<const double> SpectralPlan::multiplicity() const { return impl_->multiplicity; }

std::array<int, 3> SpectralPlan::wave_numbers(std::size_t m) const {
  const std::size_t half = impl_->half;
  const std::size_t J = impl_->grid.points;
  std::array<int, 3> k{0, 0, 0};
  k[0] = static_cast<int>(m % half);
  std::size_t rest = m / half;
  k[1] = static_cast<int>(rest % J);
  if (impl_->grid.dim == 3) k[2] = static_cast<int>(rest / J);
  return k;
}

Spectrum SpectralPlan::forward(const ScalarField& f) const {
  require_same_grid(impl_->grid, f.grid(), "SpectralPlan::forward");
  Impl& im = *impl_;
  std::copy(f.values().begin(), f.values().end(), im.real_buf);
  fftw_execute(im.fwd);
  const double norm = 1.0 / static_cast<double>(im.real_size);
  Spectrum out(im.modes);
  for (std::size_t m = 0; m < im.modes; ++m) {
    out[m] = {im.spec_buf[m][0] * norm, im.spec_buf[m][1] * norm};
  }
  return out;
}

ScalarField SpectralPlan::inverse(const Spectrum& coeffs) const {
  Impl& im = *impl_;
  if (coeffs.size() != im.modes) fail(ErrorKind::Argument, "spectrum size does not match plan");
  for (std::size_t m = 0; m < im.modes; ++m) {
    im.spec_buf[m][0] = coeffs[m].real();
    im.spec_buf[m][1] = coeffs[m].imag();
  }
  fftw_execute(im.bwd);
  return ScalarField(im.grid, std::vector<double>(im.real_buf, im.real_buf + im.real_size));
}

// ---------------------------------------------------------------------------

ModeCoeffs make_symbol(const SpectralPlan& plan, OperatorKind kind, const ModelParams& p, double g) {
  const auto lambda = plan.lambda();
  ModeCoeffs out;
  out.symbol.resize(lambda.size());
  for (std::size_t m = 0; m < lambda.size(); ++m) {
    const double l = lambda[m];
    out.symbol[m] = kind == OperatorKind::Elastic ? p.K * l + g * p.kappa1
                                                  : 2.0 * p.B0 * l * l + g * p.kappa2;
  }
  return out;
}

namespace {

void check_layout(const Spectrum& a, const ModeCoeffs& s, const Spectrum& b) {
  if (a.size() != s.symbol.size() || b.size() != s.symbol.size()) {
    fail(ErrorKind::Argument, "mode layouts do not match");
  }
}

}  // namespace

Spectrum etd_update(const Spectrum& field_hat, const ModeCoeffs& symbol, const Spectrum& nonlin_hat,
                    double tau) {
  check_layout(field_hat, symbol, nonlin_hat);
  Spectrum out(field_hat.size());
  for (std::size_t m = 0; m < out.size(); ++m) {
    const double z = tau * symbol.symbol[m];
    out[m] = std::exp(-z) * field_hat[m] + tau * phi1(-z) * nonlin_hat[m];
  }
  return out;
}

Spectrum quasi_implicit_update(const Spectrum& field_hat, const ModeCoeffs& symbol,
                               const Spectrum& nonlin_hat, double tau) {
  check_layout(field_hat, symbol, nonlin_hat);
  Spectrum out(field_hat.size());
  for (std::size_t m = 0; m < out.size(); ++m) {
    const double s = symbol.symbol[m];
    const double w = qfun(tau * s) / tau;
    out[m] = (w * field_hat[m] + nonlin_hat[m]) / (w + s);
  }
  return out;
}

double mode_weight(NormKind kind, double symbol, double tau) {
  switch (kind) {
    case NormKind::Plain: return 1.0;
    case NormKind::Q: return qfun(tau * symbol);
    case NormKind::Q1: return q1fun(tau * symbol);
    case NormKind::Operator: return symbol;
  }
  return 1.0;
}

double weighted_norm_squared(const SpectralPlan& plan, const Spectrum& v_hat, const ModeCoeffs& symbol,
                             double tau, NormKind kind) {
  if (v_hat.size() != plan.mode_count() || symbol.symbol.size() != plan.mode_count()) {
    fail(ErrorKind::Argument, "mode layouts do not match");
  }
  const auto mult = plan.multiplicity();
  double sum = 0.0;
  for (std::size_t m = 0; m < v_hat.size(); ++m) {
    sum += mult[m] * mode_weight(kind, symbol.symbol[m], tau) * std::norm(v_hat[m]);
  }
  return plan.grid().volume() * sum;
}

double weighted_norm_squared(const SpectralPlan& plan, std::span<const Spectrum> q_hat,
                             const ModeCoeffs& symbol, double tau, NormKind kind) {
  const int dim = plan.grid().dim;
  if (static_cast<int>(q_hat.size()) != QField::count(dim)) {
    fail(ErrorKind::Argument, "tensor spectrum has the wrong component count");
  }
  double total = 0.0;
  if (dim == 2) {
    for (const auto& comp : q_hat) total += 2.0 * weighted_norm_squared(plan, comp, symbol, tau, kind);
    return total;
  }
  // |Q|_F^2 = q11^2 + q22^2 + (q11 + q22)^2 + 2 (q12^2 + q13^2 + q23^2)
  Spectrum trace_part(q_hat[0].size());
  for (std::size_t m = 0; m < trace_part.size(); ++m) trace_part[m] = q_hat[0][m] + q_hat[1][m];
  total += weighted_norm_squared(plan, q_hat[0], symbol, tau, kind);
  total += weighted_norm_squared(plan, q_hat[1], symbol, tau, kind);
  total += weighted_norm_squared(plan, trace_part, symbol, tau, kind);
  for (int c = 2; c < 5; ++c) total += 2.0 * weighted_norm_squared(plan, q_hat[c], symbol, tau, kind);
  return total;
}

double weighted_norm_squared(const SpectralPlan& plan, const ScalarField& v, const ModeCoeffs& symbol,
                             double tau, NormKind kind) {
  return weighted_norm_squared(plan, plan.forward(v), symbol, tau, kind);
}

double weighted_norm_squared(const SpectralPlan& plan, const QField& v, const ModeCoeffs& symbol,
                             double tau, NormKind kind) {
  std::vector<Spectrum> hats;
  for (int c = 0; c < v.count(); ++c) hats.push_back(plan.forward(v.component(c)));
  return weighted_norm_squared(plan, std::span<const Spectrum>(hats), symbol, tau, kind);
}

double parseval_check(const SpectralPlan& plan, const ScalarField& f) {
  const double direct = inner(f, f);
  const Spectrum hat = plan.forward(f);
  const auto mult = plan.multiplicity();
  double sum = 0.0;
  for (std::size_t m = 0; m < hat.size(); ++m) sum += mult[m] * std::norm(hat[m]);
  const double spectral = plan.grid().volume() * sum;
  return std::abs(direct - spectral) / std::max(direct, 1e-300);
}

}  // namespace smectic
