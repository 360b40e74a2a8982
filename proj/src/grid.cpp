#include "smectic/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smectic/error.hpp"

namespace smectic {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Argument: return "argument error";
    case ErrorKind::Constraint: return "constraint error";
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::Numerical: return "numerical error";
    case ErrorKind::Blowup: return "numerical blow-up";
    case ErrorKind::Invariant: return "invariant violation";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Io: return "io error";
    case ErrorKind::Internal: return "internal error";
  }
  return "error";
}

GridSpec GridSpec::make(int dim, int points, double length) {
  if (dim != 2 && dim != 3) {
    fail(ErrorKind::Argument, "grid dimension must be 2 or 3, got " + std::to_string(dim));
  }
  if (points < 4) {
    fail(ErrorKind::Argument, "grid needs at least 4 points per axis, got " + std::to_string(points));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    fail(ErrorKind::Argument, "grid length must be positive and finite");
  }
  return GridSpec{dim, points, length};
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(points);
  return n;
}

double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }

double GridSpec::volume() const { return std::pow(length, dim); }

std::size_t GridSpec::stride(int axis) const {
  std::size_t s = 1;
  for (int a = 0; a < axis; ++a) s *= static_cast<std::size_t>(points);
  return s;
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) fail(ErrorKind::Argument, std::string(what) + ": fields live on different grids");
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(const GridSpec& grid, double value)
    : grid_(grid), values_(grid.size(), value) {}

ScalarField::ScalarField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    fail(ErrorKind::Argument, "field storage has " + std::to_string(values_.size()) +
                                  " samples, grid needs " + std::to_string(grid_.size()));
  }
}

namespace {

std::size_t wrap(int i, int J) {
  const int r = i % J;
  return static_cast<std::size_t>(r < 0 ? r + J : r);
}

std::size_t wrapped_index(const GridSpec& g, int i, int j, int k) {
  const std::size_t J = g.points;
  const std::size_t kk = g.dim == 3 ? wrap(k, g.points) : 0;
  return wrap(i, g.points) + J * (wrap(j, g.points) + J * kk);
}

}  // namespace

double& ScalarField::at(int i, int j, int k) { return values_[wrapped_index(grid_, i, j, k)]; }

double ScalarField::at(int i, int j, int k) const { return values_[wrapped_index(grid_, i, j, k)]; }

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_, "operator+=");
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += other.values_[n];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_, "operator-=");
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= other.values_[n];
  return *this;
}

ScalarField& ScalarField::operator*=(double factor) {
  for (double& v : values_) v *= factor;
  return *this;
}

ScalarField& ScalarField::add_scaled(double factor, const ScalarField& other) {
  require_same_grid(grid_, other.grid_, "add_scaled");
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += factor * other.values_[n];
  return *this;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }

ScalarField sample(const GridSpec& grid,
                   const std::function<double(double, double, double)>& f) {
  ScalarField out(grid);
  const int J = grid.points;
  const double h = grid.spacing();
  const int nz = grid.dim == 3 ? J : 1;
  std::size_t n = 0;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < J; ++j)
      for (int i = 0; i < J; ++i) out[n++] = f(i * h, j * h, grid.dim == 3 ? k * h : 0.0);
  return out;
}

// ---------------------------------------------------------------------------
// Stencils

namespace {

void check_axis(const GridSpec& grid, int axis) {
  if (axis < 0 || axis >= grid.dim) {
    fail(ErrorKind::Argument, "axis " + std::to_string(axis) + " out of range for a " +
                                  std::to_string(grid.dim) + "-dimensional grid");
  }
}

// out(n) = a*f(n + 1 e_axis) + b*f(n) + c*f(n - 1 e_axis)
ScalarField three_point(const ScalarField& f, int axis, double a, double b, double c) {
  const GridSpec& grid = f.grid();
  ScalarField out(grid);
  const std::size_t J = grid.points;
  const std::size_t s = grid.stride(axis);
  const std::size_t block = s * J;
  const std::size_t total = grid.size();
  const double* in = f.values().data();
  double* res = out.values().data();
  for (std::size_t base = 0; base < total; base += block) {
    for (std::size_t p = 0; p < J; ++p) {
      const std::size_t up = base + ((p + 1) % J) * s;
      const std::size_t mid = base + p * s;
      const std::size_t down = base + ((p + J - 1) % J) * s;
      for (std::size_t i = 0; i < s; ++i) {
        res[mid + i] = a * in[up + i] + b * in[mid + i] + c * in[down + i];
      }
    }
  }
  return out;
}

}  // namespace

ScalarField shift(const ScalarField& f, int axis, int offset) {
  check_axis(f.grid(), axis);
  const GridSpec& grid = f.grid();
  ScalarField out(grid);
  const std::size_t J = grid.points;
  const std::size_t s = grid.stride(axis);
  const std::size_t block = s * J;
  const long m = static_cast<long>(J);
  const std::size_t off = static_cast<std::size_t>(((offset % m) + m) % m);
  for (std::size_t base = 0; base < grid.size(); base += block)
    for (std::size_t p = 0; p < J; ++p)
      for (std::size_t i = 0; i < s; ++i) out[base + p * s + i] = f[base + ((p + off) % J) * s + i];
  return out;
}

ScalarField apply_diff(const ScalarField& f, int axis, DiffKind kind) {
  check_axis(f.grid(), axis);
  const double h = f.grid().spacing();
  switch (kind) {
    case DiffKind::Forward: return three_point(f, axis, 1.0 / h, -1.0 / h, 0.0);
    case DiffKind::Backward: return three_point(f, axis, 0.0, 1.0 / h, -1.0 / h);
    case DiffKind::Central: return three_point(f, axis, 0.5 / h, 0.0, -0.5 / h);
  }
  fail(ErrorKind::Argument, "unknown difference kind");
}

VectorField gradient(const ScalarField& f) {
  VectorField v;
  for (int a = 0; a < f.grid().dim; ++a) v.components.push_back(apply_diff(f, a, DiffKind::Forward));
  return v;
}

ScalarField divergence(const VectorField& v) {
  if (v.components.empty()) fail(ErrorKind::Argument, "divergence of an empty vector field");
  const GridSpec& grid = v.grid();
  if (static_cast<int>(v.components.size()) != grid.dim) {
    fail(ErrorKind::Argument, "vector field component count does not match grid dimension");
  }
  ScalarField out(grid);
  for (int a = 0; a < grid.dim; ++a) {
    require_same_grid(grid, v.components[a].grid(), "divergence");
    out += apply_diff(v.components[a], a, DiffKind::Backward);
  }
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  const double h2 = f.grid().spacing() * f.grid().spacing();
  ScalarField out(f.grid());
  for (int a = 0; a < f.grid().dim; ++a) out += three_point(f, a, 1.0 / h2, -2.0 / h2, 1.0 / h2);
  return out;
}

ScalarField biharmonic(const ScalarField& f) { return laplacian(laplacian(f)); }

int SymMatrixField::index(int dim, int row, int col) {
  if (row == col) return row;
  const int lo = std::min(row, col);
  const int hi = std::max(row, col);
  if (dim == 2) return 2;
  // (0,1) -> 3, (0,2) -> 4, (1,2) -> 5
  return lo == 0 ? 2 + hi : 5;
}

SymMatrixField::SymMatrixField(const GridSpec& grid) : grid_(grid) {
  components_.assign(count(grid.dim), ScalarField(grid));
}

SymMatrixField hessian(const ScalarField& f) {
  const GridSpec& grid = f.grid();
  const double h2 = grid.spacing() * grid.spacing();
  SymMatrixField out(grid);
  for (int a = 0; a < grid.dim; ++a) out(a, a) = three_point(f, a, 1.0 / h2, -2.0 / h2, 1.0 / h2);
  for (int a = 0; a < grid.dim; ++a) {
    const ScalarField da = apply_diff(f, a, DiffKind::Central);
    for (int b = a + 1; b < grid.dim; ++b) out(a, b) = apply_diff(da, b, DiffKind::Central);
  }
  return out;
}

ScalarField hessian_adjoint(const SymMatrixField& t) {
  const GridSpec& grid = t.grid();
  const double h2 = grid.spacing() * grid.spacing();
  ScalarField out(grid);
  for (int a = 0; a < grid.dim; ++a) out += three_point(t(a, a), a, 1.0 / h2, -2.0 / h2, 1.0 / h2);
  for (int a = 0; a < grid.dim; ++a) {
    for (int b = a + 1; b < grid.dim; ++b) {
      out.add_scaled(2.0, apply_diff(apply_diff(t(a, b), b, DiffKind::Central), a, DiffKind::Central));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Inner products and norms

double inner(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid(), "inner");
  double sum = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) sum += f[n] * g[n];
  return f.grid().cell_volume() * sum;
}

double inner(const VectorField& v, const VectorField& w) {
  if (v.components.size() != w.components.size()) {
    fail(ErrorKind::Argument, "vector fields have different component counts");
  }
  double sum = 0.0;
  for (std::size_t a = 0; a < v.components.size(); ++a) sum += inner(v.components[a], w.components[a]);
  return sum;
}

double norm_l2(const ScalarField& f) { return std::sqrt(inner(f, f)); }

double norm_h1(const ScalarField& f) {
  const VectorField g = gradient(f);
  return std::sqrt(inner(f, f) + inner(g, g));
}

double norm_h2(const ScalarField& f) {
  const double h1 = norm_h1(f);
  const ScalarField lap = laplacian(f);
  return std::sqrt(h1 * h1 + inner(lap, lap));
}

double norm_inf(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace smectic
