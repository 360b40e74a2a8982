#pragma once

// Periodic uniform collocated grid and its finite-difference calculus.
//
// Samples are stored row-major with the x index fastest: the point (i, j, k)
// lives at i + J*j + J*J*k. Periodicity is handled by index arithmetic; there
// is no ghost storage. Axes are 0-based (0 = x, 1 = y, 2 = z).

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace smectic {

struct GridSpec {
  int dim = 2;
  int points = 0;      // J, samples per axis
  double length = 0;   // L, periodic edge length

  /// Validates d in {2,3}, J >= 4, L > 0.
  static GridSpec make(int dim, int points, double length);

  double spacing() const { return length / points; }
  std::size_t size() const;
  /// h^d, the quadrature weight of one sample.
  double cell_volume() const;
  /// L^d.
  double volume() const;
  std::size_t stride(int axis) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& grid, double value = 0.0);
  ScalarField(const GridSpec& grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t n) { return values_[n]; }
  double operator[](std::size_t n) const { return values_[n]; }
  double& at(int i, int j, int k = 0);
  double at(int i, int j, int k = 0) const;

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& storage() { return values_; }

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double factor);
  /// this += factor * other
  ScalarField& add_scaled(double factor, const ScalarField& other);

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

  bool all_finite() const;
  double max() const;
  double min() const;

 private:
  GridSpec grid_{};
  std::vector<double> values_;
};

/// Samples f(x, y, z) at the grid nodes x_p = p*h (z = 0 in 2D).
ScalarField sample(const GridSpec& grid,
                   const std::function<double(double, double, double)>& f);

/// Cyclic shift: result(n) = f(n + offset * e_axis).
ScalarField shift(const ScalarField& f, int axis, int offset);

struct VectorField {
  std::vector<ScalarField> components;
  const GridSpec& grid() const { return components.front().grid(); }
};

/// Symmetric d x d matrix per grid point (not necessarily traceless).
/// Component order: the d diagonal entries, then (0,1), (0,2), (1,2).
class SymMatrixField {
 public:
  SymMatrixField() = default;
  explicit SymMatrixField(const GridSpec& grid);

  static int count(int dim) { return dim * (dim + 1) / 2; }
  static int index(int dim, int row, int col);
  /// Frobenius multiplicity of stored component c (1 diagonal, 2 off-diagonal).
  static double weight(int dim, int c) { return c < dim ? 1.0 : 2.0; }

  const GridSpec& grid() const { return grid_; }
  int dim() const { return grid_.dim; }
  int count() const { return static_cast<int>(components_.size()); }

  ScalarField& component(int c) { return components_[c]; }
  const ScalarField& component(int c) const { return components_[c]; }
  ScalarField& operator()(int row, int col) { return components_[index(dim(), row, col)]; }
  const ScalarField& operator()(int row, int col) const {
    return components_[index(dim(), row, col)];
  }

 private:
  GridSpec grid_{};
  std::vector<ScalarField> components_;
};

enum class DiffKind { Forward, Backward, Central };

ScalarField apply_diff(const ScalarField& f, int axis, DiffKind kind);
/// Forward differences per axis.
VectorField gradient(const ScalarField& f);
/// Backward differences per axis; the negative adjoint of gradient().
ScalarField divergence(const VectorField& v);
/// Sum over axes of D+ D-.
ScalarField laplacian(const ScalarField& f);
ScalarField biharmonic(const ScalarField& f);
/// Diagonal D_k^+ D_k^-, off-diagonal D_k^c D_l^c.
SymMatrixField hessian(const ScalarField& f);
/// sum_{k,l} (D^2)_{kl} T^{kl}; off-diagonal pairs counted twice. This is the
/// exact adjoint of hessian() under the Frobenius pairing.
ScalarField hessian_adjoint(const SymMatrixField& t);

double inner(const ScalarField& f, const ScalarField& g);
double inner(const VectorField& v, const VectorField& w);
double norm_l2(const ScalarField& f);
double norm_h1(const ScalarField& f);
double norm_h2(const ScalarField& f);
double norm_inf(const ScalarField& f);

}  // namespace smectic
