#pragma once

// Symmetric traceless tensor fields in compact storage.
//
//   d = 2: (q11, q12)                   with q22 = -q11
//   d = 3: (q11, q22, q12, q13, q23)    with q33 = -q11 - q22

#include <vector>

#include "smectic/grid.hpp"

namespace smectic {

class QField {
 public:
  QField() = default;
  explicit QField(const GridSpec& grid);

  static int count(int dim) { return dim == 2 ? 2 : 5; }

  const GridSpec& grid() const { return grid_; }
  int dim() const { return grid_.dim; }
  int count() const { return static_cast<int>(components_.size()); }

  ScalarField& component(int c) { return components_[c]; }
  const ScalarField& component(int c) const { return components_[c]; }

  QField& operator+=(const QField& other);
  QField& operator-=(const QField& other);
  QField& operator*=(double factor);
  QField& add_scaled(double factor, const QField& other);

  friend QField operator+(QField a, const QField& b) { return a += b; }
  friend QField operator-(QField a, const QField& b) { return a -= b; }
  friend QField operator*(double s, QField a) { return a *= s; }

  bool all_finite() const;

 private:
  GridSpec grid_{};
  std::vector<ScalarField> components_;
};

/// Pointwise symmetric matrix, row-major 3x3 scratch (2D uses the upper-left block).
struct Mat3 {
  double m[3][3] = {};
};

/// Unpacks compact Q at sample n into a full matrix.
Mat3 unpack(const QField& q, std::size_t n);
Mat3 unpack(const SymMatrixField& m, std::size_t n);
/// Writes the traceless part's independent components; caller guarantees symmetry.
void pack(const Mat3& m, QField& q, std::size_t n);
void pack(const Mat3& m, SymMatrixField& out, std::size_t n);

SymMatrixField to_full(const QField& q);
/// Requires |tr M| <= 1e-10 * |M|_F pointwise; removes the residual trace.
QField from_full(const SymMatrixField& m);

/// M - tr(M)/d I.
SymMatrixField dev(const SymMatrixField& m);

ScalarField trQ2(const QField& q);
/// 3D only.
ScalarField trQ3(const QField& q);
SymMatrixField q_squared(const QField& q);

/// Q / s_plus + I / d.
SymMatrixField m_tensor(const QField& q, double s_plus);

/// Global Frobenius pairing h^d sum_points sum_ij A^ij B^ij.
double frobenius_inner(const QField& a, const QField& b);
double frobenius_inner(const SymMatrixField& a, const SymMatrixField& b);
/// Pointwise Frobenius pairing with compact-storage multiplicities.
double frobenius_point(const QField& a, const QField& b, std::size_t n);

/// max over points of |Q|_F, evaluated from the reconstructed matrix.
double sup_frobenius(const QField& q);
double sup_frobenius(const SymMatrixField& m);

/// Largest eigenvalue of Q at every point.
ScalarField largest_eigenvalue(const QField& q);

}  // namespace smectic
