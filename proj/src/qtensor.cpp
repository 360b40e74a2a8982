#include "smectic/qtensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "smectic/error.hpp"

namespace smectic {

QField::QField(const GridSpec& grid) : grid_(grid) {
  components_.assign(count(grid.dim), ScalarField(grid));
}

QField& QField::operator+=(const QField& other) {
  require_same_grid(grid_, other.grid_, "QField +=");
  for (int c = 0; c < count(); ++c) components_[c] += other.components_[c];
  return *this;
}

QField& QField::operator-=(const QField& other) {
  require_same_grid(grid_, other.grid_, "QField -=");
  for (int c = 0; c < count(); ++c) components_[c] -= other.components_[c];
  return *this;
}

QField& QField::operator*=(double factor) {
  for (auto& comp : components_) comp *= factor;
  return *this;
}

QField& QField::add_scaled(double factor, const QField& other) {
  require_same_grid(grid_, other.grid_, "QField add_scaled");
  for (int c = 0; c < count(); ++c) components_[c].add_scaled(factor, other.components_[c]);
  return *this;
}

bool QField::all_finite() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const ScalarField& f) { return f.all_finite(); });
}

Mat3 unpack(const QField& q, std::size_t n) {
  Mat3 m;
  if (q.dim() == 2) {
    const double a = q.component(0)[n];
    const double b = q.component(1)[n];
    m.m[0][0] = a;
    m.m[1][1] = -a;
    m.m[0][1] = m.m[1][0] = b;
  } else {
    const double a = q.component(0)[n];
    const double d = q.component(1)[n];
    m.m[0][0] = a;
    m.m[1][1] = d;
    m.m[2][2] = -a - d;
    m.m[0][1] = m.m[1][0] = q.component(2)[n];
    m.m[0][2] = m.m[2][0] = q.component(3)[n];
    m.m[1][2] = m.m[2][1] = q.component(4)[n];
  }
  return m;
}

Mat3 unpack(const SymMatrixField& s, std::size_t n) {
  Mat3 m;
  const int d = s.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m.m[i][j] = s(i, j)[n];
  return m;
}

void pack(const Mat3& m, QField& q, std::size_t n) {
  if (q.dim() == 2) {
    q.component(0)[n] = m.m[0][0];
    q.component(1)[n] = m.m[0][1];
  } else {
    q.component(0)[n] = m.m[0][0];
    q.component(1)[n] = m.m[1][1];
    q.component(2)[n] = m.m[0][1];
    q.component(3)[n] = m.m[0][2];
    q.component(4)[n] = m.m[1][2];
  }
}

void pack(const Mat3& m, SymMatrixField& out, std::size_t n) {
  const int d = out.dim();
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) out(i, j)[n] = m.m[i][j];
}

namespace {

double trace(const Mat3& m, int d) {
  double t = 0.0;
  for (int i = 0; i < d; ++i) t += m.m[i][i];
  return t;
}

double frob2(const Mat3& m, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s += m.m[i][j] * m.m[i][j];
  return s;
}

}  // namespace

SymMatrixField to_full(const QField& q) {
  SymMatrixField out(q.grid());
  for (std::size_t n = 0; n < q.grid().size(); ++n) pack(unpack(q, n), out, n);
  return out;
}

QField from_full(const SymMatrixField& m) {
  const int d = m.dim();
  QField q(m.grid());
  for (std::size_t n = 0; n < m.grid().size(); ++n) {
    Mat3 a = unpack(m, n);
    const double tr = trace(a, d);
    if (std::abs(tr) > 1e-10 * std::sqrt(frob2(a, d))) {
      fail(ErrorKind::Constraint, "matrix field is not traceless at sample " + std::to_string(n) +
                                      " (trace " + std::to_string(tr) + ")");
    }
    for (int i = 0; i < d; ++i) a.m[i][i] -= tr / d;
    pack(a, q, n);
  }
  return q;
}

SymMatrixField dev(const SymMatrixField& m) {
  const int d = m.dim();
  SymMatrixField out = m;
  for (std::size_t n = 0; n < m.grid().size(); ++n) {
    double tr = 0.0;
    for (int i = 0; i < d; ++i) tr += m(i, i)[n];
    for (int i = 0; i < d; ++i) out(i, i)[n] -= tr / d;
  }
  return out;
}

ScalarField trQ2(const QField& q) {
  ScalarField out(q.grid());
  for (std::size_t n = 0; n < q.grid().size(); ++n) out[n] = frobenius_point(q, q, n);
  return out;
}

ScalarField trQ3(const QField& q) {
  if (q.dim() != 3) fail(ErrorKind::Argument, "tr(Q^3) is only used for d = 3");
  ScalarField out(q.grid());
  for (std::size_t n = 0; n < q.grid().size(); ++n) {
    const Mat3 a = unpack(q, n);
    double t = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) t += a.m[i][j] * a.m[j][k] * a.m[k][i];
    out[n] = t;
  }
  return out;
}

SymMatrixField q_squared(const QField& q) {
  const int d = q.dim();
  SymMatrixField out(q.grid());
  for (std::size_t n = 0; n < q.grid().size(); ++n) {
    const Mat3 a = unpack(q, n);
    Mat3 p;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) p.m[i][j] += a.m[i][k] * a.m[k][j];
    pack(p, out, n);
  }
  return out;
}

SymMatrixField m_tensor(const QField& q, double s_plus) {
  if (!(s_plus > 0.0)) fail(ErrorKind::Parameter, "s_plus must be positive");
  const int d = q.dim();
  SymMatrixField out(q.grid());
  for (std::size_t n = 0; n < q.grid().size(); ++n) {
    Mat3 a = unpack(q, n);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a.m[i][j] = a.m[i][j] / s_plus + (i == j ? 1.0 / d : 0.0);
    pack(a, out, n);
  }
  return out;
}

double frobenius_point(const QField& a, const QField& b, std::size_t n) {
  if (a.dim() == 2) {
    return 2.0 * (a.component(0)[n] * b.component(0)[n] + a.component(1)[n] * b.component(1)[n]);
  }
  const double a11 = a.component(0)[n], a22 = a.component(1)[n];
  const double b11 = b.component(0)[n], b22 = b.component(1)[n];
  return a11 * b11 + a22 * b22 + (a11 + a22) * (b11 + b22) +
         2.0 * (a.component(2)[n] * b.component(2)[n] + a.component(3)[n] * b.component(3)[n] +
                a.component(4)[n] * b.component(4)[n]);
}

double frobenius_inner(const QField& a, const QField& b) {
  require_same_grid(a.grid(), b.grid(), "frobenius_inner");
  double s = 0.0;
  for (std::size_t n = 0; n < a.grid().size(); ++n) s += frobenius_point(a, b, n);
  return a.grid().cell_volume() * s;
}

double frobenius_inner(const SymMatrixField& a, const SymMatrixField& b) {
  require_same_grid(a.grid(), b.grid(), "frobenius_inner");
  double s = 0.0;
  for (int c = 0; c < a.count(); ++c) {
    s += SymMatrixField::weight(a.dim(), c) * inner(a.component(c), b.component(c));
  }
  return s;
}

double sup_frobenius(const QField& q) {
  double best = 0.0;
  for (std::size_t n = 0; n < q.grid().size(); ++n) best = std::max(best, frob2(unpack(q, n), q.dim()));
  return std::sqrt(best);
}

double sup_frobenius(const SymMatrixField& m) {
  double best = 0.0;
  for (std::size_t n = 0; n < m.grid().size(); ++n) best = std::max(best, frob2(unpack(m, n), m.dim()));
  return std::sqrt(best);
}

ScalarField largest_eigenvalue(const QField& q) {
  ScalarField out(q.grid());
  for (std::size_t n = 0; n < q.grid().size(); ++n) {
    const Mat3 a = unpack(q, n);
    if (q.dim() == 2) {
      out[n] = std::hypot(a.m[0][0], a.m[0][1]);
      continue;
    }
    // Traceless symmetric 3x3: closed-form trigonometric roots.
    const double p2 = frob2(a, 3) / 6.0;
    if (p2 <= 0.0) {
      out[n] = 0.0;
      continue;
    }
    const double p = std::sqrt(p2);
    Mat3 b;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) b.m[i][j] = a.m[i][j] / p;
    const double det = b.m[0][0] * (b.m[1][1] * b.m[2][2] - b.m[1][2] * b.m[2][1]) -
                       b.m[0][1] * (b.m[1][0] * b.m[2][2] - b.m[1][2] * b.m[2][0]) +
                       b.m[0][2] * (b.m[1][0] * b.m[2][1] - b.m[1][1] * b.m[2][0]);
    const double r = std::clamp(det / 2.0, -1.0, 1.0);
    out[n] = 2.0 * p * std::cos(std::acos(r) / 3.0);
  }
  return out;
}

}  // namespace smectic
