#pragma once

/**
 * \file tensor.hpp
 * \brief Dense 3x3 tensor algebra for finite-strain kinematics and stresses.
 *
 * Components are stored row-major in a fixed orthonormal basis. The module
 * does not know which basis that is; tube code uses the local cylindrical
 * triad {e_r, e_theta, e_z}.
 */

#include <prestress/errors.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace prestress {

using Vec3 = std::array<double, 3>;

/// Module tolerances.
struct TensorTolerances {
  static constexpr double singular_det = 1e-14;
  static constexpr double symmetry = 1e-12;
};

struct Tensor2 {
  std::array<double, 9> c{};

  constexpr double& operator()(int i, int j) noexcept { return c[3 * i + j]; }
  constexpr double operator()(int i, int j) const noexcept { return c[3 * i + j]; }

  static constexpr Tensor2 zero() noexcept { return {}; }
  static constexpr Tensor2 identity() noexcept { return diag(1.0, 1.0, 1.0); }
  static constexpr Tensor2 diag(double a, double b, double d) noexcept {
    Tensor2 t;
    t(0, 0) = a;
    t(1, 1) = b;
    t(2, 2) = d;
    return t;
  }
  static constexpr Tensor2 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) noexcept {
    Tensor2 t;
    for (int j = 0; j < 3; ++j) {
      t(0, j) = r0[j];
      t(1, j) = r1[j];
      t(2, j) = r2[j];
    }
    return t;
  }

  constexpr Tensor2& operator+=(const Tensor2& o) noexcept {
    for (int k = 0; k < 9; ++k) c[k] += o.c[k];
    return *this;
  }
  constexpr Tensor2& operator-=(const Tensor2& o) noexcept {
    for (int k = 0; k < 9; ++k) c[k] -= o.c[k];
    return *this;
  }
  constexpr Tensor2& operator*=(double s) noexcept {
    for (auto& v : c) v *= s;
    return *this;
  }

  friend constexpr bool operator==(const Tensor2&, const Tensor2&) = default;
};

constexpr Tensor2 operator+(Tensor2 a, const Tensor2& b) noexcept { return a += b; }
constexpr Tensor2 operator-(Tensor2 a, const Tensor2& b) noexcept { return a -= b; }
constexpr Tensor2 operator-(Tensor2 a) noexcept { return a *= -1.0; }
constexpr Tensor2 operator*(double s, Tensor2 a) noexcept { return a *= s; }
constexpr Tensor2 operator*(Tensor2 a, double s) noexcept { return a *= s; }

/// Matrix product.
constexpr Tensor2 operator*(const Tensor2& a, const Tensor2& b) noexcept {
  Tensor2 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

constexpr Vec3 operator*(const Tensor2& a, const Vec3& v) noexcept {
  Vec3 r{};
  for (int i = 0; i < 3; ++i) r[i] = a(i, 0) * v[0] + a(i, 1) * v[1] + a(i, 2) * v[2];
  return r;
}

constexpr double dot(const Vec3& a, const Vec3& b) noexcept {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm(const Vec3& a) noexcept { return std::sqrt(dot(a, a)); }

constexpr Tensor2 transpose(const Tensor2& a) noexcept {
  Tensor2 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a(j, i);
  return r;
}

constexpr double trace(const Tensor2& a) noexcept { return a(0, 0) + a(1, 1) + a(2, 2); }

/// Double contraction A:B = A_ij B_ij.
constexpr double ddot(const Tensor2& a, const Tensor2& b) noexcept {
  double s = 0.0;
  for (int k = 0; k < 9; ++k) s += a.c[k] * b.c[k];
  return s;
}

/// Dyadic product a (x) b.
constexpr Tensor2 dyad(const Vec3& a, const Vec3& b) noexcept {
  Tensor2 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a[i] * b[j];
  return r;
}

constexpr Tensor2 symmetric_part(const Tensor2& a) noexcept { return 0.5 * (a + transpose(a)); }

inline double max_abs(const Tensor2& a) noexcept {
  double m = 0.0;
  for (double v : a.c) m = std::max(m, std::abs(v));
  return m;
}

inline double frobenius_norm(const Tensor2& a) noexcept { return std::sqrt(ddot(a, a)); }

inline bool is_finite(const Tensor2& a) noexcept {
  return std::all_of(a.c.begin(), a.c.end(), [](double v) { return std::isfinite(v); });
}

inline bool is_symmetric(const Tensor2& a, double rel_tol = TensorTolerances::symmetry) noexcept {
  const double scale = max_abs(a);
  return max_abs(a - transpose(a)) <= rel_tol * scale;
}

constexpr double det(const Tensor2& a) noexcept {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

/// Throws SingularTensor when |det A| <= 1e-14.
inline Tensor2 inverse(const Tensor2& a) {
  const double d = det(a);
  if (!(std::abs(d) > TensorTolerances::singular_det))
    throw SingularTensor("inverse: |det| = " + format_sci(std::abs(d)) + " is below 1e-14");
  Tensor2 r;
  r(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  r(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  r(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  r(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  r(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  r(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  r(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  r(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  r(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return r * (1.0 / d);
}

/// (det A)^{-1/3} A. Throws NonPositiveDeterminant for det A <= 0.
inline Tensor2 unimodular(const Tensor2& a) {
  const double d = det(a);
  if (!(d > 0.0)) throw NonPositiveDeterminant("unimodular: det = " + format_sci(d));
  return std::cbrt(1.0 / d) * a;
}

/// A - tr(A)/3 * 1.
constexpr Tensor2 deviator(const Tensor2& a) noexcept {
  Tensor2 r = a;
  const double p = trace(a) / 3.0;
  r(0, 0) -= p;
  r(1, 1) -= p;
  r(2, 2) -= p;
  return r;
}

}  // namespace prestress
