#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Core>

#include "qrmt/errors.hpp"

namespace qrmt {

/// q = a*I2 + b*i1 + c*i2 + d*i3 with real coefficients.
///
/// The 2x2 complex image uses the basis
///   i1 = [[i, 0], [0, -i]],  i2 = [[0, 1], [-1, 0]],  i3 = [[0, i], [i, 0]]
/// so that q maps to [[a+bi, c+di], [-c+di, a-bi]] = [[alpha, beta], [-conj(beta), conj(alpha)]].
template <typename Scalar>
struct Quaternion {
  Scalar a{0}, b{0}, c{0}, d{0};

  constexpr Quaternion() = default;
  constexpr Quaternion(Scalar a_, Scalar b_, Scalar c_, Scalar d_) : a(a_), b(b_), c(c_), d(d_) {}

  static constexpr Quaternion scalar(Scalar t) { return {t, 0, 0, 0}; }
  static constexpr Quaternion one() { return {1, 0, 0, 0}; }
  static constexpr Quaternion i1() { return {0, 1, 0, 0}; }
  static constexpr Quaternion i2() { return {0, 0, 1, 0}; }
  static constexpr Quaternion i3() { return {0, 0, 0, 1}; }

  std::complex<Scalar> alpha() const { return {a, b}; }
  std::complex<Scalar> beta() const { return {c, d}; }

  bool is_scalar() const { return b == 0 && c == 0 && d == 0; }

  friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;

  friend constexpr Quaternion operator+(const Quaternion& p, const Quaternion& q) {
    return {p.a + q.a, p.b + q.b, p.c + q.c, p.d + q.d};
  }
  friend constexpr Quaternion operator-(const Quaternion& p, const Quaternion& q) {
    return {p.a - q.a, p.b - q.b, p.c - q.c, p.d - q.d};
  }
  friend constexpr Quaternion operator-(const Quaternion& q) { return {-q.a, -q.b, -q.c, -q.d}; }
  friend constexpr Quaternion operator*(Scalar s, const Quaternion& q) {
    return {s * q.a, s * q.b, s * q.c, s * q.d};
  }
  friend constexpr Quaternion operator*(const Quaternion& p, const Quaternion& q) { return qmul(p, q); }
};

using Quaterniond = Quaternion<double>;

template <typename Scalar>
using ComplexBlock2 = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

/// Hamilton product under i1^2 = i2^2 = i3^2 = -1 and i3 = i1 i2.
template <typename Scalar>
constexpr Quaternion<Scalar> qmul(const Quaternion<Scalar>& p, const Quaternion<Scalar>& q) {
  return {p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
          p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
          p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
          p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a};
}

template <typename Scalar>
constexpr Quaternion<Scalar> qconj(const Quaternion<Scalar>& q) {
  return {q.a, -q.b, -q.c, -q.d};
}

template <typename Scalar>
Scalar qnorm_squared(const Quaternion<Scalar>& q) {
  return q.a * q.a + q.b * q.b + q.c * q.c + q.d * q.d;
}

template <typename Scalar>
Scalar qnorm(const Quaternion<Scalar>& q) {
  using std::sqrt;
  return sqrt(qnorm_squared(q));
}

template <typename Scalar>
ComplexBlock2<Scalar> quat_to_block(const Quaternion<Scalar>& q) {
  using C = std::complex<Scalar>;
  ComplexBlock2<Scalar> m;
  m << C(q.a, q.b), C(q.c, q.d),
       C(-q.c, q.d), C(q.a, -q.b);
  return m;
}

/// Largest entrywise violation of m(1,0) = -conj(m(0,1)) and m(1,1) = conj(m(0,0)).
template <typename Scalar>
Scalar quaternion_image_residual(const ComplexBlock2<Scalar>& m) {
  using std::abs;
  using std::max;
  return max(abs(m(1, 0) + std::conj(m(0, 1))), abs(m(1, 1) - std::conj(m(0, 0))));
}

inline constexpr double kStructureTolerance = 1e-10;

/// Inverse of quat_to_block. Reads a,b,c,d from the first row; the second row is only checked.
template <typename Scalar>
Quaternion<Scalar> block_to_quat(const ComplexBlock2<Scalar>& m,
                                 Scalar tol = Scalar(kStructureTolerance)) {
  const Scalar residual = quaternion_image_residual(m);
  if (!(residual <= tol)) {
    throw StructureViolation("2x2 block is not a quaternion image (residual " +
                             std::to_string(static_cast<double>(residual)) + ")");
  }
  return {m(0, 0).real(), m(0, 0).imag(), m(0, 1).real(), m(0, 1).imag()};
}

}  // namespace qrmt
