#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <utility>

// Fixed-size vector helpers. Everything here is 2- or 3-dimensional, so a
// general linear algebra dependency is not worth pulling in.
namespace ratetip {

template <std::size_t N>
using Vec = std::array<double, N>;

using Vec2 = Vec<2>;
using Vec3 = Vec<3>;

template <std::size_t N>
using Mat = std::array<std::array<double, N>, N>;

using Mat2 = Mat<2>;
using Mat3 = Mat<3>;

template <std::size_t N>
constexpr Vec<N> operator+(const Vec<N>& a, const Vec<N>& b) {
  Vec<N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = a[i] + b[i];
  return out;
}

template <std::size_t N>
constexpr Vec<N> operator-(const Vec<N>& a, const Vec<N>& b) {
  Vec<N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = a[i] - b[i];
  return out;
}

template <std::size_t N>
constexpr Vec<N> operator*(double s, const Vec<N>& a) {
  Vec<N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = s * a[i];
  return out;
}

template <std::size_t N>
constexpr double dot(const Vec<N>& a, const Vec<N>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
  return s;
}

template <std::size_t N>
double norm(const Vec<N>& a) {
  return std::sqrt(dot(a, a));
}

template <std::size_t N>
double max_norm(const Vec<N>& a) {
  double m = 0.0;
  for (double v : a) m = std::fmax(m, std::fabs(v));
  return m;
}

template <std::size_t N>
bool all_finite(const Vec<N>& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

template <std::size_t N>
constexpr Vec<N> operator*(const Mat<N>& m, const Vec<N>& v) {
  Vec<N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = dot(m[i], v);
  return out;
}

constexpr double det(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
constexpr double trace(const Mat2& m) { return m[0][0] + m[1][1]; }

constexpr double det(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}
constexpr double trace(const Mat3& m) { return m[0][0] + m[1][1] + m[2][2]; }

/// Solves m x = rhs by Cramer's rule; std::nullopt when |det m| <= min_det.
inline std::optional<Vec2> solve(const Mat2& m, const Vec2& rhs, double min_det = 0.0) {
  const double d = det(m);
  if (!(std::fabs(d) > min_det)) return std::nullopt;
  return Vec2{(rhs[0] * m[1][1] - m[0][1] * rhs[1]) / d, (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / d};
}

}  // namespace ratetip
