#pragma once

#include <cmath>

namespace abreuflow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double operator[](int i) const { return i == 0 ? x : y; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double operator()(int i, int j) const { return i + j == 0 ? xx : (i + j == 1 ? xy : yy); }
  double det() const { return xx * yy - xy * xy; }
  double trace() const { return xx + yy; }
  double quad(Vec2 v) const { return xx * v.x * v.x + 2.0 * xy * v.x * v.y + yy * v.y * v.y; }
  Vec2 apply(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
  Sym2 inverse() const {
    const double d = det();
    return {yy / d, -xy / d, xx / d};
  }
  Sym2& operator+=(const Sym2& o) { xx += o.xx; xy += o.xy; yy += o.yy; return *this; }
  friend Sym2 operator+(Sym2 a, const Sym2& b) { return a += b; }
  friend Sym2 operator-(const Sym2& a, const Sym2& b) { return {a.xx - b.xx, a.xy - b.xy, a.yy - b.yy}; }
  friend Sym2 operator*(double s, const Sym2& a) { return {s * a.xx, s * a.xy, s * a.yy}; }
};

// General 2x2 matrix, row-major.
struct Mat2 {
  double a00 = 0.0, a01 = 0.0, a10 = 0.0, a11 = 0.0;

  static Mat2 from(const Sym2& s) { return {s.xx, s.xy, s.xy, s.yy}; }
  double operator()(int i, int j) const {
    return i == 0 ? (j == 0 ? a00 : a01) : (j == 0 ? a10 : a11);
  }
  double trace() const { return a00 + a11; }
  Mat2 transpose() const { return {a00, a10, a01, a11}; }
  friend Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.a00 + b.a00, a.a01 + b.a01, a.a10 + b.a10, a.a11 + b.a11};
  }
  friend Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a.a00 - b.a00, a.a01 - b.a01, a.a10 - b.a10, a.a11 - b.a11};
  }
  friend Mat2 operator*(double s, const Mat2& a) { return {s * a.a00, s * a.a01, s * a.a10, s * a.a11}; }
  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.a00 * b.a00 + a.a01 * b.a10, a.a00 * b.a01 + a.a01 * b.a11,
            a.a10 * b.a00 + a.a11 * b.a10, a.a10 * b.a01 + a.a11 * b.a11};
  }
};

struct SymEigen {
  double min = 0.0;
  double max = 0.0;
  Vec2 min_vector;  // unit
  Vec2 max_vector;  // unit
};

inline SymEigen eigen(const Sym2& m) {
  const double mean = 0.5 * (m.xx + m.yy);
  const double half_diff = 0.5 * (m.xx - m.yy);
  const double r = std::hypot(half_diff, m.xy);
  SymEigen e;
  e.min = mean - r;
  e.max = mean + r;
  const double angle = 0.5 * std::atan2(m.xy, half_diff);
  e.max_vector = {std::cos(angle), std::sin(angle)};
  e.min_vector = {-e.max_vector.y, e.max_vector.x};
  return e;
}

}  // namespace abreuflow
