#pragma once

#include <cmath>

namespace gcurv {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double norm(Point2 p) { return std::hypot(p.x, p.y); }

inline Point2 polar(double r, double theta) {
  return {r * std::cos(theta), r * std::sin(theta)};
}

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

}  // namespace gcurv
