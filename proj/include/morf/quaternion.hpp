#pragma once

#include <cmath>

namespace morf {

/// w + x i + y j + z k.
struct Quaternion {
  double w = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Quaternion conj() const noexcept { return {w, -x, -y, -z}; }
  double norm() const noexcept { return std::sqrt(w * w + x * x + y * y + z * z); }

  friend constexpr Quaternion operator*(const Quaternion& a,
                                        const Quaternion& b) noexcept {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }
  friend constexpr Quaternion operator*(const Quaternion& q, double k) noexcept {
    return {q.w * k, q.x * k, q.y * k, q.z * k};
  }
};

/// Riesz coefficients I + i R1 + j R2 as a quaternion.
constexpr Quaternion riesz_quaternion(double i, double r1, double r2) noexcept {
  return {i, r1, r2, 0.0};
}

}  // namespace morf
