// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinchsim Authors
#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace pinch {

using complex = std::complex<double>;

struct Vec2
{
    double x = 0;
    double y = 0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

//! Rotate counter-clockwise by `angle` radians.
inline Vec2 rotate(Vec2 v, double angle)
{
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

struct Vec3
{
    double x = 0;
    double y = 0;
    double z = 0;

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }

//! Complex 3-vector (field or current density components).
using CVec3 = std::array<complex, 3>;

inline CVec3 operator*(complex s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
inline CVec3 operator*(complex s, const CVec3& v) { return {s * v[0], s * v[1], s * v[2]}; }
inline CVec3 operator+(const CVec3& a, const CVec3& b)
{
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline complex dot(const CVec3& a, Vec3 b) { return a[0] * b.x + a[1] * b.y + a[2] * b.z; }

//! Neumaier-compensated sum; the result depends only on the order of add().
class CompensatedSum
{
  public:
    void add(double v)
    {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0;
    double comp_ = 0;
};

} // namespace pinch
