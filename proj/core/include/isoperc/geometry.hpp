#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace isoperc {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const noexcept { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const noexcept { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const noexcept { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const noexcept { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const noexcept { return {x / s, y / s}; }
    constexpr Vec2& operator+=(Vec2 o) noexcept { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) noexcept { x -= o.x; y -= o.y; return *this; }
    constexpr bool operator==(const Vec2&) const noexcept = default;
};

constexpr Vec2 operator*(double s, Vec2 v) noexcept { return v * s; }

constexpr double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) noexcept { return std::hypot(a.x, a.y); }
inline double sup_norm(Vec2 a) noexcept { return std::max(std::abs(a.x), std::abs(a.y)); }

inline Vec2 unit_vector(double angle) noexcept { return {std::cos(angle), std::sin(angle)}; }

inline Vec2 rotate(Vec2 v, double angle) noexcept {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Unsigned angle in [0, pi] between two nonzero vectors.
inline double angle_between(Vec2 a, Vec2 b) noexcept {
    return std::atan2(std::abs(cross(a, b)), dot(a, b));
}

/// Sides of an oriented rectangle, named in its own frame.
enum class BoxSide { Left = 0, Right = 1, Bottom = 2, Top = 3 };

/// Closed rectangle with centre `center`, extent `width` along the rotated
/// x-axis and `height` along the rotated y-axis, tilted by `tilt` radians.
struct OrientedBox {
    Vec2 center;
    double width = 1.0;
    double height = 1.0;
    double tilt = 0.0;

    Vec2 to_local(Vec2 p) const noexcept { return rotate(p - center, -tilt); }
    Vec2 to_world(Vec2 p) const noexcept { return rotate(p, tilt) + center; }

    bool contains(Vec2 p, double tol = 1e-9) const noexcept {
        const Vec2 l = to_local(p);
        return std::abs(l.x) <= width / 2 + tol && std::abs(l.y) <= height / 2 + tol;
    }

    std::array<Vec2, 4> corners() const noexcept {
        const double w = width / 2, h = height / 2;
        return {to_world({-w, -h}), to_world({w, -h}), to_world({w, h}), to_world({-w, h})};
    }
};

} // namespace isoperc
