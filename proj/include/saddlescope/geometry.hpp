#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>

namespace saddlescope {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.141592653589793238462643383279;

/// Reduce into [0,1). Exact 1.0 maps to 0.0.
inline double mod1(double v) {
    double r = v - std::floor(v);
    if (r >= 1.0) r -= 1.0;  // guards v slightly below an integer
    return r;
}

/// Signed representative of (a - b) mod 1 in [-0.5, 0.5).
inline double wrap_delta(double a, double b) {
    double d = a - b;
    d -= std::nearbyint(d);
    if (d >= 0.5) d -= 1.0;
    return d;
}

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
    Vec2 normalized() const {
        double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
    }
    Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Point of the universal cover R^2.
struct PlanePoint {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator-(const PlanePoint& o) const { return {x - o.x, y - o.y}; }
    PlanePoint operator+(const Vec2& v) const { return {x + v.x, y + v.y}; }
    PlanePoint operator-(const Vec2& v) const { return {x - v.x, y - v.y}; }
};

/// Point of T^2 = R^2/Z^2, both coordinates reduced into [0,1).
struct TorusPoint {
    double x = 0.0;
    double y = 0.0;

    static TorusPoint reduce(double px, double py) { return {mod1(px), mod1(py)}; }
    static TorusPoint reduce(const PlanePoint& p) { return reduce(p.x, p.y); }

    PlanePoint lift() const { return {x, y}; }
};

inline TorusPoint project(const PlanePoint& p) { return TorusPoint::reduce(p); }

/// Wrap-around metric on the torus: per-coordinate min(|d|, 1-|d|).
inline double torus_dist(const TorusPoint& a, const TorusPoint& b) {
    double dx = wrap_delta(a.x, b.x);
    double dy = wrap_delta(a.y, b.y);
    return std::hypot(dx, dy);
}

/// The integer translate of b nearest to a (both in plane coordinates).
inline PlanePoint nearest_translate(const PlanePoint& b, const PlanePoint& a) {
    return {b.x + std::nearbyint(a.x - b.x), b.y + std::nearbyint(a.y - b.y)};
}

struct Mat2 {
    double a11 = 1.0, a12 = 0.0;
    double a21 = 0.0, a22 = 1.0;

    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }

    Vec2 operator*(const Vec2& v) const {
        return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
    }
    Mat2 operator*(const Mat2& m) const {
        return {a11 * m.a11 + a12 * m.a21, a11 * m.a12 + a12 * m.a22,
                a21 * m.a11 + a22 * m.a21, a21 * m.a12 + a22 * m.a22};
    }
    Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
    Mat2 operator+(const Mat2& m) const {
        return {a11 + m.a11, a12 + m.a12, a21 + m.a21, a22 + m.a22};
    }
    Mat2 operator-(const Mat2& m) const {
        return {a11 - m.a11, a12 - m.a12, a21 - m.a21, a22 - m.a22};
    }

    Mat2 inverse() const {
        double d = det();
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }
    Vec2 solve(const Vec2& rhs) const {
        double d = det();
        return {(a22 * rhs.x - a12 * rhs.y) / d, (a11 * rhs.y - a21 * rhs.x) / d};
    }
    static Mat2 identity() { return {}; }
    static Mat2 rotation(double angle) {
        double c = std::cos(angle), s = std::sin(angle);
        return {c, -s, s, c};
    }
};

/// 2x2 derivative of a map; determinant 1 within tolerance for all MapSpec kinds.
using Jacobian2 = Mat2;

struct SegmentHit {
    double s = 0.0;  // parameter on segment a
    double t = 0.0;  // parameter on segment b
    Vec2 point;
    int sign = 0;  // orientation of the crossing, sign of cross(da, db)
};

/// Proper intersection of segments [a0,a1] and [b0,b1] in the plane.
/// Returns nullopt for parallel/degenerate configurations or misses.
inline std::optional<SegmentHit> segment_intersection(const Vec2& a0, const Vec2& a1,
                                                      const Vec2& b0, const Vec2& b1,
                                                      double eps = 0.0) {
    Vec2 da = a1 - a0;
    Vec2 db = b1 - b0;
    double denom = da.cross(db);
    if (denom == 0.0) return std::nullopt;
    Vec2 d0 = b0 - a0;
    double s = d0.cross(db) / denom;
    double t = d0.cross(da) / denom;
    if (s < -eps || s > 1.0 + eps || t < -eps || t > 1.0 + eps) return std::nullopt;
    SegmentHit hit;
    hit.s = s;
    hit.t = t;
    hit.point = a0 + da * s;
    hit.sign = denom > 0.0 ? 1 : -1;
    return hit;
}

/// Distance from p to segment [a,b], and the parameter of the closest point.
inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b,
                                     double* param = nullptr) {
    Vec2 ab = b - a;
    double len2 = ab.norm2();
    double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
    t = std::fmin(1.0, std::fmax(0.0, t));
    if (param) *param = t;
    return (p - (a + ab * t)).norm();
}

/// Deterministic double in [0,1) from a 64-bit key (splitmix64 finalizer).
inline double hash_unit(std::uint64_t key) {
    key += 0x9e3779b97f4a7c15ull;
    key = (key ^ (key >> 30)) * 0xbf58476d1ce4e5b9ull;
    key = (key ^ (key >> 27)) * 0x94d049bb133111ebull;
    key = key ^ (key >> 31);
    return static_cast<double>(key >> 11) * 0x1.0p-53;
}

}  // namespace saddlescope
