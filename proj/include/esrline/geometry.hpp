#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace esrline {

using Complex = std::complex<double>;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Complex phasor vector (one component per axis).
struct CVec3 {
    Complex x{0.0, 0.0}, y{0.0, 0.0}, z{0.0, 0.0};

    CVec3 operator+(const CVec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    CVec3 operator*(Complex s) const { return {x * s, y * s, z * s}; }
    // Magnitude of the phasor vector: sqrt(sum |c|^2) over components.
    double magnitude() const {
        return std::sqrt(std::norm(x) + std::norm(y) + std::norm(z));
    }
};

// Axis-aligned box. x0<x1, y0<y1, z0<z1 once validated.
struct Box {
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0, z0 = 0, z1 = 0;

    double lo(int axis) const { return axis == 0 ? x0 : (axis == 1 ? y0 : z0); }
    double hi(int axis) const { return axis == 0 ? x1 : (axis == 1 ? y1 : z1); }
    double extent(int axis) const { return hi(axis) - lo(axis); }
    Vec3 center() const { return {(x0 + x1) / 2, (y0 + y1) / 2, (z0 + z1) / 2}; }
    double volume() const { return extent(0) * extent(1) * extent(2); }

    bool contains(const Vec3& p, double tol = 0.0) const {
        return p.x > x0 - tol && p.x < x1 + tol && p.y > y0 - tol &&
               p.y < y1 + tol && p.z > z0 - tol && p.z < z1 + tol;
    }
    // Strictly interior point test (boundary excluded up to tol).
    bool strictly_contains(const Vec3& p, double tol) const {
        return p.x > x0 + tol && p.x < x1 - tol && p.y > y0 + tol &&
               p.y < y1 - tol && p.z > z0 + tol && p.z < z1 - tol;
    }

    // Overlap volume of two boxes (0 when disjoint or merely touching).
    double overlap_volume(const Box& o) const {
        double v = 1.0;
        for (int a = 0; a < 3; ++a) {
            double lo_ = std::max(lo(a), o.lo(a));
            double hi_ = std::min(hi(a), o.hi(a));
            if (hi_ <= lo_) return 0.0;
            v *= hi_ - lo_;
        }
        return v;
    }

    // True when the boxes touch or overlap within `tol`.
    bool touches(const Box& o, double tol) const {
        for (int a = 0; a < 3; ++a) {
            if (lo(a) > o.hi(a) + tol || o.lo(a) > hi(a) + tol) return false;
        }
        return true;
    }

    // Center of the (possibly degenerate) intersection region, valid when
    // touches() holds.
    Vec3 contact_center(const Box& o) const {
        auto mid = [&](int a) {
            double lo_ = std::max(lo(a), o.lo(a));
            double hi_ = std::min(hi(a), o.hi(a));
            return (lo_ + hi_) / 2.0;
        };
        return {mid(0), mid(1), mid(2)};
    }

    Box united(const Box& o) const {
        return {std::min(x0, o.x0), std::max(x1, o.x1), std::min(y0, o.y0),
                std::max(y1, o.y1), std::min(z0, o.z0), std::max(z1, o.z1)};
    }
};

} // namespace esrline
