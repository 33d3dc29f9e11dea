#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dssflow {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    double& operator[](int i) { return (&x)[i]; }
    double operator[](int i) const { return (&x)[i]; }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double c) const { return {c * x, c * y, c * z}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x; y += o.y; z += o.z;
        return *this;
    }
    Vec3& operator*=(double c) {
        x *= c; y *= c; z *= c;
        return *this;
    }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
};

inline Vec3 operator*(double c, const Vec3& v) { return v * c; }

// C-infinity step: 0 for t<=0, 1 for t>=1, built from exp(-1/t).
inline double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double a = std::exp(-1.0 / t);
    double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

inline double smoothstep_deriv(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    double a = std::exp(-1.0 / t);
    double b = std::exp(-1.0 / (1.0 - t));
    double s = a + b;
    return a * b * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) / (s * s);
}

// Gauss-Legendre nodes/weights on [-1,1], cached per order.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n);

// Integrate fn over [a,b] with n-point Gauss-Legendre.
template <class F>
double gl_integrate(F&& fn, double a, double b, int n) {
    const auto& [xs, ws] = gauss_legendre(n);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0;
    for (int i = 0; i < n; ++i) s += ws[i] * fn(mid + half * xs[i]);
    return s * half;
}

// Run fn(i) for i in [0,n) on up to `threads` workers. fn must be safe to call
// concurrently for distinct i. Falls back to a serial loop for threads<=1.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn);

// FNV-1a 64-bit, used for artifact content hashes.
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed = 1469598103934665603ull);
std::uint64_t fnv1a(std::span<const double> v, std::uint64_t seed = 1469598103934665603ull);

std::string hash_hex(std::uint64_t h);

// Correction constant for midpoint sums of f(y)/|y|^2 over a cubic lattice with
// the origin point dropped:  integral - sum ~= kappa * h * f(0).
inline constexpr double kInvSqLatticeConstant = 8.913632917585;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace dssflow
