#pragma once

// Test-only oracles, independent of the library's production quadrature and
// spectral paths.

#include <cmath>
#include <functional>
#include <random>

#include "dssflow/field.hpp"
#include "dssflow/operators.hpp"

namespace oracle {

// adaptive Simpson on [a,b]
inline double simpson_once(const std::function<double(double)>& f, double a, double b, double fa,
                           double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson_once(f, a, m, fa, flm, fm);
    double right = simpson_once(f, m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 48) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = simpson_once(f, a, b, fa, fm, fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Heat evolution of radial data by the 1D Weber kernel:
// (e^{t Lap} f)(|x| = a) = 1/(a sqrt(4 pi t)) Int_0^inf w f(w)
//                          [e^{-(w-a)^2/4t} - e^{-(w+a)^2/4t}] dw
inline double heat_radial(const std::function<double(double)>& f, double a, double t,
                          double tol = 1e-12) {
    double reach = 14.0 * std::sqrt(t);
    auto integrand = [&](double w) {
        if (w <= 0) return 0.0;
        double e1 = std::exp(-(w - a) * (w - a) / (4.0 * t));
        double e2 = std::exp(-(w + a) * (w + a) / (4.0 * t));
        return w * f(w) * (e1 - e2);
    };
    double lo = std::max(0.0, a - reach), hi = a + reach;
    // split at the kernel peak for the adaptive rule
    double mid = a;
    double v = adaptive_simpson(integrand, lo, mid, tol) +
               adaptive_simpson(integrand, mid, hi, tol);
    return v / (a * std::sqrt(4.0 * dssflow::kPi * t));
}

// value at the origin: (e^{t Lap} f)(0) = (4 pi t)^{-3/2} Int 4 pi w^2 f(w) e^{-w^2/4t} dw
inline double heat_radial_origin(const std::function<double(double)>& f, double t,
                                 double tol = 1e-12) {
    double reach = 14.0 * std::sqrt(t);
    auto integrand = [&](double w) {
        return 4.0 * dssflow::kPi * w * w * f(w) * std::exp(-w * w / (4.0 * t));
    };
    return adaptive_simpson(integrand, 0.0, reach, tol) *
           std::pow(4.0 * dssflow::kPi * t, -1.5);
}

// random band-limited fields for property tests
inline dssflow::Field random_scalar(dssflow::BoxPtr box, std::mt19937_64& rng,
                                    double decay = 1.0) {
    dssflow::Field f(box, 1);
    std::normal_distribution<double> g;
    dssflow::RealVec& p = f.phys_raw();
    for (auto& v : p) v = g(rng);
    dssflow::dealias(f);
    // smooth: damp high modes
    dssflow::CplxVec& s = f.spec_mut();
    const dssflow::Box& b = f.box();
    std::size_t idx = 0;
    for (int i = 0; i < b.N; ++i)
        for (int j = 0; j < b.N; ++j)
            for (int l = 0; l < b.nhalf(); ++l, ++idx) {
                double k2 = b.kfull(i) * b.kfull(i) + b.kfull(j) * b.kfull(j) +
                            b.khalf(l) * b.khalf(l);
                s[idx] *= std::exp(-decay * k2);
            }
    return f;
}

inline dssflow::Field random_vector(dssflow::BoxPtr box, std::mt19937_64& rng, bool solenoidal,
                                    double decay = 1.0) {
    dssflow::Field f(box, 3);
    std::normal_distribution<double> g;
    dssflow::RealVec& p = f.phys_raw();
    for (auto& v : p) v = g(rng);
    dssflow::dealias(f);
    dssflow::CplxVec& s = f.spec_mut();
    const dssflow::Box& b = f.box();
    for (int c = 0; c < 3; ++c) {
        std::size_t idx = 0;
        for (int i = 0; i < b.N; ++i)
            for (int j = 0; j < b.N; ++j)
                for (int l = 0; l < b.nhalf(); ++l, ++idx) {
                    double k2 = b.kfull(i) * b.kfull(i) + b.kfull(j) * b.kfull(j) +
                                b.khalf(l) * b.khalf(l);
                    s[c * b.nspec() + idx] *= std::exp(-decay * k2);
                }
    }
    if (solenoidal) dssflow::leray_project(f);
    return f;
}

// scalar with a Gaussian envelope, supported well inside the drift window
inline dssflow::Field windowed_scalar(dssflow::BoxPtr box, std::mt19937_64& rng) {
    dssflow::Field f = random_scalar(box, rng, 0.5);
    const dssflow::Box& b = f.box();
    dssflow::RealVec& p = f.phys_mut();
    double w = 0.35 * b.L;
    for (std::size_t i = 0; i < b.nphys(); ++i) {
        double r = b.radius()[i];
        p[i] *= std::exp(-r * r / (2.0 * w * w));
    }
    dssflow::dealias(f);
    return f;
}

inline dssflow::Field windowed_vector(dssflow::BoxPtr box, std::mt19937_64& rng,
                                      bool solenoidal) {
    dssflow::Field f = random_vector(box, rng, false, 0.5);
    const dssflow::Box& b = f.box();
    dssflow::RealVec& p = f.phys_mut();
    double w = 0.35 * b.L;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < b.nphys(); ++i) {
            double r = b.radius()[i];
            p[c * b.nphys() + i] *= std::exp(-r * r / (2.0 * w * w));
        }
    dssflow::dealias(f);
    if (solenoidal) dssflow::leray_project(f);
    return f;
}

}  // namespace oracle
