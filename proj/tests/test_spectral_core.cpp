#include "doctest.h"

#include <random>

#include "dssflow/operators.hpp"
#include "oracles.hpp"

using namespace dssflow;

namespace {
BoxPtr small_box() {
    static BoxPtr b = Box::make(16.0, 16);
    return b;
}
BoxPtr med_box() {
    static BoxPtr b = Box::make(16.0, 32);
    return b;
}
}  // namespace

TEST_CASE("transform round trip and Parseval") {
    std::mt19937_64 rng(7);
    Field f = oracle::random_scalar(small_box(), rng);
    RealVec phys0 = f.phys();
    double n0 = l2_norm(f);
    // force a spectral->physical->spectral round trip
    Field g = f.clone();
    g.spec_mut();
    g.phys_mut();
    double err = 0;
    const RealVec& p1 = g.phys();
    for (std::size_t i = 0; i < phys0.size(); ++i) err = std::max(err, std::abs(p1[i] - phys0[i]));
    CHECK(err <= 1e-12 * std::max(1.0, n0));

    double pi = inner_phys(f, f), si = inner(f, f);
    CHECK(std::abs(pi - si) <= 1e-12 * std::abs(si));
}

TEST_CASE("Leray projection annihilates gradients, keeps curls, is idempotent") {
    std::mt19937_64 rng(11);
    Field phi = oracle::random_scalar(small_box(), rng);
    Field gp = gradient(phi);
    double n = l2_norm(gp);
    leray_project(gp);
    CHECK(l2_norm(gp) <= 1e-12 * n);

    // curl of a random vector potential is already solenoidal
    Field A = oracle::random_vector(small_box(), rng, false);
    Field curl(small_box(), 3);
    {
        Field d0 = derivative(A, 0), d1 = derivative(A, 1), d2 = derivative(A, 2);
        CplxVec& o = curl.spec_raw();
        const Box& b = *small_box();
        const std::size_t ns = b.nspec();
        for (std::size_t i = 0; i < ns; ++i) {
            o[i] = d1.spec()[2 * ns + i] - d2.spec()[ns + i];
            o[ns + i] = d2.spec()[i] - d0.spec()[2 * ns + i];
            o[2 * ns + i] = d0.spec()[ns + i] - d1.spec()[i];
        }
    }
    Field before = curl.clone();
    leray_project(curl);
    before.axpy(-1.0, curl);
    CHECK(l2_norm(before) <= 1e-12 * std::max(1.0, l2_norm(curl)));

    Field v = oracle::random_vector(small_box(), rng, false);
    leray_project(v);
    CHECK(spectral_divergence_norm(v) <= 1e-12 * std::max(1.0, l2_norm(v)));
    Field v2 = v.clone();
    leray_project(v2);
    v2.axpy(-1.0, v);
    CHECK(l2_norm(v2) <= 1e-13 * std::max(1.0, l2_norm(v)));
}

TEST_CASE("skew convection cancellations") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        Field a = oracle::random_vector(small_box(), rng, true);
        Field bv = oracle::random_vector(small_box(), rng, false);
        Field bs = oracle::random_scalar(small_box(), rng);

        double sv = l2_norm(a) * h1_norm_sq(bv);
        CHECK(std::abs(inner(convect(a, bv), bv)) <= 1e-12 * std::max(1.0, sv));
        double ss = l2_norm(a) * h1_norm_sq(bs);
        CHECK(std::abs(inner(convect(a, bs), bs)) <= 1e-12 * std::max(1.0, ss));
    }
    // zero advecting field
    Field z = make_vector(small_box());
    z.set_zero();
    std::mt19937_64 rng2(5);
    Field b = oracle::random_scalar(small_box(), rng2);
    CHECK(l2_norm(convect(z, b)) == doctest::Approx(0.0));
}

TEST_CASE("convect is bilinear") {
    std::mt19937_64 rng(17);
    Field a = oracle::random_vector(small_box(), rng, true);
    Field b1 = oracle::random_scalar(small_box(), rng);
    Field b2 = oracle::random_scalar(small_box(), rng);
    Field sum = b1.clone();
    sum.axpy(2.5, b2);
    Field lhs = convect(a, sum);
    Field rhs = convect(a, b1);
    rhs.axpy(2.5, convect(a, b2));
    lhs.axpy(-1.0, rhs);
    CHECK(l2_norm(lhs) <= 1e-11 * std::max(1.0, l2_norm(rhs)));
}

TEST_CASE("drift term: constants, Gaussian eigenfunction, adjoint identity") {
    BoxPtr box = Box::make(16.0, 32);
    Field c(box, 1);
    {
        RealVec& p = c.phys_raw();
        std::fill(p.begin(), p.end(), 1.0);
    }
    CHECK(l2_norm(drift_term(c)) <= 1e-12);

    // L g = g for g = exp(-|y|^2/4), using -Lap - 1/2 - drift
    Field g(box, 1);
    {
        RealVec& p = g.phys_raw();
        const Box& b = *box;
        for (std::size_t i = 0; i < b.nphys(); ++i)
            p[i] = std::exp(-b.radius()[i] * b.radius()[i] / 4.0);
    }
    Field Lg = laplacian(g);
    Lg.scale(-1.0);
    Lg.axpy(-0.5, g);
    Lg.axpy(-1.0, drift_term(g));
    Lg.axpy(-1.0, g);  // should vanish
    // interior check
    double resid = interior_l2_norm(Lg) / interior_l2_norm(g);
    CHECK(resid <= 1e-6);

    // <(1/2) ytilde . grad u, u> = -(3/4)||u||^2 for window-supported u
    std::mt19937_64 rng(23);
    Field u = oracle::windowed_scalar(box, rng);
    double lhs = inner(drift_term(u), u);
    double rhs = -0.75 * inner(u, u);
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(rhs));
}

TEST_CASE("gravity field values and Hardy pairing chain") {
    BoxPtr box = med_box();
    Field gf = grav_field(box, 0.0);
    const Box& b = *box;
    // at y = (1,0,0): (-1, 0, 0)
    int i1 = int(std::lround((1.0 + b.L) / b.h()));
    int i0 = int(std::lround((0.0 + b.L) / b.h()));
    std::size_t idx = b.phys_index(i1, i0, i0);
    CHECK(gf.phys()[idx] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(gf.phys()[b.nphys() + idx] == doctest::Approx(0.0));
    // origin sample is zero
    std::size_t io = b.phys_index(i0, i0, i0);
    CHECK(gf.phys()[io] == 0.0);
    Field gd = grav_field(box, 0.5);
    CHECK(gd.phys()[io] == 0.0);

    // |<Psi grad G, U>| <= ||Psi/|y||| ||U/|y||| <= 4(1+slack)||grad Psi|| ||grad U||
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 5; ++trial) {
        Field psi = oracle::windowed_scalar(box, rng);
        Field u = oracle::windowed_vector(box, rng, true);
        double pairing = 0;
        {
            const RealVec& pp = psi.phys();
            const RealVec& pu = u.phys();
            const RealVec& pg = gf.phys();
            const std::size_t np = b.nphys();
            for (std::size_t i = 0; i < np; ++i)
                for (int c = 0; c < 3; ++c)
                    pairing += pp[i] * pg[c * np + i] * pu[c * np + i];
            pairing *= b.h() * b.h() * b.h();
        }
        auto weighted_norm = [&](const Field& f) {
            const RealVec& p = f.phys();
            const RealVec& r = b.radius();
            const std::size_t np = b.nphys();
            double s = 0;
            for (std::size_t i = 0; i < np; ++i) {
                if (r[i] == 0) continue;
                for (int c = 0; c < f.ncomp(); ++c)
                    s += p[c * np + i] * p[c * np + i] / (r[i] * r[i]);
            }
            return std::sqrt(s * b.h() * b.h() * b.h());
        };
        double cs = weighted_norm(psi) * weighted_norm(u);
        CHECK(std::abs(pairing) <= cs * (1.0 + 1e-12));
        double hardy = 4.0 * std::sqrt(grad_norm_sq(psi) * grad_norm_sq(u));
        CHECK(cs <= 1.15 * hardy);
    }
}

TEST_CASE("hardy ratio: Gaussian closed form and domination") {
    BoxPtr box = Box::make(16.0, 48);  // h = 2/3
    Field g(box, 1);
    {
        RealVec& p = g.phys_raw();
        const Box& b = *box;
        for (std::size_t i = 0; i < b.nphys(); ++i)
            p[i] = std::exp(-b.radius()[i] * b.radius()[i] / 4.0);
    }
    double r = hardy_ratio(g);
    CHECK(std::abs(r - 1.0 / 3.0) <= 0.01 / 3.0);

    // translated Gaussian: mass away from the singular weight
    Field gt(box, 1);
    {
        RealVec& p = gt.phys_raw();
        const Box& b = *box;
        for (int i = 0; i < b.N; ++i)
            for (int j = 0; j < b.N; ++j)
                for (int l = 0; l < b.N; ++l) {
                    double dx = b.coord(i) - 4.0, dy = b.coord(j), dz = b.coord(l);
                    p[b.phys_index(i, j, l)] = std::exp(-(dx * dx + dy * dy + dz * dz) / 4.0);
                }
    }
    CHECK(hardy_ratio(gt) < 1.0 / 3.0);

    // never exceeds the Hardy constant (modulo grid slack)
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        Field u = oracle::windowed_scalar(box, rng);
        CHECK(hardy_ratio(u) <= 1.02);
    }

    Field c(box, 1);
    c.set_zero();
    CHECK_THROWS_AS(hardy_ratio(c), UsageError);
}

TEST_CASE("mollifier: normalization, mean preservation, epsilon scaling") {
    BoxPtr box = small_box();
    std::mt19937_64 rng(37);
    Field f = oracle::random_scalar(box, rng);

    Mollifier m1(box, 0.1);
    CHECK(m1.symbol()[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : m1.symbol()) CHECK(std::abs(v) <= 1.0 + 1e-12);

    Field mf = m1.apply(f);
    CHECK(std::abs(mf.spec()[0].real() - f.spec()[0].real()) <= 1e-14);

    // constant field unchanged
    Field c(box, 1);
    {
        RealVec& p = c.phys_raw();
        std::fill(p.begin(), p.end(), 2.5);
    }
    Field mc = m1.apply(c);
    mc.axpy(-1.0, c);
    CHECK(l2_norm(mc) <= 1e-12);

    // ||m_eps f - f|| = O(eps^2) on band-limited fields
    double prev = -1;
    for (double eps : {0.2, 0.1, 0.05}) {
        Mollifier m(box, eps);
        Field d = m.apply(f);
        d.axpy(-1.0, f);
        double change = l2_norm(d) / l2_norm(f);
        if (prev > 0) {
            double order = std::log(prev / change) / std::log(2.0);
            CHECK(order >= 1.8);
        }
        prev = change;
    }
}

TEST_CASE("operator linearity on random inputs") {
    std::mt19937_64 rng(41);
    Field f = oracle::random_scalar(small_box(), rng);
    Field g = oracle::random_scalar(small_box(), rng);
    for (auto op : {+[](const Field& x) { return drift_term(x); },
                    +[](const Field& x) { return laplacian(x); },
                    +[](const Field& x) { return derivative(x, 1); }}) {
        Field sum = f.clone();
        sum.axpy(3.0, g);
        Field lhs = op(sum);
        Field rhs = op(f);
        rhs.axpy(3.0, op(g));
        lhs.axpy(-1.0, rhs);
        CHECK(l2_norm(lhs) <= 1e-11 * std::max(1.0, l2_norm(rhs)));
    }
}
