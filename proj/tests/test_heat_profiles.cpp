#include "doctest.h"

#include <cstdio>
#include <random>

#include "dssflow/heat_profiles.hpp"
#include "oracles.hpp"

using namespace dssflow;

TEST_CASE("oracle confirms the erf closed form for heat of 1/|x|") {
    // e^{t Lap}(1/|x|) = erf(|x|/(2 sqrt t))/|x|, checked by independent
    // adaptive quadrature of the radial Weber kernel
    auto inv = [](double w) { return 1.0 / w; };
    for (auto [a, t] : std::vector<std::pair<double, double>>{{0.5, 1.0},
                                                              {1.0, 1.0},
                                                              {2.0, 1.0},
                                                              {3.5, 1.0},
                                                              {5.0, 1.0},
                                                              {8.0, 1.0},
                                                              {1.0, 0.25},
                                                              {2.0, 4.0},
                                                              {0.7, 2.0},
                                                              {6.0, 0.5}}) {
        double got = oracle::heat_radial(inv, a, t, 1e-13);
        double expect = std::erf(a / (2.0 * std::sqrt(t))) / a;
        CHECK(std::abs(got - expect) <= 1e-8 * std::abs(expect));
    }
}

TEST_CASE("heat_evaluate matches the closed form for 1/|x|") {
    DssField ir = builtin_field("inverse-radius", 2.0);
    HeatQuadOptions opt;
    opt.tol = 1e-9;
    for (auto [a, t] : std::vector<std::pair<double, double>>{
             {2.0, 1.0}, {0.5, 1.0}, {8.0, 1.0}, {2.0, 4.0}, {1.3, 0.3}}) {
        double got = heat_evaluate(ir, {a, 0, 0}, t, opt).x;
        double expect = std::erf(a / (2.0 * std::sqrt(t))) / a;
        CHECK(std::abs(got - expect) <= 1e-7 * std::abs(expect));
    }
    // off-axis point
    Vec3 x{1.2, -0.7, 2.1};
    double got = heat_evaluate(ir, x, 1.0, opt).x;
    double expect = std::erf(x.norm() / 2.0) / x.norm();
    CHECK(std::abs(got - expect) <= 1e-7 * std::abs(expect));
}

TEST_CASE("heat_evaluate: odd symmetry at the origin and semigroup identity") {
    DssField az = builtin_field("azimuthal", 2.0);
    HeatQuadOptions opt;
    Vec3 v = heat_evaluate(az, {0, 0, 0}, 1.0, opt);
    CHECK(v.norm() <= 1e-10);

    // t -> 0+ recovers the data pointwise
    Vec3 x{1.5, 0.4, -0.3};
    Vec3 got = heat_evaluate(az, x, 1e-4, opt);
    Vec3 expect = az.eval(x);
    CHECK((got - expect).norm() <= 1e-3 * expect.norm());
}

TEST_CASE("heat_evaluate is linear in the data") {
    DssField ir = builtin_field("inverse-radius", 2.0);
    struct Scaled : AnnulusData {
        const AnnulusData* base;
        double c;
        Vec3 eval(const Vec3& z) const override { return base->eval(z) * c; }
        std::uint64_t content_hash() const override { return 2; }
    };
    auto s = std::make_shared<Scaled>();
    s->base = &ir.annulus();
    s->c = 2.5;
    DssField scaled("scaled", FieldKind::Scalar, ScaleFactor(2.0), true, s);
    Vec3 x{1.1, 0.2, 0.4};
    double a = heat_evaluate(ir, x, 1.3).x;
    double b = heat_evaluate(scaled, x, 1.3).x;
    CHECK(b == doctest::Approx(2.5 * a).epsilon(1e-13));
}

TEST_CASE("profile values: erf profile, origin limit, s-independence") {
    DssField ir = builtin_field("inverse-radius", 2.0);
    HeatQuadOptions opt;
    opt.tol = 1e-9;
    // Theta0(y, s) = erf(|y|/2)/|y| for every s
    for (double s : {0.0, 0.35, 1.0}) {
        Vec3 y{2.5, 1.0, -0.5};
        double got = profile_value(ir, y, s, opt).x;
        double expect = std::erf(y.norm() / 2.0) / y.norm();
        CHECK(std::abs(got - expect) <= 1e-7 * expect);
    }
    // Theta0(y -> 0) -> 1/sqrt(pi), via the origin path
    double at0 = profile_value(ir, {0, 0, 0}, 0.0, opt).x;
    CHECK(std::abs(at0 - 1.0 / std::sqrt(kPi)) <= 1e-7);
}

TEST_CASE("DSS profile periodicity in s") {
    DssField bump = builtin_field("annulus-bump", 2.0);
    HeatQuadOptions opt;
    opt.tol = 1e-8;
    double T = bump.scale().period();
    for (auto [y, s] : std::vector<std::pair<Vec3, double>>{
             {{1.0, 0.3, -0.2}, 0.13}, {{0.4, 0.0, 0.9}, 0.61}, {{2.2, -1.0, 0.5}, 0.30}}) {
        double a = profile_value(bump, y, s, opt).x;
        double b = profile_value(bump, y, s + T, opt).x;
        CHECK(std::abs(a - b) <= 1e-7 * std::max(1e-3, std::abs(a)));
    }
}

TEST_CASE("apply_L basics: constants and the Gaussian eigenfunction") {
    BoxPtr box = Box::make(16.0, 32);
    // constant stationary profile: L c = -c/2
    Field c(box, 1);
    {
        RealVec& p = c.phys_raw();
        std::fill(p.begin(), p.end(), 1.0);
    }
    std::vector<Field> smp;
    smp.push_back(c.clone());
    Profile pc(box, 1, 2.0 * std::log(2.0), true, std::move(smp));
    Profile Lc = apply_L(pc);
    Field diff = Lc.sample(0).clone();
    diff.axpy(0.5, c);
    CHECK(l2_norm(diff) <= 1e-10);

    // Lg = g for the Gaussian (checked interior; window edges excluded)
    Field g(box, 1);
    {
        RealVec& p = g.phys_raw();
        const Box& b = *box;
        for (std::size_t i = 0; i < b.nphys(); ++i)
            p[i] = std::exp(-b.radius()[i] * b.radius()[i] / 4.0);
    }
    std::vector<Field> sg;
    sg.push_back(g.clone());
    Profile pg(box, 1, 2.0 * std::log(2.0), true, std::move(sg));
    Profile Lg = apply_L(pg);
    Field d2 = Lg.sample(0).clone();
    d2.axpy(-1.0, g);
    CHECK(interior_l2_norm(d2) / interior_l2_norm(g) <= 1e-6);

    // s-derivative needs at least 3 samples
    std::vector<Field> two;
    two.push_back(g.clone());
    two.push_back(g.clone());
    Profile p2(box, 1, 2.0 * std::log(2.0), false, std::move(two));
    CHECK_THROWS_AS(apply_L(p2), UsageError);
}

TEST_CASE("trig interpolation and s-derivative of profiles") {
    BoxPtr box = Box::make(8.0, 8);
    double T = 2.0 * std::log(2.0);
    const int ns = 8;
    // samples carry cos(2 pi s/T + phase) per grid value
    std::vector<Field> smp;
    for (int m = 0; m < ns; ++m) {
        Field f(box, 1);
        RealVec& p = f.phys_raw();
        double s = T * m / ns;
        for (std::size_t i = 0; i < p.size(); ++i)
            p[i] = std::cos(2.0 * kPi * s / T + 0.1 * double(i % 7));
        smp.push_back(std::move(f));
    }
    Profile prof(box, 1, T, false, std::move(smp));

    double s = 0.3217 * T;
    Field at = prof.at(s);
    const RealVec& p = at.phys();
    double worst = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        worst = std::max(worst,
                         std::abs(p[i] - std::cos(2.0 * kPi * s / T + 0.1 * double(i % 7))));
    CHECK(worst <= 1e-12);

    Field ds = prof.s_derivative_at_node(3);
    const RealVec& pd = ds.phys();
    double s3 = T * 3 / ns;
    worst = 0;
    for (std::size_t i = 0; i < pd.size(); ++i) {
        double expect = -2.0 * kPi / T * std::sin(2.0 * kPi * s3 / T + 0.1 * double(i % 7));
        worst = std::max(worst, std::abs(pd[i] - expect));
    }
    CHECK(worst <= 1e-11);
}

TEST_CASE("annihilation ratio decreases under refinement for the erf profile") {
    // the erf profile evaluated analytically onto certificate grids
    auto build = [&](int N, double L) {
        BoxPtr solver = Box::make(L, N);
        BoxPtr cert = certificate_grid(*solver);
        RadialTaper taper = certificate_taper(*solver);
        Field f(cert, 1);
        RealVec& p = f.phys_raw();
        const Box& b = *cert;
        for (std::size_t i = 0; i < b.nphys(); ++i) {
            double r = b.radius()[i];
            double v = r > 1e-12 ? std::erf(r / 2.0) / r : 1.0 / std::sqrt(kPi);
            p[i] = (r >= taper.r1) ? 0.0 : v * taper(r);
        }
        std::vector<Field> smp;
        smp.push_back(std::move(f));
        Profile prof(cert, 1, 2.0 * std::log(2.0), true, std::move(smp));
        return annihilation_ratio(prof, *solver);
    };
    double r16 = build(16, 16.0);
    double r32 = build(32, 16.0);
    CHECK(r32 <= 1e-4);
    CHECK(r16 / r32 >= 4.0);
}

TEST_CASE("tail norms: majorant bound, monotonicity, zero profile, q guard") {
    BoxPtr box = Box::make(16.0, 32);
    Field f(box, 1);
    {
        RealVec& p = f.phys_raw();
        const Box& b = *box;
        for (std::size_t i = 0; i < b.nphys(); ++i) {
            double r = b.radius()[i];
            p[i] = r > 1e-12 ? std::erf(r / 2.0) / r : 1.0 / std::sqrt(kPi);
        }
    }
    std::vector<Field> smp;
    smp.push_back(std::move(f));
    Profile prof(box, 1, 1.0, true, std::move(smp));

    std::vector<double> radii{2.0, 4.0, 8.0};
    TailBound tb = tail_norms(prof, 10.0 / 3.0, radii);
    for (std::size_t i = 0; i + 1 < tb.mu.size(); ++i) CHECK(tb.mu[i] >= tb.mu[i + 1]);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        // analytic majorant of the 1/|y| tail: (12 pi R^{-1/3})^{3/10} (+ slack)
        double bound = std::pow(12.0 * kPi * std::pow(radii[i], -1.0 / 3.0), 0.3);
        CHECK(tb.mu[i] <= bound * 1.05);
    }

    Field z(box, 1);
    z.set_zero();
    std::vector<Field> zz;
    zz.push_back(std::move(z));
    Profile pz(box, 1, 1.0, true, std::move(zz));
    TailBound tbz = tail_norms(pz, 10.0 / 3.0, radii);
    for (double m : tbz.mu) CHECK(m == 0.0);

    CHECK_THROWS_AS(tail_norms(prof, 3.0, radii), ConfigError);
}

TEST_CASE("grid transfer: crop, pad, subsample") {
    std::mt19937_64 rng(43);
    BoxPtr big = Box::make(16.0, 32);
    BoxPtr small = Box::make(16.0, 16);
    Field f = oracle::random_scalar(small, rng);
    // pad then crop is the identity
    Field up = spectral_pad(f, big);
    Field back = spectral_crop(up, small);
    back.axpy(-1.0, f);
    CHECK(l2_norm(back) <= 1e-12 * std::max(1.0, l2_norm(f)));

    // subsample_center picks exactly the shared lattice points
    BoxPtr half = Box::make(8.0, 16);
    Field g = oracle::random_scalar(big, rng);
    Field sub = subsample_center(g, half);
    const Box& bb = *big;
    const Box& hb = *half;
    int off = int(std::lround((bb.L - hb.L) / bb.h()));
    double worst = 0;
    for (int i = 0; i < hb.N; ++i)
        for (int j = 0; j < hb.N; ++j)
            for (int l = 0; l < hb.N; ++l)
                worst = std::max(worst, std::abs(sub.phys()[hb.phys_index(i, j, l)] -
                                                 g.phys()[bb.phys_index(i + off, j + off, l + off)]));
    CHECK(worst == 0.0);
}

TEST_CASE("profile cache file round trip") {
    BoxPtr box = Box::make(8.0, 8);
    std::mt19937_64 rng(47);
    std::vector<Field> smp;
    for (int m = 0; m < 4; ++m) smp.push_back(oracle::random_scalar(box, rng));
    Profile prof(box, 1, 1.25, false, std::move(smp));
    write_profile_file("test_profile.prof", prof, 2.0, 1e-8);
    Profile back = read_profile_file("test_profile.prof");
    CHECK(back.n_s() == 4);
    CHECK(back.period() == doctest::Approx(1.25));
    for (int m = 0; m < 4; ++m) {
        Field d = back.sample(m).clone();
        d.axpy(-1.0, prof.sample(m));
        CHECK(l2_norm(d) <= 1e-14);
    }
    std::remove("test_profile.prof");
}
