#include "doctest.h"

#include <cstdio>
#include <random>

#include "dssflow/dss_data.hpp"
#include "oracles.hpp"

using namespace dssflow;

TEST_CASE("DSS extension of the builtin fields") {
    DssField az = builtin_field("azimuthal", 2.0);
    Vec3 v = az.eval({2, 0, 0});
    CHECK(v.x == doctest::Approx(0.0));
    CHECK(v.y == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(v.z == doctest::Approx(0.0));
    Vec3 u = az.eval({1, 0, 0});
    CHECK(u.y == doctest::Approx(1.0).epsilon(1e-13));

    DssField ir = builtin_field("inverse-radius", 2.0);
    CHECK(ir.eval_scalar({4, 0, 0}) == doctest::Approx(0.25).epsilon(1e-13));

    CHECK_THROWS_AS(az.eval({0, 0, 0}), GeometryError);
    CHECK_THROWS_AS(builtin_field("no-such-field", 2.0), ConfigError);
}

TEST_CASE("DSS identity holds exactly for the extension") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> un(-8.0, 8.0);
    for (const auto& name : builtin_field_names()) {
        DssField f = builtin_field(name, 2.0);
        double lam = f.scale().lambda;
        double worst = 0;
        for (int i = 0; i < 200; ++i) {
            Vec3 x{un(rng), un(rng), un(rng)};
            if (x.norm() < 1e-3) continue;
            Vec3 a = f.eval(x);
            Vec3 b = f.eval(x * lam) * lam;
            worst = std::max(worst, (a - b).norm() / std::max(1e-30, a.norm()));
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("homogeneous extension agrees with direct evaluation") {
    DssField ir = builtin_field("inverse-radius", 2.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> un(-20.0, 20.0);
    for (int i = 0; i < 100; ++i) {
        Vec3 x{un(rng), un(rng), un(rng)};
        double r = x.norm();
        if (r < 1e-3) continue;
        CHECK(ir.eval_scalar(x) == doctest::Approx(1.0 / r).epsilon(1e-12));
    }
}

TEST_CASE("divergence of builtin vector fields") {
    // analytic-partial oracle: for e = (-x2, x1, 0)/|x|^2,
    //   d1 e1 = 2 x1 x2/|x|^4, d2 e2 = -2 x1 x2/|x|^4, d3 e3 = 0
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> un(-4.0, 4.0);
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
        Vec3 x{un(rng), un(rng), un(rng)};
        double r2 = x.norm2();
        if (r2 < 0.1) continue;
        double div = 2 * x.x * x.y / (r2 * r2) - 2 * x.y * x.x / (r2 * r2);
        worst = std::max(worst, std::abs(div));
    }
    CHECK(worst <= 1e-10);

    // and the evaluator matches a finite-difference divergence loosely
    DssField az = builtin_field("azimuthal", 2.0);
    double h = 1e-4, fd_worst = 0;
    for (int i = 0; i < 50; ++i) {
        Vec3 x{un(rng), un(rng), un(rng)};
        if (x.norm() < 0.5) continue;
        double div = 0;
        for (int d = 0; d < 3; ++d) {
            Vec3 xp = x, xm = x;
            xp[d] += h;
            xm[d] -= h;
            div += (az.eval(xp)[d] - az.eval(xm)[d]) / (2 * h);
        }
        fd_worst = std::max(fd_worst, std::abs(div));
    }
    CHECK(fd_worst <= 1e-6);

    // annulus-curl is divergence free by construction; same FD check
    DssField ac = builtin_field("annulus-curl", 2.0);
    fd_worst = 0;
    for (int i = 0; i < 50; ++i) {
        Vec3 x{un(rng), un(rng), un(rng)};
        if (x.norm() < 0.5) continue;
        double div = 0;
        for (int d = 0; d < 3; ++d) {
            Vec3 xp = x, xm = x;
            xp[d] += h;
            xm[d] -= h;
            div += (ac.eval(xp)[d] - ac.eval(xm)[d]) / (2 * h);
        }
        fd_worst = std::max(fd_worst, std::abs(div));
    }
    CHECK(fd_worst <= 1e-6);
}

TEST_CASE("Lorentz weak-L3 estimate") {
    // |{1/|x| > t}| is the ball of radius 1/t: quasinorm (4 pi/3)^{1/3}
    DssField ir = builtin_field("inverse-radius", 2.0);
    double expect = std::cbrt(4.0 * kPi / 3.0);
    double got = lorentz_3inf_estimate(ir, {64, 64, 64});
    CHECK(std::abs(got - expect) <= 0.02 * expect);

    // 1-homogeneity in the field amplitude: scale the annulus data
    {
        struct Scaled : AnnulusData {
            std::shared_ptr<const AnnulusData> base;
            double c;
            Vec3 eval(const Vec3& z) const override { return base->eval(z) * c; }
            std::uint64_t content_hash() const override { return 1; }
        };
        auto s = std::make_shared<Scaled>();
        s->base = std::shared_ptr<const AnnulusData>(&ir.annulus(), [](const AnnulusData*) {});
        s->c = 3.0;
        DssField scaled("scaled", FieldKind::Scalar, ScaleFactor(2.0), true, s);
        double got3 = lorentz_3inf_estimate(scaled, {32, 32, 32});
        double got1 = lorentz_3inf_estimate(ir, {32, 32, 32});
        CHECK(got3 == doctest::Approx(3.0 * got1).epsilon(1e-10));
    }

    // zero field
    {
        struct Zero : AnnulusData {
            Vec3 eval(const Vec3&) const override { return {}; }
            std::uint64_t content_hash() const override { return 0; }
        };
        DssField z("zero", FieldKind::Scalar, ScaleFactor(2.0), true, std::make_shared<Zero>());
        CHECK(lorentz_3inf_estimate(z, {16, 16, 16}) == 0.0);
    }

    CHECK_THROWS_AS(lorentz_3inf_estimate(ir, {0, 0, 0}), ConfigError);
}

TEST_CASE("annulus grid file round trip") {
    DssField bump = builtin_field("annulus-bump", 2.0);
    AnnulusGridSpec g{48, 32, 48};
    std::string path = "test_annulus.dat";
    write_annulus_file(path, bump, g);
    DssField back = read_annulus_file(path);
    CHECK(back.kind() == FieldKind::Scalar);
    CHECK(back.scale().lambda == doctest::Approx(2.0));

    // interpolated lookup vs the analytic evaluator, and the scaled lookup
    // round trip at |x| = lambda^{-3} * 1.5
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> un(-1.0, 1.0);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        Vec3 dir{un(rng), un(rng), un(rng)};
        if (dir.norm() < 0.1) continue;
        dir *= 1.0 / dir.norm();
        Vec3 x = dir * (1.5 / 8.0);  // lambda^{-3} * 1.5
        double a = back.eval_scalar(x);
        double b = bump.eval_scalar(x);
        worst = std::max(worst, std::abs(a - b));
    }
    CHECK(worst <= 5e-3);  // trilinear interpolation tolerance at this grid
    std::remove(path.c_str());
}

TEST_CASE("force profile transforms consistently") {
    DssForce f = builtin_force("test-pulse", 2.0);
    // f(x,t) = t^{-3/2} F(x/sqrt t, log t) and the DSS identity
    Vec3 x{1.0, 0.5, -0.25};
    double t = 1.7;
    Vec3 a = f.eval_physical(x, t);
    Vec3 b = f.eval_physical(x * 2.0, t * 4.0) * 8.0;
    CHECK((a - b).norm() <= 1e-12 * std::max(1e-12, a.norm()));
    DssForce none = builtin_force("none", 2.0);
    CHECK(none.is_zero());
    CHECK(none.eval_physical(x, t).norm() == 0.0);
}
