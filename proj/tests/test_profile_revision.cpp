#include "doctest.h"

#include <map>
#include <random>

#include "dssflow/profile_revision.hpp"
#include "oracles.hpp"

using namespace dssflow;

namespace {

// analytic erf profile as a stationary box Profile
Profile erf_profile(BoxPtr box) {
    Field f(box, 1);
    RealVec& p = f.phys_raw();
    const Box& b = *box;
    for (std::size_t i = 0; i < b.nphys(); ++i) {
        double r = b.radius()[i];
        p[i] = r > 1e-12 ? std::erf(r / 2.0) / r : 1.0 / std::sqrt(kPi);
    }
    std::vector<Field> smp;
    smp.push_back(std::move(f));
    return Profile(box, 1, 2.0 * std::log(2.0), true, std::move(smp));
}

// the azimuthal heat profile evaluated by production quadrature, cached
const Profile& azimuthal_profile(BoxPtr box) {
    static std::map<const Box*, Profile> cache;
    auto it = cache.find(box.get());
    if (it == cache.end()) {
        DssField az = builtin_field("azimuthal", 2.0);
        HeatQuadOptions opt;
        opt.tol = 1e-8;
        it = cache.emplace(box.get(), compute_profile(az, box, 1, opt, 2)).first;
    }
    return it->second;
}

}  // namespace

TEST_CASE("cutoff shape") {
    Cutoff cut(8.0);
    CHECK(cut.xi(3.9) == 0.0);
    CHECK(cut.xi(8.1) == 1.0);
    CHECK(cut.xi(6.0) > 0.0);
    CHECK(cut.xi(6.0) < 1.0);
    CHECK_THROWS_AS(Cutoff(-1.0), ConfigError);
}

TEST_CASE("newton correction: zero source and uniform ball") {
    BoxPtr box = Box::make(8.0, 32);
    Field zero(box, 1);
    zero.set_zero();
    Field wz = newton_correction(zero, 2);
    CHECK(l2_norm(wz) <= 1e-14);

    // uniform ball: outside, w = -(M/(4 pi)) y/|y|^3 with M the discrete mass
    Field ball(box, 1);
    double mass = 0;
    {
        RealVec& p = ball.phys_raw();
        const Box& b = *box;
        const int ss = 2;  // supersampled indicator
        for (int i = 0; i < b.N; ++i)
            for (int j = 0; j < b.N; ++j)
                for (int l = 0; l < b.N; ++l) {
                    int cnt = 0;
                    for (int a = 0; a < ss; ++a)
                        for (int c = 0; c < ss; ++c)
                            for (int d = 0; d < ss; ++d) {
                                double x = b.coord(i) + (a + 0.5) / ss * b.h() - 0.5 * b.h();
                                double y = b.coord(j) + (c + 0.5) / ss * b.h() - 0.5 * b.h();
                                double z = b.coord(l) + (d + 0.5) / ss * b.h() - 0.5 * b.h();
                                if (x * x + y * y + z * z < 1.0) ++cnt;
                            }
                    p[b.phys_index(i, j, l)] = double(cnt) / (ss * ss * ss);
                }
        for (double v : p) mass += v;
        mass *= b.h() * b.h() * b.h();
    }
    Field w = newton_correction(ball, 4);
    const Box& b = *box;
    int i2 = int(std::lround((2.0 + b.L) / b.h()));
    int i0 = int(std::lround((0.0 + b.L) / b.h()));
    std::size_t idx = b.phys_index(i2, i0, i0);
    double expect = -mass / (4.0 * kPi) * 2.0 / 8.0;  // -(M/4pi) y/|y|^3 at (2,0,0)
    CHECK(std::abs(w.phys()[idx] - expect) <= 1e-4 * std::abs(expect));
    CHECK(std::abs(w.phys()[b.nphys() + idx]) <= 1e-6);

    // support touching the boundary is a geometry error
    Field bad(box, 1);
    {
        RealVec& p = bad.phys_raw();
        std::fill(p.begin(), p.end(), 0.0);
        p[b.phys_index(0, 0, 0)] = 1.0;
    }
    CHECK_THROWS_AS(newton_correction(bad, 2), GeometryError);
}

TEST_CASE("revision certificates on the mini benchmark") {
    BoxPtr box = Box::make(16.0, 16);
    const Profile& V0 = azimuthal_profile(box);
    Profile Th0 = erf_profile(box);

    BoxPtr cert = certificate_grid(*box);
    RadialTaper taper = certificate_taper(*box);
    // certificate-grid profiles from the analytic forms where available:
    // theta is the erf profile, the azimuthal profile is recomputed
    DssField az = builtin_field("azimuthal", 2.0);
    HeatQuadOptions opt;
    opt.tol = 1e-7;
    Profile V0c = compute_profile(az, cert, 1, opt, 2, taper);
    Profile Th0c = [&] {
        Field f(cert, 1);
        RealVec& p = f.phys_raw();
        const Box& cb = *cert;
        for (std::size_t i = 0; i < cb.nphys(); ++i) {
            double r = cb.radius()[i];
            double v = r > 1e-12 ? std::erf(r / 2.0) / r : 1.0 / std::sqrt(kPi);
            p[i] = r >= taper.r1 ? 0.0 : v * taper(r);
        }
        std::vector<Field> smp;
        smp.push_back(std::move(f));
        return Profile(cert, 1, 2.0 * std::log(2.0), true, std::move(smp));
    }();

    ReviseOptions ropt;
    ropt.threads = 2;
    RevisedProfilePair rev = revise(V0, Th0, V0c, Th0c, 8.0, ropt);

    // divergence killed to round-off by the shim
    CHECK(rev.certs.div_residual_max <= 1e-10);
    // the domain-doubled solve satisfies its defining identity exactly
    CHECK(rev.certs.poisson_identity_residual <= 1e-10);
    // direct kernel quadrature agrees to its own (second-order) accuracy
    CHECK(rev.certs.w_kernel_crosscheck <= 0.05);
    // w decays like |y|^{-2}
    CHECK(rev.certs.w_decay_exponent >= 1.9);
    // theta* vanishes inside R0/2 exactly
    {
        const Field& th = rev.Thetastar.sample(0);
        const RealVec& p = th.phys();
        const Box& bb = *box;
        double worst = 0;
        for (std::size_t i = 0; i < bb.nphys(); ++i)
            if (bb.radius()[i] < 4.0 - 1e-9) worst = std::max(worst, std::abs(p[i]));
        CHECK(worst == 0.0);
    }
    // revision leaves the field alone far out: V* = V0 + w for |y| > R0
    {
        const RealVec& pv = rev.Vstar.sample(0).phys();
        const RealVec& p0 = V0.sample(0).phys();
        const Box& bb = *box;
        // compare the azimuthal parts along an axis far outside R0
        int i0 = int(std::lround((0.0 + bb.L) / bb.h()));
        int i12 = int(std::lround((12.0 + bb.L) / bb.h()));
        std::size_t idx = bb.phys_index(i12, i0, i0);
        // w is O(|y|^-2) there; the difference must be small but need not vanish
        CHECK(std::abs(pv[bb.nphys() + idx] - p0[bb.nphys() + idx]) <= 0.05);
    }
    CHECK(rev.certs.vstar_minus_v0_l2 > 0);
    CHECK(rev.certs.L_vstar_l2 > 0);
    CHECK(rev.certs.L_thetastar_l2 > 0);
    CHECK(std::isfinite(rev.certs.l4_norm));
    // L Theta* concentrates on the cutoff shell
    CHECK(rev.certs.shell_fraction_LTheta >= 0.99);
}

TEST_CASE("choose_R0: immediate success, monotone tails, unreachable error") {
    BoxPtr box = Box::make(16.0, 16);
    const Profile& V0 = azimuthal_profile(box);
    Profile Th0 = erf_profile(box);
    ReviseOptions ropt;
    ropt.threads = 2;
    ropt.poisson_pad = 2;

    double huge = 1e9;
    CHECK(choose_R0(V0, Th0, huge, 10.0 / 3.0, ropt) == 2.0);

    // achieved norm decreases along the doubling sequence
    ReviseOptions lite = ropt;
    lite.with_certificates = false;
    double prev = 1e300;
    for (double R0 : {2.0, 4.0, 8.0}) {
        RevisedProfilePair rp = revise(V0, Th0, V0, Th0, R0, lite);
        CHECK(rp.certs.lq_norm <= prev * 1.001);
        prev = rp.certs.lq_norm;
    }

    try {
        choose_R0(V0, Th0, 1e-6, 10.0 / 3.0, ropt);
        CHECK(false);
    } catch (const ConvergenceError& e) {
        CHECK(e.achieved > 1e-6);
        CHECK(std::string(e.what()).find("enlarge the box") != std::string::npos);
    }

    CHECK_THROWS_AS(choose_R0(V0, Th0, 1.0, 5.0, ropt), ConfigError);
}
