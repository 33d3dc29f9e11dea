#pragma once

// Shared test systems. The synthetic system uses analytic profiles so the
// dynamics/solver identity tests run without any heat quadrature.

#include <memory>
#include <random>

#include "dssflow/dynamics.hpp"
#include "oracles.hpp"

namespace fixtures {

using namespace dssflow;

inline Profile single(BoxPtr box, Field f, double T) {
    std::vector<Field> smp;
    smp.push_back(std::move(f));
    return Profile(box, smp[0].ncomp(), T, true, std::move(smp));
}

// smooth solenoidal vector profile supported inside the drift window
inline Field synthetic_vstar(BoxPtr box, double amp) {
    const Box& b = *box;
    Field f(box, 3);
    RealVec& p = f.phys_raw();
    const std::size_t np = b.nphys();
    double w = 0.3 * b.L;
    for (int i = 0; i < b.N; ++i)
        for (int j = 0; j < b.N; ++j)
            for (int l = 0; l < b.N; ++l) {
                std::size_t idx = b.phys_index(i, j, l);
                Vec3 y{b.coord(i), b.coord(j), b.coord(l)};
                double env = std::exp(-y.norm2() / (2.0 * w * w));
                // curl of (0, 0, env)-like: solenoidal up to projection
                p[idx] = amp * env * (-y.y / w);
                p[np + idx] = amp * env * (y.x / w);
                p[2 * np + idx] = amp * env * 0.3 * std::cos(kPi * y.x / b.L);
            }
    dealias(f);
    leray_project(f);
    return f;
}

inline Field synthetic_theta(BoxPtr box, double amp) {
    const Box& b = *box;
    Field f(box, 1);
    RealVec& p = f.phys_raw();
    double w = 0.3 * b.L;
    for (std::size_t i = 0; i < b.nphys(); ++i) {
        double r = b.radius()[i];
        p[i] = amp * std::exp(-r * r / (2.0 * w * w));
    }
    dealias(f);
    return f;
}

// Fully assembled system with analytic profiles; L V*, L Theta* applied on
// the box itself (enough for the discrete identities).
inline std::unique_ptr<SystemData> synthetic_system(BoxPtr box, double amp,
                                                    double epsilon = 0.1) {
    double T = 2.0 * std::log(2.0);
    RevisedProfilePair rev;
    rev.R0 = 0.25 * box->L;
    Field vs = synthetic_vstar(box, amp);
    Field th = synthetic_theta(box, 0.7 * amp);
    rev.Vstar = single(box, vs.clone(), T);
    rev.Thetastar = single(box, th.clone(), T);

    Field Lv = laplacian(vs);
    Lv.scale(-1.0);
    Lv.axpy(-0.5, vs);
    Lv.axpy(-1.0, drift_term(vs));
    Field Lt = laplacian(th);
    Lt.scale(-1.0);
    Lt.axpy(-0.5, th);
    Lt.axpy(-1.0, drift_term(th));
    rev.LVstar = single(box, std::move(Lv), T);
    rev.LThetastar = single(box, std::move(Lt), T);

    rev.certs.vstar_l4 = lq_norm_with_tail(rev.Vstar, 4.0);
    rev.certs.thetastar_l4 = lq_norm_with_tail(rev.Thetastar, 4.0);
    rev.certs.grad_thetastar_l2 = std::sqrt(grad_norm_sq(th));
    rev.certs.L_vstar_hm1 = hminus1_norm(rev.LVstar.sample(0));
    rev.certs.L_thetastar_hm1 = hminus1_norm(rev.LThetastar.sample(0));

    Field zero_v(box, 3), zero_s(box, 1);
    zero_v.set_zero();
    zero_s.set_zero();
    Profile V0 = single(box, std::move(zero_v), T);
    Profile Th0 = single(box, std::move(zero_s), T);

    return std::make_unique<SystemData>(build_system(
        box, std::move(rev), std::move(V0), std::move(Th0), DssForce(), 1, epsilon, 0.0));
}

inline std::unique_ptr<SystemData> zero_system(BoxPtr box) { return synthetic_system(box, 0.0); }

// same system with every profile and source zeroed, constants kept
inline std::unique_ptr<SystemData> strip_sources(const SystemData& src) {
    auto out = std::make_unique<SystemData>();
    out->box = src.box;
    out->T = src.T;
    double T = src.T;
    BoxPtr box = src.box;
    Field zv(box, 3), zs(box, 1);
    zv.set_zero();
    zs.set_zero();
    out->profiles.Vstar = single(box, zv.clone(), T);
    out->profiles.Thetastar = single(box, zs.clone(), T);
    out->profiles.LVstar = single(box, zv.clone(), T);
    out->profiles.LThetastar = single(box, zs.clone(), T);
    out->V0 = single(box, zv.clone(), T);
    out->Theta0 = single(box, zs.clone(), T);
    out->force = single(box, zv.clone(), T);
    out->mollifier.emplace(box, src.mollifier->epsilon());
    out->grav = src.grav.clone();
    out->grav_delta = src.grav_delta;
    out->consts = src.consts;  // keep the coupling weights of the full system
    out->Rb_src = single(box, zv.clone(), T);
    out->Rq_src = single(box, zs.clone(), T);
    return out;
}

inline GalerkinState random_state(BoxPtr box, unsigned seed, double amp) {
    std::mt19937_64 rng(seed);
    GalerkinState st = zero_state(box);
    st.U = oracle::windowed_vector(box, rng, true);
    st.U.scale(amp / std::max(1e-12, l2_norm(st.U)));
    st.Psi = oracle::windowed_scalar(box, rng);
    st.Psi.scale(amp / std::max(1e-12, l2_norm(st.Psi)));
    return st;
}

}  // namespace fixtures
