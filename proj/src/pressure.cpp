#include "dssflow/pressure.hpp"

#include <cmath>

namespace dssflow {

namespace {
Field scalar_times_vector_raw(const Field& scalar, const Field& vec) {
    const Box& b = scalar.box();
    Field out(vec.box_ptr(), 3);
    RealVec& o = out.phys_raw();
    const RealVec& sp = scalar.phys();
    const RealVec& vp = vec.phys();
    const std::size_t np = b.nphys();
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < np; ++i) o[c * np + i] = sp[i] * vp[c * np + i];
    dealias(out);
    return out;
}
}  // namespace

Field assemble_F_all(const GalerkinState& st, const SystemData& data) {
    Field sV, sT, sF;
    const Field& Vs = data.profiles.Vstar.stationary() ? data.profiles.Vstar.sample(0)
                                                       : (sV = data.profiles.Vstar.at(st.s), sV);
    const Field& Ts = data.profiles.Thetastar.stationary()
                          ? data.profiles.Thetastar.sample(0)
                          : (sT = data.profiles.Thetastar.at(st.s), sT);
    const Field& Fs =
        data.force.stationary() ? data.force.sample(0) : (sF = data.force.at(st.s), sF);

    Field total_v = Vs.clone();
    total_v.axpy(1.0, st.U);
    Field adv = Vs.clone();
    adv.axpy(1.0, data.mollifier->apply(st.U));

    Field theta = Ts.clone();
    theta.axpy(1.0, st.Psi);

    Field out = convect(adv, total_v);
    out.scale(-1.0);
    out.axpy(1.0, scalar_times_vector_raw(theta, data.grav));
    out.axpy(1.0, Fs);
    return out;
}

PressureField pressure(const Field& F_all) {
    if (F_all.ncomp() != 3) throw UsageError("pressure expects a vector source");
    const Box& b = F_all.box();
    Field P(F_all.box_ptr(), 1);
    CplxVec& o = P.spec_raw();
    const CplxVec& s = F_all.spec();
    const int N = b.N, H = b.nhalf();
    std::size_t idx = 0;
    for (int i = 0; i < N; ++i) {
        double kx = b.kfull(i);
        for (int j = 0; j < N; ++j) {
            double ky = b.kfull(j);
            for (int l = 0; l < H; ++l, ++idx) {
                double kz = b.khalf(l);
                double k2 = kx * kx + ky * ky + kz * kz;
                if (k2 == 0.0) {
                    o[idx] = 0.0;  // zero-mean gauge
                    continue;
                }
                Cplx divf = Cplx(0.0, 1.0) *
                            (kx * s[idx] + ky * s[b.nspec() + idx] + kz * s[2 * b.nspec() + idx]);
                o[idx] = -divf / k2;
            }
        }
    }
    PressureField pf{std::move(P), F_all.clone(), 0.0};
    Field resid = laplacian(pf.P);
    resid.axpy(-1.0, divergence(pf.F_all));
    double denom = l2_norm(pf.F_all);
    pf.residual = denom > 0 ? l2_norm(resid) / denom : l2_norm(resid);
    return pf;
}

PressureBoundReport pressure_bound_check(const std::vector<GalerkinState>& orbit,
                                         const SystemData& data) {
    PressureBoundReport rep{0, 0, 0, 0, false};
    if (orbit.empty()) throw UsageError("pressure_bound_check needs orbit snapshots");
    const double wt = data.T / orbit.size();
    double p53 = 0, u103 = 0, v103 = 0;
    for (const auto& st : orbit) {
        Field fa = assemble_F_all(st, data);
        PressureField pf = pressure(fa);
        p53 += wt * std::pow(lp_norm_phys(pf.P, 5.0 / 3.0), 5.0 / 3.0);
        u103 += wt * std::pow(lp_norm_phys(st.U, 10.0 / 3.0), 10.0 / 3.0);
        Field sV;
        const Field& Vs = data.profiles.Vstar.stationary()
                              ? data.profiles.Vstar.sample(0)
                              : (sV = data.profiles.Vstar.at(st.s), sV);
        v103 += wt * std::pow(lp_norm_phys(Vs, 10.0 / 3.0), 10.0 / 3.0);
    }
    rep.p_norm = std::pow(p53, 3.0 / 5.0);
    rep.u_norm = std::pow(u103, 2.0 * 3.0 / 10.0);
    rep.vstar_norm = std::pow(v103, 2.0 * 3.0 / 10.0);
    double denom = rep.u_norm + rep.vstar_norm;
    if (denom < 1e-300) {
        rep.degenerate = true;
        rep.ratio = -1;
    } else {
        rep.ratio = rep.p_norm / denom;
    }
    return rep;
}

}  // namespace dssflow
