#include "dssflow/reconstruct.hpp"

#include <cmath>

namespace dssflow {

std::vector<GalerkinState> orbit_snapshots(const PoincareMap& map, const std::vector<double>& x,
                                           int n_snap) {
    const SystemData& data = map.data();
    // step size refitted so snapshots land exactly on nodes
    int m = std::max(1, int(std::ceil(data.T / (n_snap * map.ds()) - 1e-12)));
    StepControls ctl;
    ctl.ds = data.T / (n_snap * m);
    ctl.record_residuals = false;
    FlowRunner runner(data, ctl);

    std::vector<GalerkinState> orbit;
    GalerkinState st = map.layout().unpack(x, map.s0());
    orbit.push_back(st);
    for (int j = 0; j < n_snap; ++j) {
        runner.run(st, m, nullptr);
        orbit.push_back(st);
    }
    return orbit;  // n_snap + 1 states, last is the closure at s0 + T
}

PhysicalSolution::PhysicalSolution(const SystemData& data,
                                   const std::vector<GalerkinState>& orbit) {
    if (orbit.size() < 2) throw UsageError("physical solution needs orbit snapshots");
    box_ = data.box;
    T_ = data.T;
    r_certified_ = box_->drift_window_fraction * box_->L;
    const int n = int(orbit.size()) - 1;  // last snapshot is the closure

    std::vector<Field> vt, tt, pp;
    Field sV, sT;
    for (int j = 0; j < n; ++j) {
        const GalerkinState& st = orbit[j];
        Field V = data.profiles.Vstar.stationary()
                      ? data.profiles.Vstar.sample(0).clone()
                      : data.profiles.Vstar.at(st.s);
        V.axpy(1.0, st.U);
        Field Th = data.profiles.Thetastar.stationary()
                       ? data.profiles.Thetastar.sample(0).clone()
                       : data.profiles.Thetastar.at(st.s);
        Th.axpy(1.0, st.Psi);
        PressureField pf = pressure(assemble_F_all(st, data));
        vt.push_back(std::move(V));
        tt.push_back(std::move(Th));
        pp.push_back(std::move(pf.P));
    }
    Vtot_ = Profile(box_, 3, T_, n == 1, std::move(vt));
    Thtot_ = Profile(box_, 1, T_, n == 1, std::move(tt));
    Pres_ = Profile(box_, 1, T_, n == 1, std::move(pp));
}

Vec3 eval_field_point(const Field& f, const Vec3& y) {
    const Box& b = f.box();
    const CplxVec& s = f.spec();
    const int N = b.N, H = b.nhalf();
    Vec3 out{};
    for (int c = 0; c < f.ncomp(); ++c) {
        const Cplx* sc = s.data() + c * b.nspec();
        Cplx plane_sum = 0.0;
        double dbl_sum = 0.0;
        std::size_t idx = 0;
        for (int i = 0; i < N; ++i) {
            double kx = b.kfull(i);
            for (int j = 0; j < N; ++j) {
                double ky = b.kfull(j);
                double ph0 = kx * y.x + ky * y.y;
                for (int l = 0; l < H; ++l, ++idx) {
                    double ph = ph0 + b.khalf(l) * y.z;
                    Cplx e(std::cos(ph), std::sin(ph));
                    if (l == 0 || l == N / 2)
                        plane_sum += sc[idx] * e;
                    else
                        dbl_sum += 2.0 * (sc[idx] * e).real();
                }
            }
        }
        out[c] = plane_sum.real() + dbl_sum;
    }
    return out;
}

PhysicalSolution::Values PhysicalSolution::eval(const Vec3& x, double t) const {
    if (!(t > 0)) throw UsageError("physical solution defined for t > 0");
    double st = std::sqrt(t);
    Vec3 y = x * (1.0 / st);
    if (y.norm() > r_certified_)
        throw ExtrapolationError("evaluation point outside the certified interior");
    double s = std::fmod(std::log(t), T_);
    if (s < 0) s += T_;

    Field V = Vtot_.at(s), Th = Thtot_.at(s), P = Pres_.at(s);
    Values out;
    out.v = eval_field_point(V, y) * (1.0 / st);
    out.theta = eval_field_point(Th, y).x / st;
    out.p = eval_field_point(P, y).x / t;
    return out;
}

// ---- quarter power ---------------------------------------------------------------

QuarterPowerReport quarter_power_check(const SystemData& data,
                                       const std::vector<GalerkinState>& orbit,
                                       const std::vector<double>& t_samples) {
    QuarterPowerReport rep;
    const int n = int(orbit.size()) - 1;
    Field sV;
    auto g_of = [&](const GalerkinState& st) {
        const Field& V0s = data.V0.stationary() ? data.V0.sample(0) : (sV = data.V0.at(st.s), sV);
        Field diff = data.profiles.Vstar.stationary() ? data.profiles.Vstar.sample(0).clone()
                                                      : data.profiles.Vstar.at(st.s);
        diff.axpy(1.0, st.U);
        diff.axpy(-1.0, V0s);
        return l2_norm(diff);
    };

    rep.sup_g = 0;
    for (int j = 0; j < n; ++j) {
        double g = g_of(orbit[j]);
        rep.g_series.emplace_back(orbit[j].s, g);
        rep.sup_g = std::max(rep.sup_g, g);
    }
    rep.periodicity_gap = std::abs(g_of(orbit.front()) - g_of(orbit.back()));

    // physical-space route: || v(t) - e^{t Lap} v0 ||_{L2} over the image of
    // the box under x = sqrt(t) y equals t^{1/4} g(log t mod T)
    PhysicalSolution sol(data, orbit);
    rep.two_route_max_rel = 0;
    for (double t : t_samples) {
        double s = std::fmod(std::log(t), data.T);
        if (s < 0) s += data.T;
        Field V = sol.V_at(s);
        const Field& V0s = data.V0.stationary() ? data.V0.sample(0) : (sV = data.V0.at(s), sV);
        const Box& b = *data.box;
        // quadrature in physical coordinates x = sqrt(t) y
        double st = std::sqrt(t);
        double hx = st * b.h();
        const RealVec& pv = V.phys();
        const RealVec& p0 = V0s.phys();
        double sum = 0;
        for (std::size_t i = 0; i < b.nphys(); ++i)
            for (int c = 0; c < 3; ++c) {
                double d = (pv[c * b.nphys() + i] - p0[c * b.nphys() + i]) / st;
                sum += d * d;
            }
        double routeB = std::sqrt(sum * hx * hx * hx);
        // interpolate g at s via the stored series
        double gA = 0;
        {
            // build interpolation over the g series nodes
            int ns = int(rep.g_series.size());
            if (ns == 1) {
                gA = rep.g_series[0].second;
            } else {
                for (int j = 0; j < ns; ++j) {
                    double u = 2.0 * kPi * (s - rep.g_series[j].first) / data.T;
                    double su = std::sin(0.5 * u);
                    double w;
                    if (std::abs(su) < 1e-14) w = 1.0;
                    else if (ns % 2 == 0) w = std::sin(0.5 * ns * u) / std::tan(0.5 * u) / ns;
                    else w = std::sin(0.5 * ns * u) / su / ns;
                    gA += w * rep.g_series[j].second;
                }
            }
        }
        double routeA = std::pow(t, 0.25) * gA;
        double denom = std::max({routeA, routeB, 1e-300});
        rep.two_route_max_rel = std::max(rep.two_route_max_rel, std::abs(routeA - routeB) / denom);
    }
    return rep;
}

// ---- local energy ------------------------------------------------------------------

double SpaceTimeBump::space(double r) const {
    double u = r / radius;
    if (u >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - u * u)) * std::exp(1.0);  // normalized to 1 at r = 0
}

double SpaceTimeBump::space_d1(double r) const {
    double u = r / radius;
    if (u >= 1.0) return 0.0;
    double q = 1.0 - u * u;
    return space(r) * (-2.0 * u / (q * q)) / radius;
}

double SpaceTimeBump::space_d2(double r) const {
    double u = r / radius;
    if (u >= 1.0) return 0.0;
    double q = 1.0 - u * u;
    double b = space(r);
    double d1u = -2.0 * u / (q * q);
    double d2u = (4.0 * u * u / (q * q * q * q)) - 2.0 / (q * q) - 8.0 * u * u / (q * q * q);
    return (b * d1u * d1u + b * d2u) / (radius * radius);
}

double SpaceTimeBump::time(double s) const {
    return smoothstep((s - s0) / sw) * (1.0 - smoothstep((s - s1) / sw));
}

double SpaceTimeBump::time_ds(double s) const {
    return smoothstep_deriv((s - s0) / sw) / sw * (1.0 - smoothstep((s - s1) / sw)) -
           smoothstep((s - s0) / sw) * smoothstep_deriv((s - s1) / sw) / sw;
}

double SpaceTimeBump::value(const Vec3& y, double s) const {
    return space((y - center).norm()) * time(s);
}

double SpaceTimeBump::ds(const Vec3& y, double s) const {
    return space((y - center).norm()) * time_ds(s);
}

Vec3 SpaceTimeBump::grad(const Vec3& y, double s) const {
    Vec3 d = y - center;
    double r = d.norm();
    if (r < 1e-14) return {};
    return d * (space_d1(r) / r * time(s));
}

double SpaceTimeBump::lap(const Vec3& y, double s) const {
    double r = (y - center).norm();
    if (r < 1e-12) return 3.0 * space_d2(0.0) * time(s);
    return (space_d2(r) + 2.0 * space_d1(r) / r) * time(s);
}

std::vector<SpaceTimeBump> bump_family(const Box& box, double T) {
    std::vector<SpaceTimeBump> out;
    const double R = 0.25 * box.L;
    const double tw = 0.08 * T;
    auto add = [&](Vec3 c, double rad, double a, double b) {
        out.push_back({c, rad, a * T, b * T, tw});
    };
    // origin region
    add({0, 0, 0}, R, 0.15, 0.8);
    add({0, 0, 0}, 1.6 * R, 0.15, 0.45);
    add({0, 0, 0}, 1.6 * R, 0.5, 0.8);
    // mid-shell placements
    double rc = 0.4 * box.L;
    add({rc, 0, 0}, R, 0.15, 0.8);
    add({0, rc, 0}, R, 0.15, 0.8);
    add({0, 0, rc}, R, 0.15, 0.45);
    add({-rc, 0, 0}, R, 0.5, 0.8);
    add({0.7 * rc, 0.7 * rc, 0}, R, 0.15, 0.8);
    // early / late time emphasis
    add({0, 0, 0.5 * rc}, 1.3 * R, 0.12, 0.3);
    add({0.5 * rc, 0, -0.5 * rc}, 1.3 * R, 0.62, 0.85);
    return out;
}

LocalEnergyResidual local_energy_residual(const SystemData& data,
                                          const std::vector<GalerkinState>& orbit,
                                          const SpaceTimeBump& bump) {
    if (bump.s0 < 0 || bump.s1 > data.T)
        throw UsageError("bump time window must sit inside one period");
    if (bump.radius <= 0) throw UsageError("bump radius must be positive");

    PhysicalSolution sol(data, orbit);
    const Box& b = *data.box;
    const std::size_t np = b.nphys();
    const double h3 = b.h() * b.h() * b.h();

    // s-quadrature over the bump window
    const int nsq = 16;
    const auto& [gx, gw] = gauss_legendre(nsq);
    double slo = std::max(0.0, bump.s0 - 2.0 * bump.sw);
    double shi = std::min(data.T, bump.s1 + 2.0 * bump.sw);

    double lhs_v = 0, rhs_v = 0, lhs_t = 0, rhs_t = 0;
    double mag_v = 0, mag_t = 0;

    Field sF;
    for (int iq = 0; iq < nsq; ++iq) {
        double s = 0.5 * (slo + shi) + 0.5 * (shi - slo) * gx[iq];
        double wq = 0.5 * (shi - slo) * gw[iq] * std::exp(0.5 * s);

        Field V = sol.V_at(s);
        Field Th = sol.Theta_at(s);
        Field P = sol.P_at(s);
        const Field& F = data.force.stationary() ? data.force.sample(0)
                                                 : (sF = data.force.at(s), sF);

        Field gradV[3] = {derivative(V, 0), derivative(V, 1), derivative(V, 2)};
        Field gradT[3] = {derivative(Th, 0), derivative(Th, 1), derivative(Th, 2)};

        const RealVec& pv = V.phys();
        const RealVec& pt = Th.phys();
        const RealVec& pp = P.phys();
        const RealVec& pf = F.phys();
        const RealVec& pg = data.grav.phys();
        const double* gvp[3] = {gradV[0].phys().data(), gradV[1].phys().data(),
                                gradV[2].phys().data()};
        const double* gtp[3] = {gradT[0].phys().data(), gradT[1].phys().data(),
                                gradT[2].phys().data()};

        double lv = 0, rv = 0, lt = 0, rt = 0, mv = 0, mt = 0;
        for (int i = 0; i < b.N; ++i)
            for (int j = 0; j < b.N; ++j)
                for (int l = 0; l < b.N; ++l) {
                    std::size_t idx = b.phys_index(i, j, l);
                    Vec3 y{b.coord(i), b.coord(j), b.coord(l)};
                    double phi = bump.value(y, s);
                    Vec3 gphi = bump.grad(y, s);
                    double adv_phi = bump.ds(y, s) + bump.lap(y, s) -
                                     0.5 * y.dot(gphi);
                    if (phi == 0 && gphi.norm2() == 0 && adv_phi == 0) continue;

                    Vec3 Vv{pv[idx], pv[np + idx], pv[2 * np + idx]};
                    double th = pt[idx];
                    double pr = pp[idx];
                    Vec3 Fv{pf[idx], pf[np + idx], pf[2 * np + idx]};
                    Vec3 Gv{pg[idx], pg[np + idx], pg[2 * np + idx]};

                    double gv2 = 0, gt2 = 0;
                    for (int d = 0; d < 3; ++d) {
                        for (int c = 0; c < 3; ++c)
                            gv2 += gvp[d][c * np + idx] * gvp[d][c * np + idx];
                        gt2 += gtp[d][idx] * gtp[d][idx];
                    }

                    double v2 = Vv.norm2();
                    lv += 2.0 * gv2 * phi;
                    rv += v2 * adv_phi + (v2 + 2.0 * pr) * Vv.dot(gphi) +
                          (Gv * th + Fv).dot(Vv) * phi;
                    lt += 2.0 * gt2 * phi;
                    rt += th * th * adv_phi + th * th * Vv.dot(gphi);
                    mv += std::abs(v2 * adv_phi) + 2.0 * gv2 * phi;
                    mt += std::abs(th * th * adv_phi) + 2.0 * gt2 * phi;
                }
        lhs_v += wq * lv * h3;
        rhs_v += wq * rv * h3;
        lhs_t += wq * lt * h3;
        rhs_t += wq * rt * h3;
        mag_v += wq * mv * h3;
        mag_t += wq * mt * h3;
    }

    LocalEnergyResidual out;
    out.res_v = rhs_v - lhs_v;
    out.res_theta = rhs_t - lhs_t;
    out.scale_v = std::max(mag_v, 1e-300);
    out.scale_theta = std::max(mag_t, 1e-300);
    return out;
}

}  // namespace dssflow
