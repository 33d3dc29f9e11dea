#include "dssflow/profile_revision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dssflow {

double Cutoff::xi_deriv(double r) const { return smoothstep_deriv(2.0 * r / R0 - 1.0) * 2.0 / R0; }

namespace {

// pointwise xi * f
Field cutoff_multiply(const Cutoff& cut, const Field& f) {
    const Box& b = f.box();
    Field out(f.box_ptr(), f.ncomp());
    RealVec& o = out.phys_raw();
    const RealVec& p = f.phys();
    const RealVec& r = b.radius();
    const std::size_t np = b.nphys();
    for (int c = 0; c < f.ncomp(); ++c)
        for (std::size_t i = 0; i < np; ++i) o[c * np + i] = cut.xi(r[i]) * p[c * np + i];
    return out;
}

// grad xi . V, a scalar supported on the cutoff shell
Field cutoff_source(const Cutoff& cut, const Field& V) {
    const Box& b = V.box();
    Field out(V.box_ptr(), 1);
    RealVec& o = out.phys_raw();
    const RealVec& p = V.phys();
    const RealVec& r = b.radius();
    const std::size_t np = b.nphys();
    for (int i = 0; i < b.N; ++i)
        for (int j = 0; j < b.N; ++j)
            for (int l = 0; l < b.N; ++l) {
                std::size_t idx = b.phys_index(i, j, l);
                double rr = r[idx];
                double xp = rr > 0 ? cut.xi_deriv(rr) / rr : 0.0;
                o[idx] = xp * (b.coord(i) * p[idx] + b.coord(j) * p[np + idx] +
                               b.coord(l) * p[2 * np + idx]);
            }
    return out;
}

// periodic gradient shim killing the residual spectral divergence on the box
Field divergence_shim(const Field& vstar_main) {
    const Box& b = vstar_main.box();
    Field d = divergence(vstar_main);
    Field out(vstar_main.box_ptr(), 3);
    CplxVec& o = out.spec_raw();
    std::fill(o.begin(), o.end(), Cplx(0.0));
    const CplxVec& ds = d.spec();
    const int N = b.N, H = b.nhalf();
    std::size_t idx = 0;
    for (int i = 0; i < N; ++i) {
        double kx = b.kfull(i);
        for (int j = 0; j < N; ++j) {
            double ky = b.kfull(j);
            for (int l = 0; l < H; ++l, ++idx) {
                double kz = b.khalf(l);
                double k2 = kx * kx + ky * ky + kz * kz;
                if (k2 == 0.0) continue;
                Cplx psi = ds[idx] / k2;  // Delta psi = -div
                o[idx] = Cplx(0.0, -kx) * psi;
                o[b.nspec() + idx] = Cplx(0.0, -ky) * psi;
                o[2 * b.nspec() + idx] = Cplx(0.0, -kz) * psi;
            }
        }
    }
    return out;
}

double max_component_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.phys()) m = std::max(m, std::abs(v));
    return m;
}

double decay_exponent(const Field& w) {
    const Box& b = w.box();
    const RealVec& p = w.phys();
    const RealVec& r = b.radius();
    const std::size_t np = b.nphys();
    double edges[3] = {b.L * 0.2, b.L * 0.4, b.L * 0.8};
    double rms[2] = {0, 0};
    std::size_t cnt[2] = {0, 0};
    double rmid[2] = {std::sqrt(edges[0] * edges[1]), std::sqrt(edges[1] * edges[2])};
    for (std::size_t i = 0; i < np; ++i) {
        int s = -1;
        if (r[i] > edges[0] && r[i] <= edges[1]) s = 0;
        else if (r[i] > edges[1] && r[i] <= edges[2]) s = 1;
        if (s < 0) continue;
        double m2 = 0;
        for (int c = 0; c < 3; ++c) m2 += p[c * np + i] * p[c * np + i];
        rms[s] += m2;
        cnt[s]++;
    }
    if (!cnt[0] || !cnt[1] || rms[1] == 0) return 0.0;
    double a0 = std::sqrt(rms[0] / cnt[0]), a1 = std::sqrt(rms[1] / cnt[1]);
    return std::log(a0 / a1) / std::log(rmid[1] / rmid[0]);
}

// direct Newtonian-kernel quadrature at probe points, the independent route
double kernel_crosscheck(const Field& g, const Field& w_box, const Cutoff& cut) {
    const Box& b = g.box();
    const RealVec& gv = g.phys();
    const RealVec& wv = w_box.phys();
    const std::size_t np = b.nphys();
    const double h3 = b.h() * b.h() * b.h();

    struct Src {
        Vec3 z;
        double q;
    };
    std::vector<Src> cells;
    double gmax = max_component_abs(g);
    if (gmax == 0) return 0.0;
    for (int i = 0; i < b.N; ++i)
        for (int j = 0; j < b.N; ++j)
            for (int l = 0; l < b.N; ++l) {
                double q = gv[b.phys_index(i, j, l)];
                if (std::abs(q) > 1e-14 * gmax)
                    cells.push_back({{b.coord(i), b.coord(j), b.coord(l)}, q * h3});
            }
    if (cells.empty()) return 0.0;

    std::vector<double> rel;
    for (int probe = 0; probe < 12; ++probe) {
        double ang = 2.0 * kPi * probe / 12.0;
        Vec3 y{1.3 * cut.R0 * std::cos(ang), 1.3 * cut.R0 * std::sin(ang), 0.35 * cut.R0};
        int gi = int(std::lround((y.x + b.L) / b.h()));
        int gj = int(std::lround((y.y + b.L) / b.h()));
        int gl = int(std::lround((y.z + b.L) / b.h()));
        if (gi < 0 || gi >= b.N || gj < 0 || gj >= b.N || gl < 0 || gl >= b.N) continue;
        y = {b.coord(gi), b.coord(gj), b.coord(gl)};
        Vec3 wd{};
        for (const auto& c : cells) {
            Vec3 d = y - c.z;
            double rr = d.norm();
            if (rr < 0.5 * b.h()) continue;
            wd += d * (-c.q / (4.0 * kPi * rr * rr * rr));
        }
        std::size_t idx = b.phys_index(gi, gj, gl);
        Vec3 ws{wv[idx], wv[np + idx], wv[2 * np + idx]};
        double denom = std::max(ws.norm(), 1e-300);
        rel.push_back((wd - ws).norm() / denom);
    }
    if (rel.empty()) return 0.0;
    std::nth_element(rel.begin(), rel.begin() + rel.size() / 2, rel.end());
    return rel[rel.size() / 2];
}

}  // namespace

Field newton_correction_padded(const Field& g, int pad) {
    if (g.ncomp() != 1) throw UsageError("newton correction expects a scalar source");
    const Box& b = g.box();
    {
        const RealVec& p = g.phys();
        double gmax = max_component_abs(g);
        double edge = 0.0;
        for (int i = 0; i < b.N; ++i)
            for (int j = 0; j < b.N; ++j)
                for (int l = 0; l < b.N; ++l) {
                    double m = std::max({std::abs(b.coord(i)), std::abs(b.coord(j)),
                                         std::abs(b.coord(l))});
                    if (m > 0.9 * b.L) edge = std::max(edge, std::abs(p[b.phys_index(i, j, l)]));
                }
        if (gmax > 0 && edge > 1e-12 * gmax)
            throw GeometryError("newton correction: source support touches the box boundary");
    }

    BoxPtr big = Box::make(pad * b.L, pad * b.N, b.dealias_fraction, b.drift_window_fraction);
    Field gp(big, 1);
    RealVec& gv = gp.phys_raw();
    std::fill(gv.begin(), gv.end(), 0.0);
    const RealVec& src = g.phys();
    int off = (pad - 1) * b.N / 2;
    for (int i = 0; i < b.N; ++i)
        for (int j = 0; j < b.N; ++j)
            for (int l = 0; l < b.N; ++l)
                gv[big->phys_index(i + off, j + off, l + off)] = src[b.phys_index(i, j, l)];

    // w = grad phi with Delta phi = -g, free space realized on the padded torus
    Field w(big, 3);
    CplxVec& o = w.spec_raw();
    std::fill(o.begin(), o.end(), Cplx(0.0));
    const CplxVec& gs = gp.spec();
    const int N = big->N, H = big->nhalf();
    std::size_t idx = 0;
    for (int i = 0; i < N; ++i) {
        double kx = big->kfull(i);
        for (int j = 0; j < N; ++j) {
            double ky = big->kfull(j);
            for (int l = 0; l < H; ++l, ++idx) {
                double kz = big->khalf(l);
                double k2 = kx * kx + ky * ky + kz * kz;
                if (k2 == 0.0) continue;
                Cplx phi = gs[idx] / k2;
                o[idx] = Cplx(0.0, kx) * phi;
                o[big->nspec() + idx] = Cplx(0.0, ky) * phi;
                o[2 * big->nspec() + idx] = Cplx(0.0, kz) * phi;
            }
        }
    }
    return w;
}

Field newton_correction(const Field& g, int pad) {
    Field w = newton_correction_padded(g, pad);
    return subsample_center(w, g.box_ptr());
}

RevisedProfilePair revise(const Profile& V0_box, const Profile& Theta0_box,
                          const Profile& V0_cert, const Profile& Theta0_cert, double R0,
                          const ReviseOptions& opt) {
    const Box& box = *V0_box.grid();
    if (!(R0 >= 1.0)) throw ConfigError("revise: R0 must be >= 1");
    if (box.L < 2.0 * R0) throw GeometryError("revise: box too small for R0 (need L >= 2 R0)");
    Cutoff cut(R0);

    RevisedProfilePair out;
    out.R0 = R0;
    out.certs.R0 = R0;
    out.certs.q = opt.q;
    out.certs.alpha_target = opt.alpha_target;

    // ---- solver-box profiles ----
    std::vector<Field> vstar, thstar;
    double divmax = 0, divl2 = 0, v0max = 0, dV0 = 0;
    for (int m = 0; m < V0_box.n_s(); ++m) {
        Field xiV0 = cutoff_multiply(cut, V0_box.sample(m));
        Field g = cutoff_source(cut, V0_box.sample(m));
        Field wp = newton_correction_padded(g, opt.poisson_pad);
        Field w = subsample_center(wp, V0_box.grid());

        if (m == 0 && opt.with_certificates) {
            BoxPtr big = wp.box_ptr();
            Field gpad(big, 1);
            RealVec& gv = gpad.phys_raw();
            std::fill(gv.begin(), gv.end(), 0.0);
            const RealVec& src = g.phys();
            int off = (opt.poisson_pad - 1) * box.N / 2;
            for (int i = 0; i < box.N; ++i)
                for (int j = 0; j < box.N; ++j)
                    for (int l = 0; l < box.N; ++l)
                        gv[big->phys_index(i + off, j + off, l + off)] =
                            src[box.phys_index(i, j, l)];
            Field resid = laplacian(wp);
            Field gg = gradient(gpad);
            resid.axpy(1.0, gg);
            double denom = l2_norm(gg);
            out.certs.poisson_identity_residual = denom > 0 ? l2_norm(resid) / denom : 0.0;
            out.certs.w_kernel_crosscheck = kernel_crosscheck(g, w, cut);
            out.certs.w_decay_exponent = decay_exponent(w);
        }

        Field main = xiV0.clone();
        main.axpy(1.0, w);
        Field shim = divergence_shim(main);
        if (opt.with_certificates && m == 0) {
            double wn = l2_norm(w);
            out.certs.shim_norm_fraction = wn > 0 ? l2_norm(shim) / wn : 0.0;
        }
        main.axpy(1.0, shim);

        Field dv = divergence(main);
        divmax = std::max(divmax, max_component_abs(dv));
        divl2 = std::max(divl2, l2_norm(dv));
        v0max = std::max(v0max, max_abs(V0_box.sample(m)));

        Field diff = main.clone();
        diff.axpy(-1.0, V0_box.sample(m));
        dV0 = std::max(dV0, l2_norm(diff));

        vstar.push_back(std::move(main));
    }
    for (int m = 0; m < Theta0_box.n_s(); ++m)
        thstar.push_back(cutoff_multiply(cut, Theta0_box.sample(m)));

    out.Vstar = Profile(V0_box.grid(), 3, V0_box.period(), V0_box.stationary(), std::move(vstar));
    out.Thetastar = Profile(Theta0_box.grid(), 1, Theta0_box.period(), Theta0_box.stationary(),
                            std::move(thstar));
    out.certs.div_residual_max = v0max > 0 ? divmax / v0max : divmax;
    out.certs.div_residual_l2 = divl2;
    out.certs.vstar_minus_v0_l2 = dV0;

    // ---- norms with analytic tails ----
    {
        std::vector<Field> sum;
        const std::size_t np = box.nphys();
        for (int m = 0; m < out.Vstar.n_s(); ++m) {
            const RealVec& pv = out.Vstar.sample(m).phys();
            const Field& th =
                out.Thetastar.sample(out.Thetastar.stationary() ? 0 : m % out.Thetastar.n_s());
            const RealVec& pt = th.phys();
            Field s(V0_box.grid(), 1);
            RealVec& o = s.phys_raw();
            for (std::size_t i = 0; i < np; ++i) {
                double v2 =
                    pv[i] * pv[i] + pv[np + i] * pv[np + i] + pv[2 * np + i] * pv[2 * np + i];
                o[i] = std::sqrt(v2) + std::abs(pt[i]);
            }
            sum.push_back(std::move(s));
        }
        Profile sum_prof(V0_box.grid(), 1, out.Vstar.period(), out.Vstar.stationary(),
                         std::move(sum));
        out.certs.lq_norm = lq_norm_with_tail(sum_prof, opt.q);
        out.certs.l4_norm = lq_norm_with_tail(sum_prof, 4.0);
    }
    out.certs.vstar_l4 = lq_norm_with_tail(out.Vstar, 4.0);
    out.certs.thetastar_l4 = lq_norm_with_tail(out.Thetastar, 4.0);
    out.certs.vstar_lq = lq_norm_with_tail(out.Vstar, opt.q);
    out.certs.thetastar_lq = lq_norm_with_tail(out.Thetastar, opt.q);
    {
        double g2 = 0;
        for (int m = 0; m < out.Thetastar.n_s(); ++m)
            g2 = std::max(g2, grad_norm_sq(out.Thetastar.sample(m)));
        out.certs.grad_thetastar_l2 = std::sqrt(g2);
    }

    if (!opt.with_certificates) return out;

    // ---- certificate-grid L profiles ----
    const Box& solver_box = box;
    BoxPtr cgrid = V0_cert.grid();
    RadialTaper taper = certificate_taper(solver_box);
    BoxPtr half = Box::make(2.0 * solver_box.L, 2 * solver_box.N, solver_box.dealias_fraction,
                            solver_box.drift_window_fraction);
    std::vector<Field> vstar_c, thstar_c;
    for (int m = 0; m < V0_cert.n_s(); ++m) {
        Field xiV0c = cutoff_multiply(cut, V0_cert.sample(m));  // V0_cert already tapered
        Field g = cutoff_source(
            cut, V0_box.sample(V0_box.stationary() ? 0 : m % V0_box.n_s()));
        Field wp = newton_correction_padded(g, opt.poisson_pad);
        Field w2 = subsample_center(wp, half);
        Field wc = spectral_pad(w2, cgrid);
        {
            RealVec& wv = wc.phys_mut();
            const RealVec& r = cgrid->radius();
            const std::size_t np = cgrid->nphys();
            for (int c = 0; c < 3; ++c)
                for (std::size_t i = 0; i < np; ++i) wv[c * np + i] *= taper(r[i]);
        }
        xiV0c.axpy(1.0, wc);
        vstar_c.push_back(std::move(xiV0c));
    }
    for (int m = 0; m < Theta0_cert.n_s(); ++m)
        thstar_c.push_back(cutoff_multiply(cut, Theta0_cert.sample(m)));

    Profile Vstar_cert(cgrid, 3, V0_cert.period(), V0_cert.stationary(), std::move(vstar_c));
    Profile Thetastar_cert(cgrid, 1, Theta0_cert.period(), Theta0_cert.stationary(),
                           std::move(thstar_c));

    Profile LV_cert = apply_L(Vstar_cert);
    Profile LT_cert = apply_L(Thetastar_cert);

    double lv2 = 0, lt2 = 0, lvh = 0, lth = 0;
    for (int m = 0; m < LV_cert.n_s(); ++m) {
        lv2 = std::max(lv2, l2_norm(LV_cert.sample(m)));
        lvh = std::max(lvh, hminus1_norm(LV_cert.sample(m)));
    }
    for (int m = 0; m < LT_cert.n_s(); ++m) {
        lt2 = std::max(lt2, l2_norm(LT_cert.sample(m)));
        lth = std::max(lth, hminus1_norm(LT_cert.sample(m)));
    }
    out.certs.L_vstar_l2 = lv2;
    out.certs.L_thetastar_l2 = lt2;
    out.certs.L_vstar_hm1 = lvh;
    out.certs.L_thetastar_hm1 = lth;

    {
        const Field& lt = LT_cert.sample(0);
        const RealVec& p = lt.phys();
        const RealVec& r = cgrid->radius();
        double shell = 0, inside = 0;
        double m0 = R0 / 2 - 2 * cgrid->h(), m1 = R0 + 2 * cgrid->h();
        for (std::size_t i = 0; i < cgrid->nphys(); ++i) {
            if (r[i] > 1.25 * solver_box.L) continue;
            double v2 = p[i] * p[i];
            inside += v2;
            if (r[i] >= m0 && r[i] <= m1) shell += v2;
        }
        out.certs.shell_fraction_LTheta = inside > 0 ? shell / inside : 0.0;
    }

    std::vector<Field> lv_box, lt_box;
    for (int m = 0; m < LV_cert.n_s(); ++m)
        lv_box.push_back(subsample_center(spectral_crop(LV_cert.sample(m), half), V0_box.grid()));
    for (int m = 0; m < LT_cert.n_s(); ++m)
        lt_box.push_back(subsample_center(spectral_crop(LT_cert.sample(m), half), V0_box.grid()));
    out.LVstar =
        Profile(V0_box.grid(), 3, LV_cert.period(), LV_cert.stationary(), std::move(lv_box));
    out.LThetastar =
        Profile(V0_box.grid(), 1, LT_cert.period(), LT_cert.stationary(), std::move(lt_box));

    return out;
}

double choose_R0(const Profile& V0_box, const Profile& Theta0_box, double alpha, double q,
                 const ReviseOptions& opt) {
    if (!(q > 3.0 && q < 4.0)) throw ConfigError("choose_R0 requires 3 < q < 4");
    if (!(alpha > 0)) throw ConfigError("choose_R0 requires alpha > 0");
    const Box& box = *V0_box.grid();
    ReviseOptions lite = opt;
    lite.with_certificates = false;
    lite.q = q;
    double best = std::numeric_limits<double>::infinity();
    for (double R0 = 2.0; R0 <= box.L / 2.0 + 1e-12; R0 *= 2.0) {
        RevisedProfilePair rp = revise(V0_box, Theta0_box, V0_box, Theta0_box, R0, lite);
        best = std::min(best, rp.certs.lq_norm);
        if (rp.certs.lq_norm <= alpha) return R0;
    }
    throw ConvergenceError(
        "choose_R0: alpha target unreachable within this box; achieved L^q norm " +
            std::to_string(best) + " > alpha = " + std::to_string(alpha) +
            " (enlarge the box half-width L)",
        best);
}

}  // namespace dssflow
