#include "dssflow/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace dssflow {

Constants estimate_constants(const RevisionCertificates& certs, double force_hminus1) {
    Constants c;
    c.norm_sum = certs.vstar_l4 * certs.vstar_l4 + certs.thetastar_l4 * certs.thetastar_l4 +
                 certs.grad_thetastar_l2 + force_hminus1 + certs.L_vstar_hm1 +
                 certs.L_thetastar_hm1;
    c.C0 = c.norm_sum * c.norm_sum;
    // Hardy constant 2 and the 1/4-1/8 Young split give the coupling weight 4;
    // generic multiplier 1. Zero data degenerates to zero estimates, m -> 1.
    c.C1 = c.norm_sum > 0 ? 4.0 : 0.0;
    c.C2 = c.C0;
    c.C3 = c.C2 * (1.0 + 2.0 * c.C1);
    c.m = c.norm_sum > 0 ? std::sqrt(2.0 * c.C1) : 1.0;
    c.rho_hat = std::sqrt(8.0 * c.C2 * (1.0 + c.m * c.m));
    return c;
}

namespace {

// profile field at s without copying when stationary
const Field& profile_at(const Profile& p, double s, Field& storage) {
    if (p.stationary() || p.n_s() == 1) return p.sample(0);
    storage = p.at(s);
    return storage;
}

Field scalar_times_vector(const Field& scalar, const Field& vec) {
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

bool finite(double v) { return std::isfinite(v); }

}  // namespace

GalerkinState zero_state(BoxPtr box, double s) {
    GalerkinState st;
    st.U = make_vector(box);
    st.Psi = make_scalar(box);
    st.U.set_zero();
    st.Psi.set_zero();
    st.s = s;
    return st;
}

SystemData build_system(BoxPtr box, RevisedProfilePair profiles, Profile V0, Profile Theta0,
                        const DssForce& force_data, int n_s_force, double epsilon, double delta) {
    SystemData d;
    d.box = box;
    d.T = profiles.Vstar.period();
    d.profiles = std::move(profiles);
    d.V0 = std::move(V0);
    d.Theta0 = std::move(Theta0);
    d.mollifier.emplace(box, epsilon);
    d.grav = grav_field(box, delta);
    d.grav_delta = delta;

    // force profile on the box
    {
        bool zero = force_data.is_zero();
        int ns = zero ? 1 : std::max(1, n_s_force);
        std::vector<Field> samples;
        for (int m = 0; m < ns; ++m) {
            Field f(box, 3);
            RealVec& p = f.phys_raw();
            std::fill(p.begin(), p.end(), 0.0);
            if (!zero) {
                double s = d.T * m / ns;
                const Box& b = *box;
                for (int i = 0; i < b.N; ++i)
                    for (int j = 0; j < b.N; ++j)
                        for (int l = 0; l < b.N; ++l) {
                            Vec3 F = force_data.profile({b.coord(i), b.coord(j), b.coord(l)}, s);
                            std::size_t idx = b.phys_index(i, j, l);
                            p[idx] = F.x;
                            p[b.nphys() + idx] = F.y;
                            p[2 * b.nphys() + idx] = F.z;
                        }
            }
            dealias(f);
            samples.push_back(std::move(f));
        }
        d.force = Profile(box, 3, d.T, zero, std::move(samples));
    }

    double f_hm1 = 0;
    for (int m = 0; m < d.force.n_s(); ++m)
        f_hm1 = std::max(f_hm1, hminus1_norm(d.force.sample(m)));
    d.consts = estimate_constants(d.profiles.certs, f_hm1);

    // projected sources at the profiles' sample times
    int n_src = std::max({d.profiles.Vstar.n_s(), d.profiles.Thetastar.n_s(), d.force.n_s(),
                          d.profiles.LVstar.n_s(), d.profiles.LThetastar.n_s()});
    bool stat = d.profiles.Vstar.stationary() && d.profiles.Thetastar.stationary() &&
                d.force.stationary();
    if (stat) n_src = 1;
    std::vector<Field> rb, rq;
    Field sV, sT, sF, sLV, sLT;
    for (int m = 0; m < n_src; ++m) {
        double s = d.T * m / n_src;
        const Field& Vs = profile_at(d.profiles.Vstar, s, sV);
        const Field& Ts = profile_at(d.profiles.Thetastar, s, sT);
        const Field& Fs = profile_at(d.force, s, sF);
        const Field& LVs = profile_at(d.profiles.LVstar, s, sLV);
        const Field& LTs = profile_at(d.profiles.LThetastar, s, sLT);

        Field b = convect(Vs, Vs);
        b.scale(-1.0);
        b.axpy(1.0, scalar_times_vector(Ts, d.grav));
        b.axpy(1.0, Fs);
        b.axpy(-1.0, LVs);
        dealias(b);
        leray_project(b);
        rb.push_back(std::move(b));

        Field q = convect(Vs, Ts);
        q.scale(-1.0);
        q.axpy(-1.0, LTs);
        dealias(q);
        rq.push_back(std::move(q));
    }
    d.Rb_src = Profile(box, 3, d.T, stat, std::move(rb));
    d.Rq_src = Profile(box, 1, d.T, stat, std::move(rq));
    return d;
}

Tendency rhs_explicit(const GalerkinState& st, const SystemData& data) {
    Field sV, sT, sRb, sRq;
    const Field& Vs = profile_at(data.profiles.Vstar, st.s, sV);
    const Field& Ts = profile_at(data.profiles.Thetastar, st.s, sT);
    const Field& Rb = profile_at(data.Rb_src, st.s, sRb);
    const Field& Rq = profile_at(data.Rq_src, st.s, sRq);

    Field mU = data.mollifier->apply(st.U);
    Field adv = Vs.clone();
    adv.axpy(1.0, mU);  // V* + eta_eps * U

    Tendency out;
    out.dU = drift_term(st.U);
    out.dU.axpy(0.5, st.U);
    out.dU.axpy(-1.0, convect(adv, st.U));
    out.dU.axpy(-1.0, convect(mU, Vs));
    out.dU.axpy(1.0, scalar_times_vector(st.Psi, data.grav));
    out.dU.axpy(1.0, Rb);
    dealias(out.dU);
    leray_project(out.dU);

    out.dPsi = drift_term(st.Psi);
    out.dPsi.axpy(0.5, st.Psi);
    out.dPsi.axpy(-1.0, convect(adv, st.Psi));
    out.dPsi.axpy(-1.0, convect(mU, Ts));
    out.dPsi.axpy(1.0, Rq);
    dealias(out.dPsi);
    return out;
}

Tendency rhs_full(const GalerkinState& st, const SystemData& data) {
    Tendency t = rhs_explicit(st, data);
    t.dU.axpy(1.0, laplacian(st.U));
    t.dPsi.axpy(1.0, laplacian(st.Psi));
    return t;
}

// ---- ledger -------------------------------------------------------------------

void EnergyLedger::append(const LedgerRow& row) {
    rows.push_back(row);
    if (rows.size() == 1) return;
    double f0 = rows.front().f, s0 = rows.front().s;
    double env = std::exp(-(row.s - s0) / 8.0) * f0 + 8.0 * C3 * (1.0 + gronwall_slack);
    if (row.f > env) {
        if (gronwall_violations == 0)
            warnings.push_back("gronwall envelope exceeded first at s = " + std::to_string(row.s));
        ++gronwall_violations;
    }
    if (row.shell_frac > 1e-4 && rows.size() % 64 == 0)
        warnings.push_back("boundary shell energy fraction " + std::to_string(row.shell_frac) +
                           " at s = " + std::to_string(row.s));
}

void EnergyLedger::to_csv(std::ostream& os) const {
    os << "s,a,A,b,B,f,res_mom,res_temp,shell_frac\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.3e,%.3e,%.3e\n",
                      r.s, r.a, r.A, r.b, r.B, r.f, r.res_mom, r.res_temp, r.shell_frac);
        os << buf;
    }
}

// ---- time stepping --------------------------------------------------------------

double stable_ds(const SystemData& data) {
    const Box& b = *data.box;
    double vmax = 0;
    for (int m = 0; m < data.profiles.Vstar.n_s(); ++m)
        vmax = std::max(vmax, max_abs(data.profiles.Vstar.sample(m)));
    double ymax = 0;
    for (std::size_t i = 0; i < b.nphys(); ++i) {
        double y2 = b.ytilde(0)[i] * b.ytilde(0)[i] + b.ytilde(1)[i] * b.ytilde(1)[i] +
                    b.ytilde(2)[i] * b.ytilde(2)[i];
        ymax = std::max(ymax, y2);
    }
    double speed = vmax + 0.5 * std::sqrt(ymax) + 1.0;
    return 0.5 * b.h() / speed;
}

FlowRunner::FlowRunner(const SystemData& data, StepControls ctl) : data_(data), ctl_(ctl) {
    const Box& b = *data.box;
    if (!(ctl_.ds > 0)) throw ConfigError("step size must be positive");
    double advisory = stable_ds(data);
    if (ctl_.ds > advisory * 1.05)
        throw ConfigError("step size " + std::to_string(ctl_.ds) +
                          " exceeds the stability advisory " + std::to_string(advisory));
    efac_.resize(b.nspec());
    const int N = b.N, H = b.nhalf();
    std::size_t idx = 0;
    for (int i = 0; i < N; ++i) {
        double kx = b.kfull(i);
        for (int j = 0; j < N; ++j) {
            double ky = b.kfull(j);
            for (int l = 0; l < H; ++l, ++idx) {
                double kz = b.khalf(l);
                efac_[idx] = std::exp(-(kx * kx + ky * ky + kz * kz) * ctl_.ds);
            }
        }
    }
}

namespace {
void apply_factor(Field& f, const std::vector<double>& efac) {
    CplxVec& s = f.spec_mut();
    const std::size_t ns = efac.size();
    for (int c = 0; c < f.ncomp(); ++c)
        for (std::size_t i = 0; i < ns; ++i) s[c * ns + i] *= efac[i];
}
}  // namespace

void apply_heat_factor(Field& f, double ds) {
    const Box& b = f.box();
    CplxVec& s = f.spec_mut();
    const int N = b.N, H = b.nhalf();
    for (int c = 0; c < f.ncomp(); ++c) {
        std::size_t idx = c * b.nspec();
        for (int i = 0; i < N; ++i) {
            double kx = b.kfull(i);
            for (int j = 0; j < N; ++j) {
                double ky = b.kfull(j);
                for (int l = 0; l < H; ++l, ++idx) {
                    double kz = b.khalf(l);
                    s[idx] *= std::exp(-(kx * kx + ky * ky + kz * kz) * ds);
                }
            }
        }
    }
}

void FlowRunner::one_step(GalerkinState& st, Tendency& cur, EnergyLedger* ledger) const {
    const double ds = ctl_.ds;
    const double a0 = inner(st.U, st.U), b0 = inner(st.Psi, st.Psi);
    double pair0_u = 0, pair0_p = 0;
    if (ledger && ctl_.record_residuals) {
        pair0_u = 2.0 * (inner(cur.dU, st.U) - grad_norm_sq(st.U));
        pair0_p = 2.0 * (inner(cur.dPsi, st.Psi) - grad_norm_sq(st.Psi));
    }

    // predictor: U~ = E (U + ds k1)
    GalerkinState mid;
    mid.U = st.U.clone();
    mid.U.axpy(ds, cur.dU);
    apply_factor(mid.U, efac_);
    leray_project(mid.U);
    mid.Psi = st.Psi.clone();
    mid.Psi.axpy(ds, cur.dPsi);
    apply_factor(mid.Psi, efac_);
    mid.s = st.s + ds;

    Tendency k2 = rhs_explicit(mid, data_);

    // corrector: U' = E U + ds/2 (E k1 + k2)
    apply_factor(st.U, efac_);
    apply_factor(cur.dU, efac_);
    st.U.axpy(0.5 * ds, cur.dU);
    st.U.axpy(0.5 * ds, k2.dU);
    leray_project(st.U);
    dealias(st.U);

    apply_factor(st.Psi, efac_);
    apply_factor(cur.dPsi, efac_);
    st.Psi.axpy(0.5 * ds, cur.dPsi);
    st.Psi.axpy(0.5 * ds, k2.dPsi);
    dealias(st.Psi);
    st.s += ds;

    cur = rhs_explicit(st, data_);  // reused as next step's k1

    const double a1 = inner(st.U, st.U), b1 = inner(st.Psi, st.Psi);
    if (!finite(a1) || !finite(b1))
        throw DivergenceError("time integration diverged at s = " + std::to_string(st.s));

    if (ledger) {
        LedgerRow row;
        row.s = st.s;
        row.a = a1;
        row.A = a1 + grad_norm_sq(st.U);
        row.b = b1;
        row.B = b1 + grad_norm_sq(st.Psi);
        row.f = ledger->f_value(a1, b1);
        if (ctl_.record_residuals) {
            double pair1_u = 2.0 * (inner(cur.dU, st.U) - grad_norm_sq(st.U));
            double pair1_p = 2.0 * (inner(cur.dPsi, st.Psi) - grad_norm_sq(st.Psi));
            double scale_u = std::max(1.0, std::max(row.A, row.B));
            row.res_mom = std::abs((a1 - a0) / ds - 0.5 * (pair0_u + pair1_u)) / scale_u;
            row.res_temp = std::abs((b1 - b0) / ds - 0.5 * (pair0_p + pair1_p)) / scale_u;
        } else {
            row.res_mom = row.res_temp = 0;
        }
        row.shell_frac = std::max(boundary_shell_fraction(st.U), boundary_shell_fraction(st.Psi));
        ledger->append(row);
    }
}

void FlowRunner::run(GalerkinState& st, int nsteps, EnergyLedger* ledger) const {
    if (ledger) {
        ledger->C1 = data_.consts.C1;
        ledger->C3 = data_.consts.C3;
        if (ledger->rows.empty()) {
            LedgerRow row{};
            row.s = st.s;
            row.a = inner(st.U, st.U);
            row.A = row.a + grad_norm_sq(st.U);
            row.b = inner(st.Psi, st.Psi);
            row.B = row.b + grad_norm_sq(st.Psi);
            row.f = ledger->f_value(row.a, row.b);
            row.res_mom = row.res_temp = 0;
            row.shell_frac =
                std::max(boundary_shell_fraction(st.U), boundary_shell_fraction(st.Psi));
            ledger->append(row);
        }
    }
    Tendency cur = rhs_explicit(st, data_);
    for (int n = 0; n < nsteps; ++n) one_step(st, cur, ledger);
}

// ---- packed layout ---------------------------------------------------------------

PackedLayout::PackedLayout(BoxPtr box, double m_weight) : box_(std::move(box)), m_(m_weight) {
    const Box& b = *box_;
    const int H = b.nhalf();
    for (int i = 0; i < b.N; ++i) {
        int mi = b.mode(i);
        if (std::abs(mi) > b.kd) continue;
        for (int j = 0; j < b.N; ++j) {
            int mj = b.mode(j);
            if (std::abs(mj) > b.kd) continue;
            for (int l = 0; l <= b.kd && l < H; ++l) {
                if (l == 0) {
                    // canonical half of the l = 0 plane
                    bool canonical = mi > 0 || (mi == 0 && mj > 0) || (mi == 0 && mj == 0);
                    if (!canonical) continue;
                    bool self = (mi == 0 && mj == 0);
                    entries_.push_back({b.spec_index(i, j, 0), mi, mj, self ? 1.0 : 2.0, self});
                } else {
                    entries_.push_back({b.spec_index(i, j, l), mi, mj, 2.0, false});
                }
            }
        }
    }
    std::size_t per_comp = 0;
    for (const auto& e : entries_) per_comp += e.real_only ? 1 : 2;
    dim_ = per_comp * 4;
}

std::vector<double> PackedLayout::pack(const GalerkinState& st) const {
    const Box& b = *box_;
    const double vol = b.vol();
    std::vector<double> x;
    x.reserve(dim_);
    auto pack_comp = [&](const CplxVec& s, std::size_t off, double extra) {
        for (const auto& e : entries_) {
            double w = std::sqrt(vol * e.weight) * extra;
            const Cplx& c = s[off + e.spec_idx];
            x.push_back(w * c.real());
            if (!e.real_only) x.push_back(w * c.imag());
        }
    };
    const CplxVec& su = st.U.spec();
    for (int c = 0; c < 3; ++c) pack_comp(su, c * b.nspec(), 1.0);
    pack_comp(st.Psi.spec(), 0, m_);
    return x;
}

GalerkinState PackedLayout::unpack(const std::vector<double>& x, double s) const {
    if (x.size() != dim_) throw UsageError("packed vector has wrong dimension");
    const Box& b = *box_;
    const double vol = b.vol();
    GalerkinState st = zero_state(box_, s);
    std::size_t pos = 0;
    auto unpack_comp = [&](CplxVec& sp, std::size_t off, double extra) {
        for (const auto& e : entries_) {
            double w = std::sqrt(vol * e.weight) * extra;
            double re = x[pos++] / w;
            double im = e.real_only ? 0.0 : x[pos++] / w;
            sp[off + e.spec_idx] = Cplx(re, im);
            if (e.spec_idx % b.nhalf() == 0 && !e.real_only) {
                // mirror on the l = 0 plane to keep the field real
                int i = e.mi >= 0 ? e.mi : b.N + e.mi;
                int j = e.mj >= 0 ? e.mj : b.N + e.mj;
                int im_ = (b.N - i) % b.N, jm = (b.N - j) % b.N;
                sp[off + b.spec_index(im_, jm, 0)] = Cplx(re, -im);
            }
        }
    };
    CplxVec& su = st.U.spec_raw();
    std::fill(su.begin(), su.end(), Cplx(0.0));
    for (int c = 0; c < 3; ++c) unpack_comp(su, c * b.nspec(), 1.0);
    CplxVec& sp = st.Psi.spec_raw();
    std::fill(sp.begin(), sp.end(), Cplx(0.0));
    unpack_comp(sp, 0, m_);
    leray_project(st.U);
    return st;
}

double norm(const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

// ---- dense Galerkin mode -----------------------------------------------------------

DenseBasis make_fourier_basis(BoxPtr box, int k) {
    if (k > 32) throw UsageError("dense mode is for verification only (k <= 32)");
    const Box& b = *box;
    DenseBasis out;

    // canonical integer modes ordered by |m|^2
    std::vector<std::array<int, 3>> modes;
    for (int mx = -3; mx <= 3; ++mx)
        for (int my = -3; my <= 3; ++my)
            for (int mz = -3; mz <= 3; ++mz) {
                if (mx == 0 && my == 0 && mz == 0) continue;
                bool canonical = mx > 0 || (mx == 0 && my > 0) || (mx == 0 && my == 0 && mz > 0);
                if (canonical) modes.push_back({mx, my, mz});
            }
    std::stable_sort(modes.begin(), modes.end(), [](const auto& a, const auto& c) {
        return a[0] * a[0] + a[1] * a[1] + a[2] * a[2] < c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
    });

    const double amp = std::sqrt(2.0 / b.vol());
    auto fill = [&](const std::array<int, 3>& m, bool sine, const Vec3* pol) {
        Field f(box, pol ? 3 : 1);
        RealVec& p = f.phys_raw();
        const std::size_t np = b.nphys();
        double kx = kPi / b.L * m[0], ky = kPi / b.L * m[1], kz = kPi / b.L * m[2];
        for (int i = 0; i < b.N; ++i)
            for (int j = 0; j < b.N; ++j)
                for (int l = 0; l < b.N; ++l) {
                    double ph = kx * b.coord(i) + ky * b.coord(j) + kz * b.coord(l);
                    double v = amp * (sine ? std::sin(ph) : std::cos(ph));
                    std::size_t idx = b.phys_index(i, j, l);
                    if (pol) {
                        p[idx] = v * pol->x;
                        p[np + idx] = v * pol->y;
                        p[2 * np + idx] = v * pol->z;
                    } else {
                        p[idx] = v;
                    }
                }
        return f;
    };

    for (std::size_t mi = 0; int(out.phi.size()) < k || int(out.beta.size()) < k; ++mi) {
        if (mi >= modes.size()) throw UsageError("dense basis: not enough modes enumerated");
        const auto& m = modes[mi];
        Vec3 kv{double(m[0]), double(m[1]), double(m[2])};
        Vec3 a = std::abs(kv.x) < 0.9 * kv.norm() ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        Vec3 e1 = kv.cross(a);
        e1 *= 1.0 / e1.norm();
        Vec3 e2 = kv.cross(e1);
        e2 *= 1.0 / e2.norm();
        for (int variant = 0; variant < 4 && int(out.phi.size()) < k; ++variant) {
            const Vec3& pol = variant < 2 ? e1 : e2;
            out.phi.push_back(fill(m, variant % 2 == 1, &pol));
        }
        for (int variant = 0; variant < 2 && int(out.beta.size()) < k; ++variant)
            out.beta.push_back(fill(m, variant == 1, nullptr));
    }
    return out;
}

void DenseCoefficients::tendency(const std::vector<double>& b, const std::vector<double>& q,
                                 std::vector<double>& db, std::vector<double>& dq) const {
    db.assign(k, 0.0);
    dq.assign(k, 0.0);
    for (int j = 0; j < k; ++j) {
        double s = D[j], ss = Ds[j];
        for (int i = 0; i < k; ++i) {
            s += A[i * k + j] * b[i] + B[i * k + j] * q[i];
            ss += As[i * k + j] * b[i] + Bs[i * k + j] * q[i];
            for (int l = 0; l < k; ++l) {
                s += C[(i * k + l) * k + j] * b[i] * b[l];
                ss += Cs[(i * k + l) * k + j] * b[i] * q[l];
            }
        }
        db[j] = s;
        dq[j] = ss;
    }
}

DenseCoefficients dense_coefficients(const DenseBasis& basis, const SystemData& data, double s) {
    const int k = int(basis.phi.size());
    if (int(basis.beta.size()) != k) throw UsageError("dense basis needs equal counts");

    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            double gv = inner(basis.phi[i], basis.phi[j]) - (i == j ? 1.0 : 0.0);
            double gb = inner(basis.beta[i], basis.beta[j]) - (i == j ? 1.0 : 0.0);
            if (std::abs(gv) > 1e-8 || std::abs(gb) > 1e-8)
                throw UsageError("dense basis is not orthonormal (Gram deviation > 1e-8)");
        }

    Field sV, sT, sRb, sRq;
    const Field& Vs = profile_at(data.profiles.Vstar, s, sV);
    const Field& Ts = profile_at(data.profiles.Thetastar, s, sT);
    const Field& Rb = profile_at(data.Rb_src, s, sRb);
    const Field& Rq = profile_at(data.Rq_src, s, sRq);

    DenseCoefficients dc;
    dc.k = k;
    dc.A.assign(k * k, 0.0);
    dc.B.assign(k * k, 0.0);
    dc.C.assign(k * k * k, 0.0);
    dc.D.assign(k, 0.0);
    dc.As.assign(k * k, 0.0);
    dc.Bs.assign(k * k, 0.0);
    dc.Cs.assign(k * k * k, 0.0);
    dc.Ds.assign(k, 0.0);

    std::vector<Field> mphi;
    for (int i = 0; i < k; ++i) mphi.push_back(data.mollifier->apply(basis.phi[i]));

    for (int i = 0; i < k; ++i) {
        // linear momentum operator applied to phi_i
        Field lin = laplacian(basis.phi[i]);
        lin.axpy(0.5, basis.phi[i]);
        lin.axpy(1.0, drift_term(basis.phi[i]));
        lin.axpy(-1.0, convect(Vs, basis.phi[i]));
        lin.axpy(-1.0, convect(mphi[i], Vs));
        for (int j = 0; j < k; ++j) dc.A[i * k + j] = inner(lin, basis.phi[j]);

        Field gb = scalar_times_vector(basis.beta[i], data.grav);
        for (int j = 0; j < k; ++j) dc.B[i * k + j] = inner(gb, basis.phi[j]);

        Field lins = laplacian(basis.beta[i]);
        lins.axpy(0.5, basis.beta[i]);
        lins.axpy(1.0, drift_term(basis.beta[i]));
        lins.axpy(-1.0, convect(Vs, basis.beta[i]));
        for (int j = 0; j < k; ++j) dc.Bs[i * k + j] = inner(lins, basis.beta[j]);

        Field adv = convect(mphi[i], Ts);
        for (int j = 0; j < k; ++j) dc.As[i * k + j] = -inner(adv, basis.beta[j]);

        for (int l = 0; l < k; ++l) {
            Field cv = convect(mphi[i], basis.phi[l]);
            for (int j = 0; j < k; ++j) dc.C[(i * k + l) * k + j] = -inner(cv, basis.phi[j]);
            Field cs = convect(mphi[i], basis.beta[l]);
            for (int j = 0; j < k; ++j) dc.Cs[(i * k + l) * k + j] = -inner(cs, basis.beta[j]);
        }
    }
    for (int j = 0; j < k; ++j) {
        dc.D[j] = inner(Rb, basis.phi[j]);
        dc.Ds[j] = inner(Rq, basis.beta[j]);
    }
    return dc;
}

}  // namespace dssflow
