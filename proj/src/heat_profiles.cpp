#include "dssflow/heat_profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "dssflow/operators.hpp"
#include "json.hpp"

namespace dssflow {

namespace {

struct Frame {
    Vec3 xhat, e1, e2;
};

Frame make_frame(const Vec3& x, double a) {
    Frame f;
    f.xhat = x * (1.0 / a);
    Vec3 tmp = std::abs(f.xhat.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    f.e1 = f.xhat.cross(tmp);
    f.e1 *= 1.0 / f.e1.norm();
    f.e2 = f.xhat.cross(f.e1);
    return f;
}

// panel edges in w = |z| following the DSS annulus boundaries lambda^m
void w_panel_edges(double wlo, double whi, double lam, std::vector<double>& edges) {
    edges.clear();
    if (whi <= wlo) return;
    double wfloor = std::max(wlo, whi * 1e-14);
    edges.push_back(wfloor);
    double loglam = std::log(lam);
    int m = int(std::floor(std::log(wfloor) / loglam)) + 1;
    for (; std::pow(lam, m) < whi; ++m) {
        double b = std::pow(lam, m);
        if (b > edges.back() * (1.0 + 1e-14)) edges.push_back(b);
    }
    edges.push_back(whi);
}

// rho panel edges: unit-width (in 2 sqrt t) panels plus geometric grading
// toward rho = a where the w-interval collapses (log kink in the integrand)
void rho_panel_edges(double a, double t, double Q, int grade, std::vector<double>& edges) {
    double st2 = 2.0 * std::sqrt(t);
    double rmax = st2 * Q;
    edges.clear();
    edges.push_back(0.0);
    for (int j = 1; j <= int(Q); ++j) edges.push_back(std::min(st2 * j, rmax));
    edges.push_back(rmax);
    if (a > 0 && a < rmax) {
        edges.push_back(a);
        double d = st2;
        for (int k = 0; k < grade; ++k) {
            d *= 0.5;
            if (a - d > 0) edges.push_back(a - d);
            if (a + d < rmax) edges.push_back(a + d);
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double p, double q) { return q - p < 1e-300; }),
                edges.end());
}

// annulus rescale factor for a panel strictly inside one annulus
double annulus_scale(double wmid, double lam) {
    double j = -std::floor(std::log(wmid) / std::log(lam));
    double s = std::pow(lam, j);
    if (s * wmid < 1.0) s *= lam;
    if (s * wmid >= lam) s /= lam;
    return s;
}

}  // namespace

HeatQuadResult heat_evaluate_full(const DssField& data, const Vec3& x, double t,
                                  const HeatQuadOptions& opt) {
    if (!(t > 0)) throw UsageError("heat_evaluate needs t > 0");
    const double lam = data.scale().lambda;
    const double a = x.norm();
    const double st2 = 2.0 * std::sqrt(t);
    const double Q = std::sqrt(std::max(1.0, -std::log(std::max(opt.tol, 1e-300)))) + 1.5;
    const double rmax = st2 * Q;
    const int n_phi = opt.n_phi > 0 ? opt.n_phi
                                    : (a > 2.0 * rmax ? std::max(8, data.annulus().angular_hint() / 2)
                                                      : data.annulus().angular_hint());
    const double prefac = std::pow(4.0 * kPi * t, -1.5);

    // omitted kernel tail: |data(z)| <= sup * lam / |z| and the Gaussian mass
    // beyond rmax
    const double sup = data.sup_annulus();
    double tail = sup * lam * std::exp(-Q * Q) * (Q + 1.0) * 4.0 / std::sqrt(kPi) /
                  std::max(rmax * 0.5, std::max(1e-3 * st2, a - rmax));
    // w-floor skip: linear bound
    tail += sup * lam * prefac * 4.0 * kPi * rmax * rmax * (std::max(a, rmax) * 1e-14);

    Vec3 acc{};
    const auto& [gx, gw] = gauss_legendre(opt.n_rho);
    const auto& [hx, hw] = gauss_legendre(opt.n_w);

    if (a < 1e-10 * st2) {
        // x at the origin: spherical shells, per-annulus panels
        std::vector<double> wedges;
        w_panel_edges(std::max(rmax * 1e-14, 1e-300), rmax, lam, wedges);
        const int n_mu = 12;
        const auto& [mx, mw] = gauss_legendre(n_mu);
        for (std::size_t p = 0; p + 1 < wedges.size(); ++p) {
            double w0 = wedges[p], w1 = wedges[p + 1];
            double scale = annulus_scale(0.5 * (w0 + w1), lam);
            for (int iw = 0; iw < opt.n_w; ++iw) {
                double w = 0.5 * (w0 + w1) + 0.5 * (w1 - w0) * hx[iw];
                double wgt = 0.5 * (w1 - w0) * hw[iw];
                Vec3 sph{};
                for (int im = 0; im < n_mu; ++im) {
                    double mu = mx[im];
                    double smu = std::sqrt(std::max(0.0, 1.0 - mu * mu));
                    for (int ip = 0; ip < n_phi; ++ip) {
                        double ph = 2.0 * kPi * ip / n_phi;
                        Vec3 z{w * smu * std::cos(ph), w * smu * std::sin(ph), w * mu};
                        sph += data.annulus().eval(z * scale) * mw[im];
                    }
                }
                sph *= (2.0 * kPi / n_phi) * scale;
                acc += sph * (wgt * w * w * std::exp(-w * w / (4.0 * t)));
            }
        }
        acc *= prefac;
        double scale_ref = std::max(acc.norm(), sup);
        if (tail > opt.tol * scale_ref * 10.0)
            throw ConvergenceError("heat_evaluate tail bound above tolerance", tail);
        return {acc, tail};
    }

    Frame fr = make_frame(x, a);
    std::vector<double> cph(n_phi), sph_(n_phi);
    for (int ip = 0; ip < n_phi; ++ip) {
        cph[ip] = std::cos(2.0 * kPi * ip / n_phi);
        sph_[ip] = std::sin(2.0 * kPi * ip / n_phi);
    }

    std::vector<double> redges, wedges;
    rho_panel_edges(a, t, Q, opt.grade_levels, redges);
    for (std::size_t pr = 0; pr + 1 < redges.size(); ++pr) {
        double r0 = redges[pr], r1 = redges[pr + 1];
        for (int ir = 0; ir < opt.n_rho; ++ir) {
            double rho = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * gx[ir];
            double rwgt = 0.5 * (r1 - r0) * gw[ir] * std::exp(-rho * rho / (4.0 * t)) * rho;
            double wlo = std::abs(rho - a), whi = rho + a;
            w_panel_edges(wlo, whi, lam, wedges);
            Vec3 ssum{};
            for (std::size_t p = 0; p + 1 < wedges.size(); ++p) {
                double w0 = wedges[p], w1 = wedges[p + 1];
                double scale = annulus_scale(0.5 * (w0 + w1), lam);
                for (int iw = 0; iw < opt.n_w; ++iw) {
                    double w = 0.5 * (w0 + w1) + 0.5 * (w1 - w0) * hx[iw];
                    double wgt = 0.5 * (w1 - w0) * hw[iw];
                    double zeta = (a * a + w * w - rho * rho) / (2.0 * a);
                    double rc = std::sqrt(std::max(w * w - zeta * zeta, 0.0));
                    Vec3 circ{};
                    for (int ip = 0; ip < n_phi; ++ip) {
                        Vec3 z = fr.xhat * zeta + fr.e1 * (rc * cph[ip]) + fr.e2 * (rc * sph_[ip]);
                        circ += data.annulus().eval(z * scale);
                    }
                    ssum += circ * (wgt * w * scale * (2.0 * kPi / n_phi));
                }
            }
            acc += ssum * rwgt;
        }
    }
    acc *= prefac / a;
    double scale_ref = std::max(acc.norm(), sup * std::min(1.0, lam / std::max(a, 1e-300)));
    if (tail > opt.tol * std::max(scale_ref, 1e-300) * 10.0)
        throw ConvergenceError("heat_evaluate tail bound above tolerance", tail);
    return {acc, tail};
}

Vec3 heat_evaluate(const DssField& data, const Vec3& x, double t, const HeatQuadOptions& opt) {
    return heat_evaluate_full(data, x, t, opt).value;
}

Vec3 profile_value(const DssField& data, const Vec3& y, double s, const HeatQuadOptions& opt) {
    double t = std::exp(s);
    double st = std::sqrt(t);
    return heat_evaluate(data, y * st, t, opt) * st;
}

// ---- Profile ----------------------------------------------------------------

Profile::Profile(BoxPtr grid, int ncomp, double period, bool stationary,
                 std::vector<Field> samples)
    : grid_(std::move(grid)), ncomp_(ncomp), T_(period), stationary_(stationary),
      samples_(std::move(samples)) {}

std::vector<double> Profile::interp_weights(double s) const {
    const int n = n_s();
    std::vector<double> w(n, 0.0);
    if (n == 1) {
        w[0] = 1.0;
        return w;
    }
    for (int j = 0; j < n; ++j) {
        double u = 2.0 * kPi * (s - s_node(j)) / T_;
        double su = std::sin(0.5 * u);
        if (std::abs(su) < 1e-14) {
            w[j] = 1.0;
            continue;
        }
        if (n % 2 == 0)
            w[j] = std::sin(0.5 * n * u) / std::tan(0.5 * u) / n;
        else
            w[j] = std::sin(0.5 * n * u) / su / n;
    }
    return w;
}

Field Profile::at(double s) const {
    if (stationary_ || n_s() == 1) return samples_[0].clone();
    auto w = interp_weights(s);
    Field out(grid_, ncomp_);
    out.set_zero();
    for (int j = 0; j < n_s(); ++j)
        if (w[j] != 0.0) out.axpy(w[j], samples_[j]);
    return out;
}

Field Profile::s_derivative_at_node(int m) const {
    Field out(grid_, ncomp_);
    out.set_zero();
    if (stationary_ || n_s() == 1) return out;
    const int n = n_s();
    const double f = 2.0 * kPi / T_;  // d/ds in node-index units times 2 pi/T... nodes at 2pi j/n
    for (int j = 0; j < n; ++j) {
        int d = m - j;
        if (d == 0) continue;
        double c;
        if (n % 2 == 0)
            c = 0.5 * ((d % 2 == 0) ? 1.0 : -1.0) / std::tan(kPi * d / n);
        else
            c = 0.5 * ((d % 2 == 0) ? 1.0 : -1.0) / std::sin(kPi * d / n);
        out.axpy(c * f, samples_[j]);
    }
    return out;
}

std::uint64_t Profile::content_hash() const {
    std::uint64_t h = fnv1a(&T_, sizeof(double));
    for (const auto& s : samples_) h = fnv1a(std::span<const double>(s.phys()), h);
    return h;
}

Profile compute_profile(const DssField& data, BoxPtr grid, int n_s, const HeatQuadOptions& opt,
                        int threads, const std::optional<RadialTaper>& taper) {
    const bool stat = data.homogeneous();
    const int ns = stat ? 1 : std::max(1, n_s);
    const int ncomp = data.kind() == FieldKind::Scalar ? 1 : 3;
    const Box& b = *grid;
    const double T = data.scale().period();

    std::vector<Field> samples;
    samples.reserve(ns);
    for (int m = 0; m < ns; ++m) {
        Field f(grid, ncomp);
        RealVec& p = f.phys_raw();
        std::fill(p.begin(), p.end(), 0.0);
        const double s = T * m / ns;
        parallel_for(b.nphys(), threads, [&](std::int64_t idx) {
            double r = b.radius()[idx];
            double tau = 1.0;
            if (taper) {
                if (r >= taper->r1) return;  // tapered to zero, skip evaluation
                tau = (*taper)(r);
            }
            int i = int(idx / (std::size_t(b.N) * b.N));
            int j = int((idx / b.N) % b.N);
            int l = int(idx % b.N);
            Vec3 y{b.coord(i), b.coord(j), b.coord(l)};
            Vec3 v = profile_value(data, y, s, opt) * tau;
            for (int c = 0; c < ncomp; ++c) p[c * b.nphys() + idx] = v[c];
        });
        f.spec();  // build the spectral rep once, in the main thread
        samples.push_back(std::move(f));
    }
    return Profile(grid, ncomp, T, stat, std::move(samples));
}

Profile apply_L(const Profile& p) {
    if (!p.stationary() && p.n_s() < 3)
        throw UsageError("apply_L needs >= 3 s-samples for the s-derivative");
    std::vector<Field> out;
    out.reserve(p.n_s());
    for (int m = 0; m < p.n_s(); ++m) {
        Field L = p.s_derivative_at_node(m);
        L.axpy(-1.0, laplacian(p.sample(m)));
        L.axpy(-0.5, p.sample(m));
        L.axpy(-1.0, drift_term(p.sample(m)));
        out.push_back(std::move(L));
    }
    return Profile(p.grid(), p.ncomp(), p.period(), p.stationary(), std::move(out));
}

// ---- tails -------------------------------------------------------------------

namespace {
// max over the outer sampled shell of |f| * |y|, used as the majorant
// coefficient for the analytic tail beyond the inscribed ball
double majorant_coefficient(const Field& f) {
    const Box& b = f.box();
    const RealVec& v = f.phys();
    const RealVec& r = b.radius();
    const std::size_t np = b.nphys();
    double c = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
        if (r[i] < 0.8 * b.L || r[i] > b.L) continue;
        double m2 = 0.0;
        for (int comp = 0; comp < f.ncomp(); ++comp) m2 += v[comp * np + i] * v[comp * np + i];
        c = std::max(c, std::sqrt(m2) * r[i]);
    }
    return c;
}

double lq_tail_one(const Field& f, double q, double R) {
    const Box& b = f.box();
    const RealVec& v = f.phys();
    const RealVec& r = b.radius();
    const std::size_t np = b.nphys();
    double h3 = b.h() * b.h() * b.h();
    double sum = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
        if (r[i] <= R || r[i] > b.L) continue;
        double m2 = 0.0;
        for (int comp = 0; comp < f.ncomp(); ++comp) m2 += v[comp * np + i] * v[comp * np + i];
        sum += std::pow(m2, 0.5 * q);
    }
    sum *= h3;
    double C = majorant_coefficient(f);
    double Rout = std::max(R, b.L);
    sum += 4.0 * kPi * std::pow(C, q) * std::pow(Rout, 3.0 - q) / (q - 3.0);
    return std::pow(sum, 1.0 / q);
}
}  // namespace

TailBound tail_norms(const Profile& p, double q, const std::vector<double>& radii) {
    if (!(q > 3.0)) throw ConfigError("tail norms require q > 3 (integral diverges otherwise)");
    TailBound tb;
    tb.q = q;
    tb.radii = radii;
    for (double R : radii) {
        double m = 0.0;
        for (int s = 0; s < p.n_s(); ++s) m = std::max(m, lq_tail_one(p.sample(s), q, R));
        tb.mu.push_back(m);
    }
    return tb;
}

double lq_norm_with_tail(const Profile& p, double q) {
    return tail_norms(p, q, {0.0}).mu[0];
}

// ---- certificate grid ---------------------------------------------------------

BoxPtr certificate_grid(const Box& solver_box) {
    int n = int(std::lround(2.5 * solver_box.N));
    if (n % 2) ++n;
    return Box::make(2.0 * solver_box.L, n, solver_box.dealias_fraction,
                     solver_box.drift_window_fraction);
}

RadialTaper certificate_taper(const Box& solver_box) {
    return RadialTaper{1.25 * solver_box.L, 1.875 * solver_box.L};
}

double annihilation_ratio(const Profile& cert_profile, const Box& solver_box) {
    Profile Lp = apply_L(cert_profile);
    const Box& g = *cert_profile.grid();
    const double rin = solver_box.drift_window_fraction * solver_box.L;
    double worst = 0.0;
    for (int m = 0; m < cert_profile.n_s(); ++m) {
        const RealVec& num = Lp.sample(m).phys();
        const RealVec& den = cert_profile.sample(m).phys();
        const RealVec& r = g.radius();
        const std::size_t np = g.nphys();
        double sn = 0.0, sd = 0.0;
        for (std::size_t i = 0; i < np; ++i) {
            if (r[i] > rin) continue;
            for (int c = 0; c < cert_profile.ncomp(); ++c) {
                sn += num[c * np + i] * num[c * np + i];
                sd += den[c * np + i] * den[c * np + i];
            }
        }
        if (sd > 0) worst = std::max(worst, std::sqrt(sn / sd));
    }
    return worst;
}

// ---- grid transfer -------------------------------------------------------------

Field spectral_crop(const Field& f, BoxPtr target) {
    const Box& src = f.box();
    const Box& dst = *target;
    if (dst.L != src.L || dst.N > src.N) throw UsageError("spectral_crop: bad target grid");
    Field out(target, f.ncomp());
    CplxVec& o = out.spec_raw();
    std::fill(o.begin(), o.end(), Cplx(0.0));
    const CplxVec& s = f.spec();
    for (int c = 0; c < f.ncomp(); ++c) {
        for (int i = 0; i < dst.N; ++i) {
            int mi = dst.mode(i);
            if (std::abs(mi) >= dst.N / 2) continue;
            int si = mi >= 0 ? mi : src.N + mi;
            for (int j = 0; j < dst.N; ++j) {
                int mj = dst.mode(j);
                if (std::abs(mj) >= dst.N / 2) continue;
                int sj = mj >= 0 ? mj : src.N + mj;
                for (int l = 0; l < dst.N / 2; ++l) {
                    o[c * dst.nspec() + dst.spec_index(i, j, l)] =
                        s[c * src.nspec() + src.spec_index(si, sj, l)];
                }
            }
        }
    }
    return out;
}

Field spectral_pad(const Field& f, BoxPtr target) {
    const Box& src = f.box();
    const Box& dst = *target;
    if (dst.L != src.L || dst.N < src.N) throw UsageError("spectral_pad: bad target grid");
    Field out(target, f.ncomp());
    CplxVec& o = out.spec_raw();
    std::fill(o.begin(), o.end(), Cplx(0.0));
    const CplxVec& s = f.spec();
    for (int c = 0; c < f.ncomp(); ++c) {
        for (int i = 0; i < src.N; ++i) {
            int mi = src.mode(i);
            if (std::abs(mi) >= src.N / 2) continue;
            int di = mi >= 0 ? mi : dst.N + mi;
            for (int j = 0; j < src.N; ++j) {
                int mj = src.mode(j);
                if (std::abs(mj) >= src.N / 2) continue;
                int dj = mj >= 0 ? mj : dst.N + mj;
                for (int l = 0; l < src.N / 2; ++l) {
                    o[c * dst.nspec() + dst.spec_index(di, dj, l)] =
                        s[c * src.nspec() + src.spec_index(i, j, l)];
                }
            }
        }
    }
    return out;
}

Field subsample_center(const Field& f, BoxPtr target) {
    const Box& src = f.box();
    const Box& dst = *target;
    if (std::abs(src.h() - dst.h()) > 1e-12 * dst.h() || dst.L >= src.L)
        throw UsageError("subsample_center: grids must share spacing, target smaller");
    int off = int(std::lround((src.L - dst.L) / src.h()));
    Field out(target, f.ncomp());
    RealVec& o = out.phys_raw();
    const RealVec& p = f.phys();
    for (int c = 0; c < f.ncomp(); ++c)
        for (int i = 0; i < dst.N; ++i)
            for (int j = 0; j < dst.N; ++j)
                for (int l = 0; l < dst.N; ++l)
                    o[c * dst.nphys() + dst.phys_index(i, j, l)] =
                        p[c * src.nphys() + src.phys_index(i + off, j + off, l + off)];
    return out;
}

// ---- profile cache --------------------------------------------------------------

namespace {
constexpr char kProfMagic[9] = "DSSPRO01";
}

void write_profile_file(const std::string& path, const Profile& p, double lambda, double tol) {
    nlohmann::json hdr = {{"L", p.grid()->L},
                          {"N", p.grid()->N},
                          {"n_s", p.n_s()},
                          {"lambda", lambda},
                          {"kind", p.ncomp() == 1 ? "scalar" : "vector3"},
                          {"tolerance", tol},
                          {"stationary", p.stationary()},
                          {"period", p.period()}};
    std::string hs = hdr.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out.write(kProfMagic, 8);
    std::uint64_t len = hs.size();
    out.write(reinterpret_cast<const char*>(&len), 8);
    out.write(hs.data(), hs.size());
    for (int m = 0; m < p.n_s(); ++m) {
        const RealVec& v = p.sample(m).phys();
        out.write(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
    }
}

Profile read_profile_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kProfMagic, 8) != 0)
        throw IntegrityError("bad profile file magic: " + path);
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), 8);
    std::string hs(len, '\0');
    in.read(hs.data(), len);
    nlohmann::json hdr = nlohmann::json::parse(hs);
    BoxPtr grid = Box::make(hdr.at("L").get<double>(), hdr.at("N").get<int>());
    int ncomp = hdr.at("kind").get<std::string>() == "scalar" ? 1 : 3;
    int ns = hdr.at("n_s").get<int>();
    std::vector<Field> samples;
    for (int m = 0; m < ns; ++m) {
        Field f(grid, ncomp);
        RealVec& v = f.phys_raw();
        in.read(reinterpret_cast<char*>(v.data()), v.size() * sizeof(double));
        if (!in) throw IntegrityError("truncated profile file: " + path);
        samples.push_back(std::move(f));
    }
    return Profile(grid, ncomp, hdr.at("period").get<double>(), hdr.at("stationary").get<bool>(),
                   std::move(samples));
}

}  // namespace dssflow
