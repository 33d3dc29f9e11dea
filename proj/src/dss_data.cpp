#include "dssflow/dss_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace dssflow {

namespace {

// plateau bump on [0,1], identically 0 outside [lo, hi]
double log_band_bump(double u, double lo = 0.15, double hi = 0.85) {
    double w = 0.25 * (hi - lo);
    return smoothstep((u - lo) / w) * (1.0 - smoothstep((u - (hi - w)) / w));
}

double log_band_bump_deriv(double u, double lo = 0.15, double hi = 0.85) {
    double w = 0.25 * (hi - lo);
    return smoothstep_deriv((u - lo) / w) / w * (1.0 - smoothstep((u - (hi - w)) / w)) -
           smoothstep((u - lo) / w) * smoothstep_deriv((u - (hi - w)) / w) / w;
}

class AnalyticAnnulus : public AnnulusData {
  public:
    AnalyticAnnulus(std::string tag, std::function<Vec3(const Vec3&)> fn, int hint)
        : tag_(std::move(tag)), fn_(std::move(fn)), hint_(hint) {}
    Vec3 eval(const Vec3& z) const override { return fn_(z); }
    int angular_hint() const override { return hint_; }
    std::uint64_t content_hash() const override { return fnv1a(tag_.data(), tag_.size()); }

  private:
    std::string tag_;
    std::function<Vec3(const Vec3&)> fn_;
    int hint_;
};

class GriddedAnnulus : public AnnulusData {
  public:
    GriddedAnnulus(double lambda, int ncomp, AnnulusGridSpec g, std::vector<double> vals)
        : lambda_(lambda), ncomp_(ncomp), g_(g), vals_(std::move(vals)) {
        if (g_.n_r < 2 || g_.n_theta < 2 || g_.n_phi < 2)
            throw ConfigError("annulus grid too small");
        if (vals_.size() != std::size_t(g_.n_r) * g_.n_theta * g_.n_phi * ncomp_)
            throw ConfigError("annulus grid data size mismatch");
    }

    Vec3 eval(const Vec3& z) const override {
        double r = z.norm();
        double u = std::log(r) / std::log(lambda_) * g_.n_r - 0.5;  // cell-center nodes
        double th = std::acos(std::clamp(z.z / r, -1.0, 1.0)) / kPi * g_.n_theta - 0.5;
        double ph = std::atan2(z.y, z.x);
        if (ph < 0) ph += 2.0 * kPi;
        double pf = ph / (2.0 * kPi) * g_.n_phi;

        int i0 = (int)std::floor(u), j0 = (int)std::floor(th), l0 = (int)std::floor(pf);
        double fu = u - i0, ft = th - j0, fp = pf - l0;
        i0 = std::clamp(i0, 0, g_.n_r - 2);
        j0 = std::clamp(j0, 0, g_.n_theta - 2);
        fu = std::clamp(u - i0, 0.0, 1.0);
        ft = std::clamp(th - j0, 0.0, 1.0);

        Vec3 out{};
        for (int c = 0; c < ncomp_; ++c) {
            double acc = 0.0;
            for (int di = 0; di < 2; ++di)
                for (int dj = 0; dj < 2; ++dj)
                    for (int dl = 0; dl < 2; ++dl) {
                        int l = (l0 + dl) % g_.n_phi;
                        double w = (di ? fu : 1 - fu) * (dj ? ft : 1 - ft) * (dl ? fp : 1 - fp);
                        acc += w * at(i0 + di, j0 + dj, l, c);
                    }
            out[c] = acc;
        }
        return out;
    }

    int angular_hint() const override { return std::max(g_.n_phi, 16); }
    bool smooth_extension() const override { return false; }  // trilinear kinks
    std::uint64_t content_hash() const override {
        return fnv1a(std::span<const double>(vals_));
    }

    double lambda_;
    int ncomp_;
    AnnulusGridSpec g_;
    std::vector<double> vals_;

  private:
    double at(int i, int j, int l, int c) const {
        return vals_[((std::size_t(i) * g_.n_theta + j) * g_.n_phi + l) * ncomp_ + c];
    }
};

}  // namespace

DssField::DssField(std::string name, FieldKind kind, ScaleFactor lambda, bool homogeneous,
                   std::shared_ptr<const AnnulusData> data)
    : name_(std::move(name)), kind_(kind), lambda_(lambda), homogeneous_(homogeneous),
      data_(std::move(data)) {}

Vec3 DssField::eval(const Vec3& x) const {
    double r = x.norm();
    if (r == 0.0) throw GeometryError("DSS data is singular at the origin");
    double lam = lambda_.lambda;
    double j = -std::floor(std::log(r) / std::log(lam));
    double scale = std::pow(lam, j);
    // guard against boundary round-off
    if (scale * r < 1.0) scale *= lam;
    if (scale * r >= lam) scale /= lam;
    Vec3 v = data_->eval(x * scale);
    return v * scale;
}

double DssField::eval_scalar(const Vec3& x) const {
    if (kind_ != FieldKind::Scalar) throw UsageError("eval_scalar on a vector field");
    return eval(x).x;
}

double DssField::sup_annulus() const {
    if (sup_cache_ >= 0) return sup_cache_;
    double lam = lambda_.lambda;
    double m = 0.0;
    const int nr = 24, nt = 24, np = 48;
    for (int i = 0; i < nr; ++i) {
        double r = std::exp(std::log(lam) * (i + 0.5) / nr);
        for (int j = 0; j < nt; ++j) {
            double mu = -1.0 + 2.0 * (j + 0.5) / nt;
            double st = std::sqrt(1.0 - mu * mu);
            for (int l = 0; l < np; ++l) {
                double ph = 2.0 * kPi * l / np;
                Vec3 z{r * st * std::cos(ph), r * st * std::sin(ph), r * mu};
                m = std::max(m, data_->eval(z).norm());
            }
        }
    }
    sup_cache_ = m;
    return m;
}

std::uint64_t DssField::content_hash() const {
    std::uint64_t h = data_->content_hash();
    h = fnv1a(&lambda_.lambda, sizeof(double), h);
    int k = kind_ == FieldKind::Scalar ? 0 : 1;
    h = fnv1a(&k, sizeof(int), h);
    int hom = homogeneous_ ? 1 : 0;
    h = fnv1a(&hom, sizeof(int), h);
    return h;
}

DssForce::DssForce(std::string name, ScaleFactor lambda, std::function<Vec3(const Vec3&, double)> F)
    : name_(std::move(name)), lambda_(lambda), F_(std::move(F)) {}

Vec3 DssForce::eval_physical(const Vec3& x, double t) const {
    if (t <= 0) throw UsageError("force defined for t > 0");
    if (!F_) return {};
    double st = std::sqrt(t);
    return F_(x * (1.0 / st), std::log(t)) * (1.0 / (st * st * st));
}

std::vector<std::string> builtin_field_names() {
    return {"azimuthal", "inverse-radius", "annulus-bump", "annulus-curl"};
}

DssField builtin_field(const std::string& name, double lambda) {
    ScaleFactor sf(lambda);
    if (name == "azimuthal") {
        auto fn = [](const Vec3& z) -> Vec3 {
            double r2 = z.norm2();
            return {-z.y / r2, z.x / r2, 0.0};
        };
        return DssField(name, FieldKind::Vector3, sf, true,
                        std::make_shared<AnalyticAnnulus>("azimuthal", fn, 8));
    }
    if (name == "inverse-radius") {
        auto fn = [](const Vec3& z) -> Vec3 { return {1.0 / z.norm(), 0.0, 0.0}; };
        return DssField(name, FieldKind::Scalar, sf, true,
                        std::make_shared<AnalyticAnnulus>("inverse-radius", fn, 4));
    }
    if (name == "annulus-bump") {
        double loglam = std::log(lambda);
        auto fn = [loglam](const Vec3& z) -> Vec3 {
            double r = z.norm();
            double u = std::log(r) / loglam;
            double ang = 1.0 + 0.5 * z.x / r;
            return {log_band_bump(u) * ang, 0.0, 0.0};
        };
        return DssField(name, FieldKind::Scalar, sf, false,
                        std::make_shared<AnalyticAnnulus>("annulus-bump", fn, 12));
    }
    if (name == "annulus-curl") {
        // curl of (0,0,psi(r)) with psi = plateau bump in log r; divergence
        // free and lambda-DSS but not homogeneous
        double loglam = std::log(lambda);
        auto fn = [loglam](const Vec3& z) -> Vec3 {
            double r = z.norm();
            double u = std::log(r) / loglam;
            double dpsi = log_band_bump_deriv(u) / (r * loglam);
            return {dpsi * z.y / r, -dpsi * z.x / r, 0.0};
        };
        return DssField(name, FieldKind::Vector3, sf, false,
                        std::make_shared<AnalyticAnnulus>("annulus-curl", fn, 8));
    }
    throw ConfigError("unknown builtin field: " + name);
}

DssForce builtin_force(const std::string& name, double lambda) {
    ScaleFactor sf(lambda);
    if (name == "none" || name.empty()) return DssForce();
    if (name == "test-pulse") {
        double T = sf.period();
        auto F = [T](const Vec3& y, double s) -> Vec3 {
            double r2 = y.norm2();
            double env = std::exp(-r2 / 8.0);
            double osc = 1.0 + std::cos(2.0 * kPi * s / T);
            return {0.02 * env * osc, 0.0, -0.02 * env * osc * 0.5};
        };
        return DssForce(name, sf, F);
    }
    throw ConfigError("unknown builtin force: " + name);
}

double lorentz_3inf_estimate(const DssField& field, const AnnulusGridSpec& grid) {
    if (grid.n_r <= 0 || grid.n_theta <= 0 || grid.n_phi <= 0)
        throw ConfigError("lorentz estimate needs a nonempty sample grid");
    const double lam = field.scale().lambda;
    const double loglam = std::log(lam);

    // samples (value, cell volume) on the fundamental annulus
    std::vector<std::pair<double, double>> samples;
    samples.reserve(std::size_t(grid.n_r) * grid.n_theta * grid.n_phi);
    for (int i = 0; i < grid.n_r; ++i) {
        double r = std::exp(loglam * (i + 0.5) / grid.n_r);
        double dvr = loglam / grid.n_r * r * r * r;  // r^3 d(log r)
        for (int j = 0; j < grid.n_theta; ++j) {
            double mu = -1.0 + 2.0 * (j + 0.5) / grid.n_theta;
            double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
            double dv = dvr * (2.0 / grid.n_theta) * (2.0 * kPi / grid.n_phi);
            for (int l = 0; l < grid.n_phi; ++l) {
                double ph = 2.0 * kPi * (l + 0.5) / grid.n_phi;
                Vec3 z{r * st * std::cos(ph), r * st * std::sin(ph), r * mu};
                samples.emplace_back(field.annulus().eval(z).norm(), dv);
            }
        }
    }
    std::sort(samples.begin(), samples.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    double vmax = samples.front().first;
    if (vmax <= 0.0) return 0.0;

    // prefix volumes of {samples >= s}
    std::vector<double> vals(samples.size()), pref(samples.size() + 1, 0.0);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        vals[i] = samples[i].first;
        pref[i + 1] = pref[i] + samples[i].second;
    }
    double vol_total = pref.back();
    auto vol_ge = [&](double s) -> double {
        if (s > vmax) return 0.0;
        // number of vals >= s (vals sorted descending)
        auto it = std::lower_bound(vals.begin(), vals.end(), s,
                                   [](double a, double b) { return a > b; });
        std::size_t n = std::upper_bound(vals.begin(), vals.end(), s,
                                         [](double a, double b) { return a > b; }) -
                        vals.begin();
        (void)it;
        return pref[n];
    };

    // mu(t) = sum_j lambda^{-3j} vol{ >= t lambda^{-j} }, with analytic
    // geometric tail once t lambda^{-j} falls below the smallest sample.
    double vmin_pos = vals.back();
    for (auto v : vals)
        if (v > 0) vmin_pos = std::min(vmin_pos, v);
    auto mu = [&](double t) -> double {
        double total = 0.0;
        int jlo = (int)std::floor(std::log(t / vmax) / loglam) - 1;
        double tail_scale = 0.0;
        for (int j = jlo;; ++j) {
            double s = t * std::pow(lam, -double(j));
            if (s > vmax) continue;
            if (s < vmin_pos) {
                tail_scale = std::pow(lam, -3.0 * double(j));
                break;
            }
            total += std::pow(lam, -3.0 * double(j)) * vol_ge(s);
        }
        total += vol_total * tail_scale / (1.0 - std::pow(lam, -3.0));
        return total;
    };

    // G(t) = t mu(t)^(1/3) is log-lambda periodic; local maxima at sample
    // values. Scan representatives of distinct values in one period window.
    double best = 0.0;
    std::vector<double> cand;
    cand.reserve(2048);
    double prev = -1.0;
    for (auto v : vals) {
        if (v <= 0) break;
        double rep = v * std::pow(lam, -std::floor(std::log(v / vmax) / loglam) - 1.0);
        if (std::abs(rep - prev) > 1e-12 * vmax) cand.push_back(rep);
        prev = rep;
        if (cand.size() > 1 && cand.size() % 4096 == 0) break;  // plenty of candidates
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (double t : cand) best = std::max(best, t * std::cbrt(mu(t)));
    return best;
}

// ---- annulus grid file ------------------------------------------------------

namespace {
constexpr char kAnnMagic[9] = "DSSANN01";
}

void write_annulus_file(const std::string& path, const DssField& field, const AnnulusGridSpec& g) {
    const double lam = field.scale().lambda;
    const double loglam = std::log(lam);
    int ncomp = field.kind() == FieldKind::Scalar ? 1 : 3;
    std::vector<double> vals(std::size_t(g.n_r) * g.n_theta * g.n_phi * ncomp);
    std::size_t idx = 0;
    for (int i = 0; i < g.n_r; ++i) {
        double r = std::exp(loglam * (i + 0.5) / g.n_r);
        for (int j = 0; j < g.n_theta; ++j) {
            double th = kPi * (j + 0.5) / g.n_theta;
            for (int l = 0; l < g.n_phi; ++l) {
                double ph = 2.0 * kPi * l / g.n_phi;
                Vec3 z{r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph),
                       r * std::cos(th)};
                Vec3 v = field.annulus().eval(z);
                for (int c = 0; c < ncomp; ++c) vals[idx++] = v[c];
            }
        }
    }
    nlohmann::json hdr = {{"kind", ncomp == 1 ? "scalar" : "vector3"},
                          {"lambda", lam},
                          {"n_r", g.n_r},
                          {"n_theta", g.n_theta},
                          {"n_phi", g.n_phi}};
    std::string hs = hdr.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out.write(kAnnMagic, 8);
    std::uint64_t len = hs.size();
    out.write(reinterpret_cast<const char*>(&len), 8);
    out.write(hs.data(), hs.size());
    out.write(reinterpret_cast<const char*>(vals.data()), vals.size() * sizeof(double));
}

DssField read_annulus_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kAnnMagic, 8) != 0)
        throw IntegrityError("bad annulus file magic: " + path);
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), 8);
    std::string hs(len, '\0');
    in.read(hs.data(), len);
    nlohmann::json hdr = nlohmann::json::parse(hs);
    double lam = hdr.at("lambda").get<double>();
    AnnulusGridSpec g{hdr.at("n_r").get<int>(), hdr.at("n_theta").get<int>(),
                      hdr.at("n_phi").get<int>()};
    int ncomp = hdr.at("kind").get<std::string>() == "scalar" ? 1 : 3;
    std::vector<double> vals(std::size_t(g.n_r) * g.n_theta * g.n_phi * ncomp);
    in.read(reinterpret_cast<char*>(vals.data()), vals.size() * sizeof(double));
    if (!in) throw IntegrityError("truncated annulus file: " + path);
    auto data = std::make_shared<GriddedAnnulus>(lam, ncomp, g, std::move(vals));
    return DssField("annulus-file", ncomp == 1 ? FieldKind::Scalar : FieldKind::Vector3,
                    ScaleFactor(lam), false, data);
}

}  // namespace dssflow
