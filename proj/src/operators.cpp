#include "dssflow/operators.hpp"

#include <cmath>

#include "dssflow/errors.hpp"
#include "dssflow/util.hpp"

namespace dssflow {

namespace {

// Apply fn(kx, ky, kz, index) over the r2c mode layout of one component.
template <class F>
void for_modes(const Box& b, F&& fn) {
    const int N = b.N, H = b.nhalf();
    std::size_t idx = 0;
    for (int i = 0; i < N; ++i) {
        double kx = b.kfull(i);
        for (int j = 0; j < N; ++j) {
            double ky = b.kfull(j);
            for (int l = 0; l < H; ++l, ++idx) fn(kx, ky, b.khalf(l), idx);
        }
    }
}

// Parseval weight: conjugate pairs are stored once except on the l=0 and
// l=N/2 planes.
inline double pair_weight(const Box& b, int l) { return (l == 0 || l == b.N / 2) ? 1.0 : 2.0; }

void check_same(const Field& a, const Field& b) {
    if (!a.box().same_grid(b.box())) throw UsageError("fields live on different boxes");
}

}  // namespace

void dealias(Field& f) {
    const Box& b = f.box();
    CplxVec& s = f.spec_mut();
    const int N = b.N, H = b.nhalf();
    for (int c = 0; c < f.ncomp(); ++c) {
        Cplx* p = s.data() + c * b.nspec();
        std::size_t idx = 0;
        for (int i = 0; i < N; ++i) {
            bool ki = std::abs(b.mode(i)) > b.kd;
            for (int j = 0; j < N; ++j) {
                bool kj = ki || std::abs(b.mode(j)) > b.kd;
                for (int l = 0; l < H; ++l, ++idx)
                    if (kj || l > b.kd) p[idx] = 0.0;
            }
        }
    }
}

Field derivative(const Field& f, int dim) {
    const Box& b = f.box();
    Field out(f.box_ptr(), f.ncomp());
    CplxVec& o = out.spec_raw();
    const CplxVec& s = f.spec();
    for (int c = 0; c < f.ncomp(); ++c) {
        std::size_t off = c * b.nspec();
        for_modes(b, [&](double kx, double ky, double kz, std::size_t idx) {
            double k = dim == 0 ? kx : dim == 1 ? ky : kz;
            o[off + idx] = Cplx(0.0, k) * s[off + idx];
        });
    }
    return out;
}

Field gradient(const Field& scalar) {
    if (scalar.ncomp() != 1) throw UsageError("gradient expects a scalar field");
    const Box& b = scalar.box();
    Field out(scalar.box_ptr(), 3);
    CplxVec& o = out.spec_raw();
    const CplxVec& s = scalar.spec();
    for_modes(b, [&](double kx, double ky, double kz, std::size_t idx) {
        Cplx v = s[idx];
        o[idx] = Cplx(0.0, kx) * v;
        o[b.nspec() + idx] = Cplx(0.0, ky) * v;
        o[2 * b.nspec() + idx] = Cplx(0.0, kz) * v;
    });
    return out;
}

Field divergence(const Field& vec) {
    if (vec.ncomp() != 3) throw UsageError("divergence expects a vector field");
    const Box& b = vec.box();
    Field out(vec.box_ptr(), 1);
    CplxVec& o = out.spec_raw();
    const CplxVec& s = vec.spec();
    for_modes(b, [&](double kx, double ky, double kz, std::size_t idx) {
        o[idx] = Cplx(0.0, 1.0) * (kx * s[idx] + ky * s[b.nspec() + idx] + kz * s[2 * b.nspec() + idx]);
    });
    return out;
}

Field laplacian(const Field& f) {
    const Box& b = f.box();
    Field out(f.box_ptr(), f.ncomp());
    CplxVec& o = out.spec_raw();
    const CplxVec& s = f.spec();
    for (int c = 0; c < f.ncomp(); ++c) {
        std::size_t off = c * b.nspec();
        for_modes(b, [&](double kx, double ky, double kz, std::size_t idx) {
            o[off + idx] = -(kx * kx + ky * ky + kz * kz) * s[off + idx];
        });
    }
    return out;
}

void leray_project(Field& vec) {
    if (vec.ncomp() != 3) throw UsageError("leray_project expects a vector field");
    const Box& b = vec.box();
    CplxVec& s = vec.spec_mut();
    for_modes(b, [&](double kx, double ky, double kz, std::size_t idx) {
        double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) return;
        Cplx kd = (kx * s[idx] + ky * s[b.nspec() + idx] + kz * s[2 * b.nspec() + idx]) / k2;
        s[idx] -= kx * kd;
        s[b.nspec() + idx] -= ky * kd;
        s[2 * b.nspec() + idx] -= kz * kd;
    });
}

double spectral_divergence_norm(const Field& vec) { return l2_norm(divergence(vec)); }

Field convect(const Field& a, const Field& b_field) {
    check_same(a, b_field);
    if (a.ncomp() != 3) throw UsageError("convect expects a vector advecting field");
    const Box& box = a.box();
    const std::size_t np = box.nphys();

    Field ad = a.clone();
    dealias(ad);
    Field bd = b_field.clone();
    dealias(bd);
    const RealVec& ap = ad.phys();

    Field out(a.box_ptr(), bd.ncomp());
    CplxVec& os = out.spec_raw();
    const Fft& fft = Fft::get(box.N);

    Field grads[3] = {derivative(bd, 0), derivative(bd, 1), derivative(bd, 2)};
    for (auto& g : grads) g.phys();

    RealVec work(np), adv(np);
    CplxVec ws, flux[3];
    for (int c = 0; c < bd.ncomp(); ++c) {
        // (a . grad) b_c, physical
        std::fill(adv.begin(), adv.end(), 0.0);
        for (int d = 0; d < 3; ++d) {
            const double* gp = grads[d].phys().data() + c * np;
            const double* av = ap.data() + d * np;
            for (std::size_t i = 0; i < np; ++i) adv[i] += av[i] * gp[i];
        }
        fft.forward(adv, ws);

        // flux divergence: sum_d i k_d (a_d b_c)^hat
        const double* bp = bd.phys().data() + c * np;
        for (int d = 0; d < 3; ++d) {
            const double* av = ap.data() + d * np;
            for (std::size_t i = 0; i < np; ++i) work[i] = av[i] * bp[i];
            fft.forward(work, flux[d]);
        }
        std::size_t off = c * box.nspec();
        for_modes(box, [&](double kx, double ky, double kz, std::size_t idx) {
            Cplx divflux = Cplx(0.0, 1.0) * (kx * flux[0][idx] + ky * flux[1][idx] + kz * flux[2][idx]);
            os[off + idx] = 0.5 * (ws[idx] + divflux);
        });
    }
    dealias(out);
    return out;
}

Field drift_term(const Field& f) {
    const Box& box = f.box();
    const std::size_t np = box.nphys();
    Field out(f.box_ptr(), f.ncomp());
    RealVec& op = out.phys_raw();
    std::fill(op.begin(), op.end(), 0.0);
    for (int d = 0; d < 3; ++d) {
        Field g = derivative(f, d);
        const RealVec& gp = g.phys();
        const RealVec& yt = box.ytilde(d);
        for (int c = 0; c < f.ncomp(); ++c) {
            double* o = op.data() + c * np;
            const double* gg = gp.data() + c * np;
            for (std::size_t i = 0; i < np; ++i) o[i] += 0.5 * yt[i] * gg[i];
        }
    }
    dealias(out);
    return out;
}

Field grav_field(BoxPtr box, double delta) {
    if (delta < 0) throw ConfigError("grav delta must be >= 0");
    const Box& b = *box;
    Field out(box, 3);
    RealVec& p = out.phys_raw();
    const std::size_t np = b.nphys();
    for (int i = 0; i < b.N; ++i)
        for (int j = 0; j < b.N; ++j)
            for (int l = 0; l < b.N; ++l) {
                std::size_t idx = b.phys_index(i, j, l);
                Vec3 y{b.coord(i), b.coord(j), b.coord(l)};
                double r2 = y.norm2() + delta * delta;
                if (r2 == 0.0) {
                    p[idx] = p[np + idx] = p[2 * np + idx] = 0.0;
                    continue;
                }
                double w = -1.0 / (r2 * std::sqrt(r2));
                p[idx] = w * y.x;
                p[np + idx] = w * y.y;
                p[2 * np + idx] = w * y.z;
            }
    return out;
}

double hardy_ratio(const Field& u) {
    if (u.ncomp() != 1) throw UsageError("hardy_ratio expects a scalar field");
    const Box& b = u.box();
    const RealVec& p = u.phys();
    const RealVec& r = b.radius();
    double num = 0.0, u0 = 0.0;
    for (std::size_t i = 0; i < b.nphys(); ++i) {
        if (r[i] == 0.0) {
            u0 = p[i];
            continue;
        }
        num += p[i] * p[i] / (r[i] * r[i]);
    }
    double h = b.h();
    num = num * h * h * h + u0 * u0 * h * kInvSqLatticeConstant;
    double den = 4.0 * grad_norm_sq(u);
    if (den == 0.0) throw UsageError("hardy_ratio undefined for a constant field");
    return num / den;
}

Mollifier::Mollifier(BoxPtr box, double epsilon) : eps_(epsilon), box_(std::move(box)) {
    if (!(epsilon > 0 && epsilon < 1)) throw ConfigError("mollifier epsilon must be in (0,1)");
    const Box& b = *box_;
    symbol_.resize(b.nspec());
    // eta_hat(kappa) = 4 pi int_0^1 eta(r) r^2 sinc(kappa r) dr, normalized so
    // the symbol is exactly 1 at kappa = 0.
    auto eta = [](double r) { return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0; };
    const int ngl = 64;
    double mass = gl_integrate([&](double r) { return eta(r) * r * r; }, 0.0, 1.0, ngl);
    auto eta_hat = [&](double kappa) {
        if (kappa < 1e-12) return 1.0;
        double v = gl_integrate([&](double r) { return eta(r) * r * std::sin(kappa * r); }, 0.0,
                                1.0, ngl);
        return v / (kappa * mass);
    };
    for_modes(b, [&](double kx, double ky, double kz, std::size_t idx) {
        symbol_[idx] = eta_hat(eps_ * std::sqrt(kx * kx + ky * ky + kz * kz));
    });
}

Field Mollifier::apply(const Field& f) const {
    if (!f.box().same_grid(*box_)) throw UsageError("mollifier built for a different box");
    Field out(f.box_ptr(), f.ncomp());
    CplxVec& o = out.spec_raw();
    const CplxVec& s = f.spec();
    const std::size_t ns = f.box().nspec();
    for (int c = 0; c < f.ncomp(); ++c)
        for (std::size_t i = 0; i < ns; ++i) o[c * ns + i] = symbol_[i] * s[c * ns + i];
    return out;
}

double inner(const Field& a, const Field& b) {
    check_same(a, b);
    if (a.ncomp() != b.ncomp()) throw UsageError("inner: component mismatch");
    const Box& box = a.box();
    const CplxVec& sa = a.spec();
    const CplxVec& sb = b.spec();
    const int H = box.nhalf();
    double sum = 0.0;
    for (int c = 0; c < a.ncomp(); ++c) {
        std::size_t off = c * box.nspec();
        std::size_t idx = 0;
        for (int i = 0; i < box.N; ++i)
            for (int j = 0; j < box.N; ++j)
                for (int l = 0; l < H; ++l, ++idx) {
                    double w = pair_weight(box, l);
                    const Cplx& x = sa[off + idx];
                    const Cplx& y = sb[off + idx];
                    sum += w * (x.real() * y.real() + x.imag() * y.imag());
                }
    }
    return sum * box.vol();
}

double inner_phys(const Field& a, const Field& b) {
    check_same(a, b);
    const RealVec& pa = a.phys();
    const RealVec& pb = b.phys();
    double sum = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) sum += pa[i] * pb[i];
    double h = a.box().h();
    return sum * h * h * h;
}

double l2_norm(const Field& f) { return std::sqrt(std::max(0.0, inner(f, f))); }

double grad_norm_sq(const Field& f) {
    const Box& box = f.box();
    const CplxVec& s = f.spec();
    double sum = 0.0;
    for (int c = 0; c < f.ncomp(); ++c) {
        std::size_t off = c * box.nspec();
        for_modes(box, [&](double kx, double ky, double kz, std::size_t idx) {
            double k2 = kx * kx + ky * ky + kz * kz;
            int l = int(idx % box.nhalf());
            sum += pair_weight(box, l) * k2 * std::norm(s[off + idx]);
        });
    }
    return sum * box.vol();
}

double h1_norm_sq(const Field& f) { return inner(f, f) + grad_norm_sq(f); }

double hminus1_norm(const Field& f) {
    const Box& box = f.box();
    const CplxVec& s = f.spec();
    double sum = 0.0;
    for (int c = 0; c < f.ncomp(); ++c) {
        std::size_t off = c * box.nspec();
        for_modes(box, [&](double kx, double ky, double kz, std::size_t idx) {
            double k2 = kx * kx + ky * ky + kz * kz;
            int l = int(idx % box.nhalf());
            sum += pair_weight(box, l) * std::norm(s[off + idx]) / (1.0 + k2);
        });
    }
    return std::sqrt(sum * box.vol());
}

double lp_norm_phys(const Field& f, double p) {
    const Box& box = f.box();
    const RealVec& v = f.phys();
    const std::size_t np = box.nphys();
    double sum = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
        double m2 = 0.0;
        for (int c = 0; c < f.ncomp(); ++c) m2 += v[c * np + i] * v[c * np + i];
        sum += std::pow(m2, 0.5 * p);
    }
    double h = box.h();
    return std::pow(sum * h * h * h, 1.0 / p);
}

double max_abs(const Field& f) {
    const RealVec& v = f.phys();
    const std::size_t np = f.box().nphys();
    double m = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
        double m2 = 0.0;
        for (int c = 0; c < f.ncomp(); ++c) m2 += v[c * np + i] * v[c * np + i];
        m = std::max(m, m2);
    }
    return std::sqrt(m);
}

double boundary_shell_fraction(const Field& f) {
    const Box& b = f.box();
    const RealVec& v = f.phys();
    const std::size_t np = b.nphys();
    const double edge = 0.9 * b.L;
    double shell = 0.0, total = 0.0;
    for (int i = 0; i < b.N; ++i)
        for (int j = 0; j < b.N; ++j)
            for (int l = 0; l < b.N; ++l) {
                std::size_t idx = b.phys_index(i, j, l);
                double m2 = 0.0;
                for (int c = 0; c < f.ncomp(); ++c) m2 += v[c * np + idx] * v[c * np + idx];
                total += m2;
                bool outer = std::abs(b.coord(i)) > edge || std::abs(b.coord(j)) > edge ||
                             std::abs(b.coord(l)) > edge;
                if (outer) shell += m2;
            }
    return total > 0 ? shell / total : 0.0;
}

double interior_l2_norm(const Field& f) {
    const Box& b = f.box();
    const RealVec& v = f.phys();
    const auto& mask = b.interior();
    const std::size_t np = b.nphys();
    double sum = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
        if (!mask[i]) continue;
        for (int c = 0; c < f.ncomp(); ++c) sum += v[c * np + i] * v[c * np + i];
    }
    double h = b.h();
    return std::sqrt(sum * h * h * h);
}

}  // namespace dssflow
