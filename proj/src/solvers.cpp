#include "dssflow/solvers.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>

namespace dssflow {

namespace {

std::vector<double> axpy_vec(const std::vector<double>& x, double c, const std::vector<double>& y) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + c * y[i];
    return out;
}

// restarted-free GMRES on A d = rhs with a matrix-free action; returns d
std::vector<double> gmres(const std::function<std::vector<double>(const std::vector<double>&)>& A,
                          const std::vector<double>& rhs, int maxdim, double rtol) {
    const std::size_t n = rhs.size();
    double beta = norm(rhs);
    std::vector<double> d(n, 0.0);
    if (beta == 0) return d;

    std::vector<std::vector<double>> q;
    q.push_back(rhs);
    for (double& v : q[0]) v /= beta;

    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(maxdim + 1, maxdim);
    Eigen::VectorXd y;
    int used = 0;
    for (int k = 0; k < maxdim; ++k) {
        std::vector<double> v = A(q[k]);
        for (int j = 0; j <= k; ++j) {
            double h = 0;
            for (std::size_t i = 0; i < n; ++i) h += q[j][i] * v[i];
            H(j, k) = h;
            for (std::size_t i = 0; i < n; ++i) v[i] -= h * q[j][i];
        }
        double h = norm(v);
        H(k + 1, k) = h;
        used = k + 1;
        if (h < 1e-14 * beta) break;
        for (double& w : v) w /= h;
        q.push_back(std::move(v));

        Eigen::VectorXd e1 = Eigen::VectorXd::Zero(used + 1);
        e1(0) = beta;
        Eigen::MatrixXd Hk = H.topLeftCorner(used + 1, used);
        y = Hk.colPivHouseholderQr().solve(e1);
        double resid = (Hk * y - e1).norm() / beta;
        if (resid < rtol) break;
    }
    if (y.size() == 0) return d;
    for (int k = 0; k < y.size(); ++k)
        for (std::size_t i = 0; i < n; ++i) d[i] += y(k) * q[k][i];
    return d;
}

}  // namespace

namespace {
// step count must divide the period exactly
StepControls fit_period(StepControls c, double T) {
    int n = std::max(1, int(std::ceil(T / c.ds - 1e-12)));
    c.ds = T / n;
    return c;
}
}  // namespace

PoincareMap::PoincareMap(const SystemData& data, StepControls ctl, double s0)
    : data_(data), ctl_(fit_period(ctl, data.T)),
      nsteps_(int(std::lround(data.T / ctl_.ds))), s0_(s0),
      layout_(data.box, data.consts.m), runner_(data, ctl_) {}

std::vector<double> PoincareMap::apply(const std::vector<double>& x, EnergyLedger* ledger) const {
    GalerkinState st = layout_.unpack(x, s0_);
    runner_.run(st, nsteps_, ledger);
    return layout_.pack(st);
}

std::vector<double> solve_periodic(const PoincareMap& map, const PeriodicSolveOptions& opt,
                                   SolveDiagnostics& diag) {
    if (!(opt.tol > 0)) throw ConfigError("solve_periodic: tol must be positive");
    diag.rho_hat = map.data().consts.rho_hat;
    diag.m = map.data().consts.m;

    std::vector<double> x(map.layout().dim(), 0.0);
    auto S = [&](const std::vector<double>& v) {
        ++diag.map_evals;
        if (diag.map_evals > opt.max_map_evals)
            throw ConvergenceError("solve_periodic: map evaluation budget exhausted",
                                   diag.residual_history.empty() ? -1.0
                                                                 : diag.residual_history.back());
        return map.apply(v);
    };

    // stage 1: dissipative map iteration
    std::vector<double> Sx = S(x);
    double r = norm(axpy_vec(Sx, -1.0, x)) / std::max(1.0, norm(x));
    diag.residual_history.push_back(r);
    int picard = 0;
    while (r > opt.tol && picard < opt.max_picard && r > opt.picard_exit) {
        x = Sx;
        Sx = S(x);
        r = norm(axpy_vec(Sx, -1.0, x)) / std::max(1.0, norm(x));
        diag.residual_history.push_back(r);
        ++picard;
        // stall: no progress over the last three sweeps
        auto& h = diag.residual_history;
        if (h.size() > 3 && r > 0.95 * h[h.size() - 4]) break;
    }

    // stage 2: Newton-GMRES on F(x) = S(x) - x
    while (r > opt.tol) {
        std::vector<double> F = axpy_vec(Sx, -1.0, x);
        double xn = norm(x);
        double h = opt.fd_step * (1.0 + xn);
        auto J = [&](const std::vector<double>& d) {
            double dn = norm(d);
            if (dn == 0) return d;
            std::vector<double> xp = axpy_vec(x, h / dn, d);
            std::vector<double> Sp = S(xp);
            std::vector<double> out(d.size());
            for (std::size_t i = 0; i < d.size(); ++i)
                out[i] = (Sp[i] - Sx[i]) * (dn / h) - d[i];
            return out;
        };
        std::vector<double> rhs(F.size());
        for (std::size_t i = 0; i < F.size(); ++i) rhs[i] = -F[i];
        std::vector<double> d = gmres(J, rhs, opt.krylov_dim, 0.2);
        x = axpy_vec(x, 1.0, d);
        Sx = S(x);
        r = norm(axpy_vec(Sx, -1.0, x)) / std::max(1.0, norm(x));
        diag.residual_history.push_back(r);
        ++diag.newton_iters;
        if (diag.newton_iters > 40)
            throw ConvergenceError("solve_periodic: Newton did not converge", r);
    }

    diag.final_residual = r;
    diag.x_norm = norm(x);
    // re-integrate once at the solution with the ledger attached
    map.apply(x, &diag.orbit_ledger);
    ++diag.map_evals;
    for (const auto& w : diag.orbit_ledger.warnings) diag.warnings.push_back(w);
    return x;
}

StationaryMap::StationaryMap(const SystemData& data)
    : data_(data), layout_(data.box, data.consts.m) {
    if (!data.stationary())
        throw UsageError("stationary map requires s-independent data (self-similar inputs)");
}

std::vector<double> StationaryMap::residual(const std::vector<double>& x) const {
    GalerkinState st = layout_.unpack(x, 0.0);
    Tendency t = rhs_full(st, data_);
    GalerkinState td;
    td.U = std::move(t.dU);
    td.Psi = std::move(t.dPsi);
    td.s = 0;
    return layout_.pack(td);
}

std::vector<double> solve_stationary(const StationaryMap& smap, const StationarySolveOptions& opt,
                                     SolveDiagnostics& diag) {
    if (!(opt.tol > 0)) throw ConfigError("solve_stationary: tol must be positive");
    const SystemData& data = smap.data();
    diag.rho_hat = data.consts.rho_hat;
    diag.m = data.consts.m;

    StepControls ctl;
    ctl.ds = opt.ds;
    ctl.record_residuals = false;
    PoincareMap pmap(data, ctl);

    std::vector<double> x(smap.layout().dim(), 0.0);
    double scale = std::max(1.0, norm(smap.residual(x)));
    double r = norm(smap.residual(x)) / scale;
    diag.residual_history.push_back(r);

    // pseudo-time continuation: integrate the autonomous flow
    for (int p = 0; p < opt.max_pseudo_periods && r > 1e-3; ++p) {
        x = pmap.apply(x);
        ++diag.map_evals;
        r = norm(smap.residual(x)) / scale;
        diag.residual_history.push_back(r);
    }

    // Newton-GMRES on P(x) = 0
    while (r > opt.tol) {
        std::vector<double> P = smap.residual(x);
        double h = opt.fd_step * (1.0 + norm(x));
        auto J = [&](const std::vector<double>& d) {
            double dn = norm(d);
            if (dn == 0) return d;
            std::vector<double> Pp = smap.residual(axpy_vec(x, h / dn, d));
            std::vector<double> out(d.size());
            for (std::size_t i = 0; i < d.size(); ++i) out[i] = (Pp[i] - P[i]) * (dn / h);
            return out;
        };
        std::vector<double> rhs(P.size());
        for (std::size_t i = 0; i < P.size(); ++i) rhs[i] = -P[i];
        std::vector<double> d = gmres(J, rhs, opt.krylov_dim, 0.1);
        x = axpy_vec(x, 1.0, d);
        r = norm(smap.residual(x)) / scale;
        diag.residual_history.push_back(r);
        ++diag.newton_iters;
        if (diag.newton_iters > opt.max_newton)
            throw ConvergenceError("solve_stationary: Newton did not converge", r);
    }

    diag.final_residual = r;
    diag.x_norm = norm(x);
    // stationary solutions are fixed points of the Poincare map
    std::vector<double> Sx = pmap.apply(x, &diag.orbit_ledger);
    ++diag.map_evals;
    diag.cross_check = norm(axpy_vec(Sx, -1.0, x)) / std::max(1.0, norm(x));
    for (const auto& w : diag.orbit_ledger.warnings) diag.warnings.push_back(w);
    return x;
}

}  // namespace dssflow
