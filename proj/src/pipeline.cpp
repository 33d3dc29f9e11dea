#include "dssflow/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <random>

#include "json.hpp"

namespace dssflow {

namespace fs = std::filesystem;

namespace {

DssField load_data(const std::string& builtin, const std::string& file, double lambda,
                   FieldKind expect, const char* which) {
    DssField f = file.empty() ? builtin_field(builtin, lambda) : read_annulus_file(file);
    if (f.kind() != expect)
        throw ConfigError(std::string("data for ") + which + " has the wrong kind");
    return f;
}

nlohmann::json tail_json(const TailBound& tb) {
    nlohmann::json j;
    j["q"] = tb.q;
    j["radii"] = tb.radii;
    j["mu"] = tb.mu;
    return j;
}

nlohmann::json certs_json(const RevisionCertificates& c) {
    nlohmann::json j;
    j["R0"] = c.R0;
    j["alpha_target"] = c.alpha_target;
    j["div_residual_max"] = c.div_residual_max;
    j["div_residual_l2"] = c.div_residual_l2;
    j["lq_norm"] = c.lq_norm;
    j["q"] = c.q;
    j["l4_norm"] = c.l4_norm;
    j["vstar_l4"] = c.vstar_l4;
    j["thetastar_l4"] = c.thetastar_l4;
    j["vstar_lq"] = c.vstar_lq;
    j["thetastar_lq"] = c.thetastar_lq;
    j["grad_thetastar_l2"] = c.grad_thetastar_l2;
    j["L_vstar_l2"] = c.L_vstar_l2;
    j["L_thetastar_l2"] = c.L_thetastar_l2;
    j["L_vstar_hm1"] = c.L_vstar_hm1;
    j["L_thetastar_hm1"] = c.L_thetastar_hm1;
    j["vstar_minus_v0_l2"] = c.vstar_minus_v0_l2;
    j["poisson_identity_residual"] = c.poisson_identity_residual;
    j["w_kernel_crosscheck"] = c.w_kernel_crosscheck;
    j["w_decay_exponent"] = c.w_decay_exponent;
    j["shim_norm_fraction"] = c.shim_norm_fraction;
    j["shell_fraction_LTheta"] = c.shell_fraction_LTheta;
    return j;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace

ProfileStage run_profile_stage(const RunConfig& cfg, bool with_certificates) {
    ProfileStage st;
    st.box = Box::make(cfg.L, cfg.N, cfg.dealias_fraction, cfg.drift_window_fraction);

    DssField dv = load_data(cfg.data_v, cfg.annulus_file_v, cfg.lambda, FieldKind::Vector3, "v0");
    DssField dt = load_data(cfg.data_theta, cfg.annulus_file_theta, cfg.lambda, FieldKind::Scalar,
                            "theta0");

    HeatQuadOptions opt;
    opt.tol = cfg.tol_quad;

    st.V0_box = compute_profile(dv, st.box, cfg.n_s, opt, cfg.threads);
    st.Th0_box = compute_profile(dt, st.box, cfg.n_s, opt, cfg.threads);

    st.lorentz_v = lorentz_3inf_estimate(dv);
    st.lorentz_theta = lorentz_3inf_estimate(dt);
    st.tails = tail_norms(st.Th0_box, cfg.q, {2.0, 4.0, 8.0, 0.5 * cfg.L, 0.8 * cfg.L});

    if (with_certificates) {
        st.cert = certificate_grid(*st.box);
        RadialTaper taper = certificate_taper(*st.box);
        st.V0_cert = compute_profile(dv, st.cert, cfg.n_s, opt, cfg.threads, taper);
        st.Th0_cert = compute_profile(dt, st.cert, cfg.n_s, opt, cfg.threads, taper);
        st.LV0_ratio = annihilation_ratio(st.V0_cert, *st.box);
        st.LTh0_ratio = annihilation_ratio(st.Th0_cert, *st.box);
    }
    return st;
}

SolveResult run_solve(const RunConfig& cfg) {
    SolveResult res;
    res.cfg = cfg;
    res.profile_certs = run_profile_stage(cfg, true);
    ProfileStage& ps = res.profile_certs;

    ReviseOptions ropt;
    ropt.q = cfg.q;
    ropt.threads = cfg.threads;

    double alpha = cfg.alpha;
    if (alpha == 0.0) {
        // heuristic default; the box-attainable floor decides feasibility
        double v0l4 = lq_norm_with_tail(ps.V0_box, 4.0);
        alpha = 0.05 * (1.0 + v0l4);
    }
    res.alpha_used = alpha;
    ropt.alpha_target = alpha;

    double R0 = cfg.R0;
    if (R0 == 0.0) R0 = choose_R0(ps.V0_box, ps.Th0_box, alpha, cfg.q, ropt);
    res.R0 = R0;

    RevisedProfilePair rev =
        revise(ps.V0_box, ps.Th0_box, ps.V0_cert, ps.Th0_cert, R0, ropt);

    if (cfg.mode == "stationary") {
        DssField dv =
            load_data(cfg.data_v, cfg.annulus_file_v, cfg.lambda, FieldKind::Vector3, "v0");
        DssField dt = load_data(cfg.data_theta, cfg.annulus_file_theta, cfg.lambda,
                                FieldKind::Scalar, "theta0");
        if (!dv.homogeneous() || !dt.homogeneous())
            throw UsageError(
                "stationary mode needs (-1)-homogeneous (self-similar) data; this data is only "
                "discretely self-similar");
    }

    DssForce force = builtin_force(cfg.force, cfg.lambda);
    res.data = std::make_unique<SystemData>(build_system(ps.box, std::move(rev),
                                                         ps.V0_box, ps.Th0_box, force, cfg.n_s,
                                                         cfg.epsilon, cfg.delta));
    SystemData& data = *res.data;

    StepControls ctl;
    ctl.ds = std::min(cfg.ds, 0.9 * stable_ds(data));
    PoincareMap pmap(data, ctl);

    if (cfg.mode == "periodic") {
        PeriodicSolveOptions popt;
        popt.tol = cfg.tol_solve;
        popt.max_map_evals = cfg.max_map_evals;
        res.xstar = solve_periodic(pmap, popt, res.diag);
    } else {
        StationaryMap smap(data);
        StationarySolveOptions sopt;
        sopt.tol = cfg.tol_solve;
        sopt.ds = ctl.ds;
        res.xstar = solve_stationary(smap, sopt, res.diag);
    }

    res.orbit = orbit_snapshots(pmap, res.xstar, cfg.n_snap);

    // verification reports
    {
        double T = data.T;
        double lam = std::exp(T / 2.0);
        res.quarter = quarter_power_check(
            data, res.orbit, {std::pow(lam, -4.0), 1.0, std::pow(lam, 4.0)});
        std::vector<GalerkinState> interior(res.orbit.begin(), res.orbit.end() - 1);
        res.pressure_report = pressure_bound_check(interior, data);
        {
            PressureField pf = pressure(assemble_F_all(res.orbit.front(), data));
            res.pressure_residual = pf.residual;
        }
        for (const auto& bump : bump_family(*data.box, T))
            res.local_energy.push_back(local_energy_residual(data, res.orbit, bump));

        // DSS identity of the reconstruction at a few random points
        PhysicalSolution sol(data, res.orbit);
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> un(-0.3 * cfg.L, 0.3 * cfg.L);
        std::uniform_real_distribution<double> ut(0.8, 1.4);
        double worst = 0;
        for (int i = 0; i < 10; ++i) {
            Vec3 x{un(rng), un(rng), un(rng)};
            double t = ut(rng);
            if (x.norm() < 1e-3) continue;
            auto a = sol.eval(x, t);
            auto b = sol.eval(x * lam, t * lam * lam);
            double scale = std::max({a.v.norm(), 1e-12});
            worst = std::max(worst, (a.v - b.v * lam).norm() / scale);
            worst = std::max(worst, std::abs(a.theta - lam * b.theta) / scale);
            worst = std::max(worst, std::abs(a.p - lam * lam * b.p) / std::max(std::abs(a.p), 1e-9));
        }
        res.dss_identity_err = worst;
    }
    return res;
}

namespace {

void write_profile_artifacts(const RunConfig& cfg, const ProfileStage& ps, Manifest& man,
                             const std::string& dir) {
    fs::create_directories(dir + "/profiles");
    write_profile_file(dir + "/profiles/V0.prof", ps.V0_box, cfg.lambda, cfg.tol_quad);
    write_profile_file(dir + "/profiles/Theta0.prof", ps.Th0_box, cfg.lambda, cfg.tol_quad);
    man.record("profiles/V0.prof", dir);
    man.record("profiles/Theta0.prof", dir);

    nlohmann::json j;
    j["lorentz_3inf_v"] = ps.lorentz_v;
    j["lorentz_3inf_theta"] = ps.lorentz_theta;
    j["LV0_interior_ratio"] = ps.LV0_ratio;
    j["LTheta0_interior_ratio"] = ps.LTh0_ratio;
    j["tails"] = tail_json(ps.tails);
    fs::create_directories(dir + "/reports");
    write_json(dir + "/reports/profile_certs.json", j);
    man.record("reports/profile_certs.json", dir);
}

void write_config_copy(const RunConfig& cfg, Manifest& man, const std::string& dir) {
    std::ofstream out(dir + "/config.canonical");
    out << cfg.canonical();
    out.close();
    man.record("config.canonical", dir);
}

}  // namespace

void cmd_profile(const RunConfig& cfg) {
    const std::string dir = cfg.out_dir;
    fs::create_directories(dir);
    Manifest man(cfg);
    ProfileStage ps = run_profile_stage(cfg, true);
    write_config_copy(cfg, man, dir);
    write_profile_artifacts(cfg, ps, man, dir);
    man.set("stage", "profile");
    man.write(dir);
}

void cmd_revise(const RunConfig& cfg) {
    const std::string dir = cfg.out_dir;
    fs::create_directories(dir);
    Manifest man(cfg);
    ProfileStage ps = run_profile_stage(cfg, true);
    ReviseOptions ropt;
    ropt.q = cfg.q;
    ropt.threads = cfg.threads;
    double alpha = cfg.alpha > 0 ? cfg.alpha : 0.05 * (1.0 + lq_norm_with_tail(ps.V0_box, 4.0));
    ropt.alpha_target = alpha;
    double R0 = cfg.R0 > 0 ? cfg.R0 : choose_R0(ps.V0_box, ps.Th0_box, alpha, cfg.q, ropt);
    RevisedProfilePair rev = revise(ps.V0_box, ps.Th0_box, ps.V0_cert, ps.Th0_cert, R0, ropt);

    write_config_copy(cfg, man, dir);
    write_profile_artifacts(cfg, ps, man, dir);
    write_profile_file(dir + "/profiles/Vstar.prof", rev.Vstar, cfg.lambda, cfg.tol_quad);
    write_profile_file(dir + "/profiles/Thetastar.prof", rev.Thetastar, cfg.lambda, cfg.tol_quad);
    write_profile_file(dir + "/profiles/LVstar.prof", rev.LVstar, cfg.lambda, cfg.tol_quad);
    write_profile_file(dir + "/profiles/LThetastar.prof", rev.LThetastar, cfg.lambda,
                       cfg.tol_quad);
    man.record("profiles/Vstar.prof", dir);
    man.record("profiles/Thetastar.prof", dir);
    man.record("profiles/LVstar.prof", dir);
    man.record("profiles/LThetastar.prof", dir);
    write_json(dir + "/reports/revision.json", certs_json(rev.certs));
    man.record("reports/revision.json", dir);
    man.set("stage", "revise");
    man.write(dir);
}

void cmd_solve(const RunConfig& cfg) {
    const std::string dir = cfg.out_dir;
    fs::create_directories(dir);
    SolveResult res = run_solve(cfg);
    Manifest man(cfg);
    write_config_copy(cfg, man, dir);
    write_profile_artifacts(cfg, res.profile_certs, man, dir);

    const SystemData& data = *res.data;
    write_profile_file(dir + "/profiles/Vstar.prof", data.profiles.Vstar, cfg.lambda,
                       cfg.tol_quad);
    write_profile_file(dir + "/profiles/Thetastar.prof", data.profiles.Thetastar, cfg.lambda,
                       cfg.tol_quad);
    write_profile_file(dir + "/profiles/LVstar.prof", data.profiles.LVstar, cfg.lambda,
                       cfg.tol_quad);
    write_profile_file(dir + "/profiles/LThetastar.prof", data.profiles.LThetastar, cfg.lambda,
                       cfg.tol_quad);
    for (const char* p : {"profiles/Vstar.prof", "profiles/Thetastar.prof",
                          "profiles/LVstar.prof", "profiles/LThetastar.prof"})
        man.record(p, dir);
    write_json(dir + "/reports/revision.json", certs_json(data.profiles.certs));
    man.record("reports/revision.json", dir);

    // solve manifest
    {
        nlohmann::json j;
        j["mode"] = cfg.mode;
        j["R0"] = res.R0;
        j["alpha_used"] = res.alpha_used;
        j["final_residual"] = res.diag.final_residual;
        j["x_norm"] = res.diag.x_norm;
        j["map_evals"] = res.diag.map_evals;
        j["newton_iters"] = res.diag.newton_iters;
        j["residual_history"] = res.diag.residual_history;
        j["rho_hat"] = res.diag.rho_hat;
        j["m"] = res.diag.m;
        j["cross_check"] = res.diag.cross_check;
        j["constants"] = {{"C0", data.consts.C0}, {"C1", data.consts.C1},
                          {"C2", data.consts.C2}, {"C3", data.consts.C3},
                          {"norm_sum", data.consts.norm_sum}};
        j["warnings"] = res.diag.warnings;
        j["xstar"] = res.xstar;
        write_json(dir + "/solve.json", j);
        man.record("solve.json", dir);
        for (const auto& w : res.diag.warnings) man.add_warning(w);
    }
    {
        std::ofstream csv(dir + "/ledger.csv");
        res.diag.orbit_ledger.to_csv(csv);
        csv.close();
        man.record("ledger.csv", dir);
    }
    fs::create_directories(dir + "/snapshots");
    for (std::size_t j = 0; j < res.orbit.size(); ++j) {
        char name[64];
        std::snprintf(name, sizeof(name), "snapshots/U_%03zu.fld", j);
        write_field_file(dir + "/" + name, res.orbit[j].U, res.orbit[j].s);
        man.record(name, dir);
        std::snprintf(name, sizeof(name), "snapshots/Psi_%03zu.fld", j);
        write_field_file(dir + "/" + name, res.orbit[j].Psi, res.orbit[j].s);
        man.record(name, dir);
    }
    {
        nlohmann::json j;
        j["sup_g"] = res.quarter.sup_g;
        j["periodicity_gap"] = res.quarter.periodicity_gap;
        j["two_route_max_rel"] = res.quarter.two_route_max_rel;
        nlohmann::json series = nlohmann::json::array();
        for (auto& [s, g] : res.quarter.g_series) series.push_back({{"s", s}, {"g", g}});
        j["g_series"] = series;
        write_json(dir + "/reports/quarter_power.json", j);
        man.record("reports/quarter_power.json", dir);
    }
    {
        nlohmann::json j;
        j["p_norm_l53"] = res.pressure_report.p_norm;
        j["u_norm_l103_sq"] = res.pressure_report.u_norm;
        j["vstar_norm_l103_sq"] = res.pressure_report.vstar_norm;
        j["ratio"] = res.pressure_report.ratio;
        j["degenerate"] = res.pressure_report.degenerate;
        j["spectral_residual"] = res.pressure_residual;
        write_json(dir + "/reports/pressure.json", j);
        man.record("reports/pressure.json", dir);
    }
    {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : res.local_energy)
            arr.push_back({{"res_v", r.res_v},
                           {"res_theta", r.res_theta},
                           {"scale_v", r.scale_v},
                           {"scale_theta", r.scale_theta}});
        nlohmann::json j;
        j["bumps"] = arr;
        j["dss_identity_err"] = res.dss_identity_err;
        write_json(dir + "/reports/local_energy.json", j);
        man.record("reports/local_energy.json", dir);
    }
    man.set("stage", "solve");
    man.set("T", std::to_string(data.T));
    man.set("epsilon", std::to_string(cfg.epsilon));
    man.set("delta", std::to_string(cfg.delta));
    man.write(dir);
}

LoadedArtifact load_artifact(const std::string& dir, bool check_hashes) {
    LoadedArtifact la;
    la.manifest = Manifest::load(dir);
    if (check_hashes) la.manifest.check_hashes(dir);
    la.cfg = RunConfig::from_map(parse_config_text(la.manifest.config_text()));

    ProfileStage ps;
    ps.box = Box::make(la.cfg.L, la.cfg.N, la.cfg.dealias_fraction, la.cfg.drift_window_fraction);
    ps.V0_box = read_profile_file(dir + "/profiles/V0.prof");
    ps.Th0_box = read_profile_file(dir + "/profiles/Theta0.prof");

    RevisedProfilePair rev;
    rev.Vstar = read_profile_file(dir + "/profiles/Vstar.prof");
    rev.Thetastar = read_profile_file(dir + "/profiles/Thetastar.prof");
    rev.LVstar = read_profile_file(dir + "/profiles/LVstar.prof");
    rev.LThetastar = read_profile_file(dir + "/profiles/LThetastar.prof");
    // re-derive the norm certificates the constants need
    rev.certs.vstar_l4 = lq_norm_with_tail(rev.Vstar, 4.0);
    rev.certs.thetastar_l4 = lq_norm_with_tail(rev.Thetastar, 4.0);
    double g2 = 0;
    for (int m = 0; m < rev.Thetastar.n_s(); ++m)
        g2 = std::max(g2, grad_norm_sq(rev.Thetastar.sample(m)));
    rev.certs.grad_thetastar_l2 = std::sqrt(g2);
    for (int m = 0; m < rev.LVstar.n_s(); ++m)
        rev.certs.L_vstar_hm1 = std::max(rev.certs.L_vstar_hm1, hminus1_norm(rev.LVstar.sample(m)));
    for (int m = 0; m < rev.LThetastar.n_s(); ++m)
        rev.certs.L_thetastar_hm1 =
            std::max(rev.certs.L_thetastar_hm1, hminus1_norm(rev.LThetastar.sample(m)));

    DssForce force = builtin_force(la.cfg.force, la.cfg.lambda);
    la.data = std::make_unique<SystemData>(build_system(ps.box, std::move(rev), ps.V0_box,
                                                        ps.Th0_box, force, la.cfg.n_s,
                                                        la.cfg.epsilon, la.cfg.delta));

    // orbit snapshots
    for (std::size_t j = 0;; ++j) {
        char name[64];
        std::snprintf(name, sizeof(name), "%s/snapshots/U_%03zu.fld", dir.c_str(), j);
        if (!fs::exists(name)) break;
        FieldSnapshot u = read_field_file(name);
        std::snprintf(name, sizeof(name), "%s/snapshots/Psi_%03zu.fld", dir.c_str(), j);
        FieldSnapshot p = read_field_file(name);
        GalerkinState st;
        // rebuild on the shared box so operators see one grid object
        st.U = Field(ps.box, 3);
        st.U.phys_raw() = u.field.phys();
        st.Psi = Field(ps.box, 1);
        st.Psi.phys_raw() = p.field.phys();
        st.s = u.s;
        la.orbit.push_back(std::move(st));
    }
    return la;
}

int cmd_verify(const std::string& dir, std::ostream& log) {
    try {
        LoadedArtifact la = load_artifact(dir, true);
        const SystemData& data = *la.data;
        int hard_failures = 0;
        auto check = [&](const char* name, bool ok, double value, double tol) {
            log << (ok ? "  ok    " : "  FAIL  ") << name << "  value " << value << "  tol " << tol
                << "\n";
            if (!ok) ++hard_failures;
        };

        if (la.orbit.empty()) throw IntegrityError("artifact has no snapshots");

        // solenoidality of the stored deviations
        double worst_div = 0;
        for (const auto& st : la.orbit) {
            double nrm = std::max(1.0, l2_norm(st.U));
            worst_div = std::max(worst_div, spectral_divergence_norm(st.U) / nrm);
        }
        check("divergence(U) spectral", worst_div <= 1e-8, worst_div, 1e-8);

        // cancellation machinery on seeded fields
        {
            std::mt19937_64 rng(la.cfg.seed);
            std::normal_distribution<double> gauss;
            Field a = make_vector(data.box), b = make_vector(data.box);
            for (Field* f : {&a, &b}) {
                RealVec& p = f->phys_raw();
                for (auto& v : p) v = gauss(rng);
                dealias(*f);
            }
            leray_project(a);
            double scale = l2_norm(a) * h1_norm_sq(b);
            double c = std::abs(inner(convect(a, b), b)) / std::max(scale, 1e-300);
            check("skew convection cancellation", c <= 1e-11, c, 1e-11);
        }

        // Parseval consistency on a stored field
        {
            const Field& u = la.orbit.front().U;
            double pi = inner_phys(u, u), si = inner(u, u);
            double rel = std::abs(pi - si) / std::max(1e-300, std::abs(si));
            check("parseval identity", rel <= 1e-10, rel, 1e-10);
        }

        // energy identity over a few fresh steps
        {
            StepControls ctl;
            ctl.ds = std::min(la.cfg.ds, 0.9 * stable_ds(data));
            FlowRunner runner(data, ctl);
            GalerkinState st;
            st.U = la.orbit.front().U.clone();
            st.Psi = la.orbit.front().Psi.clone();
            st.s = la.orbit.front().s;
            EnergyLedger led;
            runner.run(st, 5, &led);
            double worst = 0;
            for (const auto& row : led.rows)
                worst = std::max(worst, std::max(row.res_mom, row.res_temp));
            check("energy identity (two-route)", worst <= 1e-5, worst, 1e-5);
        }

        // pressure spectral identity
        {
            PressureField pf = pressure(assemble_F_all(la.orbit.front(), data));
            check("pressure spectral residual", pf.residual <= 1e-10, pf.residual, 1e-10);
        }

        // DSS identity of the reconstruction
        {
            PhysicalSolution sol(data, la.orbit);
            double lam = std::exp(data.T / 2.0);
            double worst = 0;
            std::mt19937_64 rng(la.cfg.seed + 1);
            std::uniform_real_distribution<double> un(-0.25 * la.cfg.L, 0.25 * la.cfg.L);
            for (int i = 0; i < 6; ++i) {
                Vec3 x{un(rng), un(rng), un(rng)};
                if (x.norm() < 1e-3) continue;
                auto va = sol.eval(x, 1.1);
                auto vb = sol.eval(x * lam, 1.1 * lam * lam);
                worst = std::max(worst, (va.v - vb.v * lam).norm() /
                                            std::max(va.v.norm(), 1e-12));
            }
            check("DSS identity of reconstruction", worst <= 1e-8, worst, 1e-8);
        }

        // monitors (warnings only)
        {
            PhysicalSolution sol(data, la.orbit);
            QuarterPowerReport qp = quarter_power_check(data, la.orbit, {1.0});
            if (qp.two_route_max_rel > 1e-3)
                log << "  warn  quarter-power two-route " << qp.two_route_max_rel << "\n";
            auto bumps = bump_family(*data.box, data.T);
            for (std::size_t i = 0; i < 2 && i < bumps.size(); ++i) {
                LocalEnergyResidual r = local_energy_residual(data, la.orbit, bumps[i]);
                if (r.res_v < -1e-3 * r.scale_v || r.res_theta < -1e-3 * r.scale_theta)
                    log << "  warn  local energy residual negative: " << r.res_v / r.scale_v
                        << ", " << r.res_theta / r.scale_theta << "\n";
            }
        }

        if (hard_failures) {
            log << "verify: " << hard_failures << " hard invariant failure(s)\n";
            return 4;
        }
        log << "verify: all hard invariants hold\n";
        return 0;
    } catch (const IntegrityError& e) {
        log << "integrity error: " << e.what() << "\n";
        return 5;
    }
}

void cmd_reconstruct(const std::string& dir, const std::string& csv_out) {
    LoadedArtifact la = load_artifact(dir, true);
    PhysicalSolution sol(*la.data, la.orbit);
    std::ofstream csv(csv_out);
    if (!csv) throw Error("cannot write " + csv_out);
    csv << "x1,x2,x3,t,v1,v2,v3,theta,p\n";
    const double L = la.cfg.L;
    char buf[512];
    for (double t : {0.5, 1.0, 2.0}) {
        double st = std::sqrt(t);
        for (int i = -4; i <= 4; ++i) {
            Vec3 x{st * L * 0.15 * i, st * L * 0.07 * i, 0.0};
            if (x.norm() < 1e-9) x = {st * 0.5, 0, 0};
            auto v = sol.eval(x, t);
            std::snprintf(buf, sizeof(buf),
                          "%.10g,%.10g,%.10g,%.10g,%.12g,%.12g,%.12g,%.12g,%.12g\n", x.x, x.y,
                          x.z, t, v.v.x, v.v.y, v.v.z, v.theta, v.p);
            csv << buf;
        }
    }
}

void cmd_report(const std::string& dir, std::ostream& os) {
    Manifest man = Manifest::load(dir);
    os << "artifact: " << dir << "\n";
    for (const auto& [k, v] : man.extra()) os << "  " << k << " = " << v << "\n";
    os << "  files: " << man.files().size() << "\n";
    for (const auto& w : man.warnings()) os << "  warning: " << w << "\n";
    for (const char* rep : {"reports/profile_certs.json", "reports/revision.json",
                            "reports/quarter_power.json", "reports/pressure.json",
                            "reports/local_energy.json"}) {
        std::ifstream in(dir + "/" + std::string(rep));
        if (!in) continue;
        os << "  -- " << rep << "\n";
        std::string line;
        while (std::getline(in, line)) os << "    " << line << "\n";
    }
}

}  // namespace dssflow
