#include <iostream>

#include "CLI11.hpp"
#include "dssflow/pipeline.hpp"

using namespace dssflow;

namespace {

RunConfig load_config(const std::string& path, const std::string& out_override, int threads,
                      double tol) {
    RunConfig cfg = RunConfig::from_file(path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (threads > 0) cfg.threads = threads;
    if (tol > 0) cfg.tol_solve = tol;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dssflow: discretely self-similar Oberbeck-Boussinesq solver in similarity "
                 "variables"};
    app.require_subcommand(1);

    std::string config_path, out_dir, artifact_dir, csv_out;
    int threads = 0;
    double tol = 0;
    bool resume = false;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_dir, "output directory override");
        sub->add_option("--threads", threads, "worker threads for quadrature");
        sub->add_option("--tol", tol, "solver tolerance override");
        sub->add_flag("--resume", resume, "reuse artifacts already in the output directory");
    };

    CLI::App* profile = app.add_subcommand("profile", "compute heat profiles and certificates");
    add_common(profile, true);
    CLI::App* revise_cmd = app.add_subcommand("revise", "profiles plus the revised pair");
    add_common(revise_cmd, true);
    CLI::App* solve = app.add_subcommand("solve", "full pipeline to a periodic/stationary orbit");
    add_common(solve, true);

    CLI::App* verify = app.add_subcommand("verify", "re-run invariant checks on an artifact");
    verify->add_option("artifact", artifact_dir, "artifact directory")->required();
    CLI::App* reconstruct = app.add_subcommand("reconstruct", "sample the physical solution");
    reconstruct->add_option("artifact", artifact_dir, "artifact directory")->required();
    reconstruct->add_option("--csv", csv_out, "output CSV path");
    CLI::App* report = app.add_subcommand("report", "print artifact reports");
    report->add_option("artifact", artifact_dir, "artifact directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (profile->parsed()) {
            cmd_profile(load_config(config_path, out_dir, threads, tol));
        } else if (revise_cmd->parsed()) {
            cmd_revise(load_config(config_path, out_dir, threads, tol));
        } else if (solve->parsed()) {
            cmd_solve(load_config(config_path, out_dir, threads, tol));
        } else if (verify->parsed()) {
            return cmd_verify(artifact_dir, std::cout);
        } else if (reconstruct->parsed()) {
            cmd_reconstruct(artifact_dir, csv_out.empty() ? artifact_dir + "/reconstruct.csv"
                                                          : csv_out);
        } else if (report->parsed()) {
            cmd_report(artifact_dir, std::cout);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return 3;
    } catch (const IntegrityError& e) {
        std::cerr << "integrity error: " << e.what() << "\n";
        return 5;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
