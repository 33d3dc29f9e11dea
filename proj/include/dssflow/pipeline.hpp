#pragma once

#include <memory>

#include "dssflow/artifact.hpp"
#include "dssflow/reconstruct.hpp"

namespace dssflow {

// Profiles plus the Lemma-style certificates computed at the profile stage.
struct ProfileStage {
    BoxPtr box;
    BoxPtr cert;
    Profile V0_box, Th0_box;
    Profile V0_cert, Th0_cert;
    double lorentz_v = 0, lorentz_theta = 0;
    double LV0_ratio = 0, LTh0_ratio = 0;  // interior ||L .||/||.|| on the cert grid
    TailBound tails;                       // mu(R) table, q from the config
};

ProfileStage run_profile_stage(const RunConfig& cfg, bool with_certificates);

struct SolveResult {
    RunConfig cfg;
    std::unique_ptr<SystemData> data;
    double R0 = 0, alpha_used = 0;
    std::vector<double> xstar;
    SolveDiagnostics diag;
    std::vector<GalerkinState> orbit;  // n_snap + 1 snapshots
    QuarterPowerReport quarter;
    PressureBoundReport pressure_report;
    std::vector<LocalEnergyResidual> local_energy;
    double dss_identity_err = 0;
    double pressure_residual = 0;
    ProfileStage profile_certs;
};

// Full pipeline in memory: profiles -> revision (alpha/R0) -> solve ->
// pressure -> verification reports.
SolveResult run_solve(const RunConfig& cfg);

// Stage drivers writing artifacts.
void cmd_profile(const RunConfig& cfg);
void cmd_revise(const RunConfig& cfg);
void cmd_solve(const RunConfig& cfg);

// Re-run the invariant suite against a stored artifact. Returns a process
// exit code: 0 ok, 4 hard-invariant failure, 5 integrity failure.
int cmd_verify(const std::string& artifact_dir, std::ostream& log);

// Sample the reconstructed solution at (x, t) rows; writes CSV.
void cmd_reconstruct(const std::string& artifact_dir, const std::string& csv_out);

// Print a human-readable summary of an artifact.
void cmd_report(const std::string& artifact_dir, std::ostream& os);

// Rebuild the SystemData of a stored artifact (used by verify/reconstruct).
struct LoadedArtifact {
    RunConfig cfg;
    Manifest manifest;
    std::unique_ptr<SystemData> data;
    std::vector<GalerkinState> orbit;
};
LoadedArtifact load_artifact(const std::string& dir, bool check_hashes = true);

}  // namespace dssflow
