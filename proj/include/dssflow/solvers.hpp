#pragma once

#include "dssflow/dynamics.hpp"

namespace dssflow {

struct SolveDiagnostics {
    std::vector<double> residual_history;  // relative ||S(x)-x|| or ||P(x)|| per iterate
    int map_evals = 0;
    int newton_iters = 0;
    double final_residual = 0;
    double x_norm = 0;
    double rho_hat = 0, m = 0;
    double cross_check = -1;  // stationary solve: ||S(x*)-x*|| rel
    std::vector<std::string> warnings;
    EnergyLedger orbit_ledger;  // one re-integrated period at the solution
};

// The time-T flow map of the similarity-variable system acting on packed
// coefficients.
class PoincareMap {
  public:
    PoincareMap(const SystemData& data, StepControls ctl, double s0 = 0.0);

    const SystemData& data() const { return data_; }
    const PackedLayout& layout() const { return layout_; }
    double period() const { return data_.T; }
    int steps_per_period() const { return nsteps_; }
    double ds() const { return ctl_.ds; }
    double s0() const { return s0_; }

    std::vector<double> apply(const std::vector<double>& x, EnergyLedger* ledger = nullptr) const;

  private:
    const SystemData& data_;
    StepControls ctl_;
    int nsteps_;
    double s0_;
    PackedLayout layout_;
    FlowRunner runner_;
};

struct PeriodicSolveOptions {
    double tol = 1e-8;
    int max_map_evals = 50;
    int max_picard = 8;
    double picard_exit = 3e-3;
    int krylov_dim = 20;
    double fd_step = 1e-6;
};

// Picard iteration from x = 0 (the dissipative absorbing-ball stage), then
// matrix-free Newton-GMRES on S(x) - x.
std::vector<double> solve_periodic(const PoincareMap& map, const PeriodicSolveOptions& opt,
                                   SolveDiagnostics& diag);

// Stationary system: the packed residual map and its zero finder.
class StationaryMap {
  public:
    explicit StationaryMap(const SystemData& data);
    const SystemData& data() const { return data_; }
    const PackedLayout& layout() const { return layout_; }
    // packed (db, m dq) of the full stationary tendency
    std::vector<double> residual(const std::vector<double>& x) const;

  private:
    const SystemData& data_;
    PackedLayout layout_;
};

struct StationarySolveOptions {
    double tol = 1e-8;
    int max_pseudo_periods = 12;
    int max_newton = 30;
    int krylov_dim = 30;
    double fd_step = 1e-6;
    double ds = 4e-3;
};

// Pseudo-time continuation (time integration of the autonomous system) then
// Newton-GMRES on P(x) = 0; cross-checks the result against the Poincare map.
std::vector<double> solve_stationary(const StationaryMap& smap, const StationarySolveOptions& opt,
                                     SolveDiagnostics& diag);

}  // namespace dssflow
