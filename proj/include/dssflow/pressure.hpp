#pragma once

#include "dssflow/dynamics.hpp"

namespace dssflow {

struct PressureField {
    Field P;          // zero-mean scalar
    Field F_all;      // the source it was built from
    double residual;  // ||Delta P - div F_all|| / ||F_all||
};

// F_all = -(V* + eta_eps * U) . grad (V* + U) + (Theta* + Psi) grad G + F,
// assembled with the same discrete products as the evolution.
Field assemble_F_all(const GalerkinState& st, const SystemData& data);

// Spectral solve of Delta P = div F_all with zero-mean gauge.
PressureField pressure(const Field& F_all);

struct PressureBoundReport {
    double p_norm;        // space-time L^{5/3} of P over one period
    double u_norm;        // ||U||^2_{L^{10/3}} space-time
    double vstar_norm;    // ||V*||^2_{L^{10/3}} space-time
    double ratio;         // p / (u + vstar); negative when degenerate
    bool degenerate;
};

// Orbit snapshots: states at equispaced s over one period.
PressureBoundReport pressure_bound_check(const std::vector<GalerkinState>& orbit,
                                         const SystemData& data);

}  // namespace dssflow
