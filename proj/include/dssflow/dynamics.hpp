#pragma once

#include <optional>
#include <ostream>

#include "dssflow/profile_revision.hpp"

namespace dssflow {

// Empirical stand-ins for the generic constants of the energy estimates; the
// generic multipliers default to one and are reported, never asserted.
struct Constants {
    double C0 = 0, C1 = 0, C2 = 0, C3 = 0;
    double m = 1.0;       // sqrt(2 C1), falls back to 1 for zero data
    double rho_hat = 0;   // [8 C2 (1 + m^2)]^(1/2)
    double norm_sum = 0;  // the packaged norm combination
};

Constants estimate_constants(const RevisionCertificates& certs, double force_hminus1);

// Everything the evolution needs: revised profiles, projected sources,
// mollifier, gravity, constants.
struct SystemData {
    BoxPtr box;
    double T = 0;
    RevisedProfilePair profiles;
    Profile V0, Theta0;   // heat profiles on the box (for reconstruction checks)
    Profile force;        // F(y,s) sampled on the box, vector
    std::optional<Mollifier> mollifier;
    Field grav;           // grad G_delta
    double grav_delta = 0;
    Constants consts;
    Profile Rb_src;       // P[-convect(V*,V*) + Theta* grad G + F - LV*]
    Profile Rq_src;       // -convect(V*,Theta*) - LTheta*

    bool stationary() const {
        return profiles.Vstar.stationary() && profiles.Thetastar.stationary() &&
               force.stationary();
    }
};

SystemData build_system(BoxPtr box, RevisedProfilePair profiles, Profile V0, Profile Theta0,
                        const DssForce& force_data, int n_s_force, double epsilon, double delta);

struct GalerkinState {
    Field U;    // solenoidal vector
    Field Psi;  // scalar
    double s = 0;
};

GalerkinState zero_state(BoxPtr box, double s = 0);

struct Tendency {
    Field dU, dPsi;
};

// All terms except the Laplacian (handled by the integrating factor).
Tendency rhs_explicit(const GalerkinState& st, const SystemData& data);
// Explicit terms plus the Laplacian: the full tendency of the mollified system.
Tendency rhs_full(const GalerkinState& st, const SystemData& data);

// ---- energy ledger -----------------------------------------------------------

struct LedgerRow {
    double s, a, A, b, B, f;
    double res_mom, res_temp;  // two-route energy identity residuals
    double shell_frac;
};

struct EnergyLedger {
    std::vector<LedgerRow> rows;
    std::vector<std::string> warnings;
    double C1 = 0, C3 = 0;
    double gronwall_slack = 0.5;
    int gronwall_violations = 0;

    void append(const LedgerRow& row);
    void to_csv(std::ostream& os) const;
    double f_value(double a, double b) const { return a + 2.0 * C1 * b; }
};

// ---- time stepping -------------------------------------------------------------

struct StepControls {
    double ds = 4e-3;
    bool record_residuals = true;
};

// Advisory stability bound for the explicit part.
double stable_ds(const SystemData& data);

// Multiply each mode by exp(-|k|^2 ds): the exact heat propagator used as the
// scheme's integrating factor.
void apply_heat_factor(Field& f, double ds);

// Integrating-factor Heun scheme over [s0, s0+span]; appends to the ledger
// when one is supplied. Throws DivergenceError (ledger attached to message
// context) on NaN/overflow.
class FlowRunner {
  public:
    FlowRunner(const SystemData& data, StepControls ctl);

    // advance n steps of size ctl.ds
    void run(GalerkinState& st, int nsteps, EnergyLedger* ledger) const;

    const StepControls& controls() const { return ctl_; }

  private:
    void one_step(GalerkinState& st, Tendency& cur_explicit, EnergyLedger* ledger) const;
    const SystemData& data_;
    StepControls ctl_;
    std::vector<double> efac_;  // exp(-|k|^2 ds) per spectral index
};

// ---- packed coefficient vector -------------------------------------------------

// x = (b, m q): spectral coefficients of U and m * Psi in a fixed canonical
// ordering of the dealias-retained modes, scaled so |x|^2 = ||U||^2 + m^2 ||Psi||^2.
class PackedLayout {
  public:
    PackedLayout(BoxPtr box, double m_weight);
    std::size_t dim() const { return dim_; }
    double m_weight() const { return m_; }

    std::vector<double> pack(const GalerkinState& st) const;
    GalerkinState unpack(const std::vector<double>& x, double s) const;

  private:
    struct Entry {
        std::size_t spec_idx;
        int mi, mj;  // mode numbers of the first two dims (for the mirror)
        double weight;
        bool real_only;
    };
    BoxPtr box_;
    double m_;
    std::vector<Entry> entries_;  // per scalar component
    std::size_t dim_;
};

double norm(const std::vector<double>& x);

// ---- dense Galerkin mode (verification only) ------------------------------------

struct DenseBasis {
    std::vector<Field> phi;   // solenoidal vector fields, orthonormal
    std::vector<Field> beta;  // scalar fields, orthonormal
};

DenseBasis make_fourier_basis(BoxPtr box, int k);

struct DenseCoefficients {
    int k = 0;
    // row-major [i][j] and [i][l][j]
    std::vector<double> A, B, C, D;
    std::vector<double> As, Bs, Cs, Ds;

    double& at(std::vector<double>& t, int i, int j) { return t[i * k + j]; }
    // tendency of (b, q) under the dense ODE system
    void tendency(const std::vector<double>& b, const std::vector<double>& q,
                  std::vector<double>& db, std::vector<double>& dq) const;
};

// Grid-quadrature coefficients of the dense ODE system at time s. Checks the
// basis Gram matrix to 1e-8 first.
DenseCoefficients dense_coefficients(const DenseBasis& basis, const SystemData& data, double s);

}  // namespace dssflow
