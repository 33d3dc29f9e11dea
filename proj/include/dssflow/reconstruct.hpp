#pragma once

#include "dssflow/pressure.hpp"
#include "dssflow/solvers.hpp"

namespace dssflow {

// Integrate one period from packed coefficients, storing n_snap equispaced
// snapshots plus the closure state at s0 + T (n_snap + 1 states).
std::vector<GalerkinState> orbit_snapshots(const PoincareMap& map, const std::vector<double>& x,
                                           int n_snap);

// The physical-variables solution backed by the periodic similarity-variable
// orbit: v = t^{-1/2} V(y,s), theta = t^{-1/2} Theta(y,s), p = t^{-1} P(y,s)
// with y = x/sqrt(t), s = log t reduced mod T.
class PhysicalSolution {
  public:
    PhysicalSolution(const SystemData& data, const std::vector<GalerkinState>& orbit);

    double period() const { return T_; }
    const Box& box() const { return *box_; }
    int n_snap() const { return Vtot_.n_s(); }

    // Similarity-variable totals, trig-interpolated in s.
    Field V_at(double s) const { return Vtot_.at(s); }
    Field Theta_at(double s) const { return Thtot_.at(s); }
    Field P_at(double s) const { return Pres_.at(s); }
    const Profile& V_profile() const { return Vtot_; }
    const Profile& Theta_profile() const { return Thtot_; }
    const Profile& P_profile() const { return Pres_; }

    struct Values {
        Vec3 v;
        double theta;
        double p;
    };
    // Point evaluation; throws ExtrapolationError when x/sqrt(t) leaves the
    // certified interior.
    Values eval(const Vec3& x, double t) const;

  private:
    BoxPtr box_;
    double T_;
    double r_certified_;
    Profile Vtot_, Thtot_, Pres_;
};

// exact spectral evaluation of a truncated Fourier field at an arbitrary point
Vec3 eval_field_point(const Field& f, const Vec3& y);

// ---- quarter-power convergence check -------------------------------------------

struct QuarterPowerReport {
    double sup_g;              // sup_s ||(V*+U) - V0||_{L2}, the C0 stand-in
    double periodicity_gap;    // |g(0) - g(T)| from the orbit closure
    double two_route_max_rel;  // physical-space route vs t^{1/4} g(s)
    std::vector<std::pair<double, double>> g_series;
};

QuarterPowerReport quarter_power_check(const SystemData& data,
                                       const std::vector<GalerkinState>& orbit,
                                       const std::vector<double>& t_samples);

// ---- local energy inequalities ---------------------------------------------------

// Tensor test function: compact exp-bump in space times smooth steps in s.
struct SpaceTimeBump {
    Vec3 center;
    double radius;
    double s0, s1, sw;  // time window and step width

    double space(double r) const;
    double space_d1(double r) const;  // d/dr
    double space_d2(double r) const;
    double value(const Vec3& y, double s) const;
    double ds(const Vec3& y, double s) const;
    Vec3 grad(const Vec3& y, double s) const;
    double lap(const Vec3& y, double s) const;
    double time(double s) const;
    double time_ds(double s) const;
};

// The built-in certification family: origin region, mid-shell, early/late s.
std::vector<SpaceTimeBump> bump_family(const Box& box, double T);

struct LocalEnergyResidual {
    double res_v, res_theta;   // RHS - LHS; nonnegative certifies the inequality
    double scale_v, scale_theta;
};

LocalEnergyResidual local_energy_residual(const SystemData& data,
                                          const std::vector<GalerkinState>& orbit,
                                          const SpaceTimeBump& bump);

}  // namespace dssflow
