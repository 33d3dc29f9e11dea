#pragma once

#include <optional>

#include "dssflow/dss_data.hpp"
#include "dssflow/field.hpp"

namespace dssflow {

// Quadrature controls for the heat evaluation. Node counts are per panel;
// panels follow the DSS annulus boundaries in |z| and a graded subdivision of
// the kernel radius around |x|.
struct HeatQuadOptions {
    double tol = 1e-8;  // relative truncation target for the kernel tail
    int n_rho = 10;
    int n_w = 8;
    int n_phi = 0;      // 0: take the data's angular hint
    int grade_levels = 12;
};

struct HeatQuadResult {
    Vec3 value;
    double tail_bound;  // bound on the omitted kernel tail, absolute
};

// (e^{t Laplace} data)(x) by scale-decomposed quadrature in bipolar-radial
// coordinates (rho = |x-z|, w = |z|, phi). Throws ConvergenceError if the
// omitted-tail bound exceeds tol * scale.
HeatQuadResult heat_evaluate_full(const DssField& data, const Vec3& x, double t,
                                  const HeatQuadOptions& opt = {});
Vec3 heat_evaluate(const DssField& data, const Vec3& x, double t, const HeatQuadOptions& opt = {});

// Similarity profile value: sqrt(t) * heat(data)(sqrt(t) y, t) at t = e^s.
Vec3 profile_value(const DssField& data, const Vec3& y, double s, const HeatQuadOptions& opt = {});

// ---- gridded profiles -------------------------------------------------------

// Smooth radial cutoff multiplying certificate-grid profiles: 1 inside r0,
// 0 beyond r1. Profile values beyond r1 are not evaluated at all.
struct RadialTaper {
    double r0, r1;
    double operator()(double r) const { return 1.0 - smoothstep((r - r0) / (r1 - r0)); }
};

// A scalar or vector field sampled on a grid at n_s equispaced s-nodes of
// [0,T), with trigonometric interpolation in s. Stationary profiles keep one
// sample.
class Profile {
  public:
    Profile() = default;
    Profile(BoxPtr grid, int ncomp, double period, bool stationary, std::vector<Field> samples);

    const BoxPtr& grid() const { return grid_; }
    int ncomp() const { return ncomp_; }
    int n_s() const { return int(samples_.size()); }
    double period() const { return T_; }
    bool stationary() const { return stationary_; }
    double s_node(int m) const { return T_ * m / n_s(); }

    const Field& sample(int m) const { return samples_[m]; }
    Field& sample(int m) { return samples_[m]; }

    // trig-interpolated field at s (exact at nodes); cheap reference when
    // stationary
    Field at(double s) const;
    const Field& ref_at_node(int m) const { return samples_[m]; }

    // interpolation weights over nodes for a given s
    std::vector<double> interp_weights(double s) const;

    // d/ds at node m via the exact derivative of the trig interpolant
    Field s_derivative_at_node(int m) const;

    std::uint64_t content_hash() const;

  private:
    BoxPtr grid_;
    int ncomp_ = 0;
    double T_ = 0;
    bool stationary_ = true;
    std::vector<Field> samples_;
};

// Evaluate the profile of `data` on all grid points of `grid` at n_s s-nodes
// (n_s collapses to 1 for homogeneous data). Parallel over grid points.
Profile compute_profile(const DssField& data, BoxPtr grid, int n_s, const HeatQuadOptions& opt,
                        int threads, const std::optional<RadialTaper>& taper = std::nullopt);

// L f = ds f - Laplace f - f/2 - (1/2) ytilde . grad f, with the exact trig
// derivative in s (zero when stationary). Needs n_s >= 3 unless stationary.
Profile apply_L(const Profile& p);

// ---- tails and certificate grid ---------------------------------------------

struct TailBound {
    std::vector<double> radii;
    std::vector<double> mu;
    double q;
};

// sup over s-nodes of || f ||_{L^q(|y| > R)}: grid quadrature over the
// inscribed ball plus the analytic |y|^{-1}-majorant tail beyond it.
TailBound tail_norms(const Profile& p, double q, const std::vector<double>& radii);

// L^q norm over all of R^3 (R = 0 tail).
double lq_norm_with_tail(const Profile& p, double q);

// Certificate grid convention: box doubled to 2L, spacing refined to 0.8 h,
// taper supported on [1.25 L, 1.875 L]. All L-certificates are computed here
// and reported on the interior ball |y| <= drift_window_fraction * L.
BoxPtr certificate_grid(const Box& solver_box);
RadialTaper certificate_taper(const Box& solver_box);

// Ratio ||L f||/||f|| over the interior ball of the *solver* box, for a
// profile living on the certificate grid.
double annihilation_ratio(const Profile& cert_profile, const Box& solver_box);

// ---- grid transfer ----------------------------------------------------------

// Truncate spectral content onto a coarser grid with the same physical size.
Field spectral_crop(const Field& f, BoxPtr target);
// Extend onto a finer grid with the same physical size (zero padding).
Field spectral_pad(const Field& f, BoxPtr target);
// Extract the centered subgrid with identical spacing (target.L < f.L).
Field subsample_center(const Field& f, BoxPtr target);

// ---- profile cache ----------------------------------------------------------

void write_profile_file(const std::string& path, const Profile& p, double lambda, double tol);
Profile read_profile_file(const std::string& path);

}  // namespace dssflow
