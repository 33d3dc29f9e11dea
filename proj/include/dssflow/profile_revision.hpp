#pragma once

#include "dssflow/heat_profiles.hpp"
#include "dssflow/operators.hpp"

namespace dssflow {

// xi(y) = Z(y/R0) with Z the exp(-1/t) smooth step: 0 inside R0/2, 1 outside R0.
struct Cutoff {
    double R0;
    explicit Cutoff(double r0) : R0(r0) {
        if (!(r0 > 0)) throw ConfigError("cutoff radius must be positive");
    }
    double xi(double r) const { return smoothstep(2.0 * r / R0 - 1.0); }
    double xi_deriv(double r) const;  // d xi / dr
};

struct RevisionCertificates {
    double R0 = 0;
    double alpha_target = 0;
    double div_residual_max = 0;      // max |div V*| / max |V0| on the solver box
    double div_residual_l2 = 0;
    double lq_norm = 0;               // || |V*|+|Theta*| ||_{L^q} incl. analytic tail
    double q = 10.0 / 3.0;
    double l4_norm = 0;               // same in L^4
    double vstar_l4 = 0, thetastar_l4 = 0;
    double vstar_lq = 0, thetastar_lq = 0;
    double grad_thetastar_l2 = 0;
    double L_vstar_l2 = 0, L_thetastar_l2 = 0;
    double L_vstar_hm1 = 0, L_thetastar_hm1 = 0;
    double vstar_minus_v0_l2 = 0;
    double poisson_identity_residual = 0;  // ||Delta w + grad(grad xi . V0)|| rel, padded grid
    double w_kernel_crosscheck = 0;        // direct Newtonian-kernel quadrature vs solve
    double w_decay_exponent = 0;           // measured on dyadic shells
    double shim_norm_fraction = 0;         // ||shim|| / ||w||
    double shell_fraction_LTheta = 0;      // ||L Theta*||^2 fraction on the cutoff shell
};

struct RevisedProfilePair {
    double R0 = 0;
    Profile Vstar, Thetastar;      // solver-box profiles, V* solenoidal to round-off
    Profile LVstar, LThetastar;    // L applied on the certificate grid, restricted
    RevisionCertificates certs;
};

// Free-space Newtonian gradient w = grad N * g for a scalar source g supported
// away from the box boundary, via the zero-padded (domain-quadrupled) spectral
// solve. Returned on the padded grid (pad * L, pad * N).
Field newton_correction_padded(const Field& g, int pad = 4);

// Convenience: w restricted back to the source's own box.
Field newton_correction(const Field& g, int pad = 4);

struct ReviseOptions {
    double q = 10.0 / 3.0;
    double alpha_target = 0;   // recorded in certificates
    int poisson_pad = 4;
    int threads = 1;
    bool with_certificates = true;
};

// Build V* = xi V0 + w and Theta* = xi Theta0 with certificates. The box
// profiles get an additional periodic gradient shim so the discrete spectral
// divergence of V* vanishes to round-off; its magnitude is reported.
RevisedProfilePair revise(const Profile& V0_box, const Profile& Theta0_box,
                          const Profile& V0_cert, const Profile& Theta0_cert, double R0,
                          const ReviseOptions& opt);

// Smallest R0 from {2,4,8,...,L/2} with || |V*|+|Theta*| ||_{L^q} <= alpha.
// Throws ConvergenceError carrying the best achieved norm when the box is too
// small (caller may enlarge it).
double choose_R0(const Profile& V0_box, const Profile& Theta0_box, double alpha, double q,
                 const ReviseOptions& opt);

}  // namespace dssflow
