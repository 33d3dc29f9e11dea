#pragma once

#include "dssflow/field.hpp"

namespace dssflow {

// ---- linear spectral operators ------------------------------------------

void dealias(Field& f);

// d/dy_dim of every component
Field derivative(const Field& f, int dim);
Field gradient(const Field& scalar);
Field divergence(const Field& vec);
Field laplacian(const Field& f);

// Modewise projection I - k k^T/|k|^2; mode 0 left unchanged.
void leray_project(Field& vec);

// L2 norm of the spectral divergence
double spectral_divergence_norm(const Field& vec);

// ---- nonlinear / coordinate terms ----------------------------------------

// Skew-compatible convection 1/2[(a.grad)b + div(a (x) b)], pseudo-spectral
// with 2/3-rule dealiasing of inputs and output. <convect(a,b), b> vanishes to
// round-off for any a, which is what the energy ledger relies on.
Field convect(const Field& a, const Field& b);

// (1/2)(ytilde . grad) f with the windowed coordinate of f's box.
Field drift_term(const Field& f);

// grad G_delta with G_delta(y) = (|y|^2 + delta^2)^{-1/2}; the origin sample
// is zero (exact for delta > 0 by symmetry, convention for delta = 0).
Field grav_field(BoxPtr box, double delta);

// (int |u|^2/|y|^2) / (4 int |grad u|^2) for a scalar field, by lattice sum
// with the origin sample dropped and restored via the exact lattice constant.
double hardy_ratio(const Field& u);

// ---- mollifier -------------------------------------------------------------

// eta_eps convolution as a spectral multiplier. eta is the standard bump
// exp(-1/(1-r^2)) on the unit ball, normalized to unit mass.
class Mollifier {
  public:
    Mollifier(BoxPtr box, double epsilon);
    double epsilon() const { return eps_; }
    const std::vector<double>& symbol() const { return symbol_; }
    Field apply(const Field& f) const;

  private:
    double eps_;
    BoxPtr box_;
    std::vector<double> symbol_;  // one entry per spectral index
};

// ---- inner products and norms ----------------------------------------------

double inner(const Field& a, const Field& b);       // spectral route
double inner_phys(const Field& a, const Field& b);  // grid quadrature route
double l2_norm(const Field& f);
double h1_norm_sq(const Field& f);      // ||f||^2 + ||grad f||^2
double grad_norm_sq(const Field& f);
double hminus1_norm(const Field& f);    // (sum |f_hat|^2/(1+|k|^2))^(1/2)
double lp_norm_phys(const Field& f, double p);  // grid quadrature of |f|^p over the box
double max_abs(const Field& f);

// Fraction of the L2 mass carried by the outer shell |y|_inf > 0.9 L.
double boundary_shell_fraction(const Field& f);

// L2 norm restricted to the interior ball |y| <= drift_window_fraction * L.
double interior_l2_norm(const Field& f);

}  // namespace dssflow
