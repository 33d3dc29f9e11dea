#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "dssflow/fft.hpp"

namespace dssflow {

// Truncated periodic box [-L, L)^3 with N points per axis. Holds the grid
// coordinates, wavenumbers, dealias cutoff and the windowed drift coordinate
// ytilde = y * chi(|y|/L), with chi == 1 for |y| <= drift_window_fraction * L
// and smoothly 0 at |y| = L. All certified identities are restricted to the
// interior ball |y| <= drift_window_fraction * L where ytilde == y.
class Box {
  public:
    static std::shared_ptr<const Box> make(double L, int N, double dealias_fraction = 2.0 / 3.0,
                                           double drift_window_fraction = 0.8);

    double L;
    int N;
    double dealias_fraction;
    double drift_window_fraction;

    double h() const { return 2.0 * L / N; }
    double vol() const { return 8.0 * L * L * L; }
    std::size_t nphys() const { return std::size_t(N) * N * N; }
    std::size_t nspec() const { return std::size_t(N) * N * (N / 2 + 1); }
    int nhalf() const { return N / 2 + 1; }

    // grid coordinate along one axis
    double coord(int i) const { return -L + h() * i; }
    // integer mode number for the two full dimensions
    int mode(int i) const { return i < N / 2 ? i : i - N; }
    // wavenumbers (pi/L * mode)
    double kfull(int i) const { return kfull_[i]; }
    double khalf(int l) const { return khalf_[l]; }

    int kd;  // dealias cutoff: modes with any |m| > kd are dropped

    bool keep_mode(int i, int j, int l) const {
        return std::abs(mode(i)) <= kd && std::abs(mode(j)) <= kd && l <= kd;
    }

    std::size_t phys_index(int i, int j, int l) const {
        return (std::size_t(i) * N + j) * N + l;
    }
    std::size_t spec_index(int i, int j, int l) const {
        return (std::size_t(i) * N + j) * nhalf() + l;
    }

    const RealVec& ytilde(int d) const { return ytilde_[d]; }   // windowed coordinate field
    const RealVec& radius() const { return radius_; }           // |y| per grid point
    const std::vector<std::uint8_t>& interior() const { return interior_; }

    bool same_grid(const Box& o) const { return L == o.L && N == o.N; }

  private:
    Box(double L, int N, double df, double wf);
    std::vector<double> kfull_, khalf_;
    RealVec ytilde_[3];
    RealVec radius_;
    std::vector<std::uint8_t> interior_;
};

using BoxPtr = std::shared_ptr<const Box>;

}  // namespace dssflow
