#pragma once

#include <complex>
#include <cstdlib>
#include <vector>

namespace dssflow {

// Allocator backed by fftw_malloc so arrays meet FFTW's SIMD alignment and
// plans created once can execute on any of them.
template <class T>
struct FftwAllocator {
    using value_type = T;
    FftwAllocator() = default;
    template <class U>
    FftwAllocator(const FftwAllocator<U>&) {}
    T* allocate(std::size_t n);
    void deallocate(T* p, std::size_t) noexcept;
    bool operator==(const FftwAllocator&) const { return true; }
};

using RealVec = std::vector<double, FftwAllocator<double>>;
using Cplx = std::complex<double>;
using CplxVec = std::vector<Cplx, FftwAllocator<Cplx>>;

// 3D real<->complex transforms for an N^3 grid, r2c layout N x N x (N/2+1).
// forward() normalizes by 1/N^3 so coefficients are Fourier-series values.
// Plans are cached per N; execution is safe concurrently on distinct arrays.
class Fft {
  public:
    static const Fft& get(int n);

    int n() const { return n_; }
    std::size_t nphys() const { return std::size_t(n_) * n_ * n_; }
    std::size_t nspec() const { return std::size_t(n_) * n_ * (n_ / 2 + 1); }

    void forward(const RealVec& in, CplxVec& out) const;
    // c2r destroys its input; this takes a copy internally.
    void backward(const CplxVec& in, RealVec& out) const;

  private:
    explicit Fft(int n);
    int n_;
    void* plan_fwd_;
    void* plan_bwd_;
};

}  // namespace dssflow
