#include "dssflow/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace dssflow {

template <class T>
T* FftwAllocator<T>::allocate(std::size_t n) {
    void* p = fftw_malloc(n * sizeof(T));
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
}

template <class T>
void FftwAllocator<T>::deallocate(T* p, std::size_t) noexcept {
    fftw_free(p);
}

template struct FftwAllocator<double>;
template struct FftwAllocator<Cplx>;

namespace {
std::mutex g_plan_mutex;

thread_local std::map<std::size_t, CplxVec> g_scratch;

CplxVec& scratch(std::size_t n) {
    auto& s = g_scratch[n];
    if (s.size() != n) s.resize(n);
    return s;
}
}  // namespace

Fft::Fft(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    RealVec r(nphys());
    CplxVec c(nspec());
    // FFTW_ESTIMATE keeps plan choice (and hence bit-level results) independent
    // of runtime measurements.
    plan_fwd_ = fftw_plan_dft_r2c_3d(n, n, n, r.data(),
                                     reinterpret_cast<fftw_complex*>(c.data()), FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_c2r_3d(n, n, n, reinterpret_cast<fftw_complex*>(c.data()), r.data(),
                                     FFTW_ESTIMATE);
    if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("fftw plan creation failed");
}

const Fft& Fft::get(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<Fft>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::unique_ptr<Fft>(new Fft(n))).first;
    return *it->second;
}

void Fft::forward(const RealVec& in, CplxVec& out) const {
    out.resize(nspec());
    // r2c preserves its input for out-of-place transforms, but input is not
    // const in the FFTW API; copy through scratch-free const_cast is standard.
    fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_fwd_), const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
    double scale = 1.0 / double(nphys());
    for (auto& v : out) v *= scale;
}

void Fft::backward(const CplxVec& in, RealVec& out) const {
    out.resize(nphys());
    CplxVec& tmp = scratch(nspec());
    tmp.assign(in.begin(), in.end());
    fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_bwd_),
                         reinterpret_cast<fftw_complex*>(tmp.data()), out.data());
}

}  // namespace dssflow
