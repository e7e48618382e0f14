#include "bmlab/fft.hpp"

namespace bmlab::fft {

namespace {
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

RealFFT::RealFFT(std::size_t length) : n_(length) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    double* re = fftw_alloc_real(n_);
    fftw_complex* sp = fftw_alloc_complex(spectrum_size());
    r2c_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), re, sp, FFTW_ESTIMATE);
    c2r_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), sp, re, FFTW_ESTIMATE);
    fftw_free(re);
    fftw_free(sp);
}

RealFFT::~RealFFT() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(r2c_);
    fftw_destroy_plan(c2r_);
}

void RealFFT::forward(double* in, fftw_complex* out) const {
    fftw_execute_dft_r2c(r2c_, in, out);
}

void RealFFT::backward(fftw_complex* in, double* out) const {
    fftw_execute_dft_c2r(c2r_, in, out);
}

const RealFFT& plan_for_length(std::size_t length) {
    static std::mutex registry_mutex;
    static std::map<std::size_t, std::unique_ptr<RealFFT>> registry;
    std::lock_guard<std::mutex> lock(registry_mutex);
    auto& slot = registry[length];
    if (!slot) slot = std::make_unique<RealFFT>(length);
    return *slot;
}

}  // namespace bmlab::fft
