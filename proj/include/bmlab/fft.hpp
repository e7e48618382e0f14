#pragma once

#include <fftw3.h>

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>

namespace bmlab::fft {

// Cached FFTW plans per transform length. Plan creation is serialized (FFTW
// planning is not thread-safe); execution via the new-array interface is.
// All buffers passed to execute() must come from fftw_malloc so alignment
// matches the plan.
class RealFFT {
public:
    explicit RealFFT(std::size_t length);
    ~RealFFT();
    RealFFT(const RealFFT&) = delete;
    RealFFT& operator=(const RealFFT&) = delete;

    std::size_t length() const { return n_; }
    std::size_t spectrum_size() const { return n_ / 2 + 1; }

    void forward(double* in, fftw_complex* out) const;   // r2c, unnormalized
    void backward(fftw_complex* in, double* out) const;  // c2r, unnormalized (destroys input)

private:
    std::size_t n_;
    fftw_plan r2c_;
    fftw_plan c2r_;
};

const RealFFT& plan_for_length(std::size_t length);

struct FftwDeleter {
    void operator()(void* p) const { fftw_free(p); }
};

inline std::unique_ptr<double[], FftwDeleter> real_buffer(std::size_t count) {
    return std::unique_ptr<double[], FftwDeleter>(fftw_alloc_real(count));
}

inline std::unique_ptr<fftw_complex[], FftwDeleter> complex_buffer(std::size_t count) {
    return std::unique_ptr<fftw_complex[], FftwDeleter>(fftw_alloc_complex(count));
}

}  // namespace bmlab::fft
