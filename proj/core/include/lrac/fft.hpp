#pragma once

#include <complex>
#include <memory>

namespace lrac {

// Real-to-complex DFT of length n (FFTW r2c/c2r). Inverse is unnormalized.
// Each instance owns its buffers; distinct instances may run concurrently.
class RealDft {
public:
    explicit RealDft(int n);
    ~RealDft();
    RealDft(RealDft&&) noexcept;
    RealDft& operator=(RealDft&&) noexcept;
    RealDft(const RealDft&) = delete;
    RealDft& operator=(const RealDft&) = delete;

    int size() const noexcept;
    int spectrum_size() const noexcept { return size() / 2 + 1; }
    void forward(const double* in, std::complex<double>* out);
    void inverse(const std::complex<double>* in, double* out);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// DST-I of length n: y_k = 2 sum_j x_j sin(pi (j+1)(k+1)/(n+1)).
// Applying it twice multiplies by 2(n+1).
class SineTransform {
public:
    explicit SineTransform(int n);
    ~SineTransform();
    SineTransform(SineTransform&&) noexcept;
    SineTransform& operator=(SineTransform&&) noexcept;
    SineTransform(const SineTransform&) = delete;
    SineTransform& operator=(const SineTransform&) = delete;

    int size() const noexcept;
    void apply(const double* in, double* out);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace lrac
