#include "lrac/fft.hpp"

#include "lrac/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

namespace lrac {

namespace {
// Planner calls are not thread-safe in FFTW.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

struct RealDft::Impl {
    int n;
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;

    explicit Impl(int n_) : n(n_) {
        if (n < 1)
            throw Error(ErrorCode::DimensionMismatch, "DFT length must be positive");
        std::lock_guard<std::mutex> lock(planner_mutex());
        real = fftw_alloc_real(static_cast<std::size_t>(n));
        spec = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
        fwd = fftw_plan_dft_r2c_1d(n, real, spec, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(n, spec, real, FFTW_ESTIMATE);
    }
    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
        fftw_free(real);
        fftw_free(spec);
    }
};

RealDft::RealDft(int n) : impl_(std::make_unique<Impl>(n)) {}
RealDft::~RealDft() = default;
RealDft::RealDft(RealDft&&) noexcept = default;
RealDft& RealDft::operator=(RealDft&&) noexcept = default;

int RealDft::size() const noexcept { return impl_->n; }

void RealDft::forward(const double* in, std::complex<double>* out) {
    std::copy(in, in + impl_->n, impl_->real);
    fftw_execute(impl_->fwd);
    std::memcpy(static_cast<void*>(out), impl_->spec,
                sizeof(fftw_complex) * static_cast<std::size_t>(impl_->n / 2 + 1));
}

void RealDft::inverse(const std::complex<double>* in, double* out) {
    std::memcpy(impl_->spec, static_cast<const void*>(in),
                sizeof(fftw_complex) * static_cast<std::size_t>(impl_->n / 2 + 1));
    fftw_execute(impl_->inv);
    std::copy(impl_->real, impl_->real + impl_->n, out);
}

struct SineTransform::Impl {
    int n;
    double* in = nullptr;
    double* out = nullptr;
    fftw_plan plan = nullptr;

    explicit Impl(int n_) : n(n_) {
        if (n < 1)
            throw Error(ErrorCode::DimensionMismatch, "DST length must be positive");
        std::lock_guard<std::mutex> lock(planner_mutex());
        in = fftw_alloc_real(static_cast<std::size_t>(n));
        out = fftw_alloc_real(static_cast<std::size_t>(n));
        plan = fftw_plan_r2r_1d(n, in, out, FFTW_RODFT00, FFTW_ESTIMATE);
    }
    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
    }
};

SineTransform::SineTransform(int n) : impl_(std::make_unique<Impl>(n)) {}
SineTransform::~SineTransform() = default;
SineTransform::SineTransform(SineTransform&&) noexcept = default;
SineTransform& SineTransform::operator=(SineTransform&&) noexcept = default;

int SineTransform::size() const noexcept { return impl_->n; }

void SineTransform::apply(const double* in, double* out) {
    std::copy(in, in + impl_->n, impl_->in);
    fftw_execute(impl_->plan);
    std::copy(impl_->out, impl_->out + impl_->n, out);
}

} // namespace lrac
