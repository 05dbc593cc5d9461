#include "lrac/operator.hpp"

#include "lrac/error.hpp"
#include "lrac/fft.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace lrac {

double SpectrumView::eigvec_sample(int k, int m) const {
    return std::sin(std::numbers::pi * k * m / static_cast<double>(N));
}

LongRangeOperator::LongRangeOperator(DiscreteWeights weights, int N, double gamma)
    : w_(std::move(weights)), N_(N), h_(1.0 / N), gamma_(gamma) {
    if (N_ < 4)
        throw Error(ErrorCode::DimensionMismatch, "N must be >= 4");
    if (2 * w_.R >= N_)
        throw Error(ErrorCode::RadiusTooLarge, "R must be below N/2");
    if (!(gamma_ > 0.0))
        throw Error(ErrorCode::ConfigInvalid, "gamma must be positive");
    scale_ = gamma_ / (std::pow(static_cast<double>(w_.R), 3) * h_ * h_);
}

void LongRangeOperator::apply(std::span<const double> u, std::span<double> out) const {
    if (u.size() != static_cast<std::size_t>(N_) || out.size() != u.size())
        throw Error(ErrorCode::DimensionMismatch, "vector length differs from N");
    const int R = w_.R;
    for (int i = 0; i < N_; ++i) {
        double ui = u[static_cast<std::size_t>(i)];
        double acc = 0.0;
        for (int j = 1; j <= R; ++j) {
            int ip = i + j;
            if (ip >= N_)
                ip -= N_;
            int im = i - j;
            if (im < 0)
                im += N_;
            acc += w_.values[static_cast<std::size_t>(j - 1)] *
                   ((u[static_cast<std::size_t>(ip)] - ui) + (u[static_cast<std::size_t>(im)] - ui));
        }
        out[static_cast<std::size_t>(i)] = scale_ * acc;
    }
}

std::vector<double> LongRangeOperator::apply(std::span<const double> u) const {
    std::vector<double> out(u.size());
    apply(u, out);
    return out;
}

std::vector<double> LongRangeOperator::apply_spectral(std::span<const double> u) const {
    if (u.size() != static_cast<std::size_t>(N_))
        throw Error(ErrorCode::DimensionMismatch, "vector length differs from N");
    RealDft dft(N_);
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(dft.spectrum_size()));
    dft.forward(u.data(), spec.data());
    for (int k = 0; k < dft.spectrum_size(); ++k)
        spec[static_cast<std::size_t>(k)] *= -eigenvalue_circulant(k) / N_;
    std::vector<double> out(u.size());
    dft.inverse(spec.data(), out.data());
    return out;
}

double LongRangeOperator::sine_sum(double angle_per_j) const {
    double s = 0.0;
    for (int j = 1; j <= w_.R; ++j) {
        double sn = std::sin(angle_per_j * j);
        s += w_.values[static_cast<std::size_t>(j - 1)] * sn * sn;
    }
    return 4.0 * scale_ * s;
}

double LongRangeOperator::eigenvalue_sine(int k) const {
    if (k < 0 || k > N_)
        throw Error(ErrorCode::OutOfRange, "sine-mode index must lie in [0, N]");
    return sine_sum(0.5 * std::numbers::pi * k * h_);
}

double LongRangeOperator::eigenvalue_circulant(int k) const {
    if (k < 0 || k >= N_)
        throw Error(ErrorCode::OutOfRange, "circulant index must lie in [0, N)");
    return sine_sum(std::numbers::pi * k * h_);
}

double LongRangeOperator::eigenvalue_gap_to_continuum(int k) const {
    if (k == 0)
        return 0.0;
    return gamma_ * std::numbers::pi * std::numbers::pi * k * k - eigenvalue_sine(k);
}

double LongRangeOperator::max_circulant_eigenvalue() const {
    double m = 0.0;
    for (int k = 0; k < N_; ++k)
        m = std::max(m, eigenvalue_circulant(k));
    return m;
}

double LongRangeOperator::inverse_trace() const {
    double s = 0.0;
    for (int k = 1; k <= N_; ++k) {
        double l = eigenvalue_sine(k);
        if (!(l > 0.0))
            throw Error(ErrorCode::SingularMode, "lambda_" + std::to_string(k) + " vanishes");
        s += 1.0 / l;
    }
    return s;
}

SpectrumView LongRangeOperator::spectrum() const {
    SpectrumView v;
    v.N = N_;
    v.sine_eigs.resize(static_cast<std::size_t>(N_) + 1);
    v.circulant_eigs.resize(static_cast<std::size_t>(N_));
    for (int k = 0; k <= N_; ++k)
        v.sine_eigs[static_cast<std::size_t>(k)] = eigenvalue_sine(k);
    for (int k = 0; k < N_; ++k)
        v.circulant_eigs[static_cast<std::size_t>(k)] = eigenvalue_circulant(k);
    return v;
}

double consistency_error(const LongRangeOperator& op, const std::function<double(double)>& f,
                         const std::function<double(double)>& f2) {
    const int N = op.N();
    std::vector<double> u(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
        u[static_cast<std::size_t>(i)] = f(i * op.h());
    auto au = op.apply(u);
    double err = 0.0;
    for (int i = 0; i < N; ++i)
        err = std::max(err, std::abs(au[static_cast<std::size_t>(i)] / op.gamma() - f2(i * op.h())));
    return err;
}

} // namespace lrac
