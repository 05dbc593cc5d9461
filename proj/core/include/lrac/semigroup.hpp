#pragma once

#include "lrac/fft.hpp"
#include "lrac/operator.hpp"

#include <span>
#include <vector>

namespace lrac {

enum class MassConvention {
    Lumped,     // nodal inner product: int v_k^2 = 1 (k < N)
    Consistent, // exact integral of the piecewise-linear interpolants
};

struct L2Functionals {
    double space_int = 0;  // int_0^1 g_t(x,y)^2 dy
    double full_int = 0;   // int int g_t^2
    double space_time = 0; // int_0^t int_0^1 g_s(x,y)^2 dy ds
    double full_time = 0;  // int_0^t int int g_s^2
};

// Sine-only spectral kernel sum_{k=1}^N e^{-t lambda_k} v_k(x) v_k(y) with v_k the
// piecewise-linear interpolant of sqrt(2) sin(pi k m h).
class DiscreteSemigroup {
public:
    explicit DiscreteSemigroup(const LongRangeOperator& op);

    static constexpr double eigvec_norm = 1.4142135623730951; // sqrt(2)

    int N() const noexcept { return N_; }
    double h() const noexcept { return h_; }
    double lambda(int k) const { return lambda_[static_cast<std::size_t>(k)]; }

    double eigenvector(int k, double x) const;
    double eval(double t, double x, double y) const;
    double mode_mass(int k, MassConvention mc) const;

    L2Functionals l2_functionals(double t, double x, MassConvention mc = MassConvention::Consistent) const;
    // int_0^t int |g_{t-s}(x,.) - g_{t-s}(x',.)|^2 dy ds
    double space_increment(double t, double x, double xp,
                           MassConvention mc = MassConvention::Consistent) const;
    // int_0^t int |g_{t-s}(x,.) - g_{t'-s}(x,.)|^2 dy ds, t <= t'
    double time_increment(double t, double tp, double x,
                          MassConvention mc = MassConvention::Consistent) const;
    // E|B(x,t') - B(x,t)|^2 for the stochastic convolution started at zero, t <= t'.
    double convolution_time_structure(double t, double tp, double x,
                                      MassConvention mc = MassConvention::Lumped) const;
    // E|B(x,t) - B(x',t)|^2.
    double convolution_space_structure(double t, double x, double xp,
                                       MassConvention mc = MassConvention::Lumped) const;

    // Envelopes that the closed forms must stay below.
    static double space_envelope(double gamma, double t);
    static double time_envelope(double gamma, double t);

private:
    int N_;
    double h_;
    double gamma_;
    std::vector<double> lambda_; // index 0..N
};

// Dirichlet heat kernel sum_k e^{-gamma pi^2 k^2 t} 2 sin(pi k x) sin(pi k y), truncated so that
// the tail at t >= t_min is below 1e-12.
class ContinuousHeatKernel {
public:
    ContinuousHeatKernel(double gamma, double t_min);

    static constexpr double min_time = 1e-4;

    int k_max() const noexcept { return k_max_; }
    double t_min() const noexcept { return t_min_; }
    double tail_bound() const noexcept { return tail_; }
    double eval(double t, double x, double y) const;

private:
    double gamma_;
    double t_min_;
    int k_max_;
    double tail_;
};

struct KernelPoint {
    double t, x, y;
};

std::vector<KernelPoint> kernel_grid(std::span<const double> ts, int points_per_axis);

double kernel_distance(const DiscreteSemigroup& gh, const ContinuousHeatKernel& g,
                       std::span<const KernelPoint> grid);

// Exact propagator e^{t gamma A} of the periodic circulant (all Fourier modes, mass conserving).
class CirculantPropagator {
public:
    explicit CirculantPropagator(const LongRangeOperator& op);

    void propagate(std::span<const double> u, double t, std::span<double> out);
    std::vector<double> propagate(std::span<const double> u, double t);

private:
    int N_;
    std::vector<double> mu_;
    RealDft dft_;
    std::vector<std::complex<double>> spec_;
};

} // namespace lrac
