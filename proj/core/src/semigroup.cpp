#include "lrac/semigroup.hpp"

#include "lrac/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lrac {

namespace {
constexpr double pi = std::numbers::pi;

// (1 - e^{-2 t l}) / (2 l), stable for small t l.
double ou_variance(double t, double l) {
    if (l <= 0.0)
        throw Error(ErrorCode::SingularMode, "zero eigenvalue in a 1/lambda term");
    return -std::expm1(-2.0 * t * l) / (2.0 * l);
}
} // namespace

DiscreteSemigroup::DiscreteSemigroup(const LongRangeOperator& op)
    : N_(op.N()), h_(op.h()), gamma_(op.gamma()), lambda_(static_cast<std::size_t>(op.N()) + 1) {
    for (int k = 0; k <= N_; ++k)
        lambda_[static_cast<std::size_t>(k)] = op.eigenvalue_sine(k);
}

double DiscreteSemigroup::eigenvector(int k, double x) const {
    double s = std::clamp(x, 0.0, 1.0) * N_;
    int m = std::min(static_cast<int>(std::floor(s)), N_ - 1);
    double f = s - m;
    double a = std::sin(pi * k * m / N_);
    double b = std::sin(pi * k * (m + 1) / N_);
    return eigvec_norm * (a + f * (b - a));
}

double DiscreteSemigroup::eval(double t, double x, double y) const {
    if (!(t > 0.0))
        throw Error(ErrorCode::OutOfRange, "semigroup needs t > 0");
    double s = 0.0;
    for (int k = 1; k <= N_; ++k)
        s += std::exp(-t * lambda(k)) * eigenvector(k, x) * eigenvector(k, y);
    return s;
}

double DiscreteSemigroup::mode_mass(int k, MassConvention mc) const {
    if (k <= 0 || k >= N_)
        return 0.0;
    if (mc == MassConvention::Lumped)
        return 1.0;
    return (2.0 + std::cos(pi * k * h_)) / 3.0;
}

L2Functionals DiscreteSemigroup::l2_functionals(double t, double x, MassConvention mc) const {
    if (!(t > 0.0))
        throw Error(ErrorCode::OutOfRange, "L2 functionals need t > 0");
    L2Functionals r;
    for (int k = 1; k <= N_; ++k) {
        double m = mode_mass(k, mc);
        if (m == 0.0)
            continue;
        double l = lambda(k);
        double v = eigenvector(k, x);
        double e = std::exp(-2.0 * t * l);
        double ou = ou_variance(t, l);
        r.space_int += e * v * v * m;
        r.full_int += e * m * m;
        r.space_time += v * v * m * ou;
        r.full_time += m * m * ou;
    }
    return r;
}

double DiscreteSemigroup::space_increment(double t, double x, double xp, MassConvention mc) const {
    double s = 0.0;
    for (int k = 1; k < N_; ++k) {
        double d = eigenvector(k, x) - eigenvector(k, xp);
        s += d * d * mode_mass(k, mc) * ou_variance(t, lambda(k));
    }
    return s;
}

double DiscreteSemigroup::time_increment(double t, double tp, double x, MassConvention mc) const {
    if (tp < t)
        std::swap(t, tp);
    double s = 0.0;
    for (int k = 1; k < N_; ++k) {
        double v = eigenvector(k, x);
        double d = -std::expm1(-(tp - t) * lambda(k));
        s += v * v * mode_mass(k, mc) * d * d * ou_variance(t, lambda(k));
    }
    return s;
}

double DiscreteSemigroup::convolution_time_structure(double t, double tp, double x,
                                                     MassConvention mc) const {
    if (tp < t)
        std::swap(t, tp);
    double s = time_increment(t, tp, x, mc);
    for (int k = 1; k < N_; ++k) {
        double v = eigenvector(k, x);
        s += v * v * mode_mass(k, mc) * ou_variance(tp - t, lambda(k));
    }
    return s;
}

double DiscreteSemigroup::convolution_space_structure(double t, double x, double xp,
                                                      MassConvention mc) const {
    return space_increment(t, x, xp, mc);
}

double DiscreteSemigroup::space_envelope(double gamma, double t) {
    return std::sqrt(pi) / (2.0 * std::sqrt(2.0) * std::sqrt(gamma * t)) + 2.0;
}

double DiscreteSemigroup::time_envelope(double gamma, double t) {
    return std::min(pi * pi / 6.0, 3.0 * std::sqrt(8.0 * gamma * t)) / (4.0 * gamma);
}

ContinuousHeatKernel::ContinuousHeatKernel(double gamma, double t_min) : gamma_(gamma), t_min_(t_min) {
    if (!(t_min >= min_time))
        throw Error(ErrorCode::OutOfRange, "continuous kernel refuses t < 1e-4");
    auto term = [&](int k) { return 2.0 * std::exp(-gamma_ * pi * pi * k * k * t_min_); };
    // Terms decay faster than geometrically past the peak, so a finite tail sum is exact to rounding.
    k_max_ = 1;
    for (;; ++k_max_) {
        double tail = 0.0;
        for (int k = k_max_ + 1;; ++k) {
            double tk = term(k);
            tail += tk;
            if (tk < 1e-30 * std::max(tail, 1e-300) || tk == 0.0)
                break;
        }
        if (tail < 1e-12) {
            tail_ = tail;
            break;
        }
    }
}

double ContinuousHeatKernel::eval(double t, double x, double y) const {
    if (t < t_min_)
        throw Error(ErrorCode::OutOfRange, "t below the truncation time of this kernel");
    double s = 0.0;
    for (int k = 1; k <= k_max_; ++k)
        s += std::exp(-gamma_ * pi * pi * k * k * t) * 2.0 * std::sin(pi * k * x) * std::sin(pi * k * y);
    return s;
}

std::vector<KernelPoint> kernel_grid(std::span<const double> ts, int points_per_axis) {
    std::vector<KernelPoint> g;
    g.reserve(ts.size() * static_cast<std::size_t>(points_per_axis * points_per_axis));
    for (double t : ts)
        for (int i = 0; i < points_per_axis; ++i)
            for (int j = 0; j < points_per_axis; ++j)
                g.push_back({t, static_cast<double>(i) / (points_per_axis - 1),
                             static_cast<double>(j) / (points_per_axis - 1)});
    return g;
}

double kernel_distance(const DiscreteSemigroup& gh, const ContinuousHeatKernel& g,
                       std::span<const KernelPoint> grid) {
    double d = 0.0;
    for (const auto& p : grid)
        d = std::max(d, std::abs(gh.eval(p.t, p.x, p.y) - g.eval(p.t, p.x, p.y)));
    return d;
}

CirculantPropagator::CirculantPropagator(const LongRangeOperator& op)
    : N_(op.N()), mu_(static_cast<std::size_t>(op.N() / 2 + 1)), dft_(op.N()),
      spec_(static_cast<std::size_t>(op.N() / 2 + 1)) {
    for (int k = 0; k <= N_ / 2; ++k)
        mu_[static_cast<std::size_t>(k)] = op.eigenvalue_circulant(k);
}

void CirculantPropagator::propagate(std::span<const double> u, double t, std::span<double> out) {
    if (u.size() != static_cast<std::size_t>(N_) || out.size() != u.size())
        throw Error(ErrorCode::DimensionMismatch, "vector length differs from N");
    dft_.forward(u.data(), spec_.data());
    for (std::size_t k = 0; k < spec_.size(); ++k)
        spec_[k] *= std::exp(-t * mu_[k]) / N_;
    dft_.inverse(spec_.data(), out.data());
}

std::vector<double> CirculantPropagator::propagate(std::span<const double> u, double t) {
    std::vector<double> out(u.size());
    propagate(u, t, out);
    return out;
}

} // namespace lrac
