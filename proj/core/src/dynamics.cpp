#include "lrac/dynamics.hpp"

#include "lrac/error.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace lrac {

DriftSpec DriftSpec::checked(DriftSpec d) {
    if (!(d.Z > 2.0 / std::sqrt(3.0)) || !std::isfinite(d.Z))
        throw Error(ErrorCode::ConfigInvalid, "truncation level Z must exceed 2/sqrt(3)");
    return d;
}

DriftSpec DriftSpec::parse(const std::string& name, double Z) {
    if (name == "none")
        return none();
    if (name == "full")
        return full();
    if (name == "truncated")
        return truncated(Z);
    if (name == "upper")
        return upper(Z);
    if (name == "lower")
        return lower(Z);
    throw Error(ErrorCode::ConfigInvalid, "unknown drift '" + name + "'");
}

std::string DriftSpec::name() const {
    switch (kind) {
    case Kind::None: return "none";
    case Kind::Full: return "full";
    case Kind::Truncated: return "truncated";
    case Kind::Upper: return "upper";
    case Kind::Lower: return "lower";
    }
    return "full";
}

std::string to_string(Integrator i) { return i == Integrator::Explicit ? "explicit" : "semi-implicit"; }

Integrator parse_integrator(const std::string& s) {
    if (s == "explicit")
        return Integrator::Explicit;
    if (s == "semi-implicit" || s == "semi_implicit")
        return Integrator::SemiImplicit;
    throw Error(ErrorCode::ConfigInvalid, "unknown integrator '" + s + "'");
}

void check_finite(std::span<const double> u) {
    for (double v : u)
        if (!std::isfinite(v))
            throw Error(ErrorCode::NonFinite, "state became NaN or infinite");
}

ExplicitStepper::ExplicitStepper(const LongRangeOperator& op, DriftSpec drift, double dt, double sigma)
    : op_(op), drift_(drift), dt_(dt), noise_scale_(std::sqrt(2.0 * sigma / op.h())),
      dt_max_(2.0 / op.max_circulant_eigenvalue()), au_(static_cast<std::size_t>(op.N())) {
    if (!(dt > 0.0))
        throw Error(ErrorCode::ConfigInvalid, "dt must be positive");
    if (dt > dt_max_)
        throw Error(ErrorCode::UnstableStep, "dt exceeds the explicit bound 2/max(mu) = " + std::to_string(dt_max_));
}

void ExplicitStepper::step(std::span<double> u, std::span<const double> dB) {
    op_.apply(u, au_);
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] += dt_ * (au_[i] - drift_(u[i]));
    if (!dB.empty()) {
        if (dB.size() != u.size())
            throw Error(ErrorCode::DimensionMismatch, "increment length differs from N");
        for (std::size_t i = 0; i < u.size(); ++i)
            u[i] += noise_scale_ * dB[i];
    }
    check_finite(u);
}

SemiImplicitStepper::SemiImplicitStepper(const LongRangeOperator& op, DriftSpec drift, double dt, double sigma)
    : N_(op.N()), drift_(drift), dt_(dt), noise_scale_(std::sqrt(2.0 * sigma / op.h())),
      resolvent_(static_cast<std::size_t>(op.N() / 2 + 1)), rhs_(static_cast<std::size_t>(op.N())),
      spec_(static_cast<std::size_t>(op.N() / 2 + 1)), dft_(op.N()) {
    if (!(dt > 0.0))
        throw Error(ErrorCode::ConfigInvalid, "dt must be positive");
    for (int k = 0; k <= N_ / 2; ++k)
        resolvent_[static_cast<std::size_t>(k)] = 1.0 / (N_ * (1.0 + dt_ * op.eigenvalue_circulant(k)));
}

void SemiImplicitStepper::step(std::span<double> u, std::span<const double> dB) {
    if (u.size() != static_cast<std::size_t>(N_))
        throw Error(ErrorCode::DimensionMismatch, "state length differs from N");
    for (std::size_t i = 0; i < u.size(); ++i)
        rhs_[i] = u[i] - dt_ * drift_(u[i]);
    if (!dB.empty()) {
        if (dB.size() != u.size())
            throw Error(ErrorCode::DimensionMismatch, "increment length differs from N");
        for (std::size_t i = 0; i < u.size(); ++i)
            rhs_[i] += noise_scale_ * dB[i];
    }
    dft_.forward(rhs_.data(), spec_.data());
    for (std::size_t k = 0; k < spec_.size(); ++k)
        spec_[k] *= resolvent_[k];
    dft_.inverse(spec_.data(), u.data());
    check_finite(u);
}

Stepper::Stepper(const LongRangeOperator& op, DriftSpec drift, double dt, double sigma, Integrator kind) {
    if (kind == Integrator::Explicit)
        explicit_.emplace(op, drift, dt, sigma);
    else
        implicit_.emplace(op, drift, dt, sigma);
}

void Stepper::step(std::span<double> u, std::span<const double> dB) {
    if (explicit_)
        explicit_->step(u, dB);
    else
        implicit_->step(u, dB);
}

std::vector<double> sample_nodes(const std::function<double(double)>& f, int N) {
    std::vector<double> u(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
        u[static_cast<std::size_t>(i)] = f(static_cast<double>(i) / N);
    return u;
}

LongRangeOperator make_operator(int N, double zeta, double gamma, const std::string& kernel) {
    int R = radius_for(N, zeta);
    return LongRangeOperator(build_weights(WeightKernel::from_name(kernel), R, zeta), N, gamma);
}

Trajectory simulate(const SimulationConfig& cfg, const NoisePlan& plan) {
    if (!(cfg.T >= 0.0) || !(cfg.dt > 0.0) || cfg.record_every < 1)
        throw Error(ErrorCode::ConfigInvalid, "need T >= 0, dt > 0, record_every >= 1");
    const double ns = cfg.T / cfg.dt;
    const auto steps = static_cast<std::int64_t>(std::llround(ns));
    if (std::abs(ns - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ns))
        throw Error(ErrorCode::ConfigInvalid, "T must be an integer multiple of dt");

    auto op = make_operator(cfg.N, cfg.zeta, cfg.gamma, cfg.kernel);
    Stepper stepper(op, cfg.drift, cfg.dt, cfg.sigma, cfg.integrator);
    std::optional<IncrementStream> noise;
    if (cfg.sigma > 0.0)
        noise.emplace(plan, cfg.N, cfg.dt);

    Trajectory tr;
    tr.N = cfg.N;
    tr.h = op.h();
    tr.seed = plan.seed();
    tr.replica = plan.replica();
    tr.integrator = to_string(cfg.integrator);
    tr.drift = cfg.drift.name();

    std::vector<double> u = sample_nodes(cfg.u0, cfg.N);
    std::vector<double> dB(noise ? static_cast<std::size_t>(cfg.N) : 0);
    tr.times.push_back(0.0);
    tr.states.push_back(u);
    for (std::int64_t s = 1; s <= steps; ++s) {
        if (noise)
            noise->next(dB);
        stepper.step(u, dB);
        if (s % cfg.record_every == 0 || s == steps) {
            tr.times.push_back(static_cast<double>(s) * cfg.dt);
            tr.states.push_back(u);
        }
    }
    return tr;
}

namespace {
// int_0^1 |a + (b - a) s|^q ds
double segment_power(double a, double b, double q) {
    if (q == 2.0)
        return (a * a + a * b + b * b) / 3.0;
    if (q == 1.0) {
        if ((a >= 0 && b >= 0) || (a <= 0 && b <= 0))
            return 0.5 * (std::abs(a) + std::abs(b));
        return 0.5 * (a * a + b * b) / (std::abs(a) + std::abs(b));
    }
    auto f = [&](double s) { return std::pow(std::abs(a + (b - a) * s), q); };
    using G = boost::math::quadrature::gauss<double, 20>;
    if ((a > 0 && b < 0) || (a < 0 && b > 0)) {
        double s0 = a / (a - b);
        return G::integrate(f, 0.0, s0) + G::integrate(f, s0, 1.0);
    }
    return G::integrate(f, 0.0, 1.0);
}
} // namespace

double lq_distance(std::span<const double> a, std::span<const double> b, double q) {
    if (a.size() != b.size() || a.empty())
        throw Error(ErrorCode::DimensionMismatch, "distance between vectors of different length");
    if (!(q >= 1.0))
        throw Error(ErrorCode::ConfigInvalid, "q must be >= 1");
    const std::size_t n = a.size();
    if (std::isinf(q)) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            m = std::max(m, std::abs(a[i] - b[i]));
        return m;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = i + 1 == n ? 0 : i + 1;
        s += segment_power(a[i] - b[i], a[j] - b[j], q);
    }
    return std::pow(s / static_cast<double>(n), 1.0 / q);
}

void HittingSpec::validate(int N) const {
    if (!(rho > 0.0))
        throw Error(ErrorCode::ConfigInvalid, "rho must be positive");
    if (!(q >= 1.0))
        throw Error(ErrorCode::ConfigInvalid, "q must be >= 1");
    if (target.size() != static_cast<std::size_t>(N))
        throw Error(ErrorCode::DimensionMismatch, "target length differs from N");
}

std::optional<double> hitting_time(const Trajectory& traj, const HittingSpec& spec) {
    spec.validate(traj.N);
    for (std::size_t f = 0; f < traj.times.size(); ++f)
        if (lq_distance(traj.states[f], spec.target, spec.q) < spec.rho)
            return traj.times[f];
    return std::nullopt;
}

bool HittingMonitor::check(double t, std::span<const double> u) {
    if (tau_)
        return true;
    if (lq_distance(u, spec_.target, spec_.q) < spec_.rho)
        tau_ = t;
    return tau_.has_value();
}

} // namespace lrac
