#pragma once

#include "lrac/fft.hpp"
#include "lrac/noise.hpp"
#include "lrac/operator.hpp"

#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lrac {

// Double well V(q) = q^4/4 - q^2/2.
struct Potential {
    static double V(double q) { return 0.25 * q * q * q * q - 0.5 * q * q; }
    static double dV(double u) { return u * u * u - u; }
};

struct DriftSpec {
    enum class Kind { None, Full, Truncated, Upper, Lower };
    Kind kind = Kind::Full;
    double Z = 2.0;

    static DriftSpec none() { return {Kind::None, 0.0}; }
    static DriftSpec full() { return {Kind::Full, 0.0}; }
    static DriftSpec truncated(double Z) { return checked({Kind::Truncated, Z}); }
    // V+_Z: V' below Z, frozen above.
    static DriftSpec upper(double Z) { return checked({Kind::Upper, Z}); }
    // V-_Z: V' above -Z, frozen below.
    static DriftSpec lower(double Z) { return checked({Kind::Lower, Z}); }
    static DriftSpec parse(const std::string& name, double Z);

    double operator()(double u) const {
        switch (kind) {
        case Kind::None: return 0.0;
        case Kind::Full: return Potential::dV(u);
        case Kind::Truncated: return Potential::dV(u > Z ? Z : (u < -Z ? -Z : u));
        case Kind::Upper: return Potential::dV(u > Z ? Z : u);
        case Kind::Lower: return Potential::dV(u < -Z ? -Z : u);
        }
        return 0.0;
    }
    std::string name() const;
    // Bound M = Z^3 - Z of the truncated drift.
    double bound() const { return Z * Z * Z - Z; }
    double lipschitz() const { return 3.0 * Z * Z - 1.0; }

private:
    static DriftSpec checked(DriftSpec d);
};

enum class Integrator { SemiImplicit, Explicit };
std::string to_string(Integrator i);
Integrator parse_integrator(const std::string& s);

// u <- u + dt (gamma A u - V'(u)) + sqrt(2 sigma / h) dB
class ExplicitStepper {
public:
    ExplicitStepper(const LongRangeOperator& op, DriftSpec drift, double dt, double sigma);
    double dt_max() const noexcept { return dt_max_; }
    // dB may be empty when sigma == 0.
    void step(std::span<double> u, std::span<const double> dB);

private:
    LongRangeOperator op_;
    DriftSpec drift_;
    double dt_, noise_scale_, dt_max_;
    std::vector<double> au_;
};

// (I - dt gamma A) u_new = u - dt V'(u) + sqrt(2 sigma / h) dB, solved in the DFT basis.
class SemiImplicitStepper {
public:
    SemiImplicitStepper(const LongRangeOperator& op, DriftSpec drift, double dt, double sigma);
    void step(std::span<double> u, std::span<const double> dB);

private:
    int N_;
    DriftSpec drift_;
    double dt_, noise_scale_;
    std::vector<double> resolvent_; // 1 / (N (1 + dt mu_k)), k = 0..N/2
    std::vector<double> rhs_;
    std::vector<std::complex<double>> spec_;
    RealDft dft_;
};

// Either stepper behind one interface.
class Stepper {
public:
    Stepper(const LongRangeOperator& op, DriftSpec drift, double dt, double sigma, Integrator kind);
    void step(std::span<double> u, std::span<const double> dB);

private:
    std::optional<ExplicitStepper> explicit_;
    std::optional<SemiImplicitStepper> implicit_;
};

void check_finite(std::span<const double> u);

struct SimulationConfig {
    int N = 64;
    double zeta = 0.25;
    double gamma = 1.0;
    double sigma = 0.1;
    double T = 1.0;
    double dt = 1e-4;
    DriftSpec drift = DriftSpec::full();
    Integrator integrator = Integrator::SemiImplicit;
    std::string kernel = "indicator";
    std::function<double(double)> u0 = [](double) { return 0.0; };
    int record_every = 100; // steps between frames
};

struct Trajectory {
    int N = 0;
    double h = 0.0;
    std::uint64_t seed = 0;
    std::uint32_t replica = 0;
    std::string integrator;
    std::string drift;
    std::vector<double> times;
    std::vector<std::vector<double>> states;

    void write_csv(const std::filesystem::path& path) const;
    // Little-endian frames: "LRACTRJ\0", u32 version=1, u32 N, u32 dtype (1 = f64),
    // u64 frame count, then per frame f64 t followed by N f64 values.
    void write_binary(const std::filesystem::path& path) const;
    static Trajectory read_binary(const std::filesystem::path& path);
};

// Nodal samples f(i h), i = 0..N-1.
std::vector<double> sample_nodes(const std::function<double(double)>& f, int N);

LongRangeOperator make_operator(int N, double zeta, double gamma, const std::string& kernel);

Trajectory simulate(const SimulationConfig& cfg, const NoisePlan& plan);

// ||a - b||_{L^q[0,1]} of the periodic piecewise-linear interpolants; q = infinity allowed.
double lq_distance(std::span<const double> a, std::span<const double> b, double q);

struct HittingSpec {
    std::vector<double> target;
    double rho = 0.4;
    double q = 2.0;
    void validate(int N) const;
};

std::optional<double> hitting_time(const Trajectory& traj, const HittingSpec& spec);

// Online version: reports the first checked time inside the ball.
class HittingMonitor {
public:
    explicit HittingMonitor(HittingSpec spec) : spec_(std::move(spec)) {}
    bool check(double t, std::span<const double> u);
    std::optional<double> time() const noexcept { return tau_; }
    bool hit() const noexcept { return tau_.has_value(); }

private:
    HittingSpec spec_;
    std::optional<double> tau_;
};

} // namespace lrac
