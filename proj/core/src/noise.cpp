#include "lrac/noise.hpp"

#include "lrac/error.hpp"

#include <algorithm>
#include <cmath>

namespace lrac {

NoisePlan::NoisePlan(std::uint64_t seed, int master_n, double dt_master, std::uint32_t replica)
    : rng_(seed), seed_(seed), master_n_(master_n), dt_master_(dt_master), replica_(replica) {
    if (master_n < 1)
        throw Error(ErrorCode::ConfigInvalid, "master_n must be positive");
    if (!(dt_master > 0.0))
        throw Error(ErrorCode::ConfigInvalid, "dt_master must be positive");
    stdev_ = std::sqrt(h_master() * dt_master_);
    quantum_ = std::ldexp(1.0, std::ilogb(stdev_) - quantum_bits);
}

NoisePlan NoisePlan::for_replica(std::uint32_t replica) const {
    return NoisePlan(seed_, master_n_, dt_master_, replica);
}

void NoisePlan::standard_normals(Stream stream, std::int64_t row, std::span<double> out) const {
    const auto r = static_cast<std::uint64_t>(row);
    const std::uint32_t lo = static_cast<std::uint32_t>(r);
    const std::uint32_t hi = (static_cast<std::uint32_t>(stream) << 24) |
                             static_cast<std::uint32_t>((r >> 32) & 0xFFFFFFu);
    const std::size_t n = out.size();
    for (std::size_t p = 0; 2 * p < n; ++p) {
        auto [z0, z1] = rng_.normal_pair({static_cast<std::uint32_t>(p), lo, replica_, hi});
        out[2 * p] = z0;
        if (2 * p + 1 < n)
            out[2 * p + 1] = z1;
    }
}

double NoisePlan::fine_increment(int cell, std::int64_t slab) const {
    if (cell < 0 || cell >= master_n_)
        throw Error(ErrorCode::OutOfRange, "cell index outside the master grid");
    const auto r = static_cast<std::uint64_t>(slab);
    auto [z0, z1] = rng_.normal_pair({static_cast<std::uint32_t>(cell / 2), static_cast<std::uint32_t>(r),
                                      replica_, static_cast<std::uint32_t>((r >> 32) & 0xFFFFFFu)});
    return quantize((cell % 2 == 0 ? z0 : z1) * stdev_);
}

void NoisePlan::fine_slab(std::int64_t slab, std::span<double> out) const {
    if (out.size() != static_cast<std::size_t>(master_n_))
        throw Error(ErrorCode::DimensionMismatch, "slab buffer must hold master_n values");
    standard_normals(Sheet, slab, out);
    for (double& v : out)
        v = quantize(v * stdev_);
}

int NoisePlan::space_factor(int n_coarse) const {
    if (n_coarse < 1 || master_n_ % n_coarse != 0)
        throw Error(ErrorCode::IncompatibleRefinement,
                    std::to_string(n_coarse) + " does not divide master_n " + std::to_string(master_n_));
    return master_n_ / n_coarse;
}

int NoisePlan::time_factor(double dt_coarse) const {
    double r = dt_coarse / dt_master_;
    double n = std::round(r);
    if (n < 1.0 || std::abs(r - n) > 1e-9 * n)
        throw Error(ErrorCode::IncompatibleRefinement, "dt_coarse is not an integer multiple of dt_master");
    return static_cast<int>(n);
}

double tree_sum(const double* p, std::size_t n, std::size_t stride) {
    if (n == 0)
        return 0.0;
    if (n == 1)
        return p[0];
    if (n == 2)
        return p[0] + p[stride];
    std::size_t half = n / 2;
    return tree_sum(p, half, stride) + tree_sum(p + half * stride, n - half, stride);
}

void aggregate_cells(std::span<const double> fine, int factor, std::span<double> coarse) {
    if (factor < 1 || fine.size() != coarse.size() * static_cast<std::size_t>(factor))
        throw Error(ErrorCode::IncompatibleRefinement, "fine length must equal factor * coarse length");
    const auto r = static_cast<std::size_t>(factor);
    for (std::size_t c = 0; c < coarse.size(); ++c)
        coarse[c] = tree_sum(fine.data() + c * r, r);
}

void coarse_cell_integrals(std::span<const double> slabs, int master_n, int n_slabs, int factor,
                           std::span<double> out, std::vector<double>& scratch) {
    const auto M = static_cast<std::size_t>(master_n);
    const std::size_t nc = out.size();
    if (slabs.size() != M * static_cast<std::size_t>(n_slabs) || nc * static_cast<std::size_t>(factor) != M)
        throw Error(ErrorCode::IncompatibleRefinement, "slab block does not match the coarse grid");
    if (n_slabs == 1) {
        aggregate_cells(slabs, factor, out);
        return;
    }
    scratch.resize(nc * static_cast<std::size_t>(n_slabs));
    for (int s = 0; s < n_slabs; ++s)
        aggregate_cells(slabs.subspan(static_cast<std::size_t>(s) * M, M), factor,
                        std::span<double>(scratch.data() + static_cast<std::size_t>(s) * nc, nc));
    for (std::size_t c = 0; c < nc; ++c)
        out[c] = tree_sum(scratch.data() + c, static_cast<std::size_t>(n_slabs), nc);
}

void cells_to_nodes(std::span<const double> cells, std::span<double> nodes) {
    const std::size_t n = cells.size();
    if (nodes.size() != n)
        throw Error(ErrorCode::DimensionMismatch, "cell and node arrays differ in length");
    const double s = 1.0 / std::sqrt(1.0 / static_cast<double>(n));
    nodes[0] = cells[n - 1] * s;
    for (std::size_t i = 1; i < n; ++i)
        nodes[i] = cells[i - 1] * s;
}

IncrementStream::IncrementStream(const NoisePlan& plan, int n_coarse, double dt_coarse)
    : plan_(plan), n_(n_coarse), dt_(dt_coarse), space_factor_(plan.space_factor(n_coarse)),
      time_factor_(plan.time_factor(dt_coarse)),
      slabs_(static_cast<std::size_t>(plan.master_n()) * static_cast<std::size_t>(time_factor_)),
      cells_(static_cast<std::size_t>(n_coarse)) {}

void IncrementStream::next_cells(std::span<double> cells) {
    const auto M = static_cast<std::size_t>(plan_.master_n());
    for (int s = 0; s < time_factor_; ++s)
        plan_.fine_slab(step_ * time_factor_ + s, std::span<double>(slabs_.data() + static_cast<std::size_t>(s) * M, M));
    coarse_cell_integrals(slabs_, plan_.master_n(), time_factor_, space_factor_, cells, scratch_);
    ++step_;
}

void IncrementStream::next(std::span<double> dB) {
    next_cells(cells_);
    cells_to_nodes(cells_, dB);
}

CoupledNoise::CoupledNoise(const NoisePlan& plan, std::vector<int> ns, double dt)
    : plan_(plan), ns_(std::move(ns)), dt_(dt), time_factor_(plan.time_factor(dt)),
      slabs_(static_cast<std::size_t>(plan.master_n()) * static_cast<std::size_t>(time_factor_)) {
    for (int n : ns_)
        plan_.space_factor(n);
}

void CoupledNoise::next(std::vector<std::vector<double>>& dB) {
    const auto M = static_cast<std::size_t>(plan_.master_n());
    for (int s = 0; s < time_factor_; ++s)
        plan_.fine_slab(step_ * time_factor_ + s, std::span<double>(slabs_.data() + static_cast<std::size_t>(s) * M, M));
    dB.resize(ns_.size());
    for (std::size_t l = 0; l < ns_.size(); ++l) {
        const auto n = static_cast<std::size_t>(ns_[l]);
        cells_.resize(n);
        dB[l].resize(n);
        coarse_cell_integrals(slabs_, plan_.master_n(), time_factor_, plan_.master_n() / ns_[l], cells_, scratch_);
        cells_to_nodes(cells_, dB[l]);
    }
    ++step_;
}

StochasticConvolution::StochasticConvolution(const LongRangeOperator& op, const NoisePlan& plan)
    : N_(op.N()), dt_(plan.dt_master()), plan_(plan), decay_(static_cast<std::size_t>(op.N() - 1)),
      stdev_(decay_.size()), a_(decay_.size(), 0.0), z_(decay_.size()), y_(decay_.size()),
      dst_(op.N() - 1) {
    for (int k = 1; k < N_; ++k) {
        double l = op.eigenvalue_sine(k);
        if (!(l > 0.0))
            throw Error(ErrorCode::SingularMode, "zero eigenvalue in the OU update");
        decay_[static_cast<std::size_t>(k - 1)] = std::exp(-l * dt_);
        stdev_[static_cast<std::size_t>(k - 1)] = std::sqrt(-std::expm1(-2.0 * l * dt_) / (2.0 * l));
    }
}

void StochasticConvolution::reset() {
    std::fill(a_.begin(), a_.end(), 0.0);
    steps_ = 0;
}

void StochasticConvolution::advance(std::int64_t steps) {
    for (std::int64_t s = 0; s < steps; ++s) {
        plan_.standard_normals(NoisePlan::Convolution, steps_, z_);
        for (std::size_t k = 0; k < a_.size(); ++k)
            a_[k] = decay_[k] * a_[k] + stdev_[k] * z_[k];
        ++steps_;
    }
}

void StochasticConvolution::advance_to(double t) {
    double n = std::round(t / dt_);
    if (std::abs(n * dt_ - t) > 1e-9 * std::max(1.0, t))
        throw Error(ErrorCode::IncompatibleRefinement, "t is not a multiple of dt_master");
    auto target = static_cast<std::int64_t>(n);
    if (target < steps_)
        throw Error(ErrorCode::OutOfRange, "cannot advance backwards in time");
    advance(target - steps_);
}

void StochasticConvolution::field(std::span<double> out) {
    if (out.size() != static_cast<std::size_t>(N_))
        throw Error(ErrorCode::DimensionMismatch, "field buffer must hold N values");
    dst_.apply(a_.data(), y_.data());
    // sqrt(2) sum_k a_k sin(pi k m / N) = y_{m-1} / sqrt(2)
    out[0] = 0.0;
    for (int m = 1; m < N_; ++m)
        out[static_cast<std::size_t>(m)] = y_[static_cast<std::size_t>(m - 1)] / std::sqrt(2.0);
}

std::vector<double> StochasticConvolution::field() {
    std::vector<double> f(static_cast<std::size_t>(N_));
    field(f);
    return f;
}

double StochasticConvolution::value_at(double x) {
    auto f = field();
    double s = std::clamp(x, 0.0, 1.0) * N_;
    int m = std::min(static_cast<int>(std::floor(s)), N_ - 1);
    double a = f[static_cast<std::size_t>(m)];
    double b = m + 1 < N_ ? f[static_cast<std::size_t>(m + 1)] : 0.0;
    return a + (s - m) * (b - a);
}

} // namespace lrac
