#pragma once

#include "lrac/fft.hpp"
#include "lrac/operator.hpp"
#include "lrac/philox.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace lrac {

// Space-time white noise on a master grid of master_n cells and time slabs of length dt_master.
// Fine cell c covers [c h_m, (c+1) h_m]; slab n covers [n dt_m, (n+1) dt_m].
// Every value is a pure function of (seed, replica, stream, indices).
class NoisePlan {
public:
    enum Stream : std::uint32_t { Sheet = 0, Convolution = 1, Auxiliary = 2 };

    NoisePlan(std::uint64_t seed, int master_n, double dt_master, std::uint32_t replica = 0);

    NoisePlan for_replica(std::uint32_t replica) const;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint32_t replica() const noexcept { return replica_; }
    int master_n() const noexcept { return master_n_; }
    double dt_master() const noexcept { return dt_master_; }
    double h_master() const noexcept { return 1.0 / master_n_; }

    // W(cell x slab), variance h_m * dt_m, rounded to a multiple of quantum(). Sums of
    // these values are exact, so aggregation gives the same bits along any coarsening chain.
    double fine_increment(int cell, std::int64_t slab) const;
    void fine_slab(std::int64_t slab, std::span<double> out) const;

    // count standard normals for (stream, row); entry p comes from counter (p/2, row).
    void standard_normals(Stream stream, std::int64_t row, std::span<double> out) const;

    // Spatial and temporal refinement factors; throws IncompatibleRefinement.
    int space_factor(int n_coarse) const;
    int time_factor(double dt_coarse) const;

    static constexpr int quantum_bits = 30;
    double quantum() const noexcept { return quantum_; }

private:
    double quantize(double v) const noexcept { return std::nearbyint(v / quantum_) * quantum_; }

    Philox4x32 rng_;
    std::uint64_t seed_;
    int master_n_;
    double dt_master_;
    std::uint32_t replica_;
    double stdev_ = 0.0;
    double quantum_ = 0.0;
};

// Pairwise (binary tree) sum; power-of-two nested blocks give bit-identical results.
double tree_sum(const double* p, std::size_t n, std::size_t stride = 1);

// coarse[C] = tree sum of fine[C r .. C r + r - 1].
void aggregate_cells(std::span<const double> fine, int factor, std::span<double> coarse);

// Raw white-noise integrals over coarse cells for one coarse step built from `slabs`
// fine slabs (slab-major, each master_n long): space tree per slab, then time tree.
void coarse_cell_integrals(std::span<const double> slabs, int master_n, int n_slabs, int factor,
                           std::span<double> out, std::vector<double>& scratch);

// Cell integrals to nodal Brownian increments: dB_i = W(cell i-1) / sqrt(h_c), variance dt_c.
void cells_to_nodes(std::span<const double> cells, std::span<double> nodes);

// Sequential coarse increments dB_i for one resolution.
class IncrementStream {
public:
    IncrementStream(const NoisePlan& plan, int n_coarse, double dt_coarse);

    int n() const noexcept { return n_; }
    double dt() const noexcept { return dt_; }
    std::int64_t step() const noexcept { return step_; }

    // Raw cell integrals of the next step (no rescaling).
    void next_cells(std::span<double> cells);
    // Nodal increments dB_i of the next step.
    void next(std::span<double> dB);

private:
    NoisePlan plan_;
    int n_;
    double dt_;
    int space_factor_;
    int time_factor_;
    std::int64_t step_ = 0;
    std::vector<double> slabs_, scratch_, cells_;
};

// One fine sheet aggregated to several resolutions in lockstep (common coarse dt).
class CoupledNoise {
public:
    CoupledNoise(const NoisePlan& plan, std::vector<int> ns, double dt);

    const std::vector<int>& ns() const noexcept { return ns_; }
    double dt() const noexcept { return dt_; }
    // dB[l] receives the nodal increments of level l.
    void next(std::vector<std::vector<double>>& dB);

private:
    NoisePlan plan_;
    std::vector<int> ns_;
    double dt_;
    int time_factor_;
    std::int64_t step_ = 0;
    std::vector<double> slabs_, scratch_, cells_;
};

// B^h(x,t): exact Ornstein-Uhlenbeck update of the sine-mode coefficients, started at zero.
class StochasticConvolution {
public:
    StochasticConvolution(const LongRangeOperator& op, const NoisePlan& plan);

    double time() const noexcept { return static_cast<double>(steps_) * dt_; }
    std::int64_t draws() const noexcept { return steps_; }
    void reset();
    void advance(std::int64_t steps = 1);
    void advance_to(double t);
    // Nodal field B(x_m), m = 0..N-1 (B(x_0) = 0).
    void field(std::span<double> out);
    std::vector<double> field();
    double value_at(double x);

private:
    int N_;
    double dt_;
    NoisePlan plan_;
    std::vector<double> decay_, stdev_, a_, z_, y_;
    SineTransform dst_;
    std::int64_t steps_ = 0;
};

} // namespace lrac
