#pragma once

#include "lrac/kernel.hpp"

#include <functional>
#include <span>
#include <vector>

namespace lrac {

struct SpectrumView {
    std::vector<double> sine_eigs;     // lambda_k^h, k = 0..N
    std::vector<double> circulant_eigs; // mu_k, k = 0..N-1
    int N = 0;

    // sin(pi k m h), unnormalized nodal sample.
    double eigvec_sample(int k, int m) const;
};

// gamma * A^h_R on the periodic lattice of N nodes, h = 1/N.
class LongRangeOperator {
public:
    LongRangeOperator(DiscreteWeights weights, int N, double gamma);

    const DiscreteWeights& weights() const noexcept { return w_; }
    int N() const noexcept { return N_; }
    int R() const noexcept { return w_.R; }
    double h() const noexcept { return h_; }
    double gamma() const noexcept { return gamma_; }
    double scale() const noexcept { return scale_; } // gamma / (R^3 h^2)

    // out_i = scale * sum_{|j|<=R} J_R(|j|) (u_{i+j} - u_i).
    void apply(std::span<const double> u, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> u) const;
    // Same operator through the DFT diagonalization.
    std::vector<double> apply_spectral(std::span<const double> u) const;

    double eigenvalue_sine(int k) const;     // 0 <= k <= N
    double eigenvalue_circulant(int k) const; // 0 <= k < N
    double eigenvalue_gap_to_continuum(int k) const;
    double max_circulant_eigenvalue() const;
    // sum_{k=1}^N 1/lambda_k^h.
    double inverse_trace() const;
    SpectrumView spectrum() const;

private:
    double sine_sum(double angle_per_j) const;

    DiscreteWeights w_;
    int N_;
    double h_;
    double gamma_;
    double scale_;
};

// sup_i |A^h_R f(x_i) - f''(x_i)| with the operator taken at gamma = 1.
double consistency_error(const LongRangeOperator& op, const std::function<double(double)>& f,
                         const std::function<double(double)>& f2);

} // namespace lrac
