#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace lrac {

// Interaction profile J on [0,1].
class WeightKernel {
public:
    enum class Kind { Indicator, Exponential, Custom };

    static WeightKernel indicator();
    static WeightKernel exponential();
    // Tabulated profile, linearly interpolated. xs ascending, covering [0,1].
    static WeightKernel tabulated(std::vector<double> xs, std::vector<double> ys);
    // Two-column text file "x J(x)"; '#' starts a comment.
    static WeightKernel load(const std::filesystem::path& path);
    // "indicator", "exponential" or a file path.
    static WeightKernel from_name(const std::string& name);

    double operator()(double x) const;
    Kind kind() const noexcept { return kind_; }
    std::string name() const;

private:
    explicit WeightKernel(Kind k) : kind_(k) {}
    Kind kind_;
    std::vector<double> xs_, ys_;
};

struct DiscreteWeights {
    int R = 1;
    std::vector<double> values; // values[j-1] = c*J(j/R)
    double c = 1.0;
    double zeta = 0.0;
    double diag = 0.0;          // 2*sum(values)
    std::string kernel_name;

    double operator[](int j) const { return j == 0 ? diag : values[static_cast<std::size_t>(j - 1)]; }
};

DiscreteWeights build_weights(const WeightKernel& kernel, int R, double zeta);

// (1/R^3) sum values[j] j^2, equal to 1 up to rounding.
double second_moment(const DiscreteWeights& w);
// (1/R^3) sum values[j] j^4.
double fourth_moment(const DiscreteWeights& w);

// max(1, ceil(N^zeta)); throws RadiusTooLarge if that is >= N/2.
int radius_for(int N, double zeta);
int radius_for(double h, double zeta);

} // namespace lrac
