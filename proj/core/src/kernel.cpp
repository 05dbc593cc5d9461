#include "lrac/kernel.hpp"

#include "lrac/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lrac {

WeightKernel WeightKernel::indicator() { return WeightKernel(Kind::Indicator); }

WeightKernel WeightKernel::exponential() { return WeightKernel(Kind::Exponential); }

WeightKernel WeightKernel::tabulated(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw Error(ErrorCode::InvalidKernel, "tabulated kernel needs >= 2 matching (x, J) pairs");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
            throw Error(ErrorCode::InvalidKernel, "non-finite table entry");
        if (ys[i] < 0.0)
            throw Error(ErrorCode::InvalidKernel, "kernel must be non-negative");
        if (i > 0 && !(xs[i] > xs[i - 1]))
            throw Error(ErrorCode::InvalidKernel, "x column must be strictly ascending");
    }
    if (xs.front() > 0.0 || xs.back() < 1.0)
        throw Error(ErrorCode::InvalidKernel, "table must cover [0,1]");
    WeightKernel k(Kind::Custom);
    k.xs_ = std::move(xs);
    k.ys_ = std::move(ys);
    return k;
}

WeightKernel WeightKernel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::InvalidKernel, "cannot open kernel file " + path.string());
    std::vector<double> xs, ys;
    std::string line;
    while (std::getline(in, line)) {
        if (auto p = line.find('#'); p != std::string::npos)
            line.erase(p);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x, y;
        if (!(ls >> x))
            continue;
        if (!(ls >> y))
            throw Error(ErrorCode::InvalidKernel, "malformed line in " + path.string());
        xs.push_back(x);
        ys.push_back(y);
    }
    return tabulated(std::move(xs), std::move(ys));
}

WeightKernel WeightKernel::from_name(const std::string& name) {
    if (name == "indicator")
        return indicator();
    if (name == "exponential")
        return exponential();
    return load(name);
}

double WeightKernel::operator()(double x) const {
    switch (kind_) {
    case Kind::Indicator:
        return 1.0;
    case Kind::Exponential:
        return std::exp(-x);
    case Kind::Custom: {
        if (x <= xs_.front())
            return ys_.front();
        if (x >= xs_.back())
            return ys_.back();
        auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - xs_.begin());
        double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
        return ys_[i - 1] + t * (ys_[i] - ys_[i - 1]);
    }
    }
    return 0.0;
}

std::string WeightKernel::name() const {
    switch (kind_) {
    case Kind::Indicator: return "indicator";
    case Kind::Exponential: return "exponential";
    case Kind::Custom: return "custom";
    }
    return "custom";
}

DiscreteWeights build_weights(const WeightKernel& kernel, int R, double zeta) {
    if (R < 1)
        throw Error(ErrorCode::RadiusTooLarge, "radius must be >= 1");
    std::vector<double> raw(static_cast<std::size_t>(R));
    double m2 = 0.0;
    for (int j = 1; j <= R; ++j) {
        double v = kernel(static_cast<double>(j) / R);
        if (!(v >= 0.0) || !std::isfinite(v))
            throw Error(ErrorCode::InvalidKernel, "kernel sample negative or non-finite");
        raw[static_cast<std::size_t>(j - 1)] = v;
        m2 += v * j * j;
    }
    if (m2 == 0.0)
        throw Error(ErrorCode::ZeroSecondMoment, "kernel vanishes on all sample points");

    DiscreteWeights w;
    w.R = R;
    w.zeta = zeta;
    w.kernel_name = kernel.name();
    w.c = std::pow(static_cast<double>(R), 3) / m2;
    w.values.resize(raw.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        w.values[i] = w.c * raw[i];
        sum += w.values[i];
    }
    w.diag = 2.0 * sum;
    return w;
}

namespace {
double moment(const DiscreteWeights& w, int p) {
    double s = 0.0;
    for (int j = 1; j <= w.R; ++j)
        s += w.values[static_cast<std::size_t>(j - 1)] * std::pow(static_cast<double>(j), p);
    return s / std::pow(static_cast<double>(w.R), 3);
}
} // namespace

double second_moment(const DiscreteWeights& w) { return moment(w, 2); }

double fourth_moment(const DiscreteWeights& w) { return moment(w, 4); }

int radius_for(int N, double zeta) {
    if (N < 4)
        throw Error(ErrorCode::ConfigInvalid, "N must be >= 4");
    if (!(zeta >= 0.0 && zeta < 0.5))
        throw Error(ErrorCode::ConfigInvalid, "zeta must lie in [0, 1/2)");
    double x = std::pow(static_cast<double>(N), zeta);
    double r = std::round(x);
    int R = std::abs(x - r) < 1e-9 * std::max(1.0, r) ? static_cast<int>(r)
                                                       : static_cast<int>(std::ceil(x));
    R = std::max(1, R);
    if (2 * R >= N)
        throw Error(ErrorCode::RadiusTooLarge,
                    "R = " + std::to_string(R) + " is not below N/2 = " + std::to_string(N / 2.0));
    return R;
}

int radius_for(double h, double zeta) {
    double n = std::round(1.0 / h);
    if (!(h > 0.0) || std::abs(n * h - 1.0) > 1e-12)
        throw Error(ErrorCode::ConfigInvalid, "h must be 1/N for an integer N");
    return radius_for(static_cast<int>(n), zeta);
}

} // namespace lrac
