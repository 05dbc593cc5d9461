#include "lrac/error.hpp"
#include "lrac/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>

namespace lrac {

RateFit fit_rate(std::vector<double> hs, std::vector<double> errors) {
    if (hs.size() != errors.size() || hs.size() < 2)
        throw Error(ErrorCode::DimensionMismatch, "need >= 2 matching (h, error) pairs");
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (!(errors[i] > 0.0) || !std::isfinite(errors[i]))
            throw Error(ErrorCode::NonPositiveError, "error at h = " + fmt17(hs[i]) + " is not positive");
        if (!(hs[i] > 0.0) || (i > 0 && !(hs[i] < hs[i - 1])))
            throw Error(ErrorCode::ConfigInvalid, "hs must be positive and strictly decreasing");
    }
    const auto n = static_cast<double>(hs.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        sx += std::log(hs[i]);
        sy += std::log(errors[i]);
    }
    double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        double dx = std::log(hs[i]) - mx, dy = std::log(errors[i]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    RateFit f;
    f.exponent = sxy / sxx;
    f.intercept = my - f.exponent * mx;
    f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    f.hs = std::move(hs);
    f.errors = std::move(errors);
    return f;
}

std::vector<double> lp_mean(const std::vector<std::vector<double>>& per_replica, double p) {
    if (per_replica.empty())
        return {};
    std::vector<double> m(per_replica.front().size(), 0.0);
    for (const auto& row : per_replica)
        for (std::size_t l = 0; l < m.size(); ++l)
            m[l] += std::pow(row[l], p);
    for (double& v : m)
        v = std::pow(v / static_cast<double>(per_replica.size()), 1.0 / p);
    return m;
}

namespace {
double percentile(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    double pos = q * static_cast<double>(xs.size() - 1);
    auto i = static_cast<std::size_t>(std::floor(pos));
    std::size_t j = std::min(i + 1, xs.size() - 1);
    return xs[i] + (pos - static_cast<double>(i)) * (xs[j] - xs[i]);
}
} // namespace

void bootstrap_exponent(RateFit& fit, const std::vector<std::vector<double>>& per_replica, double p,
                        int resamples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = per_replica.size();
    std::vector<double> slopes;
    slopes.reserve(static_cast<std::size_t>(resamples));
    std::vector<std::vector<double>> sample(n);
    for (int b = 0; b < resamples; ++b) {
        for (std::size_t i = 0; i < n; ++i)
            sample[i] = per_replica[static_cast<std::size_t>(rng() % n)];
        slopes.push_back(fit_rate(fit.hs, lp_mean(sample, p)).exponent);
    }
    fit.ci_lo = percentile(slopes, 0.025);
    fit.ci_hi = percentile(slopes, 0.975);
}

Interval bootstrap_mean_ci(const std::vector<double>& xs, int resamples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> means;
    means.reserve(static_cast<std::size_t>(resamples));
    for (int b = 0; b < resamples; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            s += xs[static_cast<std::size_t>(rng() % xs.size())];
        means.push_back(s / static_cast<double>(xs.size()));
    }
    return {percentile(means, 0.025), percentile(means, 0.975)};
}

double median(std::vector<double> xs) {
    if (xs.empty())
        return std::numeric_limits<double>::quiet_NaN();
    return percentile(std::move(xs), 0.5);
}

double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs)
        s += x;
    return xs.empty() ? std::numeric_limits<double>::quiet_NaN() : s / static_cast<double>(xs.size());
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err)
                    err = std::current_exception();
                next.store(n);
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back(work);
    for (auto& t : pool)
        t.join();
    if (err)
        std::rethrow_exception(err);
}

std::vector<double> dyadic_hs(int log2_coarse, int log2_fine) {
    std::vector<double> hs;
    for (int a = log2_coarse; a <= log2_fine; ++a)
        hs.push_back(std::ldexp(1.0, -a));
    return hs;
}

} // namespace lrac
