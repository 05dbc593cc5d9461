#pragma once

#include "lrac/dynamics.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace lrac {

// ---- rate fitting ---------------------------------------------------------

struct RateFit {
    std::vector<double> hs;
    std::vector<double> errors;
    double exponent = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double ci_lo = std::numeric_limits<double>::quiet_NaN();
    double ci_hi = std::numeric_limits<double>::quiet_NaN();
};

// Least-squares slope of log(error) on log(h). Needs >= 2 levels, hs strictly decreasing,
// errors > 0 (NonPositiveError otherwise).
RateFit fit_rate(std::vector<double> hs, std::vector<double> errors);

// E[e^p]^{1/p} per level from a [replica][level] table.
std::vector<double> lp_mean(const std::vector<std::vector<double>>& per_replica, double p);

// Percentile bootstrap (2.5%, 97.5%) of the fitted exponent, resampling replicas.
void bootstrap_exponent(RateFit& fit, const std::vector<std::vector<double>>& per_replica, double p,
                        int resamples, std::uint64_t seed);

struct Interval {
    double lo, hi;
};
// Percentile bootstrap CI of the sample mean.
Interval bootstrap_mean_ci(const std::vector<double>& xs, int resamples, std::uint64_t seed);

double median(std::vector<double> xs);
double mean(const std::vector<double>& xs);

// ---- parallel work queue --------------------------------------------------

// Runs f(i) for i in [0, n) on up to `threads` workers. Results must be written by index.
// The first exception is rethrown after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

// ---- reports --------------------------------------------------------------

struct Check {
    std::string name;
    bool passed = false;
    bool gating = true;
    std::string detail;
};

struct ErrorRow {
    std::string label;
    double h;
    int replica;
    double error;
};

struct RateRow {
    std::string label;
    double exponent, ci_lo, ci_hi, r2;
};

struct ExperimentReport {
    std::string claim;
    std::uint64_t seed = 0;
    nlohmann::json parameters = nlohmann::json::object();
    nlohmann::json results = nlohmann::json::object();
    std::vector<ErrorRow> errors;
    std::vector<RateRow> rates;
    std::vector<Check> checks;
    // Extra CSV tables keyed by file name; rows are pre-formatted.
    std::vector<std::pair<std::string, std::vector<std::string>>> tables;
    double wall_seconds = 0.0;

    void check(std::string name, bool passed, std::string detail = {}, bool gating = true);
    void add_rate(const std::string& label, const RateFit& fit);
    bool passed() const;
    nlohmann::json to_json() const;
    // report.json, errors.csv, rates.csv and any extra tables.
    void write(const std::filesystem::path& dir) const;
};

std::string fmt17(double v);

// ---- study configuration --------------------------------------------------

struct StudyCommon {
    std::uint64_t seed = 20240611;
    int threads = 8;
    std::string kernel = "indicator";
};

std::vector<double> dyadic_hs(int log2_coarse, int log2_fine); // 2^-a .. 2^-b

// ---- spectral / deterministic studies ------------------------------------

ExperimentReport eigen_table(int N, double zeta, double gamma, const std::string& kernel);
ExperimentReport study_spectral_sandwich(double gamma = 1.0);
ExperimentReport study_eigenvalue_gap(double gamma = 1.0);
ExperimentReport study_inverse_trace(double gamma = 1.0);
ExperimentReport study_operator_oracle(const StudyCommon& c);
ExperimentReport study_consistency(std::vector<double> zetas, std::vector<double> hs, const std::string& kernel);

struct SemigroupStudy {
    double t0 = 0.1;
    double zeta = 0.25;
    double gamma = 1.0;
    std::vector<double> hs = dyadic_hs(4, 9);
    int grid_points = 41;
    std::string kernel = "indicator";
};
ExperimentReport study_semigroup(const SemigroupStudy& s);
ExperimentReport study_l2_functionals(double gamma = 1.0);

struct HomogeneousStudy {
    std::vector<double> hs = dyadic_hs(4, 9);
    double zeta = 0.25;
    double gamma = 1.0;
    double T = 0.5;
    double t0 = 0.05;
    int frames = 64;
    std::string kernel = "indicator";
    std::function<double(double)> u0;       // defaults to sin(2 pi x)
    std::function<double(double, double)> exact; // continuum solution; defaults match u0 = sin(2 pi x)
};
ExperimentReport study_homogeneous_convergence(const HomogeneousStudy& s);

// ---- stochastic studies ----------------------------------------------------

struct NoiseStudy {
    StudyCommon common;
    int samples = 100000;
    int paths = 10000;
    int N = 32;
    double zeta = 0.25;
    double gamma = 1.0;
    double t = 0.5;
    double dt = 1e-3;
};
ExperimentReport study_noise(const NoiseStudy& s);

struct RegularityStudy {
    StudyCommon common;
    int N = 256;
    double zeta = 0.25;
    double gamma = 1.0;
    double T = 0.5;
    double dt = 1.0 / 4096;
    int replicas = 400;
    std::vector<int> moment_ns = {32, 64, 128};
    int moment_replicas = 200;
    double info_zeta = 0.1;
};
ExperimentReport study_regularity(const RegularityStudy& s);

struct ComparisonStudy {
    StudyCommon common;
    int seeds = 100;
    int N = 32;
    double zeta = 0.25;
    double gamma = 1.0;
    double sigma = 0.3;
    double Z = 1.2;
    double T = 1.0;
    double dt = 1e-4;
    double consistency_Z = 2.0;
    double consistency_sigma = 0.05;
};
ExperimentReport study_comparison(const ComparisonStudy& s);

struct CoupledStudy {
    StudyCommon common;
    std::vector<int> ns = {16, 32, 64, 128};
    int n_ref = 512;
    double zeta = 0.25;
    double gamma = 1.0;
    double sigma = 0.1;
    double T = 0.5;
    double dt = 1.0 / 262144; // common to all levels, <= h_ref^2
    double frame_dt = 1.0 / 128;
    int replicas = 50;
    std::vector<double> ps = {2.0, 4.0};
    int bootstrap = 1000;
    Integrator integrator = Integrator::SemiImplicit;
};

// Per-replica sup errors [replica][level] against the reference level (coupled noise).
std::vector<std::vector<double>> coupled_sup_errors(const CoupledStudy& s);
ExperimentReport study_strong_convergence(const CoupledStudy& s);
ExperimentReport study_as_convergence(const CoupledStudy& s);
// Criteria 12 and 13 share one run.
std::pair<ExperimentReport, ExperimentReport> study_strong_and_as(const CoupledStudy& s);

struct MomentStudy {
    StudyCommon common;
    std::vector<int> ns = {16, 32, 64, 128};
    double zeta = 0.25;
    double gamma = 1.0;
    double sigma = 0.1;
    double T = 0.5;
    double dt = 1.0 / 16384;
    int replicas = 200;
    double p = 4.0;
};
ExperimentReport study_moments(const MomentStudy& s);

struct TransitionStudy {
    StudyCommon common;
    std::vector<int> ns = {16, 32, 64, 128};
    double zeta = 0.25;
    double gamma = 1.0;
    double sigma = 0.15;
    double T = 200.0;
    double dt = 1e-3;
    double rho = 0.4;
    double q = 2.0;
    double u0 = -1.0;
    double target = 1.0;
    int replicas = 200;
    int bootstrap = 1000;
};
ExperimentReport study_transition_times(const TransitionStudy& s);

} // namespace lrac
