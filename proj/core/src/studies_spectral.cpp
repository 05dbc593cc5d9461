#include "lrac/error.hpp"
#include "lrac/experiments.hpp"
#include "lrac/oracles.hpp"
#include "lrac/semigroup.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <numbers>

namespace lrac {

namespace {
constexpr double pi = std::numbers::pi;

int n_of(double h) { return static_cast<int>(std::lround(1.0 / h)); }

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

const std::vector<std::string> both_kernels = {"indicator", "exponential"};
} // namespace

ExperimentReport eigen_table(int N, double zeta, double gamma, const std::string& kernel) {
    Stopwatch sw;
    ExperimentReport rep;
    rep.claim = "eigen";
    rep.parameters = {{"N", N}, {"zeta", zeta}, {"gamma", gamma}, {"kernel", kernel}};
    auto op = make_operator(N, zeta, gamma, kernel);
    std::vector<std::string> rows{"k,lambda_sine,lambda_circulant,lower_bound,upper_bound,gap"};
    int bad = 0, first_bad = -1;
    for (int k = 0; k <= N; ++k) {
        double l = op.eigenvalue_sine(k);
        double lo = 4.0 * gamma * k * k, hi = gamma * pi * pi * k * k;
        if (l < lo - 1e-10 * std::max(1.0, lo) || l > hi + 1e-10 * std::max(1.0, hi)) {
            ++bad;
            if (first_bad < 0)
                first_bad = k;
        }
        rows.push_back(fmt::format("{},{},{},{},{},{}", k, fmt17(l), fmt17(op.eigenvalue_circulant(k % N)),
                                   fmt17(lo), fmt17(hi), fmt17(op.eigenvalue_gap_to_continuum(k))));
    }
    rep.tables.emplace_back("eigen.csv", std::move(rows));
    rep.results = {{"R", op.R()}, {"violations", bad}, {"first_violation_k", first_bad}};
    rep.check("spectral sandwich 4 gamma k^2 <= lambda_k <= gamma pi^2 k^2 for k = 1..N", bad == 0,
              fmt::format("R = {}, {} violations, first at k = {}", op.R(), bad, first_bad));
    rep.wall_seconds = sw.seconds();
    return rep;
}

ExperimentReport study_spectral_sandwich(double gamma) {
    Stopwatch sw;
    ExperimentReport rep;
    rep.claim = "spectral-sandwich";
    const std::vector<int> Ns = {8, 16, 32, 64, 128, 256};
    const std::vector<double> zetas = {0.1, 0.25, 0.4, 0.49};
    rep.parameters = {{"N", Ns}, {"zeta", zetas}, {"kernels", both_kernels}, {"gamma", gamma}, {"slack", 1e-10}};
    std::vector<std::string> rows{"N,zeta,kernel,R,lower_violations,upper_violations,first_lower_violation_k,"
                                  "lower_violations_k_le_N_over_R"};
    int combos = 0, failed = 0, failed_restricted = 0, upper_failed = 0;
    for (int N : Ns)
        for (double z : zetas)
            for (const auto& kn : both_kernels) {
                auto op = make_operator(N, z, gamma, kn);
                int lo_bad = 0, hi_bad = 0, lo_bad_restricted = 0, first = -1;
                for (int k = 1; k <= N; ++k) {
                    double l = op.eigenvalue_sine(k);
                    double lo = 4.0 * gamma * k * k, hi = gamma * pi * pi * k * k;
                    if (l < lo - 1e-10 * lo) {
                        ++lo_bad;
                        if (first < 0)
                            first = k;
                        if (k * op.R() <= N)
                            ++lo_bad_restricted;
                    }
                    if (l > hi + 1e-10 * hi)
                        ++hi_bad;
                }
                ++combos;
                failed += (lo_bad + hi_bad) > 0;
                failed_restricted += (lo_bad_restricted + hi_bad) > 0;
                upper_failed += hi_bad > 0;
                rows.push_back(fmt::format("{},{},{},{},{},{},{},{}", N, fmt17(z), kn, op.R(), lo_bad, hi_bad, first,
                                           lo_bad_restricted));
            }
    rep.tables.emplace_back("sandwich.csv", std::move(rows));
    rep.results = {{"combinations", combos}, {"failing_combinations", failed},
                   {"failing_combinations_k_le_N_over_R", failed_restricted},
                   {"upper_bound_failures", upper_failed}};
    rep.check("sandwich holds for all 1 <= k <= N in every combination", failed == 0,
              fmt::format("{}/{} combinations violate", failed, combos));
    rep.check("sandwich restricted to k <= N/R", failed_restricted == 0,
              fmt::format("{}/{} combinations violate", failed_restricted, combos), false);
    rep.check("upper bound lambda_k <= gamma pi^2 k^2 for all k", upper_failed == 0,
              fmt::format("{}/{} combinations violate", upper_failed, combos), false);
    rep.wall_seconds = sw.seconds();
    return rep;
}

ExperimentReport study_eigenvalue_gap(double gamma) {
    Stopwatch sw;
    ExperimentReport rep;
    rep.claim = "eigenvalue-gap-rate";
    const std::vector<double> zetas = {0.1, 0.25, 0.4, 0.49};
    const std::vector<double> hs = dyadic_hs(4, 10);
    rep.parameters = {{"zeta", zetas}, {"hs", hs}, {"k", {1, 2, 3}}, {"kernels", both_kernels}, {"gamma", gamma},
                      {"tolerance", 0.25}};
    int taylor_ok = 0, taylor_total = 0, envelope_ok = 0;
    for (double z : zetas)
        for (const auto& kn : both_kernels)
            for (int k = 1; k <= 3; ++k) {
                std::vector<double> gaps;
                for (double h : hs) {
                    auto op = make_operator(n_of(h), z, gamma, kn);
                    double g = op.eigenvalue_gap_to_continuum(k);
                    gaps.push_back(g);
                    rep.errors.push_back({fmt::format("{}_z{}_k{}", kn, z, k), h, 0, g});
                    double taylor = gamma / 12.0 * std::pow(pi * k, 4) * fourth_moment(op.weights()) * h * h;
                    double env = gamma / 12.0 * std::pow(pi * k, 4) * std::pow(h, 2.0 - 2.0 * z);
                    ++taylor_total;
                    taylor_ok += g <= taylor * 1.05;
                    envelope_ok += g <= env * 1.05;
                }
                auto fit = fit_rate(hs, gaps);
                auto label = fmt::format("{}_z{}_k{}", kn, z, k);
                rep.add_rate(label, fit);
                double need = 2.0 - 2.0 * z - 0.25;
                rep.check("gap exponent " + label, fit.exponent >= need,
                          fmt::format("exponent {:.4f} >= {:.4f}", fit.exponent, need));
            }
    rep.results = {{"taylor_bound_holds", taylor_ok}, {"h_power_envelope_holds", envelope_ok},
                   {"points", taylor_total}};
    rep.check("gap <= (gamma/12) pi^4 k^4 M4 h^2 (fourth-moment Taylor bound)", taylor_ok == taylor_total,
              fmt::format("{}/{} points", taylor_ok, taylor_total), false);
    rep.check("gap <= (gamma/12) pi^4 k^4 h^(2-2 zeta) (1.05)", envelope_ok == taylor_total,
              fmt::format("{}/{} points", envelope_ok, taylor_total), false);
    rep.wall_seconds = sw.seconds();
    return rep;
}

ExperimentReport study_inverse_trace(double gamma) {
    Stopwatch sw;
    ExperimentReport rep;
    rep.claim = "inverse-trace";
    const std::vector<double> zetas = {0.25, 0.45};
    const std::vector<double> hs = dyadic_hs(4, 10);
    rep.parameters = {{"zeta", zetas}, {"hs", hs}, {"kernels", both_kernels}, {"gamma", gamma}};
    const double cap = pi * pi / (24.0 * gamma);
    double sup = 0.0;
    for (double z : zetas)
        for (const auto& kn : both_kernels) {
            std::vector<double> vals;
            for (double h : hs) {
                auto op = make_operator(n_of(h), z, gamma, kn);
                vals.push_back(op.inverse_trace());
                sup = std::max(sup, vals.back());
                rep.errors.push_back({fmt::format("{}_z{}", kn, z), h, 0, vals.back()});
            }
            auto fit = fit_rate(hs, vals);
            auto label = fmt::format("{}_z{}", kn, z);
            rep.add_rate(label, fit);
            rep.check("bounded inverse trace " + label, std::abs(fit.exponent) < 0.1,
                      fmt::format("|slope| = {:.4f} < 0.1", std::abs(fit.exponent)));
        }
    rep.results = {{"sup_value", sup}, {"pi2_over_24gamma", cap}};
    rep.check("sup of inverse trace vs pi^2/(24 gamma)", sup <= cap,
              fmt::format("sup {:.5f}, cap {:.5f}", sup, cap), false);
    rep.wall_seconds = sw.seconds();
    return rep;
}

ExperimentReport study_operator_oracle(const StudyCommon& c) {
    Stopwatch sw;
    ExperimentReport rep;
    rep.claim = "operator-oracle";
    rep.seed = c.seed;
    const std::vector<int> Ns = {8, 16, 32, 64};
    const std::vector<double> zetas = {0.0, 0.1, 0.25, 0.4, 0.49};
    const int vectors = 1000;
    rep.parameters = {{"N", Ns}, {"zeta", zetas}, {"kernels", both_kernels}, {"vectors_per_case", vectors},
                      {"tolerance", "1e-10 relative to sup|dense A u|"}};
    NoisePlan plan(c.seed, 64, 1.0);
    double worst_direct = 0.0, worst_spectral = 0.0;
    std::size_t cases = 0;
    for (int N : Ns)
        for (double z : zetas)
            for (const auto& kn : both_kernels) {
                auto op = make_operator(N, z, 1.0, kn);
                Eigen::MatrixXd A = oracle::dense_circulant(op);
                std::vector<double> u(static_cast<std::size_t>(N));
                for (int v = 0; v < vectors; ++v) {
                    plan.standard_normals(NoisePlan::Auxiliary, static_cast<std::int64_t>(cases * vectors + v), u);
                    Eigen::VectorXd ref = A * Eigen::Map<const Eigen::VectorXd>(u.data(), N);
                    double scale = std::max(1.0, ref.cwiseAbs().maxCoeff());
                    auto d = op.apply(u);
                    auto s = op.apply_spectral(u);
                    for (int i = 0; i < N; ++i) {
                        worst_direct = std::max(worst_direct, std::abs(d[static_cast<std::size_t>(i)] - ref(i)) / scale);
                        worst_spectral =
                            std::max(worst_spectral, std::abs(s[static_cast<std::size_t>(i)] - ref(i)) / scale);
                    }
                }
                ++cases;
            }
    rep.results = {{"cases", cases}, {"worst_direct", worst_direct}, {"worst_spectral", worst_spectral}};
    rep.check("direct apply equals dense circulant", worst_direct <= 1e-10, fmt::format("max rel diff {:.3e}", worst_direct));
    rep.check("spectral apply equals dense circulant", worst_spectral <= 1e-10,
              fmt::format("max rel diff {:.3e}", worst_spectral));
    rep.wall_seconds = sw.seconds();
    return rep;
}

ExperimentReport study_consistency(std::vector<double> zetas, std::vector<double> hs, const std::string& kernel) {
    Stopwatch sw;
    ExperimentReport rep;
    rep.claim = "consistency";
    rep.parameters = {{"zeta", zetas}, {"hs", hs}, {"kernel", kernel}, {"f", "sin(2 pi x)"}};
    auto f = [](double x) { return std::sin(2 * pi * x); };
    auto f2 = [](double x) { return -4 * pi * pi * std::sin(2 * pi * x); };
    nlohmann::json supports = nlohmann::json::object();
    for (double z : zetas) {
        std::vector<double> errs;
        for (double h : hs) {
            auto op = make_operator(n_of(h), z, 1.0, kernel);
            errs.push_back(consistency_error(op, f, f2));
            rep.errors.push_back({fmt::format("z{}", z), h, 0, errs.back()});
        }
        auto fit = fit_rate(hs, errs);
        auto label = fmt::format("z{}", z);
        rep.add_rate(label, fit);
        double need = 2.0 - 2.0 * z - 0.2;
        rep.check("consistency order " + label, fit.exponent >= need,
                  fmt::format("order {:.4f} >= {:.4f}", fit.exponent, need));
        bool h2 = fit.exponent >= 1.8;
        supports[label] = h2;
        rep.check("data supports O(h^2) at " + label, h2, fmt::format("order {:.4f} vs 2", fit.exponent), false);
    }
    rep.results["supports_h2"] = supports;
    rep.wall_seconds = sw.seconds();
    return rep;
}

ExperimentReport study_semigroup(const SemigroupStudy& s) {
    Stopwatch sw;
    ExperimentReport rep;
    rep.claim = "semigroup-convergence";
    rep.parameters = {{"t0", s.t0}, {"zeta", s.zeta}, {"gamma", s.gamma}, {"hs", s.hs},
                      {"grid_points", s.grid_points}, {"times", {s.t0, 2 * s.t0, 5 * s.t0}}, {"kernel", s.kernel}};
    auto distances = [&](double zeta, double t0) {
        std::vector<double> ts = {t0, 2 * t0, 5 * t0};
        auto grid = kernel_grid(ts, s.grid_points);
        ContinuousHeatKernel g(s.gamma, t0);
        std::vector<double> d;
        for (double h : s.hs) {
            auto op = make_operator(n_of(h), zeta, s.gamma, s.kernel);
            d.push_back(kernel_distance(DiscreteSemigroup(op), g, grid));
        }
        return d;
    };
    auto d = distances(s.zeta, s.t0);
    for (std::size_t i = 0; i < d.size(); ++i)
        rep.errors.push_back({"sup_distance", s.hs[i], 0, d[i]});
    auto fit = fit_rate(s.hs, d);
    rep.add_rate("sup_distance", fit);
    double need = 2.0 - 2.0 * s.zeta - 0.25;
    rep.check("semigroup distance exponent", fit.exponent >= need,
              fmt::format("exponent {:.4f} >= {:.4f}", fit.exponent, need));

    std::vector<std::string> rows{"h,sup_distance,fitted_rate"};
    for (std::size_t i = 0; i < d.size(); ++i)
        rows.push_back(fmt::format("{},{},{}", fmt17(s.hs[i]), fmt17(d[i]), fmt17(fit.exponent)));
    rep.tables.emplace_back("semigroup.csv", std::move(rows));

    // Oracle: spectral sum vs dense exponential of the reflected ring.
    double worst = 0.0;
    for (int N : {8, 16, 32})
        for (double z : {0.0, 0.1, 0.25, 0.4})
            for (const auto& kn : both_kernels)
                for (double t : {0.01, 0.1}) {
                    auto op = make_operator(N, z, s.gamma, kn);
                    DiscreteSemigroup gh(op);
                    Eigen::MatrixXd G = oracle::reflected_kernel_nodes(op, t);
                    double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
                    for (int m = 0; m <= N; ++m)
                        for (int n = 0; n <= N; ++n)
                            worst = std::max(worst, std::abs(gh.eval(t, double(m) / N, double(n) / N) - G(m, n)) / scale);
                    for (double x : {0.13, 0.5, 0.77})
                        for (double y : {0.05, 0.31, 0.5, 0.9})
                            worst = std::max(worst, std::abs(gh.eval(t, x, y) - oracle::bilinear(G, x, y)) / scale);
                }
    rep.results = {{"oracle_max_rel_diff", worst}};
    rep.check("discrete kernel equals dense matrix-exponential oracle (N <= 32)", worst <= 1e-8,
              fmt::format("max diff {:.3e}", worst));

    auto d2 = distances(s.zeta, 2 * s.t0);
    bool mono = true;
    for (std::size_t i = 0; i < d.size(); ++i)
        mono = mono && d2[i] <= d[i];
    rep.check("distance non-increasing in t0 (t0 vs 2 t0)", mono, {}, false);
    auto fit0 = fit_rate(s.hs, distances(0.0, s.t0));
    rep.add_rate("nearest_neighbour", fit0);
    rep.check("nearest-neighbour exponent >= 1.75", fit0.exponent >= 1.75, fmt::format("{:.4f}", fit0.exponent), false);
    rep.wall_seconds = sw.seconds();
    return rep;
}

ExperimentReport study_l2_functionals(double gamma) {
    Stopwatch sw;
    ExperimentReport rep;
    rep.claim = "l2-functionals";
    const int N = 32;
    const double zeta = 0.25;
    const std::vector<double> ts = {0.05, 0.2, 1.0};
    const std::vector<double> xs = {1.0 / N, 5.0 / N, 0.3, 0.5, 0.55, 0.9};
    rep.parameters = {{"N", N}, {"zeta", zeta}, {"gamma", gamma}, {"t", ts}, {"x", xs},
                      {"mass", "consistent (exact integrals of the piecewise-linear interpolants)"},
                      {"tolerance", 1e-3}};
    auto op = make_operator(N, zeta, gamma, "indicator");
    DiscreteSemigroup gh(op);

    // Dense oracle: eigen-decomposition of the 2N ring, odd deltas.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::dense_ring(op, 2 * N));
    auto nodes_at = [&](double s) {
        Eigen::MatrixXd E = es.eigenvectors() * (s * es.eigenvalues().array()).exp().matrix().asDiagonal() *
                            es.eigenvectors().transpose();
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N + 1, N + 1);
        for (int n = 1; n < N; ++n)
            for (int m = 1; m < N; ++m)
                G(m, n) = (E(m, n) - E(m, 2 * N - n)) * N;
        return G;
    };
    // [space_int(x) for xs..., full]
    auto quad = [&](const Eigen::MatrixXd& G) {
        std::vector<double> v;
        for (double x : xs) {
            double sx = x * N;
            int m = std::min(static_cast<int>(sx), N - 1);
            double f = sx - m;
            Eigen::VectorXd row = (1 - f) * G.row(m).transpose() + f * G.row(m + 1).transpose();
            v.push_back(oracle::square_integral_1d(row));
        }
        v.push_back(oracle::square_integral_2d(G));
        return v;
    };
    using GL = boost::math::quadrature::gauss<double, 15>;
    auto time_integral = [&](double t) {
        std::vector<double> acc(xs.size() + 1, 0.0);
        auto add = [&](double s, double w) {
            auto v = quad(nodes_at(s));
            for (std::size_t i = 0; i < v.size(); ++i)
                acc[i] += w * v[i];
        };
        double hi = t;
        for (int p = 0; p < 36; ++p) {
            double lo = 0.5 * hi, c = 0.5 * (hi + lo), r = 0.5 * (hi - lo);
            const auto& a = GL::abscissa();
            const auto& w = GL::weights();
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (a[i] == 0.0) {
                    add(c, r * w[i]);
                } else {
                    add(c - r * a[i], r * w[i]);
                    add(c + r * a[i], r * w[i]);
                }
            }
            hi = lo;
        }
        auto v = quad(nodes_at(hi));
        for (std::size_t i = 0; i < v.size(); ++i)
            acc[i] += hi * v[i];
        return acc;
    };

    std::vector<std::string> rows{"t,quantity,x,closed_form,quadrature,rel_gap,envelope"};
    double worst = 0.0;
    bool envelopes = true;
    for (double t : ts) {
        auto qs = quad(nodes_at(t));
        auto qt = time_integral(t);
        auto cmp = [&](const std::string& name, double x, double closed, double q, double env) {
            double rel = std::abs(closed - q) / std::abs(q);
            worst = std::max(worst, rel);
            envelopes = envelopes && closed <= env;
            rows.push_back(fmt::format("{},{},{},{},{},{},{}", fmt17(t), name, fmt17(x), fmt17(closed), fmt17(q),
                                       fmt17(rel), fmt17(env)));
        };
        for (std::size_t i = 0; i < xs.size(); ++i) {
            auto l2 = gh.l2_functionals(t, xs[i]);
            cmp("space_int", xs[i], l2.space_int, qs[i], DiscreteSemigroup::space_envelope(gamma, t));
            cmp("space_time", xs[i], l2.space_time, qt[i], DiscreteSemigroup::time_envelope(gamma, t));
        }
        auto l2 = gh.l2_functionals(t, 0.5);
        cmp("full_int", -1, l2.full_int, qs.back(), DiscreteSemigroup::space_envelope(gamma, t));
        cmp("full_time", -1, l2.full_time, qt.back(), DiscreteSemigroup::time_envelope(gamma, t));
        // Envelope on every node and midpoint.
        for (int m = 0; m <= 2 * N; ++m) {
            auto f = gh.l2_functionals(t, 0.5 * m / N);
            envelopes = envelopes && f.space_int <= DiscreteSemigroup::space_envelope(gamma, t) &&
                        f.space_time <= DiscreteSemigroup::time_envelope(gamma, t);
        }
    }
    bool monotone = true;
    double prev = 0.0;
    for (double t : {0.01, 0.05, 0.2, 1.0, 5.0, 50.0}) {
        double v = gh.l2_functionals(t, 0.5).full_time;
        monotone = monotone && v >= prev;
        prev = v;
    }
    rep.tables.emplace_back("l2_functionals.csv", std::move(rows));
    rep.results = {{"max_rel_gap", worst}, {"full_time_limit", prev}};
    rep.check("closed forms match quadrature", worst < 1e-3, fmt::format("max rel gap {:.3e}", worst));
    rep.check("closed forms respect envelopes", envelopes);
    rep.check("time-integrated functional increasing and bounded in t", monotone, {}, false);
    rep.wall_seconds = sw.seconds();
    return rep;
}

ExperimentReport study_homogeneous_convergence(const HomogeneousStudy& s) {
    Stopwatch sw;
    ExperimentReport rep;
    rep.claim = "homogeneous-convergence";
    rep.parameters = {{"hs", s.hs}, {"zeta", s.zeta}, {"gamma", s.gamma}, {"T", s.T}, {"t0", s.t0},
                      {"frames", s.frames}, {"kernel", s.kernel}, {"propagator", "exact circulant exponential"}};
    auto u0 = s.u0 ? s.u0 : [](double x) { return std::sin(2 * pi * x); };
    const double g = s.gamma;
    auto exact = s.exact ? s.exact
                         : [g](double t, double x) { return std::exp(-4 * pi * pi * g * t) * std::sin(2 * pi * x); };
    auto sup_error = [&](double zeta, double h, const std::function<double(double)>& init,
                         const std::function<double(double, double)>& ex) {
        int N = n_of(h);
        auto op = make_operator(N, zeta, s.gamma, s.kernel);
        CirculantPropagator prop(op);
        auto u = sample_nodes(init, N);
        double e = 0.0;
        for (int f = 0; f <= s.frames; ++f) {
            double t = s.t0 + (s.T - s.t0) * f / s.frames;
            auto v = prop.propagate(u, t);
            for (int i = 0; i < N; ++i)
                e = std::max(e, std::abs(v[static_cast<std::size_t>(i)] - ex(t, double(i) / N)));
        }
        return e;
    };
    auto run = [&](double zeta, const std::string& label) {
        std::vector<double> errs;
        for (double h : s.hs) {
            errs.push_back(sup_error(zeta, h, u0, exact));
            rep.errors.push_back({label, h, 0, errs.back()});
        }
        auto fit = fit_rate(s.hs, errs);
        rep.add_rate(label, fit);
        return fit;
    };
    auto fit = run(s.zeta, "main");
    double need = 2.0 - 2.0 * s.zeta - 0.25;
    rep.check("homogeneous exponent", fit.exponent >= need, fmt::format("{:.4f} >= {:.4f}", fit.exponent, need));
    double cerr = 0.0;
    for (double h : s.hs)
        cerr = std::max(cerr, sup_error(s.zeta, h, [](double) { return 0.7; }, [](double, double) { return 0.7; }));
    rep.check("constant data exact", cerr <= 1e-12, fmt::format("max error {:.3e}", cerr));
    auto lo = run(0.1, "zeta_0.1"), hi = run(0.45, "zeta_0.45");
    rep.check("exponent smaller for larger zeta", hi.exponent < lo.exponent,
              fmt::format("{:.4f} (0.45) < {:.4f} (0.1)", hi.exponent, lo.exponent), false);
    rep.wall_seconds = sw.seconds();
    return rep;
}

} // namespace lrac
