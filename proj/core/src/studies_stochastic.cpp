#include "lrac/error.hpp"
#include "lrac/experiments.hpp"
#include "lrac/semigroup.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <numbers>
#include <optional>

namespace lrac {

namespace {
constexpr double pi = std::numbers::pi;

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

bool bit_equal(std::span<const double> a, std::span<const double> b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

std::int64_t steps_for(double T, double dt) {
    double n = T / dt;
    auto s = static_cast<std::int64_t>(std::llround(n));
    if (std::abs(n - static_cast<double>(s)) > 1e-9 * std::max(1.0, n))
        throw Error(ErrorCode::ConfigInvalid, "interval is not an integer multiple of dt");
    return s;
}

// Kolmogorov limiting tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda) {
    if (lambda < 0.2)
        return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 ? 2.0 : -2.0) * term;
        if (term < 1e-16)
            break;
    }
    return std::clamp(s, 0.0, 1.0);
}

double ks_pvalue(std::vector<double> z) {
    std::sort(z.begin(), z.end());
    const auto n = static_cast<double>(z.size());
    double d = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        double F = 0.5 * std::erfc(-z[i] / std::sqrt(2.0));
        d = std::max({d, (static_cast<double>(i) + 1) / n - F, F - static_cast<double>(i) / n});
    }
    double sn = std::sqrt(n);
    return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = mean(a), mb = mean(b), sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

// Several resolutions advanced in lockstep on one coupled noise sheet.
struct CoupledLevels {
    std::vector<int> ns;
    std::vector<LongRangeOperator> ops;
    std::vector<Stepper> steppers;
    std::vector<std::vector<double>> u, dB;
    CoupledNoise noise;

    CoupledLevels(const NoisePlan& plan, std::vector<int> ns_, double zeta, double gamma, double sigma, double dt,
                  const std::string& kernel, DriftSpec drift, Integrator integ,
                  const std::function<double(double)>& u0)
        : ns(ns_), noise(plan, ns_, dt) {
        for (int n : ns) {
            ops.push_back(make_operator(n, zeta, gamma, kernel));
            u.push_back(sample_nodes(u0, n));
        }
        for (std::size_t l = 0; l < ns.size(); ++l)
            steppers.emplace_back(ops[l], drift, dt, sigma, integ);
        has_noise = sigma > 0.0;
    }
    void step() {
        if (has_noise)
            noise.next(dB);
        for (std::size_t l = 0; l < ns.size(); ++l)
            steppers[l].step(u[l], has_noise ? std::span<const double>(dB[l]) : std::span<const double>());
    }
    bool has_noise = true;
};
} // namespace

ExperimentReport study_noise(const NoiseStudy& s) {
    Stopwatch sw;
    ExperimentReport rep;
    rep.claim = "noise";
    rep.seed = s.common.seed;
    const int master = 64;
    const double dtm = 1e-3;
    rep.parameters = {{"master_n", master}, {"dt_master", dtm}, {"samples", s.samples}, {"paths", s.paths},
                      {"N", s.N}, {"zeta", s.zeta}, {"gamma", s.gamma}, {"t", s.t}, {"dt_convolution", s.dt}};
    NoisePlan plan(s.common.seed, master, dtm);

    // Refinement exactness.
    bool chains = true;
    std::vector<double> fine(master);
    for (std::int64_t slab = 0; slab < 200; ++slab) {
        plan.fine_slab(slab, fine);
        std::vector<double> cur = fine;
        for (int f = 2; f <= master; f *= 2) {
            std::vector<double> step(cur.size() / 2), direct(static_cast<std::size_t>(master / f));
            aggregate_cells(cur, 2, step);
            aggregate_cells(fine, f, direct);
            chains = chains && bit_equal(step, direct);
            cur = step;
        }
        for (int c = 0; c < master; ++c)
            chains = chains && plan.fine_increment(c, slab) == fine[static_cast<std::size_t>(c)];
    }
    for (int n : {64, 16, 4}) {
        IncrementStream s1(plan, n, dtm), s2(plan, n, 2 * dtm), s4(plan, n, 4 * dtm);
        std::vector<double> a(n), b(n), c(n), d(n), e(n);
        for (int k = 0; k < 50; ++k) {
            s4.next_cells(a);
            s2.next_cells(b);
            s2.next_cells(c);
            s1.next_cells(d);
            s1.next_cells(e);
            std::vector<double> pair(n), quad(n);
            for (int i = 0; i < n; ++i)
                pair[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(i)] + e[static_cast<std::size_t>(i)];
            s1.next_cells(d);
            s1.next_cells(e);
            for (int i = 0; i < n; ++i) {
                double p2 = d[static_cast<std::size_t>(i)] + e[static_cast<std::size_t>(i)];
                quad[static_cast<std::size_t>(i)] = pair[static_cast<std::size_t>(i)] + p2;
            }
            for (int i = 0; i < n; ++i)
                b[static_cast<std::size_t>(i)] += c[static_cast<std::size_t>(i)];
            chains = chains && bit_equal(a, b) && bit_equal(a, quad);
        }
    }
    {
        // Mixed chain: 4 x 4 blocks, then 2 x 2 blocks of those, against 8 x 8 directly.
        IncrementStream one(plan, 8, 8 * dtm), two(plan, 16, 4 * dtm);
        std::vector<double> a(8), b0(16), b1(16), sum(16), agg(8);
        for (int k = 0; k < 50; ++k) {
            one.next_cells(a);
            two.next_cells(b0);
            two.next_cells(b1);
            for (std::size_t i = 0; i < sum.size(); ++i)
                sum[i] = b0[i] + b1[i];
            aggregate_cells(sum, 2, agg);
            chains = chains && bit_equal(a, agg);
        }
    }
    {
        CoupledNoise cn(plan, {64, 16, 4}, 2 * dtm);
        IncrementStream i16(plan, 16, 2 * dtm), i4(plan, 4, 2 * dtm);
        std::vector<std::vector<double>> dB;
        std::vector<double> a(16), b(4);
        for (int k = 0; k < 50; ++k) {
            cn.next(dB);
            i16.next(a);
            i4.next(b);
            chains = chains && bit_equal(dB[1], a) && bit_equal(dB[2], b);
        }
    }
    rep.check("aggregation chains bit-identical", chains);

    // Distribution of coarse increments.
    const int n = 16;
    const double dtc = 4 * dtm;
    IncrementStream inc(plan, n, dtc);
    std::vector<double> z, buf(n), cellA, cellB, slabA, slabB, prev(n);
    z.reserve(static_cast<std::size_t>(s.samples));
    bool have_prev = false;
    while (static_cast<int>(z.size()) < s.samples) {
        inc.next(buf);
        for (int i = 0; i < n && static_cast<int>(z.size()) < s.samples; ++i)
            z.push_back(buf[static_cast<std::size_t>(i)] / std::sqrt(dtc));
        for (int i = 0; i + 1 < n; i += 2) {
            cellA.push_back(buf[static_cast<std::size_t>(i)]);
            cellB.push_back(buf[static_cast<std::size_t>(i + 1)]);
        }
        if (have_prev)
            for (int i = 0; i < n; ++i) {
                slabA.push_back(prev[static_cast<std::size_t>(i)]);
                slabB.push_back(buf[static_cast<std::size_t>(i)]);
            }
        prev = buf;
        have_prev = true;
    }
    double p = ks_pvalue(z);
    double var = 0.0;
    for (double v : z)
        var += v * v;
    var /= static_cast<double>(z.size());
    double rc = correlation(cellA, cellB), rs = correlation(slabA, slabB);
    rep.results["ks_pvalue"] = p;
    rep.results["variance_ratio"] = var;
    rep.results["corr_adjacent_cells"] = rc;
    rep.results["corr_successive_steps"] = rs;
    rep.check("KS normality of standardized increments at 1%", p >= 0.01, fmt::format("p = {:.4f}", p));
    rep.check("increment variance within 2% of dt", std::abs(var - 1.0) < 0.02, fmt::format("ratio {:.5f}", var));
    rep.check("disjoint cells/steps uncorrelated", std::abs(rc) < 0.01 && std::abs(rs) < 0.01,
              fmt::format("cells {:.4f}, steps {:.4f}", rc, rs), false);

    // Stochastic convolution variance.
    auto op = make_operator(s.N, s.zeta, s.gamma, s.common.kernel);
    DiscreteSemigroup gh(op);
    NoisePlan cplan(s.common.seed, s.N, s.dt);
    std::vector<std::vector<double>> fields(static_cast<std::size_t>(s.paths));
    parallel_for(fields.size(), s.common.threads, [&](std::size_t r) {
        StochasticConvolution B(op, cplan.for_replica(static_cast<std::uint32_t>(r)));
        B.advance_to(s.t);
        fields[r] = B.field();
    });
    std::vector<std::string> rows{"x,mean,std_error,variance,closed_form,rel_gap"};
    double gate_gap = 0.0, gate_mean_se = 0.0;
    for (int m : {s.N / 8, s.N / 4, s.N / 2, 3 * s.N / 4}) {
        double mu = 0, m2 = 0;
        for (const auto& f : fields) {
            mu += f[static_cast<std::size_t>(m)];
            m2 += f[static_cast<std::size_t>(m)] * f[static_cast<std::size_t>(m)];
        }
        mu /= s.paths;
        double v = m2 / s.paths - mu * mu;
        double se = std::sqrt(v / s.paths);
        double x = double(m) / s.N;
        double cf = gh.convolution_time_structure(0.0, s.t, x);
        double gap = std::abs(v - cf) / cf;
        if (m == s.N / 2) {
            gate_gap = gap;
            gate_mean_se = std::abs(mu) / se;
        }
        rows.push_back(fmt::format("{},{},{},{},{},{}", fmt17(x), fmt17(mu), fmt17(se), fmt17(v), fmt17(cf), fmt17(gap)));
    }
    rep.tables.emplace_back("convolution_variance.csv", std::move(rows));
    rep.results["convolution_rel_gap_x_half"] = gate_gap;
    rep.check("stochastic convolution variance within 3% of closed form (x = 1/2)", gate_gap < 0.03,
              fmt::format("rel gap {:.4f}", gate_gap));
    rep.check("stochastic convolution mean within 3 standard errors of 0", gate_mean_se < 3.0,
              fmt::format("|mean|/se = {:.3f}", gate_mean_se), false);
    rep.wall_seconds = sw.seconds();
    return rep;
}

ExperimentReport study_regularity(const RegularityStudy& s) {
    Stopwatch sw;
    ExperimentReport rep;
    rep.claim = "regularity";
    rep.seed = s.common.seed;

    struct Curves {
        std::vector<double> lags_t, st_mc, st_cf, lags_x, sx_mc, sx_cf;
        int R;
    };
    auto run = [&](double zeta, int replicas) {
        auto op = make_operator(s.N, zeta, s.gamma, s.common.kernel);
        DiscreteSemigroup gh(op);
        const int N = s.N, R = op.R();
        const double h = 1.0 / N;
        const auto steps = steps_for(s.T, s.dt);
        Curves c;
        c.R = R;
        std::vector<std::int64_t> lag_steps;
        for (std::int64_t j = 1; j < steps; j *= 2) {
            double tau = static_cast<double>(j) * s.dt;
            if (tau >= 10.0 * (R * h) * (R * h) && tau <= 0.1) {
                lag_steps.push_back(j);
                c.lags_t.push_back(tau);
            }
        }
        std::vector<int> lag_nodes;
        for (double mult : {1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0}) {
            int j = static_cast<int>(std::lround(2.0 * R * mult / 1.0));
            if (j * 8 <= N && (lag_nodes.empty() || j > lag_nodes.back()))
                lag_nodes.push_back(j);
        }
        for (int j : lag_nodes)
            c.lags_x.push_back(j * h);
        const int m_lo = N / 4, m_hi = 3 * N / 4;

        std::vector<std::vector<double>> st(static_cast<std::size_t>(replicas)), sx(st.size());
        NoisePlan plan(s.common.seed, N, s.dt);
        parallel_for(st.size(), s.common.threads, [&](std::size_t r) {
            StochasticConvolution B(op, plan.for_replica(static_cast<std::uint32_t>(r)));
            std::vector<std::vector<double>> past(lag_steps.size());
            for (std::size_t l = lag_steps.size(); l-- > 0;) {
                B.advance_to(static_cast<double>(steps - lag_steps[l]) * s.dt);
                past[l] = B.field();
            }
            B.advance_to(static_cast<double>(steps) * s.dt);
            auto now = B.field();
            st[r].assign(lag_steps.size(), 0.0);
            for (std::size_t l = 0; l < lag_steps.size(); ++l) {
                double acc = 0.0;
                for (int m = m_lo; m <= m_hi; ++m) {
                    double d = now[static_cast<std::size_t>(m)] - past[l][static_cast<std::size_t>(m)];
                    acc += d * d;
                }
                st[r][l] = acc / (m_hi - m_lo + 1);
            }
            sx[r].assign(lag_nodes.size(), 0.0);
            for (std::size_t l = 0; l < lag_nodes.size(); ++l) {
                double acc = 0.0;
                int cnt = 0;
                for (int m = m_lo; m + lag_nodes[l] <= m_hi; ++m, ++cnt) {
                    double d = now[static_cast<std::size_t>(m + lag_nodes[l])] - now[static_cast<std::size_t>(m)];
                    acc += d * d;
                }
                sx[r][l] = acc / cnt;
            }
        });
        c.st_mc.assign(lag_steps.size(), 0.0);
        c.sx_mc.assign(lag_nodes.size(), 0.0);
        for (std::size_t r = 0; r < st.size(); ++r) {
            for (std::size_t l = 0; l < st[r].size(); ++l)
                c.st_mc[l] += st[r][l] / replicas;
            for (std::size_t l = 0; l < sx[r].size(); ++l)
                c.sx_mc[l] += sx[r][l] / replicas;
        }
        const double T = static_cast<double>(steps) * s.dt;
        for (double tau : c.lags_t) {
            double acc = 0.0;
            for (int m = m_lo; m <= m_hi; ++m)
                acc += gh.convolution_time_structure(T - tau, T, double(m) / N);
            c.st_cf.push_back(acc / (m_hi - m_lo + 1));
        }
        for (int j : lag_nodes) {
            double acc = 0.0;
            int cnt = 0;
            for (int m = m_lo; m + j <= m_hi; ++m, ++cnt)
                acc += gh.convolution_space_structure(T, double(m) / N, double(m + j) / N);
            c.sx_cf.push_back(acc / cnt);
        }
        return c;
    };
    // Lags increase, so fit with "h" = lag reversed into decreasing order.
    auto fit_lags = [](std::vector<double> lags, std::vector<double> vals) {
        std::reverse(lags.begin(), lags.end());
        std::reverse(vals.begin(), vals.end());
        return fit_rate(lags, vals);
    };

    auto c = run(s.zeta, s.replicas);
    rep.parameters = {{"N", s.N}, {"zeta", s.zeta}, {"R", c.R}, {"gamma", s.gamma}, {"T", s.T}, {"dt", s.dt},
                      {"replicas", s.replicas}, {"time_lags", c.lags_t}, {"space_lags", c.lags_x},
                      {"averaging", "nodes in [1/4, 3/4]"},
                      {"lag_windows", "time [10 (R h)^2, 0.1], space [2 R h, 1/8]"}};
    std::vector<std::string> rows{"kind,lag,monte_carlo,closed_form"};
    for (std::size_t i = 0; i < c.lags_t.size(); ++i)
        rows.push_back(fmt::format("time,{},{},{}", fmt17(c.lags_t[i]), fmt17(c.st_mc[i]), fmt17(c.st_cf[i])));
    for (std::size_t i = 0; i < c.lags_x.size(); ++i)
        rows.push_back(fmt::format("space,{},{},{}", fmt17(c.lags_x[i]), fmt17(c.sx_mc[i]), fmt17(c.sx_cf[i])));
    rep.tables.emplace_back("structure_functions.csv", std::move(rows));

    auto ft = fit_lags(c.lags_t, c.st_mc), fx = fit_lags(c.lags_x, c.sx_mc);
    auto ft_cf = fit_lags(c.lags_t, c.st_cf), fx_cf = fit_lags(c.lags_x, c.sx_cf);
    rep.add_rate("temporal", ft);
    rep.add_rate("spatial", fx);
    rep.add_rate("temporal_closed_form", ft_cf);
    rep.add_rate("spatial_closed_form", fx_cf);
    rep.check("temporal exponent in [0.4, 0.6]", ft.exponent >= 0.4 && ft.exponent <= 0.6,
              fmt::format("{:.4f}", ft.exponent));
    rep.check("spatial exponent in [0.85, 1.15]", fx.exponent >= 0.85 && fx.exponent <= 1.15,
              fmt::format("{:.4f}", fx.exponent));

    auto ci = run(s.info_zeta, s.replicas);
    auto fxi = fit_lags(ci.lags_x, ci.sx_mc), fti = fit_lags(ci.lags_t, ci.st_mc);
    rep.add_rate(fmt::format("spatial_zeta_{}", s.info_zeta), fxi);
    rep.add_rate(fmt::format("temporal_zeta_{}", s.info_zeta), fti);
    rep.check(fmt::format("spatial exponent at zeta = {} in [0.85, 1.15]", s.info_zeta),
              fxi.exponent >= 0.85 && fxi.exponent <= 1.15, fmt::format("{:.4f} (R = {})", fxi.exponent, ci.R), false);

    // Sup moment across grids.
    std::vector<double> m4;
    for (int n : s.moment_ns) {
        auto op = make_operator(n, s.zeta, s.gamma, s.common.kernel);
        NoisePlan plan(s.common.seed + 1, n, s.dt);
        const auto steps = steps_for(s.T, s.dt);
        std::vector<double> sup(static_cast<std::size_t>(s.moment_replicas));
        parallel_for(sup.size(), s.common.threads, [&](std::size_t r) {
            StochasticConvolution B(op, plan.for_replica(static_cast<std::uint32_t>(r)));
            std::vector<double> f(static_cast<std::size_t>(n));
            double m = 0.0;
            for (std::int64_t k = 0; k < steps; ++k) {
                B.advance();
                B.field(f);
                for (double v : f)
                    m = std::max(m, std::abs(v));
            }
            sup[r] = m;
        });
        double e = 0.0;
        for (std::size_t r = 0; r < sup.size(); ++r) {
            e += std::pow(sup[r], 4);
            rep.errors.push_back({"sup_B", 1.0 / n, static_cast<int>(r), sup[r]});
        }
        m4.push_back(e / static_cast<double>(sup.size()));
    }
    double ratio = *std::max_element(m4.begin(), m4.end()) / *std::min_element(m4.begin(), m4.end());
    rep.results = {{"temporal_exponent", ft.exponent}, {"spatial_exponent", fx.exponent},
                   {"temporal_exponent_closed_form", ft_cf.exponent}, {"spatial_exponent_closed_form", fx_cf.exponent},
                   {"sup_fourth_moments", m4}, {"sup_fourth_moment_ratio", ratio}};
    rep.check("E sup|B|^4 stable across grids (max/min <= 1.5)", ratio <= 1.5, fmt::format("{:.4f}", ratio), false);
    rep.wall_seconds = sw.seconds();
    return rep;
}

ExperimentReport study_comparison(const ComparisonStudy& s) {
    Stopwatch sw;
    ExperimentReport rep;
    rep.claim = "comparison";
    rep.seed = s.common.seed;
    const double slack = 1e-8 + 10.0 * s.dt;
    rep.parameters = {{"seeds", s.seeds}, {"N", s.N}, {"zeta", s.zeta}, {"gamma", s.gamma}, {"sigma", s.sigma},
                      {"Z", s.Z}, {"T", s.T}, {"dt", s.dt}, {"slack", slack}, {"u0", "sin(2 pi x)"},
                      {"integrator", "semi-implicit"}, {"consistency_Z", s.consistency_Z},
                      {"consistency_sigma", s.consistency_sigma}, {"consistency_u0", -1.0}};
    auto op = make_operator(s.N, s.zeta, s.gamma, s.common.kernel);
    const auto steps = steps_for(s.T, s.dt);
    struct Out {
        double violation = -1e300, full_violation = -1e300, trunc_gap = 0.0;
        int active = 0;
        double consistency_steps = 0;
    };
    std::vector<Out> out(static_cast<std::size_t>(s.seeds));
    parallel_for(out.size(), s.common.threads, [&](std::size_t i) {
        NoisePlan plan(s.common.seed + i, s.N, s.dt);
        IncrementStream inc(plan, s.N, s.dt);
        SemiImplicitStepper lo(op, DriftSpec::lower(s.Z), s.dt, s.sigma), tr(op, DriftSpec::truncated(s.Z), s.dt, s.sigma),
            up(op, DriftSpec::upper(s.Z), s.dt, s.sigma), fu(op, DriftSpec::full(), s.dt, s.sigma);
        auto init = [](double x) { return std::sin(2 * pi * x); };
        auto ul = sample_nodes(init, s.N), ut = ul, uu = ul, uf = ul;
        std::vector<double> dB(static_cast<std::size_t>(s.N));
        Out& o = out[i];
        for (std::int64_t k = 0; k < steps; ++k) {
            inc.next(dB);
            lo.step(ul, dB);
            tr.step(ut, dB);
            up.step(uu, dB);
            fu.step(uf, dB);
            bool act = false;
            for (std::size_t j = 0; j < ul.size(); ++j) {
                o.violation = std::max({o.violation, ul[j] - ut[j], ut[j] - uu[j]});
                o.full_violation = std::max({o.full_violation, ul[j] - uf[j], uf[j] - uu[j]});
                act = act || std::abs(ut[j]) > s.Z;
            }
            o.active += act;
        }
        // Full vs truncated at Z while the path stays inside (-Z, Z).
        NoisePlan plan2(s.common.seed + i, s.N, s.dt, 1);
        IncrementStream inc2(plan2, s.N, s.dt);
        SemiImplicitStepper a(op, DriftSpec::full(), s.dt, s.consistency_sigma),
            b(op, DriftSpec::truncated(s.consistency_Z), s.dt, s.consistency_sigma);
        std::vector<double> va(static_cast<std::size_t>(s.N), -1.0), vb = va;
        for (std::int64_t k = 0; k < steps; ++k) {
            inc2.next(dB);
            a.step(va, dB);
            b.step(vb, dB);
            double sup = 0.0, gap = 0.0;
            for (std::size_t j = 0; j < va.size(); ++j) {
                sup = std::max(sup, std::abs(va[j]));
                gap = std::max(gap, std::abs(va[j] - vb[j]));
            }
            if (sup >= s.consistency_Z)
                break;
            o.trunc_gap = std::max(o.trunc_gap, gap);
            o.consistency_steps += 1;
        }
    });
    int ordered = 0, full_ordered = 0, active_seeds = 0;
    double worst = -1e300, worst_gap = 0.0;
    std::vector<std::string> rows{"seed,max_violation,max_violation_full_drift,steps_truncation_active,truncation_gap"};
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& o = out[i];
        ordered += o.violation <= slack;
        full_ordered += o.full_violation <= slack;
        active_seeds += o.active > 0;
        worst = std::max(worst, o.violation);
        worst_gap = std::max(worst_gap, o.trunc_gap);
        rows.push_back(fmt::format("{},{},{},{},{}", s.common.seed + i, fmt17(o.violation), fmt17(o.full_violation),
                                   o.active, fmt17(o.trunc_gap)));
    }
    rep.tables.emplace_back("comparison.csv", std::move(rows));
    rep.results = {{"seeds_ordered", ordered}, {"max_violation", worst}, {"seeds_with_truncation_active", active_seeds},
                   {"max_truncation_gap", worst_gap}, {"seeds_full_drift_ordered", full_ordered}};
    rep.check("u^- <= u_trunc <= u^+ on every seed", ordered == s.seeds,
              fmt::format("{}/{} seeds, max violation {:.3e} (slack {:.3e})", ordered, s.seeds, worst, slack));
    rep.check("truncated equals full while sup|u| < Z", worst_gap <= 1e-12, fmt::format("max gap {:.3e}", worst_gap));
    rep.check("u^- <= u <= u^+ with the full drift", full_ordered == s.seeds,
              fmt::format("{}/{} seeds", full_ordered, s.seeds), false);
    rep.check("truncation active on some seeds", active_seeds > 0, fmt::format("{} seeds", active_seeds), false);
    rep.wall_seconds = sw.seconds();
    return rep;
}

std::vector<std::vector<double>> coupled_sup_errors(const CoupledStudy& s) {
    for (int n : s.ns)
        if (n >= s.n_ref || s.n_ref % n != 0)
            throw Error(ErrorCode::ConfigInvalid, "reference grid must be a strict refinement of every level");
    const auto steps = steps_for(s.T, s.dt);
    const auto frame = steps_for(s.frame_dt, s.dt);
    std::vector<int> all = s.ns;
    all.push_back(s.n_ref);
    NoisePlan plan(s.common.seed, s.n_ref, s.dt);
    std::vector<std::vector<double>> err(static_cast<std::size_t>(s.replicas));
    std::vector<char> failed(err.size(), 0);
    parallel_for(err.size(), s.common.threads, [&](std::size_t r) {
        try {
            CoupledLevels lv(plan.for_replica(static_cast<std::uint32_t>(r)), all, s.zeta, s.gamma, s.sigma, s.dt,
                             s.common.kernel, DriftSpec::full(), s.integrator,
                             [](double x) { return std::sin(2 * pi * x); });
            std::vector<double> e(s.ns.size(), 0.0);
            const auto& ref = lv.u.back();
            auto measure = [&] {
                for (std::size_t l = 0; l < s.ns.size(); ++l) {
                    const int ratio = s.n_ref / s.ns[l];
                    for (int i = 0; i < s.ns[l]; ++i)
                        e[l] = std::max(e[l], std::abs(lv.u[l][static_cast<std::size_t>(i)] -
                                                       ref[static_cast<std::size_t>(i * ratio)]));
                }
            };
            measure();
            for (std::int64_t k = 1; k <= steps; ++k) {
                lv.step();
                if (k % frame == 0 || k == steps)
                    measure();
            }
            err[r] = e;
        } catch (const Error& ex) {
            if (ex.code() != ErrorCode::NonFinite)
                throw;
            failed[r] = 1;
        }
    });
    std::size_t nfail = 0;
    for (char f : failed)
        nfail += f;
    if (nfail * 100 > err.size())
        throw Error(ErrorCode::ReplicaFailure, fmt::format("{} of {} replicas produced NaN", nfail, err.size()));
    std::vector<std::vector<double>> ok;
    for (std::size_t r = 0; r < err.size(); ++r)
        if (!failed[r])
            ok.push_back(err[r]);
    return ok;
}

namespace {
nlohmann::json coupled_parameters(const CoupledStudy& s) {
    return {{"ns", s.ns}, {"n_ref", s.n_ref}, {"zeta", s.zeta}, {"gamma", s.gamma}, {"sigma", s.sigma}, {"T", s.T},
            {"dt", s.dt}, {"frame_dt", s.frame_dt}, {"replicas", s.replicas}, {"p", s.ps},
            {"bootstrap", s.bootstrap}, {"u0", "sin(2 pi x)"}, {"integrator", to_string(s.integrator)},
            {"sup", "recorded frames x coarse nodes"}};
}

std::vector<double> hs_of(const std::vector<int>& ns) {
    std::vector<double> hs;
    for (int n : ns)
        hs.push_back(1.0 / n);
    return hs;
}

void add_error_rows(ExperimentReport& rep, const std::string& label, const std::vector<int>& ns,
                    const std::vector<std::vector<double>>& err) {
    for (std::size_t r = 0; r < err.size(); ++r)
        for (std::size_t l = 0; l < ns.size(); ++l)
            rep.errors.push_back({label, 1.0 / ns[l], static_cast<int>(r), err[r][l]});
}
} // namespace

std::pair<ExperimentReport, ExperimentReport> study_strong_and_as(const CoupledStudy& s) {
    Stopwatch sw;
    auto err = coupled_sup_errors(s);
    const auto hs = hs_of(s.ns);

    ExperimentReport strong;
    strong.claim = "strong-convergence";
    strong.seed = s.common.seed;
    strong.parameters = coupled_parameters(s);
    add_error_rows(strong, "sup_error", s.ns, err);
    std::vector<RateFit> fits;
    for (double p : s.ps) {
        auto fit = fit_rate(hs, lp_mean(err, p));
        bootstrap_exponent(fit, err, p, s.bootstrap, s.common.seed ^ 0xB0075u);
        strong.add_rate(fmt::format("p{}", p), fit);
        strong.results[fmt::format("lp_errors_p{}", p)] = fit.errors;
        fits.push_back(fit);
    }
    const auto& f2 = fits.front();
    strong.check("p = 2 exponent in [0.35, 0.65]", f2.exponent >= 0.35 && f2.exponent <= 0.65,
                 fmt::format("{:.4f}", f2.exponent));
    strong.check("bootstrap CI width < 0.2", f2.ci_hi - f2.ci_lo < 0.2,
                 fmt::format("[{:.4f}, {:.4f}]", f2.ci_lo, f2.ci_hi));
    if (fits.size() > 1)
        strong.check("p = 4 exponent inside the p = 2 CI", fits[1].exponent >= f2.ci_lo && fits[1].exponent <= f2.ci_hi,
                     fmt::format("{:.4f} in [{:.4f}, {:.4f}]", fits[1].exponent, f2.ci_lo, f2.ci_hi));

    ExperimentReport as;
    as.claim = "as-convergence";
    as.seed = s.common.seed;
    as.parameters = coupled_parameters(s);
    add_error_rows(as, "path_sup_error", s.ns, err);
    std::vector<double> slopes;
    int dec = 0, pairs = 0;
    std::vector<std::string> rows{"replica,exponent,r2"};
    for (std::size_t r = 0; r < err.size(); ++r) {
        auto f = fit_rate(hs, err[r]);
        slopes.push_back(f.exponent);
        rows.push_back(fmt::format("{},{},{}", r, fmt17(f.exponent), fmt17(f.r2)));
        for (std::size_t l = 0; l + 1 < s.ns.size(); ++l, ++pairs)
            dec += err[r][l + 1] < err[r][l];
    }
    as.tables.emplace_back("path_exponents.csv", std::move(rows));
    std::size_t good = 0;
    for (double v : slopes)
        good += v >= 0.25;
    double frac = static_cast<double>(good) / static_cast<double>(slopes.size());
    double med = median(slopes);
    as.results = {{"fraction_exponent_ge_0.25", frac}, {"median_exponent", med},
                  {"fraction_decreasing_halvings", static_cast<double>(dec) / pairs}};
    as.check(">= 95% of paths with exponent >= 0.25", frac >= 0.95, fmt::format("{:.3f}", frac));
    as.check("median path exponent in [0.35, 0.65]", med >= 0.35 && med <= 0.65, fmt::format("{:.4f}", med));
    as.check("errors decrease at >= 90% of halvings", static_cast<double>(dec) / pairs >= 0.9,
             fmt::format("{}/{}", dec, pairs), false);

    // Deterministic run: same machinery with sigma = 0.
    CoupledStudy det = s;
    det.sigma = 0.0;
    det.replicas = 1;
    auto e0 = coupled_sup_errors(det);
    auto f0 = fit_rate(hs, e0.front());
    strong.add_rate("sigma0", f0);
    as.add_rate("sigma0", f0);
    strong.check("sigma = 0 exponent >= 1.0", f0.exponent >= 1.0, fmt::format("{:.4f}", f0.exponent), false);
    as.check("sigma = 0 path exponent >= 1.0", f0.exponent >= 1.0, fmt::format("{:.4f}", f0.exponent), false);

    // zeta sweep (nearest neighbour) with a reduced replica count.
    CoupledStudy nn = s;
    nn.zeta = 0.0;
    nn.replicas = std::max(8, s.replicas / 5);
    auto enn = coupled_sup_errors(nn);
    auto fnn = fit_rate(hs, lp_mean(enn, 2.0));
    strong.add_rate("zeta0_p2", fnn);
    strong.results["zeta_sweep"] = {{"zeta", {0.0, s.zeta}}, {"exponent_p2", {fnn.exponent, f2.exponent}},
                                    {"replicas_zeta0", nn.replicas}};
    strong.check("nearest-neighbour (zeta = 0) p = 2 exponent", fnn.exponent >= 0.35,
                 fmt::format("{:.4f}", fnn.exponent), false);
    strong.wall_seconds = as.wall_seconds = sw.seconds();
    return {strong, as};
}

ExperimentReport study_strong_convergence(const CoupledStudy& s) { return study_strong_and_as(s).first; }

ExperimentReport study_as_convergence(const CoupledStudy& s) { return study_strong_and_as(s).second; }

ExperimentReport study_moments(const MomentStudy& s) {
    Stopwatch sw;
    ExperimentReport rep;
    rep.claim = "moments";
    rep.seed = s.common.seed;
    rep.parameters = {{"ns", s.ns}, {"zeta", s.zeta}, {"gamma", s.gamma}, {"sigma", s.sigma}, {"T", s.T},
                      {"dt", s.dt}, {"replicas", s.replicas}, {"p", s.p}, {"u0", "sin(2 pi x)"},
                      {"sup", "all time steps x nodes"}};
    const int master = *std::max_element(s.ns.begin(), s.ns.end());
    const auto steps = steps_for(s.T, s.dt);
    NoisePlan plan(s.common.seed, master, s.dt);
    std::vector<std::vector<double>> sup(static_cast<std::size_t>(s.replicas));
    parallel_for(sup.size(), s.common.threads, [&](std::size_t r) {
        CoupledLevels lv(plan.for_replica(static_cast<std::uint32_t>(r)), s.ns, s.zeta, s.gamma, s.sigma, s.dt,
                         s.common.kernel, DriftSpec::full(), Integrator::SemiImplicit,
                         [](double x) { return std::sin(2 * pi * x); });
        std::vector<double> m(s.ns.size(), 0.0);
        auto measure = [&] {
            for (std::size_t l = 0; l < s.ns.size(); ++l)
                for (double v : lv.u[l])
                    m[l] = std::max(m[l], std::abs(v));
        };
        measure();
        for (std::int64_t k = 0; k < steps; ++k) {
            lv.step();
            measure();
        }
        sup[r] = m;
    });
    add_error_rows(rep, "sup_abs_u", s.ns, sup);
    std::vector<double> mom;
    for (std::size_t l = 0; l < s.ns.size(); ++l) {
        double acc = 0.0;
        for (const auto& row : sup)
            acc += std::pow(row[l], s.p);
        mom.push_back(acc / static_cast<double>(sup.size()));
    }
    double ratio = *std::max_element(mom.begin(), mom.end()) / *std::min_element(mom.begin(), mom.end());
    rep.results = {{"moments", mom}, {"ratio", ratio}};
    std::vector<std::string> rows{"h,moment"};
    for (std::size_t l = 0; l < s.ns.size(); ++l)
        rows.push_back(fmt::format("{},{}", fmt17(1.0 / s.ns[l]), fmt17(mom[l])));
    rep.tables.emplace_back("moments.csv", std::move(rows));
    rep.check("E sup|u|^p max/min <= 1.5", ratio <= 1.5, fmt::format("{:.4f}", ratio));
    rep.wall_seconds = sw.seconds();
    return rep;
}

ExperimentReport study_transition_times(const TransitionStudy& s) {
    Stopwatch sw;
    ExperimentReport rep;
    rep.claim = "transition";
    rep.seed = s.common.seed;
    rep.parameters = {{"ns", s.ns}, {"zeta", s.zeta}, {"gamma", s.gamma}, {"sigma", s.sigma}, {"T", s.T},
                      {"dt", s.dt}, {"rho", s.rho}, {"q", s.q}, {"u0", s.u0}, {"target", s.target},
                      {"replicas", s.replicas}, {"reference", "finest level"}};
    if (s.ns.size() < 3)
        throw Error(ErrorCode::ConfigInvalid, "transition study needs >= 3 levels");
    const int master = s.ns.back();
    const auto steps = steps_for(s.T, s.dt);
    NoisePlan plan(s.common.seed, master, s.dt);
    const std::size_t L = s.ns.size();
    std::vector<std::vector<double>> tau(static_cast<std::size_t>(s.replicas));
    std::vector<std::vector<char>> hit(tau.size());
    parallel_for(tau.size(), s.common.threads, [&](std::size_t r) {
        const double u0 = s.u0;
        CoupledLevels lv(plan.for_replica(static_cast<std::uint32_t>(r)), s.ns, s.zeta, s.gamma, s.sigma, s.dt,
                         s.common.kernel, DriftSpec::full(), Integrator::SemiImplicit, [u0](double) { return u0; });
        std::vector<HittingMonitor> mon;
        for (int n : s.ns)
            mon.emplace_back(HittingSpec{std::vector<double>(static_cast<std::size_t>(n), s.target), s.rho, s.q});
        auto all_hit = [&] {
            bool a = true;
            for (auto& m : mon)
                a = a && m.hit();
            return a;
        };
        for (std::size_t l = 0; l < L; ++l)
            mon[l].check(0.0, lv.u[l]);
        for (std::int64_t k = 1; k <= steps && !all_hit(); ++k) {
            lv.step();
            for (std::size_t l = 0; l < L; ++l)
                mon[l].check(static_cast<double>(k) * s.dt, lv.u[l]);
        }
        tau[r].resize(L);
        hit[r].resize(L);
        for (std::size_t l = 0; l < L; ++l) {
            hit[r][l] = mon[l].hit();
            tau[r][l] = mon[l].time().value_or(s.T);
        }
    });
    add_error_rows(rep, "tau", s.ns, tau);

    std::vector<double> frac(L), means(L), med_gap(L - 1);
    std::vector<Interval> ci(L);
    for (std::size_t l = 0; l < L; ++l) {
        std::vector<double> col;
        int h = 0;
        for (std::size_t r = 0; r < tau.size(); ++r) {
            col.push_back(tau[r][l]);
            h += hit[r][l];
        }
        frac[l] = static_cast<double>(h) / static_cast<double>(tau.size());
        means[l] = mean(col);
        ci[l] = bootstrap_mean_ci(col, s.bootstrap, s.common.seed + l);
    }
    for (std::size_t l = 0; l + 1 < L; ++l) {
        std::vector<double> g;
        for (const auto& row : tau)
            g.push_back(std::abs(row[l] - row[L - 1]));
        med_gap[l] = median(g);
    }
    std::vector<std::string> rows{"h,hit_fraction,mean_tau,ci_lo,ci_hi,median_abs_gap_to_ref"};
    for (std::size_t l = 0; l < L; ++l)
        rows.push_back(fmt::format("{},{},{},{},{},{}", fmt17(1.0 / s.ns[l]), fmt17(frac[l]), fmt17(means[l]),
                                   fmt17(ci[l].lo), fmt17(ci[l].hi), l + 1 < L ? fmt17(med_gap[l]) : "0"));
    rep.tables.emplace_back("transition.csv", std::move(rows));
    rep.results = {{"hit_fraction", frac}, {"mean_tau", means}, {"median_abs_gap_to_ref", med_gap}};

    double min_frac = *std::min_element(frac.begin(), frac.end());
    if (min_frac < 0.5)
        throw Error(ErrorCode::InsufficientTransitions,
                    fmt::format("only {:.0f}% of replicas transitioned at some level", 100 * min_frac));
    rep.check(">= 80% transitions at the coarsest level", frac.front() >= 0.8, fmt::format("{:.3f}", frac.front()));
    bool pathwise = true;
    for (std::size_t l = 0; l + 2 < L; ++l)
        pathwise = pathwise && med_gap[l + 1] < med_gap[l];
    std::vector<std::string> gaps;
    for (double g : med_gap)
        gaps.push_back(fmt::format("{:.4f}", g));
    rep.check("pathwise median |tau^h - tau^ref| decreases in h", pathwise,
              fmt::format("medians {}", fmt::join(gaps, ", ")));
    double coarse_diff = std::abs(means[0] - means[1]), fine_diff = std::abs(means[L - 2] - means[L - 1]);
    rep.check("successive mean differences shrink", fine_diff < coarse_diff,
              fmt::format("{:.4f} < {:.4f}", fine_diff, coarse_diff));
    bool overlap = ci[L - 2].lo <= ci[L - 1].hi && ci[L - 1].lo <= ci[L - 2].hi;
    rep.check("finest two levels have overlapping 95% CIs", overlap,
              fmt::format("[{:.3f}, {:.3f}] vs [{:.3f}, {:.3f}]", ci[L - 2].lo, ci[L - 2].hi, ci[L - 1].lo, ci[L - 1].hi));
    rep.wall_seconds = sw.seconds();
    return rep;
}

} // namespace lrac
