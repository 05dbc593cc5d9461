#include "lrac/acceptance.hpp"

#include "lrac/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>

namespace lrac {

namespace fs = std::filesystem;

namespace {

struct Entry {
    int id;
    const char* dir;
    const char* name;
    double budget;
};

constexpr Entry entries[] = {
    {1, "c01_spectral_sandwich", "spectral sandwich", 5},
    {2, "c02_eigenvalue_gap", "eigenvalue convergence rate", 10},
    {3, "c03_inverse_trace", "inverse-trace boundedness", 10},
    {4, "c04_operator_oracle", "operator oracle equivalence", 30},
    {5, "c05_consistency", "consistency order", 10},
    {6, "c06_semigroup", "semigroup convergence", 60},
    {7, "c07_l2_functionals", "L2 functionals", 30},
    {8, "c08_noise", "noise exactness", 120},
    {9, "c09_regularity", "regularity exponents", 180},
    {10, "c10_comparison", "comparison principle", 120},
    {11, "c11_moments", "moment boundedness", 300},
    {12, "c12_strong", "strong convergence rate", 900},
    {13, "c13_as", "pathwise convergence", 900},
    {14, "c14_transition", "transition-time convergence", 1200},
};

CriterionOutcome from_report(const Entry& e, const ExperimentReport& rep, double seconds) {
    CriterionOutcome c{e.id, e.name, rep.passed(), {}, {}, seconds, e.budget};
    std::vector<std::string> failed;
    for (const auto& ch : rep.checks) {
        if (ch.gating && !ch.passed)
            failed.push_back(ch.detail.empty() ? ch.name : fmt::format("{} ({})", ch.name, ch.detail));
        if (!ch.gating)
            c.notes.push_back(fmt::format("[{}] {}{}", ch.passed ? "ok" : "no", ch.name,
                                          ch.detail.empty() ? "" : ": " + ch.detail));
    }
    if (failed.empty()) {
        std::vector<std::string> parts;
        for (const auto& ch : rep.checks)
            if (ch.gating && !ch.detail.empty())
                parts.push_back(ch.detail);
        if (parts.size() > 3)
            c.detail = fmt::format("{} checks, e.g. {}; {}", parts.size(), parts.front(), parts.back());
        else
            c.detail = fmt::format("{}", fmt::join(parts, "; "));
    } else {
        c.detail = fmt::format("failed: {}", fmt::join(failed, "; "));
    }
    if (seconds > e.budget)
        c.notes.push_back(fmt::format("[no] runtime {:.1f} s exceeds {:.0f} s", seconds, e.budget));
    return c;
}

void write_error(const fs::path& dir, const Error& err) {
    fs::create_directories(dir);
    nlohmann::json j = {{"error", {{"code", to_string(err.code())}, {"message", err.what()}}}};
    std::ofstream(dir / "report.json") << j.dump(2) << '\n';
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool wanted(const std::vector<int>& only, int id) {
    return only.empty() || std::find(only.begin(), only.end(), id) != only.end();
}

} // namespace

std::vector<CriterionOutcome> run_suite(const fs::path& out, const StudyCommon& common, const std::vector<int>& only) {
    fs::create_directories(out);
    std::vector<std::function<ExperimentReport()>> runs = {
        [] { return study_spectral_sandwich(); },
        [] { return study_eigenvalue_gap(); },
        [] { return study_inverse_trace(); },
        [&] { return study_operator_oracle(common); },
        [&] { return study_consistency({0.1, 0.25, 0.4}, dyadic_hs(4, 10), common.kernel); },
        [&] {
            SemigroupStudy s;
            s.kernel = common.kernel;
            return study_semigroup(s);
        },
        [] { return study_l2_functionals(); },
        [&] {
            NoiseStudy s;
            s.common = common;
            return study_noise(s);
        },
        [&] {
            RegularityStudy s;
            s.common = common;
            return study_regularity(s);
        },
        [&] {
            ComparisonStudy s;
            s.common = common;
            return study_comparison(s);
        },
        [&] {
            MomentStudy s;
            s.common = common;
            return study_moments(s);
        },
    };

    std::vector<CriterionOutcome> res;
    auto record_failure = [&](const Entry& e, const Error& err, double secs) {
        write_error(out / e.dir, err);
        res.push_back({e.id, e.name, false, fmt::format("{}: {}", to_string(err.code()), err.what()), {}, secs,
                       e.budget});
    };
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& e = entries[i];
        if (!wanted(only, e.id))
            continue;
        auto t0 = std::chrono::steady_clock::now();
        try {
            auto rep = runs[i]();
            rep.write(out / e.dir);
            res.push_back(from_report(e, rep, elapsed(t0)));
        } catch (const Error& err) {
            record_failure(e, err, elapsed(t0));
        }
    }
    if (wanted(only, 12) || wanted(only, 13)) {
        auto t0 = std::chrono::steady_clock::now();
        try {
            CoupledStudy s;
            s.common = common;
            auto [strong, as] = study_strong_and_as(s);
            double secs = elapsed(t0);
            strong.write(out / entries[11].dir);
            as.write(out / entries[12].dir);
            if (wanted(only, 12))
                res.push_back(from_report(entries[11], strong, secs));
            if (wanted(only, 13))
                res.push_back(from_report(entries[12], as, secs));
        } catch (const Error& err) {
            for (int k : {11, 12})
                if (wanted(only, k + 1))
                    record_failure(entries[k], err, elapsed(t0));
        }
    }
    if (wanted(only, 14)) {
        auto t0 = std::chrono::steady_clock::now();
        try {
            TransitionStudy s;
            s.common = common;
            auto rep = study_transition_times(s);
            rep.write(out / entries[13].dir);
            res.push_back(from_report(entries[13], rep, elapsed(t0)));
        } catch (const Error& err) {
            record_failure(entries[13], err, elapsed(t0));
        }
    }
    return res;
}

std::optional<std::string> compare_csv_trees(const fs::path& a, const fs::path& b) {
    auto collect = [](const fs::path& root) {
        std::set<std::string> files;
        if (fs::exists(root))
            for (const auto& de : fs::recursive_directory_iterator(root))
                if (de.is_regular_file() && de.path().extension() == ".csv")
                    files.insert(fs::relative(de.path(), root).generic_string());
        return files;
    };
    auto fa = collect(a), fb = collect(b);
    if (fa != fb)
        return std::string("different CSV file sets");
    if (fa.empty())
        return std::string("no CSV artifacts");
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    for (const auto& f : fa)
        if (slurp(a / f) != slurp(b / f))
            return f;
    return std::nullopt;
}

std::vector<CriterionOutcome> run_acceptance(const AcceptanceOptions& opt) {
    auto res = run_suite(opt.out, opt.common, opt.only);
    if (opt.determinism && wanted(opt.only, 15)) {
        auto t0 = std::chrono::steady_clock::now();
        StudyCommon other = opt.common;
        other.threads = opt.common.threads == 1 ? 8 : 1;
        auto rerun_dir = opt.out / "c15_determinism" / fmt::format("threads{}", other.threads);
        fs::remove_all(rerun_dir);
        std::vector<int> subset = opt.only;
        std::erase(subset, 15);
        run_suite(rerun_dir, other, subset);
        // Compare only the criterion directories of the primary run.
        std::optional<std::string> diff;
        std::size_t compared = 0;
        for (const auto& e : entries) {
            if (!wanted(subset, e.id))
                continue;
            ++compared;
            if (auto d = compare_csv_trees(opt.out / e.dir, rerun_dir / e.dir)) {
                diff = fmt::format("{}/{}", e.dir, *d);
                break;
            }
        }
        CriterionOutcome c{15, "determinism", !diff && compared > 0, {}, {}, elapsed(t0), 0.0};
        c.detail = diff ? fmt::format("mismatch in {}", *diff)
                        : fmt::format("{} criterion directories byte-identical, threads {} vs {}", compared,
                                      opt.common.threads, other.threads);
        res.push_back(c);
    }
    return res;
}

std::string format_outcome(const CriterionOutcome& c) {
    return fmt::format("[{}] criterion {:2d} {}: {} ({:.1f} s)", c.passed ? "PASS" : "FAIL", c.id, c.name, c.detail,
                       c.seconds);
}

} // namespace lrac
