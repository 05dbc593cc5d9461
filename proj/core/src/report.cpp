#include "lrac/error.hpp"
#include "lrac/experiments.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <fstream>

namespace lrac {

std::string fmt17(double v) { return fmt::format("{:.17g}", v); }

void ExperimentReport::check(std::string name, bool passed, std::string detail, bool gating) {
    checks.push_back({std::move(name), passed, gating, std::move(detail)});
}

void ExperimentReport::add_rate(const std::string& label, const RateFit& fit) {
    rates.push_back({label, fit.exponent, fit.ci_lo, fit.ci_hi, fit.r2});
}

bool ExperimentReport::passed() const {
    for (const auto& c : checks)
        if (c.gating && !c.passed)
            return false;
    return true;
}

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json j;
    j["claim"] = claim;
    j["seed"] = seed;
    j["parameters"] = parameters;
    j["results"] = results;
    j["passed"] = passed();
    j["wall_seconds"] = wall_seconds;
    auto& cs = j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
        cs.push_back({{"name", c.name}, {"passed", c.passed}, {"gating", c.gating}, {"detail", c.detail}});
    auto& rs = j["rates"] = nlohmann::json::array();
    for (const auto& r : rates)
        rs.push_back({{"label", r.label}, {"exponent", r.exponent}, {"ci_lo", r.ci_lo}, {"ci_hi", r.ci_hi},
                      {"r2", r.r2}});
    return j;
}

void ExperimentReport::write(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "report.json");
        if (!out)
            throw Error(ErrorCode::Io, "cannot write " + (dir / "report.json").string());
        out << to_json().dump(2) << "\n";
    }
    {
        auto out = fmt::output_file((dir / "errors.csv").string());
        out.print("label,h,replica,error\n");
        for (const auto& e : errors)
            out.print("{},{:.17g},{},{:.17g}\n", e.label, e.h, e.replica, e.error);
    }
    {
        auto out = fmt::output_file((dir / "rates.csv").string());
        out.print("label,exponent,ci_lo,ci_hi,r2\n");
        for (const auto& r : rates)
            out.print("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.label, r.exponent, r.ci_lo, r.ci_hi, r.r2);
    }
    for (const auto& [name, rows] : tables) {
        auto out = fmt::output_file((dir / name).string());
        for (const auto& row : rows)
            out.print("{}\n", row);
    }
}

} // namespace lrac
