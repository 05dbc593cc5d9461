#include "config.hpp"

#include "lrac/error.hpp"
#include "lrac/kernel.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>

#include <cmath>
#include <numbers>

namespace lrac::cli {

namespace {

template <typename T>
T convert(const std::string& key, const std::string& raw) {
    try {
        return boost::lexical_cast<T>(boost::trim_copy(raw));
    } catch (const boost::bad_lexical_cast&) {
        throw Error(ErrorCode::ConfigInvalid, "cannot parse '" + raw + "' for " + key);
    }
}

template <typename T>
std::vector<T> convert_list(const std::string& key, const std::string& raw) {
    std::vector<std::string> parts;
    boost::split(parts, raw, boost::is_any_of(", "), boost::token_compress_on);
    std::vector<T> out;
    for (const auto& p : parts)
        if (!p.empty())
            out.push_back(convert<T>(key, p));
    if (out.empty())
        throw Error(ErrorCode::ConfigInvalid, "empty list for " + key);
    return out;
}

} // namespace

Config Config::load(const std::filesystem::path& path) {
    Config c;
    try {
        boost::property_tree::ini_parser::read_ini(path.string(), c.tree_);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw Error(ErrorCode::ConfigInvalid, e.what());
    }
    return c;
}

void Config::set(const std::string& key, const std::string& value) {
    if (key.find('.') == std::string::npos)
        throw Error(ErrorCode::ConfigInvalid, "override key must be section.key: " + key);
    tree_.put(key, value);
}

bool Config::has(const std::string& key) const { return tree_.get_optional<std::string>(key).has_value(); }

double Config::real(const std::string& key, double fallback) const {
    auto v = tree_.get_optional<std::string>(key);
    if (!v)
        return fallback;
    double x = convert<double>(key, *v);
    if (!std::isfinite(x))
        throw Error(ErrorCode::ConfigInvalid, key + " must be finite");
    return x;
}

int Config::integer(const std::string& key, int fallback) const {
    auto v = tree_.get_optional<std::string>(key);
    return v ? convert<int>(key, *v) : fallback;
}

std::uint64_t Config::u64(const std::string& key, std::uint64_t fallback) const {
    auto v = tree_.get_optional<std::string>(key);
    return v ? convert<std::uint64_t>(key, *v) : fallback;
}

std::string Config::text(const std::string& key, const std::string& fallback) const {
    auto v = tree_.get_optional<std::string>(key);
    return v ? boost::trim_copy(*v) : fallback;
}

std::vector<int> Config::int_list(const std::string& key, const std::vector<int>& fallback) const {
    auto v = tree_.get_optional<std::string>(key);
    return v ? convert_list<int>(key, *v) : fallback;
}

std::vector<double> Config::real_list(const std::string& key, const std::vector<double>& fallback) const {
    auto v = tree_.get_optional<std::string>(key);
    return v ? convert_list<double>(key, *v) : fallback;
}

nlohmann::json Config::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [section, sub] : tree_) {
        if (sub.empty()) {
            j[section] = sub.data();
            continue;
        }
        for (const auto& [k, v] : sub)
            j[section][k] = v.data();
    }
    return j;
}

void validate_grid(int N, double zeta) {
    if (N < 4)
        throw Error(ErrorCode::ConfigInvalid, "grid.n must be >= 4");
    if (!(zeta > 0.0 && zeta < 0.5))
        throw Error(ErrorCode::ConfigInvalid, "grid.zeta must lie in (0, 1/2)");
    radius_for(N, zeta);
}

int grid_n(const Config& c, int fallback) {
    if (c.has("grid.h")) {
        double h = c.real("grid.h", 0.0);
        if (!(h > 0.0))
            throw Error(ErrorCode::ConfigInvalid, "grid.h must be positive");
        double n = 1.0 / h;
        if (std::abs(n - std::round(n)) > 1e-9 * n)
            throw Error(ErrorCode::ConfigInvalid, "grid.h must be 1/N for an integer N");
        return static_cast<int>(std::lround(n));
    }
    return c.integer("grid.n", fallback);
}

double grid_zeta(const Config& c, double fallback) { return c.real("grid.zeta", fallback); }

std::function<double(double)> initial_condition(const Config& c, const std::string& fallback_kind,
                                                double fallback_value) {
    auto kind = c.text("initial.kind", fallback_kind);
    if (kind == "constant") {
        double v = c.real("initial.value", fallback_value);
        return [v](double) { return v; };
    }
    if (kind == "sine") {
        double a = c.real("initial.amplitude", 1.0);
        int m = c.integer("initial.mode", 1);
        return [a, m](double x) { return a * std::sin(2.0 * std::numbers::pi * m * x); };
    }
    throw Error(ErrorCode::ConfigInvalid, "initial.kind must be constant or sine");
}

} // namespace lrac::cli
