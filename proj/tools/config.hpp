#pragma once

#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lrac::cli {

// INI-style configuration: [section] key = value. Flags are merged on top as "section.key" overrides.
class Config {
public:
    Config() = default;
    static Config load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    double real(const std::string& key, double fallback) const;
    int integer(const std::string& key, int fallback) const;
    std::uint64_t u64(const std::string& key, std::uint64_t fallback) const;
    std::string text(const std::string& key, const std::string& fallback) const;
    std::vector<int> int_list(const std::string& key, const std::vector<int>& fallback) const;
    std::vector<double> real_list(const std::string& key, const std::vector<double>& fallback) const;

    nlohmann::json to_json() const;

private:
    boost::property_tree::ptree tree_;
};

// Validated grid helpers.
int grid_n(const Config& c, int fallback);
double grid_zeta(const Config& c, double fallback);
void validate_grid(int N, double zeta);
std::function<double(double)> initial_condition(const Config& c, const std::string& fallback_kind, double fallback_value);

} // namespace lrac::cli
