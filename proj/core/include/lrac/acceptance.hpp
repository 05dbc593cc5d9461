#pragma once

#include "lrac/experiments.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lrac {

struct CriterionOutcome {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    std::vector<std::string> notes; // non-gating lines
    double seconds = 0.0;
    double budget_seconds = 0.0;
};

struct AcceptanceOptions {
    std::filesystem::path out = "acceptance";
    StudyCommon common;
    // Criterion 15: rerun with a different thread count and compare CSV artifacts.
    bool determinism = true;
    // Optional subset of criterion ids (empty = all).
    std::vector<int> only;
};

// Criteria 1..14, one subdirectory per criterion under `out`.
std::vector<CriterionOutcome> run_suite(const std::filesystem::path& out, const StudyCommon& common,
                                        const std::vector<int>& only = {});

std::vector<CriterionOutcome> run_acceptance(const AcceptanceOptions& opt);

// First differing CSV (relative path) between two artifact trees, or nullopt when byte-identical.
std::optional<std::string> compare_csv_trees(const std::filesystem::path& a, const std::filesystem::path& b);

std::string format_outcome(const CriterionOutcome& c);

} // namespace lrac
