// Runs acceptance criteria 1-15 and prints one line per criterion.
#include "lrac/acceptance.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    lrac::AcceptanceOptions opt;
    std::string out = "acceptance_out";
    bool verbose = false;
    app.add_option("--out", out, "artifact directory");
    app.add_option("--threads", opt.common.threads, "worker threads");
    app.add_option("--seed", opt.common.seed, "master seed");
    app.add_option("--only", opt.only, "criterion ids")->delimiter(',');
    app.add_flag("--verbose", verbose, "print informational lines");
    CLI11_PARSE(app, argc, argv);
    opt.out = out;

    auto res = lrac::run_acceptance(opt);
    int failed = 0;
    for (const auto& r : res) {
        std::cout << lrac::format_outcome(r) << '\n';
        if (verbose)
            for (const auto& n : r.notes)
                std::cout << "      " << n << '\n';
        failed += !r.passed;
    }
    std::cout << (res.size() - failed) << "/" << res.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
