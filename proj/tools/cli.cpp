#include "cli.hpp"

#include "config.hpp"

#include "lrac/acceptance.hpp"
#include "lrac/error.hpp"
#include "lrac/experiments.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <fstream>
#include <numbers>
#include <ostream>

namespace lrac::cli {

namespace fs = std::filesystem;

namespace {

struct Shortcut {
    const char* flag;
    const char* key;
    const char* help;
};

constexpr Shortcut shortcuts[] = {
    {"--n", "grid.n", "grid size N (h = 1/N)"},
    {"--h", "grid.h", "mesh width h = 1/N"},
    {"--zeta", "grid.zeta", "interaction exponent, R = ceil(N^zeta)"},
    {"--kernel", "grid.kernel", "indicator, exponential or a two-column table file"},
    {"--gamma", "physics.gamma", "coupling strength"},
    {"--sigma", "physics.sigma", "noise strength"},
    {"--drift", "physics.drift", "full, truncated, upper, lower or none"},
    {"--Z", "physics.Z", "truncation level (> 2/sqrt 3)"},
    {"--T", "time.T", "final time"},
    {"--dt", "time.dt", "time step"},
    {"--t0", "time.t0", "evaluation time"},
    {"--record-every", "time.record_every", "steps between recorded frames"},
    {"--integrator", "time.integrator", "semi-implicit or explicit"},
    {"--u0", "initial.value", "constant initial value"},
    {"--replicas", "study.replicas", "Monte Carlo replicas"},
    {"--levels", "study.levels", "comma separated grid sizes"},
    {"--n-ref", "study.n_ref", "reference grid size"},
    {"--bootstrap", "study.bootstrap", "bootstrap resamples"},
};

bool config_error(ErrorCode c) {
    switch (c) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::RadiusTooLarge:
    case ErrorCode::InvalidKernel:
    case ErrorCode::ZeroSecondMoment:
    case ErrorCode::UnstableStep:
    case ErrorCode::IncompatibleRefinement:
    case ErrorCode::Io:
        return true;
    default:
        return false;
    }
}

StudyCommon common_of(const Config& c) {
    StudyCommon s;
    s.seed = c.u64("noise.seed", s.seed);
    s.threads = c.integer("study.threads", s.threads);
    s.kernel = c.text("grid.kernel", s.kernel);
    if (s.threads < 1)
        throw Error(ErrorCode::ConfigInvalid, "threads must be >= 1");
    return s;
}

double positive(const Config& c, const std::string& key, double fallback) {
    double v = c.real(key, fallback);
    if (!(v > 0.0))
        throw Error(ErrorCode::ConfigInvalid, key + " must be positive");
    return v;
}

double non_negative(const Config& c, const std::string& key, double fallback) {
    double v = c.real(key, fallback);
    if (!(v >= 0.0))
        throw Error(ErrorCode::ConfigInvalid, key + " must be non-negative");
    return v;
}

int count(const Config& c, const std::string& key, int fallback, int min = 1) {
    int v = c.integer(key, fallback);
    if (v < min)
        throw Error(ErrorCode::ConfigInvalid, fmt::format("{} must be >= {}", key, min));
    return v;
}

std::vector<int> levels(const Config& c, const std::string& key, const std::vector<int>& fallback, double zeta) {
    auto ns = c.int_list(key, fallback);
    for (std::size_t i = 0; i < ns.size(); ++i) {
        validate_grid(ns[i], zeta);
        if (i > 0 && ns[i] <= ns[i - 1])
            throw Error(ErrorCode::ConfigInvalid, key + " must be increasing");
    }
    return ns;
}

DriftSpec drift_of(const Config& c, const std::string& fallback) {
    return DriftSpec::parse(c.text("physics.drift", fallback), c.real("physics.Z", 0.0));
}

std::vector<double> hs_of(const Config& c) {
    return dyadic_hs(c.integer("study.log2_coarse", 4), c.integer("study.log2_fine", 9));
}

ExperimentReport run_study(const std::string& cmd, const Config& cfg, const fs::path& out, std::ostream& os) {
    const auto common = common_of(cfg);
    if (cmd == "eigen") {
        int N = grid_n(cfg, 64);
        double zeta = grid_zeta(cfg, 0.25);
        validate_grid(N, zeta);
        return eigen_table(N, zeta, positive(cfg, "physics.gamma", 1.0), common.kernel);
    }
    if (cmd == "consistency") {
        auto zetas = cfg.real_list("grid.zetas", {0.1, 0.25, 0.4});
        for (double z : zetas)
            validate_grid(1 << cfg.integer("study.log2_fine", 10), z);
        return study_consistency(zetas, dyadic_hs(cfg.integer("study.log2_coarse", 4), cfg.integer("study.log2_fine", 10)),
                                 common.kernel);
    }
    if (cmd == "semigroup") {
        SemigroupStudy s;
        s.t0 = positive(cfg, "time.t0", s.t0);
        s.zeta = grid_zeta(cfg, s.zeta);
        s.gamma = positive(cfg, "physics.gamma", s.gamma);
        s.hs = hs_of(cfg);
        s.grid_points = count(cfg, "study.grid_points", s.grid_points, 2);
        s.kernel = common.kernel;
        validate_grid(static_cast<int>(std::lround(1.0 / s.hs.front())), s.zeta);
        return study_semigroup(s);
    }
    if (cmd == "converge-homogeneous") {
        HomogeneousStudy s;
        s.zeta = grid_zeta(cfg, s.zeta);
        s.gamma = positive(cfg, "physics.gamma", s.gamma);
        s.T = positive(cfg, "time.T", s.T);
        s.t0 = positive(cfg, "time.t0", s.t0);
        s.hs = hs_of(cfg);
        s.kernel = common.kernel;
        validate_grid(static_cast<int>(std::lround(1.0 / s.hs.front())), s.zeta);
        return study_homogeneous_convergence(s);
    }
    if (cmd == "noise-check") {
        NoiseStudy s;
        s.common = common;
        s.N = grid_n(cfg, s.N);
        s.zeta = grid_zeta(cfg, s.zeta);
        s.gamma = positive(cfg, "physics.gamma", s.gamma);
        s.t = positive(cfg, "time.t0", s.t);
        s.dt = positive(cfg, "time.dt", s.dt);
        s.samples = count(cfg, "study.samples", s.samples, 100);
        s.paths = count(cfg, "study.replicas", s.paths, 2);
        validate_grid(s.N, s.zeta);
        return study_noise(s);
    }
    if (cmd == "regularity") {
        RegularityStudy s;
        s.common = common;
        s.N = grid_n(cfg, s.N);
        s.zeta = grid_zeta(cfg, s.zeta);
        s.gamma = positive(cfg, "physics.gamma", s.gamma);
        s.T = positive(cfg, "time.T", s.T);
        s.dt = positive(cfg, "time.dt", s.dt);
        s.replicas = count(cfg, "study.replicas", s.replicas);
        s.moment_ns = levels(cfg, "study.levels", s.moment_ns, s.zeta);
        s.moment_replicas = count(cfg, "study.moment_replicas", s.moment_replicas);
        validate_grid(s.N, s.zeta);
        return study_regularity(s);
    }
    if (cmd == "compare") {
        ComparisonStudy s;
        s.common = common;
        s.N = grid_n(cfg, s.N);
        s.zeta = grid_zeta(cfg, s.zeta);
        s.gamma = positive(cfg, "physics.gamma", s.gamma);
        s.sigma = non_negative(cfg, "physics.sigma", s.sigma);
        s.Z = cfg.real("physics.Z", s.Z);
        s.T = positive(cfg, "time.T", s.T);
        s.dt = positive(cfg, "time.dt", s.dt);
        s.seeds = count(cfg, "study.replicas", s.seeds);
        validate_grid(s.N, s.zeta);
        DriftSpec::truncated(s.Z);
        return study_comparison(s);
    }
    if (cmd == "converge-strong" || cmd == "converge-as") {
        CoupledStudy s;
        s.common = common;
        s.zeta = grid_zeta(cfg, s.zeta);
        s.gamma = positive(cfg, "physics.gamma", s.gamma);
        s.sigma = non_negative(cfg, "physics.sigma", s.sigma);
        s.T = positive(cfg, "time.T", s.T);
        s.dt = positive(cfg, "time.dt", s.dt);
        s.frame_dt = positive(cfg, "time.frame_dt", s.frame_dt);
        s.ns = levels(cfg, "study.levels", s.ns, s.zeta);
        s.n_ref = count(cfg, "study.n_ref", s.n_ref, 4);
        validate_grid(s.n_ref, s.zeta);
        s.replicas = count(cfg, "study.replicas", s.replicas, 2);
        s.ps = cfg.real_list("study.p", s.ps);
        s.bootstrap = count(cfg, "study.bootstrap", s.bootstrap);
        s.integrator = parse_integrator(cfg.text("time.integrator", to_string(s.integrator)));
        return cmd == "converge-strong" ? study_strong_convergence(s) : study_as_convergence(s);
    }
    if (cmd == "transition") {
        TransitionStudy s;
        s.common = common;
        s.zeta = grid_zeta(cfg, s.zeta);
        s.gamma = positive(cfg, "physics.gamma", s.gamma);
        s.sigma = positive(cfg, "physics.sigma", s.sigma);
        s.T = positive(cfg, "time.T", s.T);
        s.dt = positive(cfg, "time.dt", s.dt);
        s.ns = levels(cfg, "study.levels", s.ns, s.zeta);
        s.replicas = count(cfg, "study.replicas", s.replicas, 2);
        s.bootstrap = count(cfg, "study.bootstrap", s.bootstrap);
        s.u0 = cfg.real("initial.value", s.u0);
        s.target = cfg.real("hitting.target", s.target);
        s.rho = positive(cfg, "hitting.rho", s.rho);
        s.q = cfg.text("hitting.q", "2") == "inf" ? std::numeric_limits<double>::infinity()
                                                   : positive(cfg, "hitting.q", s.q);
        return study_transition_times(s);
    }
    if (cmd == "simulate") {
        SimulationConfig sc;
        sc.N = grid_n(cfg, sc.N);
        sc.zeta = grid_zeta(cfg, sc.zeta);
        validate_grid(sc.N, sc.zeta);
        sc.gamma = positive(cfg, "physics.gamma", sc.gamma);
        sc.sigma = non_negative(cfg, "physics.sigma", sc.sigma);
        sc.T = non_negative(cfg, "time.T", sc.T);
        sc.dt = positive(cfg, "time.dt", sc.dt);
        sc.record_every = count(cfg, "time.record_every", sc.record_every);
        sc.drift = drift_of(cfg, "full");
        sc.integrator = parse_integrator(cfg.text("time.integrator", to_string(sc.integrator)));
        sc.kernel = common.kernel;
        sc.u0 = initial_condition(cfg, "constant", 0.0);
        auto replica = static_cast<std::uint32_t>(cfg.integer("noise.replica", 0));
        int master_n = count(cfg, "noise.master_n", sc.N);
        double dt_master = positive(cfg, "noise.dt_master", sc.dt);
        auto traj = simulate(sc, NoisePlan(common.seed, master_n, dt_master, replica));
        fs::create_directories(out);
        traj.write_csv(out / "trajectory.csv");
        traj.write_binary(out / "trajectory.bin");
        ExperimentReport rep;
        rep.claim = "simulate";
        rep.seed = common.seed;
        rep.parameters = {{"N", sc.N}, {"zeta", sc.zeta}, {"gamma", sc.gamma}, {"sigma", sc.sigma}, {"T", sc.T},
                          {"dt", sc.dt}, {"record_every", sc.record_every}, {"drift", sc.drift.name()},
                          {"integrator", to_string(sc.integrator)}, {"replica", replica},
                          {"master_n", master_n}, {"dt_master", dt_master}};
        rep.results = {{"frames", traj.times.size()}};
        rep.check("trajectory finite", true);
        return rep;
    }
    (void)os;
    throw Error(ErrorCode::ConfigInvalid, "unknown subcommand " + cmd);
}

void write_error_record(const fs::path& out, const std::string& cmd, const Config& cfg, const std::string& code,
                        const std::string& message, int exit_code) {
    std::error_code ec;
    fs::create_directories(out, ec);
    nlohmann::json j = {{"claim", cmd},
                        {"config", cfg.to_json()},
                        {"passed", false},
                        {"error", {{"code", code}, {"message", message}, {"exit_code", exit_code}}}};
    std::ofstream(out / "report.json") << j.dump(2) << '\n';
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Long-range Allen-Cahn lattice studies", "lrac"};
    app.set_help_flag("--help", "print help");
    app.fallthrough();
    app.require_subcommand(1, 1);
    std::string out_dir, config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::vector<std::string> sets;
    app.add_option("--out", out_dir, "output directory (default out/<subcommand>)");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--threads", threads, "worker threads");
    app.add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
    app.add_option("--set", sets, "override section.key=value")->take_all();
    std::vector<std::string> values(std::size(shortcuts));
    for (std::size_t i = 0; i < std::size(shortcuts); ++i)
        app.add_option(shortcuts[i].flag, values[i], shortcuts[i].help);
    for (const char* name : {"eigen", "consistency", "semigroup", "noise-check", "simulate", "converge-homogeneous",
                             "converge-strong", "converge-as", "regularity", "transition", "compare"})
        app.add_subcommand(name);
    auto* acc = app.add_subcommand("all-acceptance", "run criteria 1-15");
    bool no_determinism = false;
    std::vector<int> only;
    acc->add_flag("--no-determinism", no_determinism, "skip the rerun for criterion 15");
    acc->add_option("--only", only, "criterion ids to run")->delimiter(',');

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 2;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    const fs::path out_path = out_dir.empty() ? fs::path("out") / cmd : fs::path(out_dir);

    Config cfg;
    try {
        if (!config_path.empty())
            cfg = Config::load(config_path);
        for (const auto& s : sets) {
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw Error(ErrorCode::ConfigInvalid, "--set expects section.key=value, got " + s);
            cfg.set(s.substr(0, eq), s.substr(eq + 1));
        }
        for (std::size_t i = 0; i < std::size(shortcuts); ++i)
            if (app.count(shortcuts[i].flag) > 0)
                cfg.set(shortcuts[i].key, values[i]);
        if (seed)
            cfg.set("noise.seed", std::to_string(*seed));
        if (threads)
            cfg.set("study.threads", std::to_string(*threads));

        if (cmd == "all-acceptance") {
            AcceptanceOptions opt;
            opt.out = out_path;
            opt.common = common_of(cfg);
            opt.determinism = !no_determinism;
            opt.only = only;
            auto res = run_acceptance(opt);
            bool all = true;
            nlohmann::json summary = nlohmann::json::array();
            for (const auto& r : res) {
                out << format_outcome(r) << '\n';
                for (const auto& n : r.notes)
                    out << "      " << n << '\n';
                all = all && r.passed;
                summary.push_back({{"criterion", r.id}, {"name", r.name}, {"passed", r.passed},
                                   {"detail", r.detail}, {"notes", r.notes}, {"seconds", r.seconds}});
            }
            nlohmann::json j = {{"claim", cmd}, {"config", cfg.to_json()}, {"passed", all}, {"criteria", summary}};
            std::ofstream(out_path / "report.json") << j.dump(2) << '\n';
            return all ? 0 : 1;
        }

        auto rep = run_study(cmd, cfg, out_path, out);
        rep.parameters["config"] = cfg.to_json();
        rep.write(out_path);
        for (const auto& c : rep.checks)
            out << fmt::format("[{}]{} {}{}\n", c.passed ? "ok" : "FAIL", c.gating ? "" : " (info)", c.name,
                               c.detail.empty() ? "" : ": " + c.detail);
        out << fmt::format("{} -> {} ({})\n", cmd, out_path.string(), rep.passed() ? "pass" : "fail");
        return rep.passed() ? 0 : 1;
    } catch (const Error& e) {
        int code = config_error(e.code()) ? 2 : 1;
        std::string name = code == 2 ? "ConfigInvalid" : "StudyFailed";
        err << fmt::format("{}: {}: {}\n", name, to_string(e.code()), e.what());
        write_error_record(out_path, cmd, cfg, std::string(to_string(e.code())), e.what(), code);
        return code;
    } catch (const std::exception& e) {
        err << "StudyFailed: " << e.what() << '\n';
        write_error_record(out_path, cmd, cfg, "StudyFailed", e.what(), 1);
        return 1;
    }
}

} // namespace lrac::cli
