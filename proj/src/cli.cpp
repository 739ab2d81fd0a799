#include "bmw/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bmw/capacity.hpp"
#include "bmw/config_io.hpp"
#include "bmw/experiment.hpp"
#include "bmw/report_io.hpp"
#include "bmw/scenarios.hpp"
#include "bmw/validation.hpp"

namespace bmw {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ','))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<double> parse_numbers(const std::string& s) {
    std::vector<double> out;
    for (const auto& tok : split(s)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size()) throw UsageError("not a number: '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

/// Flags shared by run, sweep and capacity.
struct CommonFlags {
    std::string config;
    std::string scenario;
    std::string policy;
    double alpha = 0.001;
    double beta_star = 0.0;
    int ts = 1;
    std::int64_t horizon = 0;
    std::int64_t warmup = 0;
    std::size_t seeds = 0;
    std::uint64_t seed_base = 1;
    std::string seed_list;
    std::string out;
    std::string format;
    std::size_t workers = 0;
    bool print_config = false;

    CLI::Option* o_scenario = nullptr;
    CLI::Option* o_policy = nullptr;
    CLI::Option* o_alpha = nullptr;
    CLI::Option* o_beta = nullptr;
    CLI::Option* o_ts = nullptr;
    CLI::Option* o_horizon = nullptr;
    CLI::Option* o_warmup = nullptr;
    CLI::Option* o_seeds = nullptr;
    CLI::Option* o_seed_base = nullptr;
    CLI::Option* o_seed_list = nullptr;
    CLI::Option* o_out = nullptr;
    CLI::Option* o_format = nullptr;

    void attach(CLI::App* app, bool simulation) {
        app->add_option("--config", config, "JSON run configuration")->check(CLI::ExistingFile);
        o_scenario = app->add_option("--scenario", scenario, simulation ? "Preset name(s), S1..S8 (comma list in sweeps)" : "Preset name, S1..S8");
        o_beta = app->add_option("--beta-star", beta_star, "Target utilization factor for S3..S8");
        o_ts = app->add_option("--ts", ts, "Switching overhead T_s in slots")->check(CLI::PositiveNumber);
        o_out = app->add_option("--out", out, "Output file (default: standard output)");
        if (!simulation) return;
        o_policy = app->add_option("--policy", policy, "Comma list of policies: qbmw, wbmw, vfmw, maxweight; 'vfmw:0.5' sets alpha");
        o_alpha = app->add_option("--alpha", alpha, "Default alpha for policies given without one");
        o_horizon = app->add_option("--horizon", horizon, "Slots per run")->check(CLI::PositiveNumber);
        o_warmup = app->add_option("--warmup", warmup, "Slots discarded before measuring")->check(CLI::NonNegativeNumber);
        o_seeds = app->add_option("--seeds", seeds, "Number of seeds")->check(CLI::PositiveNumber);
        o_seed_base = app->add_option("--seed-base", seed_base, "First seed of the range");
        o_seed_list = app->add_option("--seed-list", seed_list, "Explicit comma list of seeds");
        o_format = app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        app->add_option("--workers", workers, "Concurrent runs (default: hardware threads)");
        app->add_flag("--print-config", print_config, "Print the effective configuration and exit");
    }

    /// Config file (if any) overridden by explicit flags.
    RunConfig build(bool need_scenario_list = false) const {
        RunConfig cfg;
        if (!config.empty()) cfg = load_run_config(config);
        if (o_scenario && o_scenario->count()) {
            if (!need_scenario_list && split(scenario).size() != 1) throw UsageError("--scenario takes one preset here");
            cfg.system = SystemSource{};
            cfg.system.scenario = split(scenario).front();
        }
        if (o_beta && o_beta->count()) cfg.system.beta_star = beta_star;
        if (o_ts && o_ts->count()) {
            cfg.system.switch_overhead = ts;
            if (cfg.system.inline_config) cfg.system.inline_config->switch_overhead = ts;
        }
        if (!cfg.system.scenario && !cfg.system.inline_config) throw UsageError("give --scenario or --config");
        if (o_policy && o_policy->count()) {
            cfg.policies.clear();
            for (const auto& tok : split(policy)) cfg.policies.push_back(parse_policy_token(tok, alpha));
            if (cfg.policies.empty()) throw UsageError("--policy is empty");
        } else if (o_alpha && o_alpha->count()) {
            for (auto& p : cfg.policies) p.alpha = alpha;
        }
        if (o_horizon && o_horizon->count()) cfg.horizon = horizon;
        if (o_warmup && o_warmup->count()) cfg.warmup = warmup;
        if (o_seeds && o_seeds->count()) {
            cfg.seeds.list.clear();
            cfg.seeds.count = seeds;
        }
        if (o_seed_base && o_seed_base->count()) {
            cfg.seeds.list.clear();
            cfg.seeds.base = seed_base;
        }
        if (o_seed_list && o_seed_list->count()) {
            cfg.seeds.list.clear();
            for (double v : parse_numbers(seed_list)) cfg.seeds.list.push_back(static_cast<std::uint64_t>(v));
        }
        if (o_out && o_out->count()) cfg.output.path = out;
        if (o_format && o_format->count()) cfg.output.format = format;
        if (cfg.warmup >= cfg.horizon) throw UsageError("warmup exceeds horizon");
        for (const auto& p : cfg.policies) {
            const auto problems = validate_policy(p);
            if (!problems.empty()) throw UsageError(problems.front());
        }
        return cfg;
    }
};

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

/// Writes data to the path or `out`; a file also gets a .meta.json sidecar.
void emit(const std::string& path, const std::string& data, std::ostream& out, const nlohmann::json& meta) {
    if (path.empty() || path == "-") {
        out << data;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write " + path);
    f << data;
    std::ofstream m(path + ".meta.json", std::ios::binary);
    m << meta.dump(2) << '\n';
}

nlohmann::json run_meta(const std::vector<std::string>& args, double seconds, std::size_t runs, std::size_t workers) {
    return {{"tool", "bmwsim"}, {"arguments", args}, {"finished_utc", utc_now()},
            {"wall_seconds", seconds}, {"runs", runs}, {"workers", workers}};
}

int simulate_and_emit(const std::vector<RunSpec>& specs, const RunConfig& cfg, std::size_t workers, bool aggregates,
                      const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto results = run_batch(specs, workers);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string data = cfg.output.format == "json" ? results_to_json(results, true).dump(2) + "\n"
                                                         : to_csv(results, aggregates);
    emit(cfg.output.path, data, out, run_meta(args, seconds, results.size(), workers ? workers : default_workers()));
    if (any_diverged(results)) {
        err << "bmwsim: at least one run diverged\n";
        return exit_diverged;
    }
    return exit_ok;
}

int cmd_capacity(const CommonFlags& f, std::ostream& out) {
    RunConfig cfg = f.build();
    const SystemConfig sys = cfg.system.resolve();
    const auto rho = sys.normalized_loads();
    const CapacityResult r = utilization_factor(rho, sys.schedules);
    nlohmann::json schedules = nlohmann::json::array();
    for (const auto& s : sys.schedules) schedules.push_back(s.one_based());
    nlohmann::json j{{"scenario", cfg.system.label()},
                     {"schedules", schedules},
                     {"rho", rho},
                     {"feasible", r.feasible},
                     {"beta_star", r.feasible ? nlohmann::json(r.beta_star) : nlohmann::json(nullptr)},
                     {"epsilon_star", r.feasible ? nlohmann::json(r.epsilon_star) : nlohmann::json(nullptr)},
                     {"weights", r.weights}};
    emit(cfg.output.path, j.dump(2) + "\n", out, {{"tool", "bmwsim"}, {"finished_utc", utc_now()}});
    return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulator for single-server multi-queue systems with switching overhead", "bmwsim"};
    app.require_subcommand(1);

    CommonFlags run_flags, sweep_flags, cap_flags;
    auto* run = app.add_subcommand("run", "Simulate one system under one or more policies");
    run_flags.attach(run, true);

    auto* sweep = app.add_subcommand("sweep", "Cross product of axis values, policies and seeds");
    sweep_flags.attach(sweep, true);
    std::string axis;
    std::string values;
    bool sweep_aggregates = false;
    sweep->add_option("--axis", axis, "alpha, beta_star or ts");
    sweep->add_option("--values", values, "Comma list of axis values");
    sweep->add_flag("--aggregate", sweep_aggregates, "Append mean and stderr rows per group");

    auto* capacity = app.add_subcommand("capacity", "Utilization factor of a system");
    cap_flags.attach(capacity, false);

    auto* validate = app.add_subcommand("validate", "Run the invariant suites");
    ValidationOptions vopt;
    std::string validate_out;
    validate->add_option("--seed", vopt.seed, "Seed for all suites");
    validate->add_option("--horizon", vopt.horizon, "Slots per long trace")->check(CLI::Range(Slot{10'000}, Slot{100'000'000}));
    validate->add_flag("--inject-fault", vopt.inject_fault, "Corrupt one trace to exercise the failure path");
    validate->add_option("--out", validate_out, "Write the JSON report here");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "bmwsim: " << e.what() << "\n" << "Run with --help for usage.\n";
        return exit_usage;
    }

    try {
        if (run->parsed()) {
            const RunConfig cfg = run_flags.build();
            if (run_flags.print_config) {
                out << emit_run_config(cfg);
                return exit_ok;
            }
            const auto specs = expand_runs(cfg.system, cfg.policies, cfg.seeds.seeds(), cfg.horizon, cfg.warmup);
            return simulate_and_emit(specs, cfg, run_flags.workers, true, args, out, err);
        }
        if (sweep->parsed()) {
            RunConfig cfg = sweep_flags.build(true);
            if (!axis.empty() || !values.empty()) {
                if (axis.empty() || values.empty()) throw UsageError("--axis and --values go together");
                cfg.sweep = SweepSpec{parse_sweep_axis(axis), parse_numbers(values)};
            }
            if (!cfg.sweep) throw UsageError("sweep needs --axis and --values (or a 'sweep' block in --config)");
            if (sweep_flags.print_config) {
                out << emit_run_config(cfg);
                return exit_ok;
            }
            std::vector<SystemSource> systems;
            if (sweep_flags.o_scenario->count()) {
                for (const auto& name : split(sweep_flags.scenario)) {
                    SystemSource s = cfg.system;
                    s.scenario = name;
                    systems.push_back(s);
                }
            } else {
                systems.push_back(cfg.system);
            }
            std::vector<RunSpec> specs;
            std::size_t offset = 0;
            for (const auto& s : systems) {
                auto part = expand_sweep(s, cfg.policies, cfg.sweep->axis, cfg.sweep->values, cfg.seeds.seeds(),
                                         cfg.horizon, cfg.warmup);
                for (auto& r : part) r.point += offset;
                offset += cfg.sweep->values.size();
                specs.insert(specs.end(), part.begin(), part.end());
            }
            return simulate_and_emit(specs, cfg, sweep_flags.workers, sweep_aggregates, args, out, err);
        }
        if (capacity->parsed()) return cmd_capacity(cap_flags, out);
        if (validate->parsed()) {
            const auto checks = run_validation(vopt);
            bool ok = true;
            for (const auto& c : checks) {
                err << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
                ok = ok && c.passed;
            }
            emit(validate_out, to_json(checks).dump(2) + "\n", out, {{"tool", "bmwsim"}, {"finished_utc", utc_now()}});
            return ok ? exit_ok : exit_validation;
        }
    } catch (const ConfigParseError& e) {
        err << "bmwsim: config error: " << e.what() << "\n";
        return exit_usage;
    } catch (const ConfigError& e) {
        err << "bmwsim: " << e.what() << "\n";
        return exit_usage;
    } catch (const UsageError& e) {
        err << "bmwsim: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        err << "bmwsim: " << e.what() << "\n";
        return exit_usage;
    } catch (const CapacityError& e) {
        err << "bmwsim: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}

}  // namespace bmw
