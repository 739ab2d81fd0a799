#include "bmw/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <variant>

#include "bmw/capacity.hpp"
#include "bmw/scenarios.hpp"

namespace bmw {

SystemConfig SystemSource::resolve() const {
    if (inline_config) {
        if (scenario) throw std::invalid_argument("system is both a preset and an inline configuration");
        SystemConfig cfg = *inline_config;
        if (beta_star) cfg = calibrate_system(cfg, *beta_star);
        return cfg;
    }
    if (!scenario) throw std::invalid_argument("system names neither a scenario nor an inline configuration");
    return preset(*scenario, beta_star, switch_overhead, schedules);
}

std::string SystemSource::label() const { return scenario ? canonical_scenario_name(*scenario) : "custom"; }

SystemConfig calibrate_system(const SystemConfig& cfg, double target) {
    std::vector<double> pattern;
    for (const auto& t : cfg.traffic) {
        const auto* b = std::get_if<Bernoulli>(&t.arrival);
        if (!b) throw std::invalid_argument("beta_star calibration needs Bernoulli arrivals on every queue");
        pattern.push_back(b->p);
    }
    std::vector<double> lambda;
    try {
        lambda = calibrate_arrivals(pattern, cfg.service_rates(), cfg.schedules, target);
    } catch (const CapacityError& e) {
        throw std::invalid_argument(e.what());
    }
    SystemConfig out = cfg;
    for (std::size_t q = 0; q < lambda.size(); ++q) {
        if (lambda[q] > 1.0) throw std::invalid_argument("calibrated arrival rate exceeds 1 on queue " + std::to_string(q + 1));
        out.traffic[q].arrival = Bernoulli{lambda[q]};
    }
    return out;
}

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::alpha: return "alpha";
        case SweepAxis::beta_star: return "beta_star";
        case SweepAxis::switch_overhead: return "ts";
    }
    return "?";
}

SweepAxis parse_sweep_axis(std::string_view text) {
    if (text == "alpha") return SweepAxis::alpha;
    if (text == "beta_star" || text == "beta-star" || text == "beta") return SweepAxis::beta_star;
    if (text == "ts" || text == "T_s" || text == "switch_overhead") return SweepAxis::switch_overhead;
    throw std::invalid_argument("unknown sweep axis '" + std::string(text) + "' (alpha, beta_star, ts)");
}

namespace {

void append_runs(std::vector<RunSpec>& out, const SystemSource& system, std::span<const PolicySpec> policies,
                 std::span<const std::uint64_t> seeds, Slot horizon, Slot warmup, std::size_t point) {
    const SystemConfig cfg = system.resolve();
    for (const auto& policy : policies) {
        for (const auto seed : seeds) {
            RunSpec r;
            r.scenario = system.label();
            r.beta_star = system.beta_star;
            r.config = cfg;
            r.policy = policy;
            r.options.horizon = horizon;
            r.options.warmup = warmup;
            r.options.seed = seed;
            r.point = point;
            out.push_back(std::move(r));
        }
    }
}

}  // namespace

std::vector<RunSpec> expand_runs(const SystemSource& system, std::span<const PolicySpec> policies,
                                 std::span<const std::uint64_t> seeds, Slot horizon, Slot warmup) {
    std::vector<RunSpec> out;
    append_runs(out, system, policies, seeds, horizon, warmup, 0);
    return out;
}

std::vector<RunSpec> expand_sweep(const SystemSource& system, std::span<const PolicySpec> policies, SweepAxis axis,
                                  std::span<const double> values, std::span<const std::uint64_t> seeds, Slot horizon,
                                  Slot warmup) {
    if (axis == SweepAxis::beta_star && system.scenario && !scenario_takes_beta(*system.scenario))
        throw std::invalid_argument("beta_star sweep does not apply to " + system.label() +
                                    ", whose arrival rates are fixed");
    std::vector<RunSpec> out;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double v = values[k];
        SystemSource point = system;
        std::vector<PolicySpec> point_policies(policies.begin(), policies.end());
        switch (axis) {
            case SweepAxis::alpha:
                for (auto& p : point_policies) p.alpha = v;
                break;
            case SweepAxis::beta_star: point.beta_star = v; break;
            case SweepAxis::switch_overhead: {
                const int ts = static_cast<int>(std::lround(v));
                if (static_cast<double>(ts) != v) throw std::invalid_argument("T_s values must be integers");
                point.switch_overhead = ts;
                if (point.inline_config) point.inline_config->switch_overhead = ts;
                break;
            }
        }
        append_runs(out, point, point_policies, seeds, horizon, warmup, k);
    }
    return out;
}

std::size_t default_workers() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

std::vector<RunResult> run_batch(std::span<const RunSpec> specs, std::size_t workers, const TraceHook& hook) {
    std::vector<RunResult> results(specs.size());
    if (workers == 0) workers = default_workers();
    workers = std::min(workers, std::max<std::size_t>(specs.size(), 1));

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto work = [&] {
        while (!failed.load()) {
            const std::size_t k = next.fetch_add(1);
            if (k >= specs.size()) return;
            try {
                const RunSpec& spec = specs[k];
                const Trace trace = simulate(spec.config, spec.policy, spec.options);
                SimReport report = finalize(trace, spec.config, spec.policy.alpha);
                if (hook) hook(spec, trace, report);
                results[k] = RunResult{spec, std::move(report)};
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed = true;
            }
        }
    };

    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

std::vector<std::uint64_t> seed_range(std::uint64_t base, std::size_t count) {
    std::vector<std::uint64_t> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = base + k;
    return out;
}

}  // namespace bmw
