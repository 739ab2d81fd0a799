#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bmw/engine.hpp"
#include "bmw/metrics.hpp"
#include "bmw/model.hpp"

namespace bmw {

/// Where a run's system comes from: a named preset (with optional target
/// utilization and schedule override) or a fully inline configuration.
struct SystemSource {
    std::optional<std::string> scenario;
    std::optional<double> beta_star;
    int switch_overhead = 1;
    std::optional<std::vector<Schedule>> schedules;
    std::optional<SystemConfig> inline_config;

    /// Throws std::invalid_argument for unknown presets or bad parameters.
    SystemConfig resolve() const;
    /// Scenario name, or "custom" for inline systems.
    std::string label() const;

    bool operator==(const SystemSource&) const = default;
};

/// Scales the Bernoulli arrival rates of cfg so its utilization factor equals
/// target. Throws std::invalid_argument if some arrival is not Bernoulli or a
/// scaled rate would exceed 1.
SystemConfig calibrate_system(const SystemConfig& cfg, double target);

struct RunSpec {
    std::string scenario;
    std::optional<double> beta_star;
    SystemConfig config;
    PolicySpec policy;
    SimOptions options;
    /// Index of the sweep point this run belongs to.
    std::size_t point = 0;
};

struct RunResult {
    RunSpec spec;
    SimReport report;
};

enum class SweepAxis { alpha, beta_star, switch_overhead };

std::string_view to_string(SweepAxis axis);
/// "alpha", "beta_star" (or "beta-star"), "ts" (or "T_s", "switch_overhead").
SweepAxis parse_sweep_axis(std::string_view text);

/// policies x seeds runs of one system, policy-major.
std::vector<RunSpec> expand_runs(const SystemSource& system, std::span<const PolicySpec> policies,
                                 std::span<const std::uint64_t> seeds, Slot horizon, Slot warmup);

/// values x policies x seeds, in that nesting order. The same seeds are used
/// at every axis value. Throws std::invalid_argument when the axis does not
/// apply (beta_star on S1/S2 or a non-calibratable inline system).
std::vector<RunSpec> expand_sweep(const SystemSource& system, std::span<const PolicySpec> policies, SweepAxis axis,
                                  std::span<const double> values, std::span<const std::uint64_t> seeds, Slot horizon,
                                  Slot warmup);

/// Called from worker threads once per finished run, before the trace is dropped.
using TraceHook = std::function<void(const RunSpec&, const Trace&, const SimReport&)>;

/// Runs every spec on a pool of at most `workers` threads (0 picks the
/// hardware concurrency). Results come back in input order. The first
/// exception thrown by any run is rethrown after all workers stop.
std::vector<RunResult> run_batch(std::span<const RunSpec> specs, std::size_t workers, const TraceHook& hook = {});

std::size_t default_workers();

/// seeds base, base+1, ..., base+count-1.
std::vector<std::uint64_t> seed_range(std::uint64_t base, std::size_t count);

}  // namespace bmw
