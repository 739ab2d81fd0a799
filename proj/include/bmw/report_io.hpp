#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bmw/experiment.hpp"
#include "json.hpp"

namespace bmw {

/// Shortest decimal that round-trips, '.' separator, no locale.
std::string format_number(double v);

/// Mean and standard error of each numeric report field over one group of runs.
struct AggregateRow {
    std::string scenario;
    std::string policy;
    double alpha = 0.0;
    std::optional<double> beta_star;
    int switch_overhead = 1;
    std::size_t runs = 0;
    std::size_t diverged_runs = 0;
    std::optional<Estimate> total_avg_delay;
    std::vector<std::optional<Estimate>> per_queue_delay;
    Estimate time_avg_total_queue;
    Estimate powered_queue_mean;
    Estimate switch_fraction;
    std::optional<Estimate> mean_interval;
    std::optional<Estimate> little_ratio;
};

/// Groups consecutive results that share scenario, beta*, T_s, sweep point and policy.
std::vector<AggregateRow> aggregate(std::span<const RunResult> results);

/// Long-form table: one row per run, and with `with_aggregates` two more rows
/// (seed "mean" and "stderr") after each group.
void write_csv(std::ostream& out, std::span<const RunResult> results, bool with_aggregates);
std::string to_csv(std::span<const RunResult> results, bool with_aggregates);

nlohmann::json report_to_json(const SimReport& report);
nlohmann::json results_to_json(std::span<const RunResult> results, bool with_aggregates);

bool any_diverged(std::span<const RunResult> results);

}  // namespace bmw
