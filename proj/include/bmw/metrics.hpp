#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bmw/engine.hpp"
#include "bmw/model.hpp"

namespace bmw {

/// Slope of 1^T Q above which a finished run is reported as diverged.
inline constexpr double kDivergenceSlope = 0.01;
/// Runs shorter than this never get the slope-based divergence flag.
inline constexpr Slot kMinSlopeSlots = 10'000;

struct IntervalStats {
    std::size_t count = 0;
    double mean = 0.0;
    Slot min = 0;
    Slot max = 0;
};

/// Summary of one run over its measurement window [warmup, end).
struct SimReport {
    /// Job-weighted mean delay; empty when no job completed in the window.
    std::optional<double> total_avg_delay;
    std::vector<std::optional<double>> per_queue_avg_delay;
    std::vector<std::uint64_t> per_queue_jobs;
    double time_avg_total_queue = 0.0;
    std::vector<double> time_avg_queue;
    /// Time average of (1^T Q)^(1 - alpha).
    double powered_queue_mean = 0.0;
    double alpha = 0.0;
    double switch_fraction = 0.0;
    IntervalStats interval_stats;
    bool diverged = false;
    std::uint64_t jobs_counted = 0;
    std::optional<double> little_ratio;
    double stability_slope = 0.0;
    Slot measured_slots = 0;
};

/// Computes every report field over [trace.warmup, trace.end).
///
/// Delay statistics count only jobs that both arrive and depart inside the
/// window. Interval statistics use completed intervals starting inside it.
/// `diverged` is set when the run hit its ceiling or, for runs of at least
/// kMinSlopeSlots, when stability_slope exceeds kDivergenceSlope.
SimReport finalize(const Trace& trace, const SystemConfig& config, double alpha);

/// time_avg_total_queue / (lambda_total * total_avg_delay).
/// Throws std::domain_error when the report has no completed jobs.
double little_consistency(const SimReport& report, double lambda_total);

/// Q^T diag(1/mu) Q.
double lyapunov_q(std::span<const double> queue_lengths, std::span<const double> mu);
/// W^T diag(rho) W.
double lyapunov_w(std::span<const double> waiting_times, std::span<const double> rho);

struct IntervalViolation {
    std::size_t interval = 0;
    Slot start = 0;
    Slot length = 0;
    double bound = 0.0;
};

/// C0 = T_s / (N K (A_max + (1 + T_s) S_max)).
double qbmw_interval_constant(const SystemConfig& config);
/// C1 = T_s / (N K (1 + (1 + T_s) S_max V_max)).
double wbmw_interval_constant(const SystemConfig& config, std::uint32_t vmax);
/// Largest inter-arrival bound over all queues, or nullopt if any is unbounded.
std::optional<std::uint32_t> system_interarrival_bound(const SystemConfig& config);

/// Checks every completed interval against the per-interval lower bound
/// T_k >= C * (1^T x(t_k)) / max{1, (1^T x(t_k))^alpha}, with x = Q and C = C0
/// for Q-BMW, x = W and C = C1 for W-BMW. Returns the violating intervals.
/// Throws std::invalid_argument if variant does not match the trace's policy,
/// is not a biased max-weight variant, or (W-BMW) V_max is unbounded.
std::vector<IntervalViolation> interval_bound_check(const Trace& trace, const SystemConfig& config, double alpha,
                                                    PolicyVariant variant);

/// Least-squares slope of 1^T Q(t) against t over the second half of the trace.
/// Meaningful for traces of at least 10^4 slots.
double stability_slope(const Trace& trace);

/// max / min of the defined per-queue delays. Queues with no completed job are
/// skipped and named in `warnings` when provided. Throws std::domain_error if
/// no queue has a defined delay.
double fairness_ratio(const SimReport& report, std::vector<std::string>* warnings = nullptr);

/// Slots at which the server has been active on an empty schedule while
/// other queues held jobs for more than allowed_latency consecutive slots.
/// Only defined for systems whose schedules are all singletons.
std::vector<Slot> work_conservation_check(const Trace& trace, const SystemConfig& config, Slot allowed_latency);

struct DriftSummary {
    std::size_t count = 0;
    double mean_drift = 0.0;
};

/// Mean of L(t_{k+1}) - L(t_k) over consecutive interval starts with
/// 1^T Q(t_k) >= threshold, with L the Q-based Lyapunov function.
DriftSummary lyapunov_drift(const Trace& trace, std::span<const double> mu, std::uint64_t threshold);

/// Sample mean and standard error of the mean.
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;

    double lower(double k = 2.0) const { return mean - k * std_error; }
    double upper(double k = 2.0) const { return mean + k * std_error; }
};

Estimate estimate(std::span<const double> values);

/// True if the +/- k standard-error intervals of a and b are disjoint and a lies below b.
bool clearly_below(const Estimate& a, const Estimate& b, double k = 2.0);

}  // namespace bmw
