#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bmw/traffic.hpp"

namespace bmw {

/// 0-based queue index. User-facing text (configs, CSV, messages) is 1-based.
using QueueIndex = std::size_t;
/// Position of a schedule within SystemConfig::schedules.
using ScheduleIndex = std::size_t;

/// A set of queues the server can serve simultaneously.
///
/// Members are kept sorted and unique so equality, ordering and subset tests
/// are plain set operations.
class Schedule {
public:
    Schedule() = default;
    explicit Schedule(std::vector<QueueIndex> members);
    Schedule(std::initializer_list<QueueIndex> members);

    /// Builds a schedule from 1-based queue numbers.
    static Schedule from_one_based(std::span<const std::size_t> numbers);
    static Schedule from_one_based(std::initializer_list<std::size_t> numbers);

    const std::vector<QueueIndex>& members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }
    bool contains(QueueIndex q) const;
    bool is_strict_subset_of(const Schedule& other) const;

    /// "{1,3,5}" with 1-based numbers.
    std::string to_string() const;
    std::vector<std::size_t> one_based() const;

    auto operator<=>(const Schedule&) const = default;

private:
    std::vector<QueueIndex> members_;
};

/// A queueing system: N parallel queues, the maximal schedules the server
/// may pick from, the switching overhead T_s and the traffic of each queue.
struct SystemConfig {
    std::size_t n_queues = 0;
    std::vector<Schedule> schedules;
    int switch_overhead = 1;
    std::vector<TrafficSpec> traffic;

    /// K, the largest number of queues served at once.
    std::size_t max_concurrency() const;
    std::vector<double> arrival_rates() const;
    std::vector<double> service_rates() const;
    /// rho_i = lambda_i / mu_i.
    std::vector<double> normalized_loads() const;
    std::uint32_t max_arrival_bound() const;
    std::uint32_t max_service_bound() const;

    bool operator==(const SystemConfig&) const = default;
};

enum class PolicyVariant { qbmw, wbmw, vfmw, max_weight };

std::string_view to_string(PolicyVariant v);
/// Accepts "qbmw", "wbmw", "vfmw", "maxweight" (case-insensitive, '-'/'_' ignored).
PolicyVariant parse_policy_variant(std::string_view text);

struct PolicySpec {
    PolicyVariant variant = PolicyVariant::qbmw;
    /// Exponent of the bias function (BMW) or frame function (VFMW), in (0,1).
    double alpha = 0.001;

    bool operator==(const PolicySpec&) const = default;
};

std::vector<std::string> validate_policy(const PolicySpec& spec);

/// Every invariant violation of cfg; empty means valid.
std::vector<std::string> validate_config(const SystemConfig& cfg);

/// Sum of state entries over the schedule's members (I^T x).
template <class T>
T schedule_weight(const Schedule& schedule, std::span<const T> state) {
    T sum{};
    for (QueueIndex q : schedule.members()) sum += state[q];
    return sum;
}

double schedule_weight(const Schedule& schedule, std::span<const double> state);

}  // namespace bmw
