#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bmw/model.hpp"

namespace bmw {

class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Conflict graph plus a cap K on how many queues one schedule may hold.
struct ConflictSpec {
    std::size_t n_queues = 0;
    std::size_t max_concurrency = 1;
    /// 0-based unordered pairs that cannot be served together.
    std::vector<std::pair<QueueIndex, QueueIndex>> conflicts;
};

inline constexpr std::size_t kMaxEnumerationQueues = 24;

/// All conflict-free sets of size <= K that cannot be extended by another queue
/// without breaking a conflict or the cap, in lexicographic order of sorted
/// members. Throws CapacityError for N > 24 or malformed pairs.
std::vector<Schedule> enumerate_maximal_schedules(const ConflictSpec& spec);

struct CapacityResult {
    /// beta*: minimum total time share covering rho. +inf when infeasible.
    double beta_star = 0.0;
    /// epsilon* = 1 - beta*.
    double epsilon_star = 1.0;
    /// One weight per schedule achieving beta*.
    std::vector<double> weights;
    /// False iff a queue with positive load is in no schedule.
    bool feasible = true;
};

/// Utilization factor: min 1^T beta s.t. sum_j beta_j I^(j) >= rho, beta >= 0.
///
/// Solved through the dual packing program (max rho^T y, I^(j)^T y <= 1) with a
/// dense tableau and Bland's rule; the optimal weights are read off the
/// tableau's slack reduced costs. Throws CapacityError on dimension mismatch.
CapacityResult utilization_factor(std::span<const double> rho, std::span<const Schedule> schedules);

/// Scales pattern so that the normalized load pattern/mu has utilization
/// factor target_beta. Throws CapacityError when target_beta is not in (0,1)
/// or the pattern cannot be covered.
std::vector<double> calibrate_arrivals(std::span<const double> pattern, std::span<const double> mu,
                                       std::span<const Schedule> schedules, double target_beta);

}  // namespace bmw
