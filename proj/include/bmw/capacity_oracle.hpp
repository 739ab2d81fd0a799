#pragma once

#include <cstddef>
#include <span>

#include "bmw/capacity.hpp"

namespace bmw {

inline constexpr std::size_t kOracleMaxSchedules = 12;
inline constexpr std::size_t kOracleMaxQueues = 12;

/// Reference solver for the covering program behind utilization_factor.
///
/// Visits every basic solution of {beta >= 0, sum_j beta_j I^(j) >= rho}: for
/// each support S of schedules and each equally sized set R of tight covering
/// rows, solves the square system exactly by Gaussian elimination and keeps
/// the cheapest feasible point. Exhaustive and slow; it shares no code with
/// the simplex. Throws CapacityError above 12 schedules or 12 queues.
CapacityResult lp_oracle(std::span<const double> rho, std::span<const Schedule> schedules);

}  // namespace bmw
