#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bmw/model.hpp"

namespace bmw {

/// Static description of one preset before calibration.
struct ScenarioInfo {
    std::string name;
    std::size_t n_queues = 0;
    /// Arrival rates for S1-S2, the arrival pattern to be scaled by beta* otherwise.
    std::vector<double> lambda;
    std::vector<double> mu;
    std::vector<Schedule> schedules;
    bool takes_beta = false;
    bool deterministic_service = false;
};

/// "S1".."S8"; also accepts lower case and roman numerals "I".."VIII".
std::string canonical_scenario_name(std::string_view name);
std::vector<std::string> scenario_names();
ScenarioInfo scenario_info(std::string_view name);
bool scenario_takes_beta(std::string_view name);

/// Default S7/S8 signal phases: {2,4},{1,3},{6,8},{5,7},{1,2},{5,6}.
std::vector<Schedule> intersection_schedules();

/// Fully populated system for a named preset.
///
/// beta_star is required for S3-S8 (arrivals are scaled so the utilization
/// factor equals it) and rejected for S1-S2. `schedules` replaces the preset's
/// schedule set before calibration. Throws std::invalid_argument.
SystemConfig preset(std::string_view name, std::optional<double> beta_star = std::nullopt, int switch_overhead = 1,
                    const std::optional<std::vector<Schedule>>& schedules = std::nullopt);

}  // namespace bmw
