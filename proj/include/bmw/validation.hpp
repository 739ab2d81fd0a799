#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bmw/engine.hpp"
#include "json.hpp"

namespace bmw {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationOptions {
    std::uint64_t seed = 1;
    Slot horizon = 1'000'000;
    std::size_t lp_cases = 200;
    /// Feed a trace with one shortened interval to the interval-bound suite.
    bool inject_fault = false;
};

/// Runs the invariant suites: LP against the enumeration oracle, slot
/// conservation and service constraints, FIFO order, work conservation,
/// per-interval length bounds, Little's law, determinism and common random
/// numbers, plus a negative control that corrupts a trace and expects the
/// interval-bound check to notice.
std::vector<CheckResult> run_validation(const ValidationOptions& options);

/// Shortens the complete interval with the largest Q-BMW lower bound so that
/// it falls below that bound. Returns its index, or nullopt if no interval
/// has a positive bound.
std::optional<std::size_t> corrupt_interval(Trace& trace, const SystemConfig& config, double alpha);

nlohmann::json to_json(const std::vector<CheckResult>& checks);

}  // namespace bmw
