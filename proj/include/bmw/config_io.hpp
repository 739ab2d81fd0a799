#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bmw/experiment.hpp"
#include "bmw/model.hpp"
#include "json.hpp"

namespace bmw {

/// Malformed or invalid run configuration. The message starts with the JSON
/// pointer of the offending field, or with line:column for syntax errors.
class ConfigParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SeedSpec {
    /// Explicit seeds; when empty the range base..base+count-1 is used.
    std::vector<std::uint64_t> list;
    std::uint64_t base = 1;
    std::size_t count = 10;

    std::vector<std::uint64_t> seeds() const;
    bool operator==(const SeedSpec&) const = default;
};

struct OutputSpec {
    /// Empty means standard output.
    std::string path;
    std::string format = "csv";
    bool operator==(const OutputSpec&) const = default;
};

struct SweepSpec {
    SweepAxis axis = SweepAxis::alpha;
    std::vector<double> values;
    bool operator==(const SweepSpec&) const = default;
};

/// Everything needed to reproduce a run or a sweep.
///
/// JSON schema (unknown keys are rejected everywhere):
///   system:   {"scenario": "S3", "beta_star": 0.95, "switch_overhead": 1,
///              "schedules": [[1,2], ...]}                       preset form
///         or  {"n_queues": 4, "switch_overhead": 1,
///              "schedules": [[1],[2],...]  |  "conflicts": {"max_concurrency": 1, "pairs": [[1,2]]},
///              "traffic": [{"arrival": DIST, "service": DIST, "interarrival_bound": 2}, ...],
///              "beta_star": 0.9}                                inline form
///   DIST:     {"type": "bernoulli", "p": 0.1} | {"type": "deterministic", "value": 1}
///           | {"type": "discrete", "values": [0, 2], "probs": [0.5, 0.5]}
///   policy:   {"variant": "qbmw", "alpha": 0.001}   or "policies": [ ... ]
///   horizon, warmup: slots
///   seeds:    [1, 2, 3]  or  {"base": 1, "count": 10}
///   sweep:    {"axis": "alpha" | "beta_star" | "ts", "values": [...]}
///   output:   {"path": "out.csv", "format": "csv" | "json"}
/// Queue numbers are 1-based.
struct RunConfig {
    SystemSource system;
    std::vector<PolicySpec> policies{PolicySpec{}};
    Slot horizon = 2'000'000;
    Slot warmup = 200'000;
    SeedSpec seeds;
    std::optional<SweepSpec> sweep;
    OutputSpec output;

    bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);

std::string emit_run_config(const RunConfig& cfg);
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::string& path);

nlohmann::json to_json(const Distribution& d);
Distribution distribution_from_json(const nlohmann::json& j, const std::string& where = "");
nlohmann::json to_json(const SystemConfig& cfg);
nlohmann::json to_json(const PolicySpec& p);
/// "qbmw", "vfmw:0.5", "wbmw:0.001".
PolicySpec parse_policy_token(std::string_view token, double default_alpha);

}  // namespace bmw
