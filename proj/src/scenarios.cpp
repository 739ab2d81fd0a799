#include "bmw/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>

#include "bmw/capacity.hpp"

namespace bmw {

namespace {

std::vector<Schedule> singletons(std::size_t n) {
    std::vector<Schedule> out;
    for (QueueIndex q = 0; q < n; ++q) out.push_back(Schedule{q});
    return out;
}

std::vector<Schedule> beam_schedules() {
    return {Schedule::from_one_based({1, 3, 5, 6}), Schedule::from_one_based({1, 4, 5, 6}),
            Schedule::from_one_based({2, 3, 5, 6}), Schedule::from_one_based({2, 4, 5, 6})};
}

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

std::vector<Schedule> intersection_schedules() {
    return {Schedule::from_one_based({2, 4}), Schedule::from_one_based({1, 3}), Schedule::from_one_based({6, 8}),
            Schedule::from_one_based({5, 7}), Schedule::from_one_based({1, 2}), Schedule::from_one_based({5, 6})};
}

std::string canonical_scenario_name(std::string_view name) {
    static constexpr std::array<std::string_view, 8> roman{"I", "II", "III", "IV", "V", "VI", "VII", "VIII"};
    const std::string u = upper(name);
    for (std::size_t k = 0; k < roman.size(); ++k) {
        const std::string s = "S" + std::to_string(k + 1);
        if (u == s || u == roman[k]) return s;
    }
    throw std::invalid_argument("unknown scenario '" + std::string(name) + "' (expected S1..S8)");
}

std::vector<std::string> scenario_names() { return {"S1", "S2", "S3", "S4", "S5", "S6", "S7", "S8"}; }

ScenarioInfo scenario_info(std::string_view name) {
    ScenarioInfo s;
    s.name = canonical_scenario_name(name);
    const int id = s.name[1] - '0';
    switch (id) {
        case 1:
            s.lambda = {0.119, 0.119, 0.119, 0.119};
            s.mu = {0.5, 0.5, 0.5, 0.5};
            break;
        case 2:
            s.lambda = {0.08, 0.25, 0.09, 0.01};
            s.mu = {0.8, 0.5, 0.3, 0.2};
            break;
        case 3:
            s.lambda = {0.125, 0.125, 0.125, 0.125};
            s.mu = {0.5, 0.5, 0.5, 0.5};
            break;
        case 4:
            s.lambda = {0.25, 0.15, 0.075, 0.025};
            s.mu = {0.5, 0.5, 0.5, 0.5};
            break;
        case 5:
            s.lambda = {0.18, 0.16, 0.25, 0.3, 0.9, 0.8};
            s.mu = {0.3, 0.4, 0.5, 0.6, 0.9, 0.8};
            break;
        case 6:
            s.lambda = {0.35, 0.15, 0.3, 0.2, 0.5, 0.5};
            s.mu.assign(6, 0.5);
            break;
        case 7:
            s.lambda = {0.1, 0.5, 0.1, 0.3, 0.1, 0.5, 0.1, 0.3};
            s.mu.assign(8, 1.0);
            break;
        case 8:
            s.lambda = {0.02, 0.26, 0.24, 0.48, 0.24, 0.48, 0.02, 0.26};
            s.mu.assign(8, 1.0);
            break;
        default: break;
    }
    s.n_queues = s.lambda.size();
    s.takes_beta = id >= 3;
    s.deterministic_service = id >= 7;
    if (id <= 4)
        s.schedules = singletons(4);
    else if (id <= 6)
        s.schedules = beam_schedules();
    else
        s.schedules = intersection_schedules();
    return s;
}

bool scenario_takes_beta(std::string_view name) { return scenario_info(name).takes_beta; }

SystemConfig preset(std::string_view name, std::optional<double> beta_star, int switch_overhead,
                    const std::optional<std::vector<Schedule>>& schedules) {
    ScenarioInfo info = scenario_info(name);
    if (schedules) info.schedules = *schedules;
    std::vector<double> lambda = info.lambda;
    if (info.takes_beta) {
        if (!beta_star) throw std::invalid_argument(info.name + " needs a target utilization factor beta_star");
        if (!(*beta_star > 0.0 && *beta_star < 1.0))
            throw std::invalid_argument("beta_star must lie in (0,1) for " + info.name);
        try {
            lambda = calibrate_arrivals(info.lambda, info.mu, info.schedules, *beta_star);
        } catch (const CapacityError& e) {
            throw std::invalid_argument(info.name + ": " + e.what());
        }
    } else if (beta_star) {
        throw std::invalid_argument(info.name + " has fixed arrival rates; beta_star is not accepted");
    }

    SystemConfig cfg;
    cfg.n_queues = info.n_queues;
    cfg.schedules = info.schedules;
    cfg.switch_overhead = switch_overhead;
    for (std::size_t q = 0; q < info.n_queues; ++q) {
        TrafficSpec t;
        t.arrival = Bernoulli{lambda[q]};
        if (info.deterministic_service)
            t.service = Deterministic{static_cast<std::uint32_t>(info.mu[q])};
        else
            t.service = Bernoulli{info.mu[q]};
        cfg.traffic.push_back(t);
    }
    return cfg;
}

}  // namespace bmw
