#include "bmw/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "bmw/capacity.hpp"
#include "bmw/capacity_oracle.hpp"
#include "bmw/metrics.hpp"
#include "bmw/policy.hpp"
#include "bmw/scenarios.hpp"

namespace bmw {

namespace {

constexpr double kLpTolerance = 1e-9;

SimOptions options_for(const ValidationOptions& v, Slot horizon, Slot detail_stride = 0) {
    SimOptions o;
    o.horizon = horizon;
    o.warmup = horizon / 10;
    o.seed = v.seed;
    o.detail_stride = detail_stride;
    return o;
}

/// S3 and S4 at beta* = 0.95, the fixed S1/S2 rates as published.
SystemConfig singleton_preset(int id) {
    const std::string name = "S" + std::to_string(id);
    return scenario_takes_beta(name) ? preset(name, 0.95) : preset(name);
}

CheckResult lp_suite(const ValidationOptions& v) {
    std::mt19937_64 rng(v.seed);
    std::uniform_int_distribution<std::size_t> n_dist(2, 6);
    std::uniform_int_distribution<std::size_t> j_dist(2, 8);
    std::uniform_real_distribution<double> rho_dist(0.0, 1.0);
    std::bernoulli_distribution member(0.4);
    double worst = 0.0;
    std::size_t mismatches = 0;
    for (std::size_t c = 0; c < v.lp_cases; ++c) {
        const std::size_t n = n_dist(rng);
        const std::size_t j = j_dist(rng);
        std::vector<Schedule> schedules;
        while (schedules.size() < j) {
            std::vector<QueueIndex> m;
            for (QueueIndex q = 0; q < n; ++q)
                if (member(rng)) m.push_back(q);
            if (m.empty()) continue;
            schedules.emplace_back(std::move(m));
        }
        // Every queue must be coverable.
        for (QueueIndex q = 0; q < n; ++q) {
            const bool covered = std::any_of(schedules.begin(), schedules.end(), [&](const Schedule& s) { return s.contains(q); });
            if (!covered) schedules[q % schedules.size()] = Schedule([&] {
                    auto m = schedules[q % schedules.size()].members();
                    m.push_back(q);
                    return m;
                }());
        }
        std::vector<double> rho(n);
        for (auto& r : rho) r = rho_dist(rng);
        const auto fast = utilization_factor(rho, schedules);
        const auto slow = lp_oracle(rho, schedules);
        const double diff = std::abs(fast.beta_star - slow.beta_star);
        worst = std::max(worst, diff);
        if (!(diff <= kLpTolerance)) ++mismatches;
    }
    std::ostringstream d;
    d << v.lp_cases << " random instances, " << mismatches << " mismatches, max |difference| " << worst;
    return {"lp_vs_oracle", mismatches == 0, d.str()};
}

CheckResult conservation_suite(const ValidationOptions& v) {
    const SystemConfig cfg = preset("S5", 0.9);
    const Trace tr = simulate(cfg, {PolicyVariant::qbmw, 0.001}, options_for(v, 100'000, 1));
    std::size_t bad = 0;
    std::string first;
    const auto smax = cfg.max_service_bound();
    for (std::size_t k = 0; k < tr.detail.size(); ++k) {
        const SlotRecord& r = tr.detail[k];
        const bool active = r.mode == ServerMode::active;
        for (std::size_t q = 0; q < cfg.n_queues; ++q) {
            const bool in = active && cfg.schedules[r.schedule].contains(q);
            bool ok = r.served[q] <= r.queue_lengths[q] && r.served[q] <= smax && (in || r.served[q] == 0);
            const auto next = r.t + 1 < tr.end ? static_cast<std::int64_t>(tr.queues_at(r.t + 1)[q])
                                               : static_cast<std::int64_t>(tr.final_backlog[q]);
            ok = ok && next == static_cast<std::int64_t>(r.queue_lengths[q]) - r.served[q] + r.arrivals[q];
            if (!ok && bad++ == 0) first = "slot " + std::to_string(r.t) + " queue " + std::to_string(q + 1);
        }
    }
    for (std::size_t q = 0; q < cfg.n_queues; ++q)
        if (tr.total_arrivals[q] - tr.total_departures[q] != tr.final_backlog[q]) ++bad;
    return {"conservation", bad == 0,
            bad == 0 ? std::to_string(tr.detail.size()) + " slots balanced" : std::to_string(bad) + " violations, first at " + first};
}

CheckResult fifo_suite(const ValidationOptions& v) {
    const SystemConfig cfg = preset("S2");
    const Trace tr = simulate(cfg, {PolicyVariant::wbmw, 0.001}, options_for(v, 200'000));
    std::vector<Slot> last_arrival(cfg.n_queues, -1);
    std::vector<Slot> last_departure(cfg.n_queues, -1);
    std::size_t bad = 0;
    for (const auto& j : tr.jobs) {
        if (j.arrival < last_arrival[j.queue] || j.departure < last_departure[j.queue] || j.departure < j.arrival) ++bad;
        last_arrival[j.queue] = j.arrival;
        last_departure[j.queue] = j.departure;
    }
    return {"fifo", bad == 0, std::to_string(tr.jobs.size()) + " departure batches, " + std::to_string(bad) + " out of order"};
}

CheckResult work_conservation_suite(const ValidationOptions& v) {
    std::size_t bad = 0;
    std::ostringstream d;
    for (int id = 1; id <= 4; ++id) {
        const SystemConfig cfg = singleton_preset(id);
        for (auto variant : {PolicyVariant::qbmw, PolicyVariant::wbmw}) {
            const Trace tr = simulate(cfg, {variant, 0.001}, options_for(v, v.horizon));
            const auto hits = work_conservation_check(tr, cfg, variant == PolicyVariant::qbmw ? 0 : 1);
            bad += hits.size();
            d << "S" << id << "/" << to_string(variant) << ":" << hits.size() << " ";
        }
    }
    return {"work_conservation", bad == 0, d.str()};
}

CheckResult interval_suite(const ValidationOptions& v) {
    std::size_t bad = 0;
    std::size_t checked = 0;
    std::ostringstream d;
    for (int id = 1; id <= 4; ++id) {
        const SystemConfig cfg = singleton_preset(id);
        Trace tr = simulate(cfg, {PolicyVariant::qbmw, 0.001}, options_for(v, v.horizon));
        if (v.inject_fault && id == 1) corrupt_interval(tr, cfg, 0.001);
        const auto hits = interval_bound_check(tr, cfg, 0.001, PolicyVariant::qbmw);
        bad += hits.size();
        checked += tr.intervals.size();
        d << "S" << id << ":" << hits.size() << " ";
    }

    // W-BMW needs bounded inter-arrival times: one arrival every slot per queue.
    SystemConfig det;
    det.n_queues = 3;
    det.schedules = {Schedule{0}, Schedule{1}, Schedule{2}};
    det.switch_overhead = 2;
    for (int q = 0; q < 3; ++q) det.traffic.push_back({Deterministic{1}, FiniteDiscrete{{3, 5}, {0.5, 0.5}}, std::nullopt});
    const Trace tw = simulate(det, {PolicyVariant::wbmw, 0.001}, options_for(v, 200'000));
    const auto hits = interval_bound_check(tw, det, 0.001, PolicyVariant::wbmw);
    bad += hits.size();
    checked += tw.intervals.size();
    d << "deterministic/wbmw:" << hits.size();
    return {"interval_bounds", bad == 0, std::to_string(checked) + " intervals; violations " + d.str()};
}

CheckResult negative_control(const ValidationOptions& v) {
    const SystemConfig cfg = singleton_preset(1);
    Trace tr = simulate(cfg, {PolicyVariant::qbmw, 0.001}, options_for(v, 200'000));
    const auto k = corrupt_interval(tr, cfg, 0.001);
    if (!k) return {"negative_control", false, "no interval with a positive bound to corrupt"};
    const auto hits = interval_bound_check(tr, cfg, 0.001, PolicyVariant::qbmw);
    const bool caught = std::any_of(hits.begin(), hits.end(), [&](const IntervalViolation& h) { return h.interval == *k; });
    return {"negative_control", caught, caught ? "corrupted interval " + std::to_string(*k) + " detected" : "corruption missed"};
}

CheckResult little_suite(const ValidationOptions& v) {
    std::ostringstream d;
    bool ok = true;
    for (const char* name : {"S2", "S3", "S5"}) {
        const SystemConfig cfg = scenario_takes_beta(name) ? preset(name, 0.9) : preset(name);
        const Trace tr = simulate(cfg, {PolicyVariant::qbmw, 0.001}, options_for(v, v.horizon));
        const SimReport r = finalize(tr, cfg, 0.001);
        const double ratio = r.little_ratio.value_or(0.0);
        ok = ok && ratio >= 0.95 && ratio <= 1.05;
        d << name << ":" << ratio << " ";
    }
    return {"little_law", ok, d.str()};
}

CheckResult determinism_suite(const ValidationOptions& v) {
    const SystemConfig cfg = preset("S7", 0.9);
    const auto o = options_for(v, 100'000, 1);
    const Trace a = simulate(cfg, {PolicyVariant::vfmw, 0.5}, o);
    const Trace b = simulate(cfg, {PolicyVariant::vfmw, 0.5}, o);
    bool same = a.backlog == b.backlog && a.active == b.active && a.schedule == b.schedule &&
                a.jobs.size() == b.jobs.size() && a.intervals.size() == b.intervals.size();
    for (std::size_t k = 0; same && k < a.jobs.size(); ++k)
        same = a.jobs[k].arrival == b.jobs[k].arrival && a.jobs[k].departure == b.jobs[k].departure &&
               a.jobs[k].count == b.jobs[k].count && a.jobs[k].queue == b.jobs[k].queue;
    return {"determinism", same, same ? "repeated run identical" : "repeated run differs"};
}

CheckResult crn_suite(const ValidationOptions& v) {
    const SystemConfig cfg = preset("S4", 0.9);
    const auto o = options_for(v, 50'000, 1);
    const Trace a = simulate(cfg, {PolicyVariant::qbmw, 0.001}, o);
    const Trace b = simulate(cfg, {PolicyVariant::vfmw, 0.99}, o);
    bool same = a.detail.size() == b.detail.size();
    for (std::size_t k = 0; same && k < a.detail.size(); ++k) same = a.detail[k].arrivals == b.detail[k].arrivals;
    return {"common_random_numbers", same, same ? "arrival streams match across policies" : "arrival streams differ"};
}

}  // namespace

std::optional<std::size_t> corrupt_interval(Trace& trace, const SystemConfig& config, double alpha) {
    const double c = qbmw_interval_constant(config);
    std::optional<std::size_t> pick;
    double best = 0.0;
    for (std::size_t k = 0; k < trace.intervals.size(); ++k) {
        const auto& iv = trace.intervals[k];
        if (!iv.complete) continue;
        const double x = static_cast<double>(iv.total_queue);
        const double bound = c * x / bias_denominator(x, alpha);
        if (bound > best) {
            best = bound;
            pick = k;
        }
    }
    if (pick) trace.intervals[*pick].length = static_cast<Slot>(std::ceil(best)) - 1;
    return pick;
}

std::vector<CheckResult> run_validation(const ValidationOptions& options) {
    std::vector<CheckResult> out;
    out.push_back(lp_suite(options));
    out.push_back(conservation_suite(options));
    out.push_back(fifo_suite(options));
    out.push_back(work_conservation_suite(options));
    out.push_back(interval_suite(options));
    out.push_back(little_suite(options));
    out.push_back(determinism_suite(options));
    out.push_back(crn_suite(options));
    out.push_back(negative_control(options));
    return out;
}

nlohmann::json to_json(const std::vector<CheckResult>& checks) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& c : checks) a.push_back({{"check", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return a;
}

}  // namespace bmw
