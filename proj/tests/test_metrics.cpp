#include <cmath>

#include "bmw/metrics.hpp"
#include "bmw/scenarios.hpp"
#include "doctest.h"

using namespace bmw;

namespace {

SimOptions opts(Slot horizon, Slot warmup, std::uint64_t seed = 1) {
    SimOptions o;
    o.horizon = horizon;
    o.warmup = warmup;
    o.seed = seed;
    return o;
}

/// A hand-built trace with a given total-queue path on one queue.
Trace line_trace(std::vector<std::uint32_t> q) {
    Trace tr;
    tr.n_queues = 1;
    tr.end = static_cast<Slot>(q.size());
    tr.horizon = tr.end;
    tr.backlog = std::move(q);
    tr.active.assign(tr.backlog.size(), 1);
    tr.schedule.assign(tr.backlog.size(), 0);
    return tr;
}

}  // namespace

TEST_CASE("report of a run without completed jobs leaves delays undefined") {
    SystemConfig cfg = preset("S1");
    for (auto& t : cfg.traffic) t.arrival = Bernoulli{0.0};
    const Trace tr = simulate(cfg, {PolicyVariant::qbmw, 0.001}, opts(1000, 100));
    const SimReport r = finalize(tr, cfg, 0.001);
    CHECK_FALSE(r.total_avg_delay);
    CHECK_FALSE(r.little_ratio);
    CHECK(r.jobs_counted == 0);
    CHECK(r.time_avg_total_queue == 0.0);
    CHECK(r.switch_fraction == 0.0);
    CHECK_THROWS_AS(little_consistency(r, 1.0), std::domain_error);
    CHECK_THROWS_AS(fairness_ratio(r), std::domain_error);
}

TEST_CASE("switch fraction counts switching slots in the window") {
    Trace tr = line_trace(std::vector<std::uint32_t>(30, 1));
    for (int k : {3, 11, 20}) tr.active[k] = 0;
    SystemConfig cfg;
    cfg.n_queues = 1;
    cfg.schedules = {Schedule{0}};
    cfg.traffic = {{Bernoulli{0.1}, Deterministic{1}, std::nullopt}};
    const SimReport r = finalize(tr, cfg, 0.5);
    CHECK(r.switch_fraction == doctest::Approx(0.1));
    CHECK(r.time_avg_total_queue == 1.0);
    CHECK(r.powered_queue_mean == 1.0);
}

TEST_CASE("Lyapunov functions") {
    const std::vector<double> q{1, 2}, mu{0.5, 0.5};
    CHECK(lyapunov_q(q, mu) == doctest::Approx(10.0));
    const std::vector<double> w{3, 1}, rho{0.2, 0.5};
    CHECK(lyapunov_w(w, rho) == doctest::Approx(2.3));
    const std::vector<double> short_mu{1.0};
    CHECK_THROWS(lyapunov_q(q, short_mu));
}

TEST_CASE("fairness ratio") {
    SimReport r;
    r.per_queue_avg_delay = {4.0, 4.0, 4.0, 4.0};
    CHECK(fairness_ratio(r) == 1.0);
    r.per_queue_avg_delay = {2.0, 8.0};
    CHECK(fairness_ratio(r) == 4.0);
    r.per_queue_avg_delay = {2.0, std::nullopt, 3.0};
    std::vector<std::string> warnings;
    CHECK(fairness_ratio(r, &warnings) == doctest::Approx(1.5));
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("queue 2") != std::string::npos);
}

TEST_CASE("interval constants") {
    const SystemConfig s1 = preset("S1");
    // N=4, K=1, A_max=1, S_max=1, T_s=1: 1 / (4 * (1 + 2)).
    CHECK(qbmw_interval_constant(s1) == doctest::Approx(1.0 / 12.0));
    CHECK(wbmw_interval_constant(s1, 3) == doctest::Approx(1.0 / (4.0 * 7.0)));
    CHECK_FALSE(system_interarrival_bound(s1));
    const SystemConfig s7 = preset("S7", 0.9);
    CHECK(qbmw_interval_constant(s7) == doctest::Approx(1.0 / (8.0 * 2.0 * 3.0)));
}

TEST_CASE("interval bound check holds on Q-BMW runs and rejects misuse") {
    const SystemConfig cfg = preset("S2");
    const Trace tr = simulate(cfg, {PolicyVariant::qbmw, 0.3}, opts(100'000, 1000, 2));
    CHECK(interval_bound_check(tr, cfg, 0.3, PolicyVariant::qbmw).empty());
    CHECK_THROWS_AS(interval_bound_check(tr, cfg, 0.3, PolicyVariant::wbmw), std::invalid_argument);
    const Trace w = simulate(cfg, {PolicyVariant::wbmw, 0.3}, opts(1000, 10, 2));
    CHECK_THROWS_AS(interval_bound_check(w, cfg, 0.3, PolicyVariant::wbmw), std::invalid_argument);
    const Trace v = simulate(cfg, {PolicyVariant::vfmw, 0.3}, opts(1000, 10, 2));
    CHECK_THROWS_AS(interval_bound_check(v, cfg, 0.3, PolicyVariant::vfmw), std::invalid_argument);
}

TEST_CASE("a shortened interval is caught") {
    const SystemConfig cfg = preset("S3", 0.95);
    Trace tr = simulate(cfg, {PolicyVariant::qbmw, 0.001}, opts(100'000, 1000, 3));
    REQUIRE(interval_bound_check(tr, cfg, 0.001, PolicyVariant::qbmw).empty());
    tr.intervals[1].length = 0;
    tr.intervals[1].total_queue = 10'000;
    const auto v = interval_bound_check(tr, cfg, 0.001, PolicyVariant::qbmw);
    REQUIRE(v.size() == 1);
    CHECK(v[0].interval == 1);
    CHECK(v[0].bound > 0.0);
}

TEST_CASE("stability slope of synthetic paths") {
    CHECK(stability_slope(line_trace({})) == 0.0);
    CHECK(stability_slope(line_trace({5})) == 0.0);
    CHECK(stability_slope(line_trace(std::vector<std::uint32_t>(100, 7))) == 0.0);
    std::vector<std::uint32_t> ramp(1000);
    for (std::size_t t = 0; t < ramp.size(); ++t) ramp[t] = static_cast<std::uint32_t>(3 * t);
    CHECK(stability_slope(line_trace(ramp)) == doctest::Approx(3.0));
    // Only the second half counts.
    std::vector<std::uint32_t> bend(1000);
    for (std::size_t t = 0; t < bend.size(); ++t) bend[t] = static_cast<std::uint32_t>(t < 500 ? 4 * t : 2000);
    CHECK(stability_slope(line_trace(bend)) == doctest::Approx(0.0));
}

TEST_CASE("powered mean approaches the plain mean for tiny alpha") {
    const SystemConfig cfg = preset("S1");
    const Trace tr = simulate(cfg, {PolicyVariant::qbmw, 0.001}, opts(200'000, 20'000, 4));
    const SimReport r = finalize(tr, cfg, 0.001);
    CHECK(r.powered_queue_mean == doctest::Approx(r.time_avg_total_queue).epsilon(0.02));
    CHECK(r.powered_queue_mean <= r.time_avg_total_queue);
    CHECK_FALSE(r.diverged);
    CHECK(std::abs(r.stability_slope) < 1e-3);
    CHECK(r.interval_stats.count > 0);
    CHECK(r.interval_stats.min >= cfg.switch_overhead);
    CHECK(r.little_ratio.value() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("symmetric load gives near-equal per-queue delays") {
    const SystemConfig cfg = preset("S3", 0.9);
    const Trace tr = simulate(cfg, {PolicyVariant::qbmw, 0.001}, opts(300'000, 30'000, 5));
    const SimReport r = finalize(tr, cfg, 0.001);
    const double f = fairness_ratio(r);
    CHECK(f >= 1.0);
    CHECK(f <= 1.2);
}

TEST_CASE("Max-Weight with switching cost diverges") {
    const SystemConfig cfg = preset("S1");
    const Trace tr = simulate(cfg, {PolicyVariant::max_weight, 0.001}, opts(100'000, 10'000, 1));
    const SimReport r = finalize(tr, cfg, 0.001);
    CHECK(r.stability_slope > kDivergenceSlope);
    CHECK(r.diverged);
}

TEST_CASE("Lyapunov drift is negative at large backlogs under Q-BMW") {
    const SystemConfig cfg = preset("S1");
    const Trace tr = simulate(cfg, {PolicyVariant::qbmw, 0.001}, opts(200'000, 1000, 6));
    const auto mu = cfg.service_rates();
    const DriftSummary all = lyapunov_drift(tr, mu, 0);
    CHECK(all.count + 1 == tr.intervals.size());
    const DriftSummary high = lyapunov_drift(tr, mu, 60);
    CHECK(high.count > 0);
    CHECK(high.mean_drift < 0.0);
}

TEST_CASE("work-conservation check") {
    const SystemConfig cfg = preset("S2");
    const Trace q = simulate(cfg, {PolicyVariant::qbmw, 0.001}, opts(50'000, 100, 7));
    CHECK(work_conservation_check(q, cfg, 0).empty());
    const Trace w = simulate(cfg, {PolicyVariant::wbmw, 0.001}, opts(50'000, 100, 7));
    CHECK(work_conservation_check(w, cfg, 1).empty());
    // VFMW keeps serving an emptied queue until its frame ends.
    const Trace v = simulate(cfg, {PolicyVariant::vfmw, 0.9}, opts(50'000, 100, 7));
    CHECK_FALSE(work_conservation_check(v, cfg, 0).empty());
    const SystemConfig s5 = preset("S5", 0.9);
    CHECK_THROWS_AS(work_conservation_check(q, s5, 0), std::invalid_argument);
}

TEST_CASE("estimates") {
    const std::vector<double> v{1, 2, 3, 4};
    const Estimate e = estimate(v);
    CHECK(e.mean == 2.5);
    CHECK(e.n == 4);
    CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(estimate(std::vector<double>{}).n == 0);
    CHECK(estimate(std::vector<double>{7}).std_error == 0.0);
    const Estimate lo{1.0, 0.1, 10}, hi{2.0, 0.1, 10}, wide{1.5, 0.5, 10};
    CHECK(clearly_below(lo, hi));
    CHECK_FALSE(clearly_below(hi, lo));
    CHECK_FALSE(clearly_below(lo, wide));
}
