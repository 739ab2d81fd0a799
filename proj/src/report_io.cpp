#include "bmw/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

namespace bmw {

using nlohmann::json;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::string policy_name(const PolicySpec& p) { return std::string(to_string(p.variant)); }

std::optional<double> mean_interval(const SimReport& r) {
    if (r.interval_stats.count == 0) return std::nullopt;
    return r.interval_stats.mean;
}

std::optional<Estimate> estimate_of(const std::vector<std::optional<double>>& values) {
    std::vector<double> v;
    for (const auto& x : values)
        if (x) v.push_back(*x);
    if (v.empty()) return std::nullopt;
    return estimate(v);
}

Estimate estimate_all(const std::vector<double>& values) { return estimate(values); }

std::size_t max_queues(std::span<const RunResult> results) {
    std::size_t n = 0;
    for (const auto& r : results) n = std::max(n, r.spec.config.n_queues);
    return n;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json estimate_json(const std::optional<Estimate>& e) {
    if (!e) return nullptr;
    return {{"mean", e->mean}, {"stderr", e->std_error}, {"n", e->n}};
}

bool same_group(const RunSpec& a, const RunSpec& b) {
    return a.scenario == b.scenario && a.beta_star == b.beta_star &&
           a.config.switch_overhead == b.config.switch_overhead && a.point == b.point && a.policy == b.policy;
}

}  // namespace

std::vector<AggregateRow> aggregate(std::span<const RunResult> results) {
    std::vector<AggregateRow> rows;
    std::vector<std::vector<const RunResult*>> members;
    for (std::size_t k = 0; k < results.size(); ++k) {
        if (k == 0 || !same_group(results[k - 1].spec, results[k].spec)) members.emplace_back();
        members.back().push_back(&results[k]);
    }

    for (const auto& group : members) {
        const RunSpec& s = group.front()->spec;
        AggregateRow a;
        a.scenario = s.scenario;
        a.policy = policy_name(s.policy);
        a.alpha = s.policy.alpha;
        a.beta_star = s.beta_star;
        a.switch_overhead = s.config.switch_overhead;
        a.runs = group.size();
        std::vector<std::optional<double>> delay, interval, little;
        std::vector<double> q, powered, sw;
        const std::size_t n = s.config.n_queues;
        std::vector<std::vector<std::optional<double>>> per_queue(n);
        for (const auto* r : group) {
            const SimReport& rep = r->report;
            if (rep.diverged) ++a.diverged_runs;
            delay.push_back(rep.total_avg_delay);
            interval.push_back(mean_interval(rep));
            little.push_back(rep.little_ratio);
            q.push_back(rep.time_avg_total_queue);
            powered.push_back(rep.powered_queue_mean);
            sw.push_back(rep.switch_fraction);
            for (std::size_t i = 0; i < n && i < rep.per_queue_avg_delay.size(); ++i)
                per_queue[i].push_back(rep.per_queue_avg_delay[i]);
        }
        a.total_avg_delay = estimate_of(delay);
        a.mean_interval = estimate_of(interval);
        a.little_ratio = estimate_of(little);
        a.time_avg_total_queue = estimate_all(q);
        a.powered_queue_mean = estimate_all(powered);
        a.switch_fraction = estimate_all(sw);
        for (const auto& pq : per_queue) a.per_queue_delay.push_back(estimate_of(pq));
        rows.push_back(std::move(a));
    }
    return rows;
}

void write_csv(std::ostream& out, std::span<const RunResult> results, bool with_aggregates) {
    const std::size_t n = max_queues(results);
    out << "scenario,policy,alpha,beta_star,T_s,seed,total_avg_delay";
    for (std::size_t q = 0; q < n; ++q) out << ",per_queue_delay_" << q + 1;
    out << ",time_avg_total_queue,powered_queue_mean,switch_fraction,mean_Tk,diverged,little_ratio\n";

    auto prefix = [&](const RunSpec& s, const std::string& seed) {
        out << s.scenario << ',' << policy_name(s.policy) << ',' << format_number(s.policy.alpha) << ','
            << cell(s.beta_star) << ',' << s.config.switch_overhead << ',' << seed;
    };

    const auto rows = with_aggregates ? aggregate(results) : std::vector<AggregateRow>{};
    std::size_t group = 0;
    for (std::size_t k = 0; k < results.size(); ++k) {
        const RunResult& r = results[k];
        const SimReport& rep = r.report;
        prefix(r.spec, std::to_string(r.spec.options.seed));
        out << ',' << cell(rep.total_avg_delay);
        for (std::size_t q = 0; q < n; ++q)
            out << ',' << (q < rep.per_queue_avg_delay.size() ? cell(rep.per_queue_avg_delay[q]) : std::string());
        out << ',' << format_number(rep.time_avg_total_queue) << ',' << format_number(rep.powered_queue_mean) << ','
            << format_number(rep.switch_fraction) << ',' << cell(mean_interval(rep)) << ','
            << (rep.diverged ? "true" : "false") << ',' << cell(rep.little_ratio) << '\n';

        const bool group_ends = k + 1 == results.size() || !same_group(results[k + 1].spec, r.spec);
        if (!with_aggregates || !group_ends) continue;
        const AggregateRow& a = rows[group++];
        for (int which = 0; which < 2; ++which) {
            auto pick = [&](const std::optional<Estimate>& e) -> std::optional<double> {
                if (!e) return std::nullopt;
                return which == 0 ? e->mean : e->std_error;
            };
            prefix(r.spec, which == 0 ? "mean" : "stderr");
            out << ',' << cell(pick(a.total_avg_delay));
            for (std::size_t q = 0; q < n; ++q)
                out << ',' << (q < a.per_queue_delay.size() ? cell(pick(a.per_queue_delay[q])) : std::string());
            out << ',' << cell(pick(a.time_avg_total_queue)) << ',' << cell(pick(a.powered_queue_mean)) << ','
                << cell(pick(a.switch_fraction)) << ',' << cell(pick(a.mean_interval)) << ','
                << (which == 0 ? (a.diverged_runs > 0 ? "true" : "false") : "") << ','
                << cell(pick(a.little_ratio)) << '\n';
        }
    }
}

std::string to_csv(std::span<const RunResult> results, bool with_aggregates) {
    std::ostringstream out;
    write_csv(out, results, with_aggregates);
    return out.str();
}

json report_to_json(const SimReport& r) {
    json per_queue = json::array();
    for (const auto& d : r.per_queue_avg_delay) per_queue.push_back(optional_json(d));
    return {{"total_avg_delay", optional_json(r.total_avg_delay)},
            {"per_queue_avg_delay", per_queue},
            {"per_queue_jobs", r.per_queue_jobs},
            {"time_avg_total_queue", r.time_avg_total_queue},
            {"time_avg_queue", r.time_avg_queue},
            {"powered_queue_mean", r.powered_queue_mean},
            {"alpha", r.alpha},
            {"switch_fraction", r.switch_fraction},
            {"interval_stats",
             {{"count", r.interval_stats.count},
              {"mean", r.interval_stats.count ? json(r.interval_stats.mean) : json(nullptr)},
              {"min", r.interval_stats.min},
              {"max", r.interval_stats.max}}},
            {"diverged", r.diverged},
            {"jobs_counted", r.jobs_counted},
            {"little_ratio", optional_json(r.little_ratio)},
            {"stability_slope", r.stability_slope},
            {"measured_slots", r.measured_slots}};
}

json results_to_json(std::span<const RunResult> results, bool with_aggregates) {
    json runs = json::array();
    for (const auto& r : results) {
        runs.push_back({{"scenario", r.spec.scenario},
                        {"policy", policy_name(r.spec.policy)},
                        {"alpha", r.spec.policy.alpha},
                        {"beta_star", optional_json(r.spec.beta_star)},
                        {"T_s", r.spec.config.switch_overhead},
                        {"seed", r.spec.options.seed},
                        {"horizon", r.spec.options.horizon},
                        {"warmup", r.spec.options.warmup},
                        {"report", report_to_json(r.report)}});
    }
    json out{{"runs", std::move(runs)}};
    if (with_aggregates) {
        json agg = json::array();
        for (const auto& a : aggregate(results)) {
            json per_queue = json::array();
            for (const auto& e : a.per_queue_delay) per_queue.push_back(estimate_json(e));
            agg.push_back({{"scenario", a.scenario},
                           {"policy", a.policy},
                           {"alpha", a.alpha},
                           {"beta_star", optional_json(a.beta_star)},
                           {"T_s", a.switch_overhead},
                           {"runs", a.runs},
                           {"diverged_runs", a.diverged_runs},
                           {"total_avg_delay", estimate_json(a.total_avg_delay)},
                           {"per_queue_delay", per_queue},
                           {"time_avg_total_queue", estimate_json(a.time_avg_total_queue)},
                           {"powered_queue_mean", estimate_json(a.powered_queue_mean)},
                           {"switch_fraction", estimate_json(a.switch_fraction)},
                           {"mean_Tk", estimate_json(a.mean_interval)},
                           {"little_ratio", estimate_json(a.little_ratio)}});
        }
        out["aggregates"] = std::move(agg);
    }
    return out;
}

bool any_diverged(std::span<const RunResult> results) {
    for (const auto& r : results)
        if (r.report.diverged) return true;
    return false;
}

}  // namespace bmw
