#include "bmw/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "bmw/policy.hpp"

namespace bmw {

namespace {

/// (x)^(1-alpha) with a lookup table for small backlogs.
class PowerTable {
public:
    explicit PowerTable(double exponent) : exponent_(exponent), table_(4096) {
        for (std::size_t k = 0; k < table_.size(); ++k) table_[k] = std::pow(static_cast<double>(k), exponent);
    }
    double operator()(std::uint64_t x) const {
        return x < table_.size() ? table_[x] : std::pow(static_cast<double>(x), exponent_);
    }

private:
    double exponent_;
    std::vector<double> table_;
};

}  // namespace

SimReport finalize(const Trace& trace, const SystemConfig& config, double alpha) {
    const std::size_t n = trace.n_queues;
    const Slot lo = std::min(trace.warmup, trace.end);
    const Slot hi = trace.end;

    SimReport r;
    r.alpha = alpha;
    r.measured_slots = hi - lo;
    r.time_avg_queue.assign(n, 0.0);
    r.per_queue_avg_delay.assign(n, std::nullopt);
    r.per_queue_jobs.assign(n, 0);

    if (r.measured_slots > 0) {
        const PowerTable power(1.0 - alpha);
        std::vector<std::uint64_t> sums(n, 0);
        std::uint64_t total = 0;
        double powered = 0.0;
        Slot switching = 0;
        for (Slot t = lo; t < hi; ++t) {
            const auto row = trace.queues_at(t);
            std::uint64_t s = 0;
            for (std::size_t q = 0; q < n; ++q) {
                sums[q] += row[q];
                s += row[q];
            }
            total += s;
            powered += power(s);
            if (!trace.active[static_cast<std::size_t>(t)]) ++switching;
        }
        const double m = static_cast<double>(r.measured_slots);
        for (std::size_t q = 0; q < n; ++q) r.time_avg_queue[q] = static_cast<double>(sums[q]) / m;
        r.time_avg_total_queue = static_cast<double>(total) / m;
        r.powered_queue_mean = powered / m;
        r.switch_fraction = static_cast<double>(switching) / m;
    }

    std::vector<std::uint64_t> delay_sum(n, 0);
    for (const auto& job : trace.jobs) {
        if (job.arrival < lo || job.departure >= hi) continue;
        delay_sum[job.queue] += static_cast<std::uint64_t>(job_delay(job)) * job.count;
        r.per_queue_jobs[job.queue] += job.count;
    }
    std::uint64_t all_delay = 0;
    for (std::size_t q = 0; q < n; ++q) {
        r.jobs_counted += r.per_queue_jobs[q];
        all_delay += delay_sum[q];
        if (r.per_queue_jobs[q] > 0)
            r.per_queue_avg_delay[q] = static_cast<double>(delay_sum[q]) / static_cast<double>(r.per_queue_jobs[q]);
    }
    if (r.jobs_counted > 0) r.total_avg_delay = static_cast<double>(all_delay) / static_cast<double>(r.jobs_counted);

    double length_sum = 0.0;
    for (const auto& iv : trace.intervals) {
        if (!iv.complete || iv.start < lo || iv.start >= hi) continue;
        if (r.interval_stats.count == 0) {
            r.interval_stats.min = iv.length;
            r.interval_stats.max = iv.length;
        }
        r.interval_stats.min = std::min(r.interval_stats.min, iv.length);
        r.interval_stats.max = std::max(r.interval_stats.max, iv.length);
        length_sum += static_cast<double>(iv.length);
        ++r.interval_stats.count;
    }
    if (r.interval_stats.count > 0) r.interval_stats.mean = length_sum / static_cast<double>(r.interval_stats.count);

    r.stability_slope = stability_slope(trace);
    r.diverged = trace.diverged || (trace.end >= kMinSlopeSlots && r.stability_slope > kDivergenceSlope);

    const auto lambda = config.arrival_rates();
    const double lambda_total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
    if (r.total_avg_delay && lambda_total > 0.0) r.little_ratio = little_consistency(r, lambda_total);
    return r;
}

double little_consistency(const SimReport& report, double lambda_total) {
    if (report.jobs_counted == 0 || !report.total_avg_delay)
        throw std::domain_error("Little's-law ratio undefined without completed jobs");
    if (!(lambda_total > 0.0)) throw std::domain_error("Little's-law ratio needs a positive arrival rate");
    return report.time_avg_total_queue / (lambda_total * *report.total_avg_delay);
}

double lyapunov_q(std::span<const double> queue_lengths, std::span<const double> mu) {
    if (queue_lengths.size() != mu.size()) throw std::invalid_argument("length mismatch");
    double l = 0.0;
    for (std::size_t q = 0; q < mu.size(); ++q) l += queue_lengths[q] * queue_lengths[q] / mu[q];
    return l;
}

double lyapunov_w(std::span<const double> waiting_times, std::span<const double> rho) {
    if (waiting_times.size() != rho.size()) throw std::invalid_argument("length mismatch");
    double l = 0.0;
    for (std::size_t q = 0; q < rho.size(); ++q) l += rho[q] * waiting_times[q] * waiting_times[q];
    return l;
}

double qbmw_interval_constant(const SystemConfig& config) {
    const double ts = config.switch_overhead;
    const double nk = static_cast<double>(config.n_queues * config.max_concurrency());
    return ts / (nk * (config.max_arrival_bound() + (1.0 + ts) * config.max_service_bound()));
}

double wbmw_interval_constant(const SystemConfig& config, std::uint32_t vmax) {
    const double ts = config.switch_overhead;
    const double nk = static_cast<double>(config.n_queues * config.max_concurrency());
    return ts / (nk * (1.0 + (1.0 + ts) * config.max_service_bound() * static_cast<double>(vmax)));
}

std::optional<std::uint32_t> system_interarrival_bound(const SystemConfig& config) {
    std::uint32_t vmax = 0;
    for (const auto& t : config.traffic) {
        const auto b = interarrival_bound(t);
        if (!b) return std::nullopt;
        vmax = std::max(vmax, *b);
    }
    return vmax;
}

std::vector<IntervalViolation> interval_bound_check(const Trace& trace, const SystemConfig& config, double alpha,
                                                    PolicyVariant variant) {
    if (trace.policy.variant != variant) throw std::invalid_argument("trace was produced by a different policy");
    double c = 0.0;
    if (variant == PolicyVariant::qbmw) {
        c = qbmw_interval_constant(config);
    } else if (variant == PolicyVariant::wbmw) {
        const auto vmax = system_interarrival_bound(config);
        if (!vmax) throw std::invalid_argument("inter-arrival times are unbounded; the W-BMW bound does not apply");
        c = wbmw_interval_constant(config, *vmax);
    } else {
        throw std::invalid_argument("interval bounds exist only for the biased max-weight policies");
    }

    std::vector<IntervalViolation> out;
    for (std::size_t k = 0; k < trace.intervals.size(); ++k) {
        const auto& iv = trace.intervals[k];
        if (!iv.complete) continue;
        const double x = static_cast<double>(variant == PolicyVariant::qbmw ? iv.total_queue : iv.total_wait);
        const double bound = c * x / bias_denominator(x, alpha);
        if (static_cast<double>(iv.length) < bound) out.push_back({k, iv.start, iv.length, bound});
    }
    return out;
}

double stability_slope(const Trace& trace) {
    const Slot end = trace.end;
    const Slot begin = end / 2;
    const Slot count = end - begin;
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    const double t_mean = (static_cast<double>(begin) + static_cast<double>(end - 1)) / 2.0;
    double y_mean = 0.0;
    for (Slot t = begin; t < end; ++t) y_mean += static_cast<double>(trace.total_queue_at(t));
    y_mean /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (Slot t = begin; t < end; ++t) {
        const double dx = static_cast<double>(t) - t_mean;
        sxy += dx * (static_cast<double>(trace.total_queue_at(t)) - y_mean);
        sxx += dx * dx;
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

double fairness_ratio(const SimReport& report, std::vector<std::string>* warnings) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    bool any = false;
    for (std::size_t q = 0; q < report.per_queue_avg_delay.size(); ++q) {
        const auto& d = report.per_queue_avg_delay[q];
        if (!d) {
            if (warnings) warnings->push_back("queue " + std::to_string(q + 1) + " has no completed jobs");
            continue;
        }
        any = true;
        lo = std::min(lo, *d);
        hi = std::max(hi, *d);
    }
    if (!any) throw std::domain_error("fairness ratio undefined: no per-queue delay");
    return hi / lo;
}

std::vector<Slot> work_conservation_check(const Trace& trace, const SystemConfig& config, Slot allowed_latency) {
    for (const auto& s : config.schedules)
        if (s.size() != 1) throw std::invalid_argument("work-conservation predicate needs singleton schedules");
    std::vector<Slot> out;
    Slot run = 0;
    for (Slot t = 0; t < trace.end; ++t) {
        const auto idx = static_cast<std::size_t>(t);
        bool idle_with_backlog = false;
        if (trace.active[idx]) {
            const auto row = trace.queues_at(t);
            const QueueIndex served = config.schedules[trace.schedule[idx]].members().front();
            if (row[served] == 0)
                idle_with_backlog = std::any_of(row.begin(), row.end(), [](std::uint32_t x) { return x > 0; });
        }
        run = idle_with_backlog ? run + 1 : 0;
        if (run > allowed_latency) out.push_back(t);
    }
    return out;
}

DriftSummary lyapunov_drift(const Trace& trace, std::span<const double> mu, std::uint64_t threshold) {
    DriftSummary s;
    const std::size_t n = trace.n_queues;
    std::vector<double> a(n), b(n);
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < trace.intervals.size(); ++k) {
        if (trace.intervals[k].total_queue < threshold) continue;
        const auto qa = trace.interval_queues_at(k);
        const auto qb = trace.interval_queues_at(k + 1);
        for (std::size_t q = 0; q < n; ++q) {
            a[q] = qa[q];
            b[q] = qb[q];
        }
        sum += lyapunov_q(b, mu) - lyapunov_q(a, mu);
        ++s.count;
    }
    if (s.count > 0) s.mean_drift = sum / static_cast<double>(s.count);
    return s;
}

Estimate estimate(std::span<const double> values) {
    Estimate e;
    e.n = values.size();
    if (e.n == 0) return e;
    e.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(e.n);
    if (e.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - e.mean) * (v - e.mean);
        e.std_error = std::sqrt(ss / static_cast<double>(e.n - 1)) / std::sqrt(static_cast<double>(e.n));
    }
    return e;
}

bool clearly_below(const Estimate& a, const Estimate& b, double k) { return a.upper(k) < b.lower(k); }

}  // namespace bmw
