#include "bmw/engine.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace bmw {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
    std::string s = "invalid configuration";
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "; " : ": ") + v[k];
    return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

void QueueState::arrive(QueueIndex q, Slot arrival_slot, std::uint32_t count) {
    if (count == 0) return;
    auto& lane = lanes_[q];
    if (!lane.fifo.empty() && lane.fifo.back().arrival == arrival_slot)
        lane.fifo.back().count += count;
    else
        lane.fifo.push_back({arrival_slot, count});
    lane.backlog += count;
}

bool QueueState::consistent() const {
    for (const auto& lane : lanes_) {
        std::uint64_t sum = 0;
        Slot prev = std::numeric_limits<Slot>::min();
        for (const auto& b : lane.fifo) {
            if (b.count == 0 || b.arrival <= prev) return false;
            prev = b.arrival;
            sum += b.count;
        }
        if (sum != lane.backlog) return false;
    }
    return true;
}

std::uint64_t Trace::total_queue_at(Slot t) const {
    const auto row = queues_at(t);
    return std::accumulate(row.begin(), row.end(), std::uint64_t{0});
}

Simulator::Simulator(SystemConfig config, PolicySpec policy, SimOptions options)
    : config_(std::move(config)), policy_(policy), options_(options), queues_(config_.n_queues) {
    auto violations = validate_config(config_);
    for (auto& v : validate_policy(policy_)) violations.push_back(std::move(v));
    if (options_.horizon <= 0) violations.emplace_back("horizon must be positive");
    if (options_.warmup < 0) violations.emplace_back("warmup must be nonnegative");
    if (options_.warmup >= options_.horizon) violations.emplace_back("warmup exceeds horizon");
    if (options_.detail_stride < 0) violations.emplace_back("detail stride must be nonnegative");
    if (config_.schedules.size() > std::numeric_limits<std::uint16_t>::max())
        violations.emplace_back("too many schedules");
    if (!violations.empty()) throw ConfigError(std::move(violations));

    const std::size_t n = config_.n_queues;
    arrival_streams_.reserve(n);
    service_streams_.reserve(n);
    for (std::size_t q = 0; q < n; ++q) {
        arrival_streams_.emplace_back(options_.seed, q, StreamRole::arrival);
        service_streams_.emplace_back(options_.seed, q, StreamRole::service);
    }
    q_obs_.assign(n, 0.0);
    w_obs_.assign(n, 0.0);
    served_scratch_.assign(n, 0);
    arrivals_scratch_.assign(n, 0);

    trace_.n_queues = n;
    trace_.horizon = options_.horizon;
    trace_.warmup = options_.warmup;
    trace_.seed = options_.seed;
    trace_.policy = policy_;
    trace_.switch_overhead = config_.switch_overhead;
    trace_.detail_stride = options_.detail_stride;
    trace_.total_arrivals.assign(n, 0);
    trace_.total_departures.assign(n, 0);
    const auto slots = static_cast<std::size_t>(options_.horizon);
    trace_.backlog.reserve(slots * n);
    trace_.active.reserve(slots);
    trace_.schedule.reserve(slots);
}

void Simulator::preload(QueueIndex q, std::uint32_t count) {
    if (started_) throw std::logic_error("preload after the first step");
    queues_.arrive(q, now_, count);
    trace_.total_arrivals[q] += count;
    total_backlog_ += count;
}

void Simulator::observe(Slot t) {
    for (std::size_t q = 0; q < config_.n_queues; ++q) {
        q_obs_[q] = static_cast<double>(queues_.backlog(q));
        w_obs_[q] = static_cast<double>(queues_.hol_wait(q, t));
    }
}

void Simulator::start_trace() {
    started_ = true;
    observe(now_);
    const Observation obs{q_obs_, w_obs_};
    server_ = initial_server_state(policy_, obs, config_.schedules);
    IntervalRecord first;
    first.start = now_;
    first.schedule = server_.current;
    first.bias = server_.frozen_bias;
    for (std::size_t q = 0; q < config_.n_queues; ++q) {
        const auto qv = static_cast<std::uint32_t>(queues_.backlog(q));
        const auto wv = static_cast<std::uint32_t>(queues_.hol_wait(q, now_));
        first.total_queue += qv;
        first.total_wait += wv;
        trace_.interval_queues.push_back(qv);
        trace_.interval_waits.push_back(wv);
    }
    trace_.intervals.push_back(first);
}

void Simulator::step() {
    if (finished()) return;
    if (!started_) start_trace();
    const Slot t = now_;
    const std::size_t n = config_.n_queues;
    observe(t);
    const Observation obs{q_obs_, w_obs_};

    if (server_.mode == ServerMode::active) {
        const Decision d = decide(policy_, obs, server_, config_.schedules, config_.switch_overhead, t);
        double bias = 1.0;
        if (d.is_switch()) {
            bias = interval_bias(policy_, obs);
            pending_interval_ = IntervalRecord{};
            pending_interval_.start = t;
            pending_interval_.schedule = d.target;
            pending_interval_.bias = bias;
            pending_queues_.assign(n, 0);
            pending_waits_.assign(n, 0);
            for (std::size_t q = 0; q < n; ++q) {
                pending_queues_[q] = static_cast<std::uint32_t>(q_obs_[q]);
                pending_waits_[q] = static_cast<std::uint32_t>(w_obs_[q]);
                pending_interval_.total_queue += pending_queues_[q];
                pending_interval_.total_wait += pending_waits_[q];
            }
        }
        apply_decision(server_, d, t, config_.switch_overhead, bias);
    }
    const bool active = server_.mode == ServerMode::active;

    for (std::size_t q = 0; q < n; ++q) trace_.backlog.push_back(static_cast<std::uint32_t>(queues_.backlog(q)));
    trace_.active.push_back(active ? 1 : 0);
    trace_.schedule.push_back(static_cast<std::uint16_t>(active ? server_.current : server_.target));

    std::fill(served_scratch_.begin(), served_scratch_.end(), 0u);
    if (active) {
        for (QueueIndex q : config_.schedules[server_.current].members()) {
            if (queues_.backlog(q) == 0) continue;
            const std::uint32_t offered = sample(service_streams_[q], config_.traffic[q].service, t);
            const auto used = queues_.serve(q, offered, [&](Slot arrival, std::uint32_t count) {
                trace_.jobs.push_back({static_cast<std::uint32_t>(q), count, arrival, t});
            });
            served_scratch_[q] = used;
            trace_.total_departures[q] += used;
            total_backlog_ -= used;
        }
    }

    for (std::size_t q = 0; q < n; ++q) {
        const std::uint32_t a = sample(arrival_streams_[q], config_.traffic[q].arrival, t);
        arrivals_scratch_[q] = a;
        if (a == 0) continue;
        queues_.arrive(q, t + 1, a);
        trace_.total_arrivals[q] += a;
        total_backlog_ += a;
    }

    if (options_.detail_stride > 0 && t % options_.detail_stride == 0) {
        SlotRecord rec;
        rec.t = t;
        rec.queue_lengths.resize(n);
        rec.waiting_times.resize(n);
        for (std::size_t q = 0; q < n; ++q) {
            rec.queue_lengths[q] = static_cast<std::uint32_t>(q_obs_[q]);
            rec.waiting_times[q] = static_cast<std::uint32_t>(w_obs_[q]);
        }
        rec.arrivals = arrivals_scratch_;
        rec.served = served_scratch_;
        rec.mode = active ? ServerMode::active : ServerMode::switching;
        rec.schedule = active ? server_.current : server_.target;
        trace_.detail.push_back(std::move(rec));
    }

    if (!active && --server_.remaining == 0) {
        const IntervalMark closed = on_switch_complete(server_, t + 1);
        auto& open = trace_.intervals.back();
        open.length = closed.length;
        open.complete = true;
        trace_.intervals.push_back(pending_interval_);
        trace_.interval_queues.insert(trace_.interval_queues.end(), pending_queues_.begin(), pending_queues_.end());
        trace_.interval_waits.insert(trace_.interval_waits.end(), pending_waits_.begin(), pending_waits_.end());
    }

    now_ = t + 1;
    if (total_backlog_ > options_.divergence_ceiling) diverged_ = true;
}

void Simulator::run() {
    while (!finished()) step();
}

Trace Simulator::finish() && {
    if (!started_) start_trace();
    trace_.end = now_;
    trace_.diverged = diverged_;
    if (server_.mode == ServerMode::switching) {
        // The trigger already closed the running interval; the new one is open.
        auto& open = trace_.intervals.back();
        open.length = server_.trigger_slot - open.start;
        open.complete = true;
        pending_interval_.length = now_ - pending_interval_.start;
        pending_interval_.complete = false;
        trace_.intervals.push_back(pending_interval_);
        trace_.interval_queues.insert(trace_.interval_queues.end(), pending_queues_.begin(), pending_queues_.end());
        trace_.interval_waits.insert(trace_.interval_waits.end(), pending_waits_.begin(), pending_waits_.end());
    } else {
        auto& open = trace_.intervals.back();
        open.length = now_ - open.start;
        open.complete = false;
    }
    trace_.final_backlog.resize(config_.n_queues);
    for (std::size_t q = 0; q < config_.n_queues; ++q) trace_.final_backlog[q] = queues_.backlog(q);
    return std::move(trace_);
}

Trace simulate(const SystemConfig& config, const PolicySpec& policy, const SimOptions& options) {
    Simulator sim(config, policy, options);
    sim.run();
    return std::move(sim).finish();
}

}  // namespace bmw
