#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bmw/model.hpp"
#include "bmw/policy.hpp"
#include "bmw/traffic.hpp"

namespace bmw {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    ConfigError(const std::string& message) : std::runtime_error(message) {}
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Per-queue FIFO of job batches keyed by arrival slot.
///
/// A job that arrives with A_i(t) carries arrival slot t+1, the first slot in
/// which it is counted by Q_i. The HOL waiting time is therefore
/// W_i(t) = t - (arrival slot of the head job), or 0 for an empty queue.
class QueueState {
public:
    explicit QueueState(std::size_t n_queues) : lanes_(n_queues) {}

    std::size_t size() const noexcept { return lanes_.size(); }
    std::uint64_t backlog(QueueIndex q) const noexcept { return lanes_[q].backlog; }
    std::uint64_t served(QueueIndex q) const noexcept { return lanes_[q].served; }

    Slot hol_wait(QueueIndex q, Slot t) const noexcept {
        const auto& lane = lanes_[q];
        return lane.fifo.empty() ? 0 : t - lane.fifo.front().arrival;
    }

    void arrive(QueueIndex q, Slot arrival_slot, std::uint32_t count);

    /// Removes up to `amount` jobs from the head of queue q and reports each
    /// removed batch as on_departure(arrival_slot, count). Returns the number
    /// actually removed, min(amount, backlog).
    template <class OnDeparture>
    std::uint32_t serve(QueueIndex q, std::uint32_t amount, OnDeparture&& on_departure) {
        auto& lane = lanes_[q];
        std::uint32_t done = 0;
        while (done < amount && !lane.fifo.empty()) {
            auto& head = lane.fifo.front();
            const std::uint32_t take = std::min(amount - done, head.count);
            on_departure(head.arrival, take);
            head.count -= take;
            done += take;
            if (head.count == 0) lane.fifo.pop_front();
        }
        lane.backlog -= done;
        lane.served += done;
        return done;
    }

    /// Backlog equals the sum of batch counts and arrival slots strictly increase.
    bool consistent() const;

private:
    struct Batch {
        Slot arrival;
        std::uint32_t count;
    };
    struct Lane {
        std::deque<Batch> fifo;
        std::uint64_t backlog = 0;
        std::uint64_t served = 0;
    };
    std::vector<Lane> lanes_;
};

/// Completed jobs of one queue that arrived in the same slot and left in the same slot.
struct JobRecord {
    std::uint32_t queue = 0;
    std::uint32_t count = 0;
    Slot arrival = 0;
    Slot departure = 0;
};

/// Delay of a completed job: departure - arrival + 1 slots.
inline Slot job_delay(const JobRecord& job) { return job.departure - job.arrival + 1; }

struct SlotRecord {
    Slot t = 0;
    std::vector<std::uint32_t> queue_lengths;
    std::vector<std::uint32_t> waiting_times;
    std::vector<std::uint32_t> arrivals;
    std::vector<std::uint32_t> served;
    ServerMode mode = ServerMode::active;
    ScheduleIndex schedule = 0;
};

struct IntervalRecord {
    Slot start = 0;
    Slot length = 0;
    ScheduleIndex schedule = 0;
    std::uint64_t total_queue = 0;
    std::uint64_t total_wait = 0;
    /// F(Q(t_k)) or G(W(t_k)) frozen for this interval.
    double bias = 1.0;
    /// False for the interval still running when the trace ended.
    bool complete = false;
};

/// Everything a run leaves behind.
///
/// The dense per-slot columns cover [0, end); the optional detail records are
/// sampled every detail_stride slots. Intervals tile [0, end) without gaps.
struct Trace {
    std::size_t n_queues = 0;
    Slot horizon = 0;
    Slot warmup = 0;
    /// First slot not simulated (== horizon unless the run diverged).
    Slot end = 0;
    std::uint64_t seed = 0;
    PolicySpec policy;
    int switch_overhead = 1;
    bool diverged = false;

    /// Q_i(t) at the start of slot t, row-major [t * n_queues + i].
    std::vector<std::uint32_t> backlog;
    /// M(t).
    std::vector<std::uint8_t> active;
    /// I(t): the schedule served, or the one being switched to.
    std::vector<std::uint16_t> schedule;

    std::vector<IntervalRecord> intervals;
    /// Q(t_k) and W(t_k), row-major [k * n_queues + i].
    std::vector<std::uint32_t> interval_queues;
    std::vector<std::uint32_t> interval_waits;

    std::vector<JobRecord> jobs;

    Slot detail_stride = 0;
    std::vector<SlotRecord> detail;

    std::vector<std::uint64_t> total_arrivals;
    std::vector<std::uint64_t> total_departures;
    /// Q(end).
    std::vector<std::uint64_t> final_backlog;

    std::span<const std::uint32_t> queues_at(Slot t) const {
        return {backlog.data() + static_cast<std::size_t>(t) * n_queues, n_queues};
    }
    std::uint64_t total_queue_at(Slot t) const;
    std::span<const std::uint32_t> interval_queues_at(std::size_t k) const {
        return {interval_queues.data() + k * n_queues, n_queues};
    }
    std::span<const std::uint32_t> interval_waits_at(std::size_t k) const {
        return {interval_waits.data() + k * n_queues, n_queues};
    }
};

struct SimOptions {
    Slot horizon = 2'000'000;
    Slot warmup = 200'000;
    std::uint64_t seed = 1;
    /// Record a full SlotRecord every this many slots; 0 disables.
    Slot detail_stride = 0;
    /// A run stops and is marked diverged once 1^T Q exceeds this.
    std::uint64_t divergence_ceiling = 10'000'000;
};

/// Slot-by-slot simulation of one system under one policy.
///
/// Each slot runs, in order: the policy decision on the pre-service state
/// (active mode only), service Ŝ_i(t) = min{Q_i(t), M(t) I_i(t) S_i(t)} from
/// the head of each FIFO, arrivals A_i(t) stamped with slot t+1, and the
/// switching countdown.
class Simulator {
public:
    /// Throws ConfigError if the system, policy or options are invalid.
    Simulator(SystemConfig config, PolicySpec policy, SimOptions options);

    /// Adds `count` jobs to queue q with the current slot as arrival slot.
    /// Only valid before the first step.
    void preload(QueueIndex q, std::uint32_t count);

    void step();
    /// Steps until the horizon or until the run diverges.
    void run();
    bool finished() const noexcept { return now_ >= options_.horizon || diverged_; }

    Slot now() const noexcept { return now_; }
    bool diverged() const noexcept { return diverged_; }
    const SystemConfig& config() const noexcept { return config_; }
    const QueueState& queues() const noexcept { return queues_; }
    const ServerState& server() const noexcept { return server_; }
    /// Mutable server state for driving the state machine directly.
    ServerState& server_state() noexcept { return server_; }
    const Trace& trace() const noexcept { return trace_; }

    /// Closes the running interval and hands over the trace.
    Trace finish() &&;

private:
    void observe(Slot t);
    void start_trace();

    SystemConfig config_;
    PolicySpec policy_;
    SimOptions options_;
    std::vector<StreamHandle> arrival_streams_;
    std::vector<StreamHandle> service_streams_;
    QueueState queues_;
    ServerState server_;
    Trace trace_;
    Slot now_ = 0;
    bool diverged_ = false;
    bool started_ = false;
    std::uint64_t total_backlog_ = 0;

    std::vector<double> q_obs_;
    std::vector<double> w_obs_;
    std::vector<std::uint32_t> served_scratch_;
    std::vector<std::uint32_t> arrivals_scratch_;
    IntervalRecord pending_interval_;
    std::vector<std::uint32_t> pending_queues_;
    std::vector<std::uint32_t> pending_waits_;
};

/// Runs a full simulation with Q(0) = 0. Throws ConfigError on invalid input
/// (including warmup >= horizon).
Trace simulate(const SystemConfig& config, const PolicySpec& policy, const SimOptions& options);

}  // namespace bmw
