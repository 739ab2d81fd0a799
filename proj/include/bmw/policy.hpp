#pragma once

#include <cstdint>
#include <span>

#include "bmw/model.hpp"

namespace bmw {

enum class ServerMode : std::uint8_t { active, switching };

/// Server-side state machine: which schedule is served, an in-progress
/// switch, and the bookkeeping of the current interval.
///
/// An interval k starts at the slot t_k where a switch is triggered (t_0 = 0)
/// and ends at the next trigger. The bias F(Q(t_k)) / G(W(t_k)) is computed
/// at the trigger slot and stays frozen until the next trigger.
struct ServerState {
    ServerMode mode = ServerMode::active;
    ScheduleIndex current = 0;
    /// Schedule being switched to; meaningful in switching mode.
    ScheduleIndex target = 0;
    /// Switching slots still to spend, in [1, T_s] while switching.
    int remaining = 0;
    /// t_k of the interval in progress (the last completed trigger).
    Slot interval_start = 0;
    /// Bias denominator frozen at interval_start, always >= 1.
    double frozen_bias = 1.0;
    /// Trigger slot and bias of the switch in progress.
    Slot trigger_slot = 0;
    double pending_bias = 1.0;
    /// First slot of the next frame decision (VFMW only).
    Slot frame_end = 0;
};

/// A closed interval: it began at start and lasted length slots.
struct IntervalMark {
    Slot start = 0;
    Slot length = 0;
};

struct Decision {
    enum class Kind : std::uint8_t { stay, switch_to };

    Kind kind = Kind::stay;
    ScheduleIndex target = 0;
    /// VFMW only: active slots in the frame that starts with this decision
    /// (0 when the decision does not open a frame).
    Slot frame_slots = 0;

    static Decision stay(Slot frame = 0) { return {Kind::stay, 0, frame}; }
    static Decision switch_to(ScheduleIndex j, Slot frame = 0) { return {Kind::switch_to, j, frame}; }
    bool is_switch() const noexcept { return kind == Kind::switch_to; }
    bool operator==(const Decision&) const = default;
};

/// Observable state at the start of a slot.
struct Observation {
    std::span<const double> queue_lengths;
    std::span<const double> waiting_times;
};

struct WeightedChoice {
    ScheduleIndex index = 0;
    double weight = 0.0;
};

/// Max-weight schedule; ties prefer `current`, then the lowest index.
WeightedChoice max_weight_schedule(std::span<const double> state, std::span<const Schedule> schedules,
                                   ScheduleIndex current);

/// max{1, state_sum^alpha}.
double bias_denominator(double state_sum, double alpha);

/// Switching rule shared by Q-BMW and W-BMW:
/// switch to the argmax iff (1 + T_s/bias) * I(t_k)^T x <= max_j I^(j)^T x
/// and the tie-broken argmax is not the current schedule.
Decision biased_decide(std::span<const double> state, const ServerState& server, std::span<const Schedule> schedules,
                       int switch_overhead);

/// Queue-length biased max-weight. Uses server.frozen_bias as F(Q(t_k)).
Decision qbmw_decide(std::span<const double> queue_lengths, const ServerState& server,
                     std::span<const Schedule> schedules, int switch_overhead);

/// Waiting-time biased max-weight. Uses server.frozen_bias as G(W(t_k)).
Decision wbmw_decide(std::span<const double> waiting_times, const ServerState& server,
                     std::span<const Schedule> schedules, int switch_overhead);

/// Variable-frame max-weight. Stays until the frame ends; at a frame boundary
/// picks the max-weight schedule and opens a frame of
/// max{1, floor((1^T Q)^alpha)} active slots.
Decision vfmw_decide(std::span<const double> queue_lengths, const ServerState& server,
                     std::span<const Schedule> schedules, double alpha, Slot t);

/// Unbiased max-weight: switch whenever a strictly heavier schedule exists.
Decision maxweight_decide(std::span<const double> queue_lengths, const ServerState& server,
                          std::span<const Schedule> schedules);

/// Frame length used by VFMW for a given total backlog.
Slot vfmw_frame_length(double total_queue, double alpha);

/// Dispatches on spec.variant. Only valid in active mode.
Decision decide(const PolicySpec& spec, const Observation& obs, const ServerState& server,
                std::span<const Schedule> schedules, int switch_overhead, Slot t);

/// Bias to freeze for an interval triggered with observation obs.
double interval_bias(const PolicySpec& spec, const Observation& obs);

/// Server state at t = 0: max-weight schedule (ties -> schedule 0), no
/// switching cost, t_0 = 0, bias evaluated on the initial observation and,
/// for VFMW, a one-slot first frame.
ServerState initial_server_state(const PolicySpec& spec, const Observation& obs, std::span<const Schedule> schedules);

/// Applies a decision taken in active slot t. A switch enters switching mode
/// for T_s slots and records the trigger; a VFMW stay that opens a frame
/// extends frame_end.
void apply_decision(ServerState& server, const Decision& decision, Slot t, int switch_overhead, double trigger_bias);

/// Completes the switch in progress so that the server is active on the new
/// schedule from slot t. Returns the interval closed by the trigger.
/// Throws std::logic_error unless the server is switching with no slots left.
IntervalMark on_switch_complete(ServerState& server, Slot t);

}  // namespace bmw
