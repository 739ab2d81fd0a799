#include "bmw/policy.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bmw {

namespace {

void require_active(const ServerState& server) {
    if (server.mode != ServerMode::active) throw std::logic_error("policy consulted outside active mode");
}

void require_state(std::span<const double> state, std::span<const Schedule> schedules) {
    for (const auto& s : schedules)
        if (!s.empty() && s.members().back() >= state.size())
            throw std::invalid_argument("state vector length does not match schedules");
}

double total(std::span<const double> state) { return std::accumulate(state.begin(), state.end(), 0.0); }

}  // namespace

WeightedChoice max_weight_schedule(std::span<const double> state, std::span<const Schedule> schedules,
                                   ScheduleIndex current) {
    WeightedChoice best{current, schedule_weight<double>(schedules[current], state)};
    for (ScheduleIndex j = 0; j < schedules.size(); ++j) {
        const double w = schedule_weight<double>(schedules[j], state);
        if (w > best.weight) best = {j, w};
    }
    return best;
}

double bias_denominator(double state_sum, double alpha) {
    if (state_sum <= 1.0) return 1.0;
    return std::max(1.0, std::pow(state_sum, alpha));
}

Decision biased_decide(std::span<const double> state, const ServerState& server, std::span<const Schedule> schedules,
                       int switch_overhead) {
    require_active(server);
    require_state(state, schedules);
    const auto best = max_weight_schedule(state, schedules, server.current);
    const double current = schedule_weight<double>(schedules[server.current], state);
    const double inflated = (1.0 + switch_overhead / server.frozen_bias) * current;
    if (inflated <= best.weight && best.index != server.current) return Decision::switch_to(best.index);
    return Decision::stay();
}

Decision qbmw_decide(std::span<const double> queue_lengths, const ServerState& server,
                     std::span<const Schedule> schedules, int switch_overhead) {
    return biased_decide(queue_lengths, server, schedules, switch_overhead);
}

Decision wbmw_decide(std::span<const double> waiting_times, const ServerState& server,
                     std::span<const Schedule> schedules, int switch_overhead) {
    return biased_decide(waiting_times, server, schedules, switch_overhead);
}

Slot vfmw_frame_length(double total_queue, double alpha) {
    if (total_queue <= 0.0) return 1;
    const double len = std::floor(std::pow(total_queue, alpha));
    return len < 1.0 ? 1 : static_cast<Slot>(len);
}

Decision vfmw_decide(std::span<const double> queue_lengths, const ServerState& server,
                     std::span<const Schedule> schedules, double alpha, Slot t) {
    require_active(server);
    require_state(queue_lengths, schedules);
    if (t < server.frame_end) return Decision::stay();
    const auto best = max_weight_schedule(queue_lengths, schedules, server.current);
    const Slot frame = vfmw_frame_length(total(queue_lengths), alpha);
    if (best.index == server.current) return Decision::stay(frame);
    return Decision::switch_to(best.index, frame);
}

Decision maxweight_decide(std::span<const double> queue_lengths, const ServerState& server,
                          std::span<const Schedule> schedules) {
    require_active(server);
    require_state(queue_lengths, schedules);
    const auto best = max_weight_schedule(queue_lengths, schedules, server.current);
    if (best.index != server.current) return Decision::switch_to(best.index);
    return Decision::stay();
}

Decision decide(const PolicySpec& spec, const Observation& obs, const ServerState& server,
                std::span<const Schedule> schedules, int switch_overhead, Slot t) {
    switch (spec.variant) {
        case PolicyVariant::qbmw: return qbmw_decide(obs.queue_lengths, server, schedules, switch_overhead);
        case PolicyVariant::wbmw: return wbmw_decide(obs.waiting_times, server, schedules, switch_overhead);
        case PolicyVariant::vfmw: return vfmw_decide(obs.queue_lengths, server, schedules, spec.alpha, t);
        case PolicyVariant::max_weight: return maxweight_decide(obs.queue_lengths, server, schedules);
    }
    throw std::logic_error("unhandled policy variant");
}

double interval_bias(const PolicySpec& spec, const Observation& obs) {
    switch (spec.variant) {
        case PolicyVariant::qbmw: return bias_denominator(total(obs.queue_lengths), spec.alpha);
        case PolicyVariant::wbmw: return bias_denominator(total(obs.waiting_times), spec.alpha);
        default: return 1.0;
    }
}

ServerState initial_server_state(const PolicySpec& spec, const Observation& obs, std::span<const Schedule> schedules) {
    if (schedules.empty()) throw std::invalid_argument("no schedules");
    const std::span<const double> state =
        spec.variant == PolicyVariant::wbmw ? obs.waiting_times : obs.queue_lengths;
    require_state(state, schedules);
    ServerState s;
    s.current = max_weight_schedule(state, schedules, 0).index;
    s.target = s.current;
    s.interval_start = 0;
    s.frozen_bias = interval_bias(spec, obs);
    s.frame_end = spec.variant == PolicyVariant::vfmw ? 1 : 0;
    return s;
}

void apply_decision(ServerState& server, const Decision& decision, Slot t, int switch_overhead, double trigger_bias) {
    require_active(server);
    if (!decision.is_switch()) {
        if (decision.frame_slots > 0) server.frame_end = t + decision.frame_slots;
        return;
    }
    if (decision.target == server.current) throw std::logic_error("switch to the current schedule");
    if (switch_overhead < 1) throw std::invalid_argument("switch overhead must be at least one slot");
    server.mode = ServerMode::switching;
    server.target = decision.target;
    server.remaining = switch_overhead;
    server.trigger_slot = t;
    server.pending_bias = trigger_bias;
    server.frame_end = t + switch_overhead + decision.frame_slots;
}

IntervalMark on_switch_complete(ServerState& server, Slot t) {
    if (server.mode != ServerMode::switching || server.remaining != 0)
        throw std::logic_error("switch completion outside a finished switch");
    if (t <= server.trigger_slot) throw std::logic_error("switch cannot complete in its trigger slot");
    const IntervalMark closed{server.interval_start, server.trigger_slot - server.interval_start};
    server.mode = ServerMode::active;
    server.current = server.target;
    server.interval_start = server.trigger_slot;
    server.frozen_bias = server.pending_bias;
    return closed;
}

}  // namespace bmw
