#include "bmw/model.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

namespace bmw {

Schedule::Schedule(std::vector<QueueIndex> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

Schedule::Schedule(std::initializer_list<QueueIndex> members) : Schedule(std::vector<QueueIndex>(members)) {}

Schedule Schedule::from_one_based(std::span<const std::size_t> numbers) {
    std::vector<QueueIndex> m;
    m.reserve(numbers.size());
    for (std::size_t n : numbers) {
        if (n == 0) throw std::invalid_argument("queue numbers are 1-based; got 0");
        m.push_back(n - 1);
    }
    return Schedule(std::move(m));
}

Schedule Schedule::from_one_based(std::initializer_list<std::size_t> numbers) {
    return from_one_based(std::span<const std::size_t>(numbers.begin(), numbers.size()));
}

bool Schedule::contains(QueueIndex q) const { return std::binary_search(members_.begin(), members_.end(), q); }

bool Schedule::is_strict_subset_of(const Schedule& other) const {
    return size() < other.size() && std::includes(other.members_.begin(), other.members_.end(), members_.begin(), members_.end());
}

std::string Schedule::to_string() const {
    std::string s = "{";
    for (std::size_t k = 0; k < members_.size(); ++k) {
        if (k) s += ',';
        s += std::to_string(members_[k] + 1);
    }
    return s + "}";
}

std::vector<std::size_t> Schedule::one_based() const {
    std::vector<std::size_t> v;
    v.reserve(members_.size());
    for (QueueIndex q : members_) v.push_back(q + 1);
    return v;
}

std::size_t SystemConfig::max_concurrency() const {
    std::size_t k = 0;
    for (const auto& s : schedules) k = std::max(k, s.size());
    return k;
}

std::vector<double> SystemConfig::arrival_rates() const {
    std::vector<double> v;
    v.reserve(traffic.size());
    for (const auto& t : traffic) v.push_back(mean(t.arrival));
    return v;
}

std::vector<double> SystemConfig::service_rates() const {
    std::vector<double> v;
    v.reserve(traffic.size());
    for (const auto& t : traffic) v.push_back(mean(t.service));
    return v;
}

std::vector<double> SystemConfig::normalized_loads() const {
    std::vector<double> v;
    v.reserve(traffic.size());
    for (const auto& t : traffic) {
        const auto r = mean_rates(t);
        v.push_back(r.mu > 0.0 ? r.lambda / r.mu : 0.0);
    }
    return v;
}

std::uint32_t SystemConfig::max_arrival_bound() const {
    std::uint32_t m = 1;
    for (const auto& t : traffic) m = std::max(m, t.arrival_bound());
    return m;
}

std::uint32_t SystemConfig::max_service_bound() const {
    std::uint32_t m = 1;
    for (const auto& t : traffic) m = std::max(m, t.service_bound());
    return m;
}

std::string_view to_string(PolicyVariant v) {
    switch (v) {
        case PolicyVariant::qbmw: return "qbmw";
        case PolicyVariant::wbmw: return "wbmw";
        case PolicyVariant::vfmw: return "vfmw";
        case PolicyVariant::max_weight: return "maxweight";
    }
    return "?";
}

PolicyVariant parse_policy_variant(std::string_view text) {
    std::string key;
    for (char c : text)
        if (c != '-' && c != '_') key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (key == "qbmw") return PolicyVariant::qbmw;
    if (key == "wbmw") return PolicyVariant::wbmw;
    if (key == "vfmw") return PolicyVariant::vfmw;
    if (key == "maxweight" || key == "mw") return PolicyVariant::max_weight;
    throw std::invalid_argument("unknown policy '" + std::string(text) + "' (expected qbmw, wbmw, vfmw, maxweight)");
}

std::vector<std::string> validate_policy(const PolicySpec& spec) {
    std::vector<std::string> out;
    if (spec.variant != PolicyVariant::max_weight && !(spec.alpha > 0.0 && spec.alpha < 1.0))
        out.push_back("alpha " + std::to_string(spec.alpha) + " must lie strictly inside (0,1)");
    return out;
}

std::vector<std::string> validate_config(const SystemConfig& cfg) {
    std::vector<std::string> out;
    if (cfg.n_queues == 0) out.emplace_back("system has no queues");
    if (cfg.switch_overhead < 1)
        out.push_back("switch overhead T_s=" + std::to_string(cfg.switch_overhead) + " must be at least 1");
    if (cfg.schedules.empty()) out.emplace_back("no schedules configured");

    std::vector<bool> covered(cfg.n_queues, false);
    std::set<Schedule> seen;
    for (const auto& s : cfg.schedules) {
        if (s.empty()) {
            out.emplace_back("empty schedule");
            continue;
        }
        bool in_range = true;
        for (QueueIndex q : s.members()) {
            if (q >= cfg.n_queues) {
                out.push_back("schedule " + s.to_string() + " references queue " + std::to_string(q + 1) +
                              " outside 1.." + std::to_string(cfg.n_queues));
                in_range = false;
            } else {
                covered[q] = true;
            }
        }
        if (!in_range) continue;
        if (!seen.insert(s).second) out.push_back("duplicate schedule " + s.to_string());
    }
    for (const auto& s : cfg.schedules) {
        for (const auto& other : cfg.schedules) {
            if (s.is_strict_subset_of(other)) {
                out.push_back("non-maximal schedule " + s.to_string() + " (contained in " + other.to_string() + ")");
                break;
            }
        }
    }
    for (std::size_t q = 0; q < cfg.n_queues; ++q)
        if (!covered[q]) out.push_back("queue " + std::to_string(q + 1) + " uncovered");

    if (cfg.traffic.size() != cfg.n_queues) {
        out.push_back("traffic specs for " + std::to_string(cfg.traffic.size()) + " queues, expected " +
                      std::to_string(cfg.n_queues));
    } else {
        for (std::size_t q = 0; q < cfg.n_queues; ++q)
            for (auto& v : validate_traffic(cfg.traffic[q])) out.push_back("queue " + std::to_string(q + 1) + " " + v);
    }
    return out;
}

double schedule_weight(const Schedule& schedule, std::span<const double> state) {
    if (!schedule.empty() && schedule.members().back() >= state.size())
        throw std::invalid_argument("state vector shorter than schedule " + schedule.to_string());
    return schedule_weight<double>(schedule, state);
}

}  // namespace bmw
