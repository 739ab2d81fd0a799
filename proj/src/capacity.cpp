#include "bmw/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace bmw {

namespace {

constexpr double kTol = 1e-9;

void check_dimensions(std::span<const double> rho, std::span<const Schedule> schedules) {
    for (const auto& s : schedules) {
        if (s.empty()) throw CapacityError("empty schedule");
        if (s.members().back() >= rho.size())
            throw CapacityError("schedule " + s.to_string() + " exceeds load vector of length " +
                                std::to_string(rho.size()));
    }
    for (double r : rho)
        if (!(r >= 0.0) || !std::isfinite(r)) throw CapacityError("normalized loads must be finite and nonnegative");
}

bool all_positive_demand_covered(std::span<const double> rho, std::span<const Schedule> schedules) {
    for (std::size_t q = 0; q < rho.size(); ++q) {
        if (rho[q] <= 0.0) continue;
        bool covered = std::any_of(schedules.begin(), schedules.end(), [q](const Schedule& s) { return s.contains(q); });
        if (!covered) return false;
    }
    return true;
}

/// Dense tableau for max c^T y, A y <= 1, y >= 0 with slack basis.
class PackingTableau {
public:
    PackingTableau(std::span<const double> objective, std::span<const Schedule> rows)
        : m_(rows.size()), n_(objective.size()), cols_(n_ + m_ + 1), cell_((m_ + 1) * cols_, 0.0), basis_(m_) {
        for (std::size_t r = 0; r < m_; ++r) {
            for (QueueIndex q : rows[r].members()) at(r, q) = 1.0;
            at(r, n_ + r) = 1.0;
            at(r, n_ + m_) = 1.0;
            basis_[r] = n_ + r;
        }
        for (std::size_t k = 0; k < n_; ++k) at(m_, k) = -objective[k];
    }

    /// Returns false if the program is unbounded.
    bool solve() {
        for (;;) {
            std::size_t enter = cols_;
            for (std::size_t k = 0; k + 1 < cols_; ++k) {
                if (at(m_, k) < -kTol) {
                    enter = k;
                    break;
                }
            }
            if (enter == cols_) return true;

            std::size_t leave = m_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = at(r, enter);
                if (a <= kTol) continue;
                const double ratio = at(r, cols_ - 1) / a;
                if (ratio < best - kTol) {
                    best = ratio;
                    leave = r;
                } else if (ratio <= best + kTol && basis_[r] < basis_[leave]) {
                    leave = r;
                }
            }
            if (leave == m_) return false;
            pivot(leave, enter);
        }
    }

    double objective_value() const { return at(m_, cols_ - 1); }
    /// Shadow price of packing row r.
    double row_dual(std::size_t r) const { return at(m_, n_ + r); }

private:
    double& at(std::size_t r, std::size_t c) { return cell_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return cell_[r * cols_ + c]; }

    void pivot(std::size_t pr, std::size_t pc) {
        const double inv = 1.0 / at(pr, pc);
        for (std::size_t c = 0; c < cols_; ++c) at(pr, c) *= inv;
        at(pr, pc) = 1.0;
        for (std::size_t r = 0; r <= m_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < cols_; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
        basis_[pr] = pc;
    }

    std::size_t m_, n_, cols_;
    std::vector<double> cell_;
    std::vector<std::size_t> basis_;
};

}  // namespace

std::vector<Schedule> enumerate_maximal_schedules(const ConflictSpec& spec) {
    const std::size_t n = spec.n_queues;
    if (n == 0) throw CapacityError("conflict spec has no queues");
    if (n > kMaxEnumerationQueues)
        throw CapacityError("refusing to enumerate schedules for " + std::to_string(n) + " queues (limit " +
                            std::to_string(kMaxEnumerationQueues) + ")");
    if (spec.max_concurrency == 0) throw CapacityError("max concurrency must be positive");

    const std::uint32_t all = (1u << n) - 1;
    std::vector<std::uint32_t> compatible(n, all);
    for (std::size_t q = 0; q < n; ++q) compatible[q] &= ~(1u << q);
    for (auto [a, b] : spec.conflicts) {
        if (a >= n || b >= n || a == b)
            throw CapacityError("invalid conflict pair (" + std::to_string(a + 1) + "," + std::to_string(b + 1) + ")");
        compatible[a] &= ~(1u << b);
        compatible[b] &= ~(1u << a);
    }

    const std::size_t cap = std::min(spec.max_concurrency, n);
    std::vector<Schedule> out;
    std::vector<QueueIndex> members;

    // candidates: queues compatible with every current member.
    auto visit = [&](auto&& self, std::uint32_t candidates, std::size_t start) -> void {
        if (!members.empty() && (members.size() == cap || candidates == 0)) {
            out.emplace_back(members);
            return;
        }
        for (std::size_t q = start; q < n; ++q) {
            if (!(candidates & (1u << q))) continue;
            members.push_back(q);
            self(self, candidates & compatible[q], q + 1);
            members.pop_back();
        }
    };
    visit(visit, all, 0);
    std::sort(out.begin(), out.end());
    return out;
}

CapacityResult utilization_factor(std::span<const double> rho, std::span<const Schedule> schedules) {
    check_dimensions(rho, schedules);
    CapacityResult result;
    result.weights.assign(schedules.size(), 0.0);
    if (!all_positive_demand_covered(rho, schedules)) {
        result.feasible = false;
        result.beta_star = std::numeric_limits<double>::infinity();
        result.epsilon_star = -std::numeric_limits<double>::infinity();
        return result;
    }

    PackingTableau tableau(rho, schedules);
    if (!tableau.solve()) throw CapacityError("covering program unexpectedly infeasible");

    for (std::size_t j = 0; j < schedules.size(); ++j) {
        double w = tableau.row_dual(j);
        if (w < 0.0 && w > -kTol) w = 0.0;
        result.weights[j] = w;
    }
    result.beta_star = tableau.objective_value();
    if (std::abs(result.beta_star) < 1e-15) result.beta_star = 0.0;
    result.epsilon_star = 1.0 - result.beta_star;
    return result;
}

std::vector<double> calibrate_arrivals(std::span<const double> pattern, std::span<const double> mu,
                                       std::span<const Schedule> schedules, double target_beta) {
    if (!(target_beta > 0.0 && target_beta < 1.0))
        throw CapacityError("target utilization " + std::to_string(target_beta) + " must lie in (0,1)");
    if (pattern.size() != mu.size()) throw CapacityError("pattern and service-rate vectors differ in length");
    std::vector<double> rho(pattern.size());
    for (std::size_t q = 0; q < pattern.size(); ++q) {
        if (!(mu[q] > 0.0)) throw CapacityError("service rates must be positive");
        rho[q] = pattern[q] / mu[q];
    }
    const auto base = utilization_factor(rho, schedules);
    if (!base.feasible) throw CapacityError("arrival pattern cannot be covered by the schedules");
    if (!(base.beta_star > 0.0)) throw CapacityError("arrival pattern has zero utilization");
    const double scale = target_beta / base.beta_star;
    std::vector<double> lambda(pattern.begin(), pattern.end());
    for (double& l : lambda) l *= scale;
    return lambda;
}

}  // namespace bmw
