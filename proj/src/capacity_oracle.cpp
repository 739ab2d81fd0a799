#include "bmw/capacity_oracle.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace bmw {

namespace {

constexpr double kFeasTol = 1e-10;

std::vector<std::size_t> bits_of(std::uint32_t mask) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; mask; ++k, mask >>= 1)
        if (mask & 1u) out.push_back(k);
    return out;
}

/// Solves M x = b (square, row-major) with partial pivoting; nullopt if singular.
std::optional<std::vector<double>> solve_square(std::vector<double> m, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(m[r * n + col]) > std::abs(m[piv * n + col])) piv = r;
        if (std::abs(m[piv * n + col]) < 1e-12) return std::nullopt;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(m[piv * n + c], m[col * n + c]);
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = m[r * n + col] / m[col * n + col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) m[r * n + c] -= f * m[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double acc = b[r];
        for (std::size_t c = r + 1; c < n; ++c) acc -= m[r * n + c] * x[c];
        x[r] = acc / m[r * n + r];
    }
    return x;
}

}  // namespace

CapacityResult lp_oracle(std::span<const double> rho, std::span<const Schedule> schedules) {
    const std::size_t n = rho.size();
    const std::size_t j_count = schedules.size();
    if (j_count > kOracleMaxSchedules || n > kOracleMaxQueues)
        throw CapacityError("oracle limited to " + std::to_string(kOracleMaxSchedules) + " schedules and " +
                            std::to_string(kOracleMaxQueues) + " queues");
    for (const auto& s : schedules)
        if (s.empty() || s.members().back() >= n) throw CapacityError("schedule does not fit the load vector");

    // incidence[q][j] = 1 if schedule j serves queue q.
    std::vector<std::vector<double>> incidence(n, std::vector<double>(j_count, 0.0));
    for (std::size_t j = 0; j < j_count; ++j)
        for (QueueIndex q : schedules[j].members()) incidence[q][j] = 1.0;

    CapacityResult best;
    best.feasible = false;
    best.beta_star = std::numeric_limits<double>::infinity();
    best.weights.assign(j_count, 0.0);

    auto consider = [&](const std::vector<double>& beta) {
        double total = 0.0;
        for (double b : beta) {
            if (b < -kFeasTol) return;
            total += b;
        }
        for (std::size_t q = 0; q < n; ++q) {
            double cover = 0.0;
            for (std::size_t j = 0; j < j_count; ++j) cover += incidence[q][j] * beta[j];
            if (cover < rho[q] - kFeasTol) return;
        }
        if (total < best.beta_star) {
            best.beta_star = total;
            best.weights = beta;
            best.feasible = true;
        }
    };

    for (std::uint32_t support = 0; support < (1u << j_count); ++support) {
        const auto cols = bits_of(support);
        const std::size_t k = cols.size();
        if (k > n) continue;
        if (k == 0) {
            consider(std::vector<double>(j_count, 0.0));
            continue;
        }
        for (std::uint32_t tight = 0; tight < (1u << n); ++tight) {
            if (static_cast<std::size_t>(std::popcount(tight)) != k) continue;
            const auto rows = bits_of(tight);
            std::vector<double> m(k * k);
            std::vector<double> b(k);
            for (std::size_t r = 0; r < k; ++r) {
                for (std::size_t c = 0; c < k; ++c) m[r * k + c] = incidence[rows[r]][cols[c]];
                b[r] = rho[rows[r]];
            }
            auto x = solve_square(std::move(m), std::move(b));
            if (!x) continue;
            std::vector<double> beta(j_count, 0.0);
            for (std::size_t c = 0; c < k; ++c) beta[cols[c]] = (*x)[c];
            consider(beta);
        }
    }

    if (best.feasible) {
        for (double& w : best.weights)
            if (w < 0.0) w = 0.0;
        best.epsilon_star = 1.0 - best.beta_star;
    } else {
        best.epsilon_star = -std::numeric_limits<double>::infinity();
    }
    return best;
}

}  // namespace bmw
