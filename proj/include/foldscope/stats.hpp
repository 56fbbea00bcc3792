#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "foldscope/error.hpp"

namespace foldscope {

struct MannWhitneyResult {
    double u_statistic = 0.0;  // U of the first sample: #(x > y) + 0.5 #(x == y)
    double z_score = 0.0;      // normal approximation, tie-corrected variance
    double effect_size_r = 0.0;

    friend bool operator==(const MannWhitneyResult&, const MannWhitneyResult&) = default;
};

/// Midranks (1-based) of the pooled sample, in input order.
inline std::vector<double> midranks(std::span<const double> pooled, double* tie_term = nullptr) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<double> ranks(n);
    double ties = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && pooled[order[j]] == pooled[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
        const double t = static_cast<double>(j - i);
        ties += t * t * t - t;
        i = j;
    }
    if (tie_term) *tie_term = ties;
    return ranks;
}

inline MannWhitneyResult mann_whitney_u(std::span<const double> xs, std::span<const double> ys) {
    if (xs.empty() || ys.empty()) throw ValidationError("mann_whitney_u: both samples must be non-empty");
    std::vector<double> pooled(xs.begin(), xs.end());
    pooled.insert(pooled.end(), ys.begin(), ys.end());
    double ties = 0.0;
    const auto ranks = midranks(pooled, &ties);

    const double n1 = static_cast<double>(xs.size());
    const double n2 = static_cast<double>(ys.size());
    const double n = n1 + n2;
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) rank_sum += ranks[i];

    MannWhitneyResult r;
    r.u_statistic = rank_sum - n1 * (n1 + 1.0) / 2.0;
    const double mean = n1 * n2 / 2.0;
    const double var = n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if (n > 1.0 && var > 0.0) r.z_score = (r.u_statistic - mean) / std::sqrt(var);
    r.effect_size_r = r.z_score / std::sqrt(n);
    return r;
}

}  // namespace foldscope
