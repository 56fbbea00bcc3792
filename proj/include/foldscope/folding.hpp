#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "foldscope/path.hpp"
#include "foldscope/rational.hpp"

namespace foldscope {

namespace detail {

inline void require_nonempty(std::span<const ActivationPattern> path, const char* what) {
    if (path.empty()) throw ValidationError(std::string(what) + ": empty path");
}

}  // namespace detail

/// Largest Hamming distance from the first pattern to any pattern on the path.
inline std::int64_t r1(std::span<const ActivationPattern> path) {
    detail::require_nonempty(path, "r1");
    std::size_t best = 0;
    for (const auto& p : path) best = std::max(best, hamming(path.front(), p));
    return static_cast<std::int64_t>(best);
}

/// Total Hamming distance travelled between consecutive patterns.
inline std::int64_t r2(std::span<const ActivationPattern> path) {
    detail::require_nonempty(path, "r2");
    std::size_t total = 0;
    for (std::size_t i = 1; i < path.size(); ++i) total += hamming(path[i - 1], path[i]);
    return static_cast<std::int64_t>(total);
}

/// Folding measure 1 - r1/r2 as an exact ratio; 0 when nothing is travelled.
inline Rational chi(std::span<const ActivationPattern> path) {
    const auto a = r1(path);
    const auto b = r2(path);
    if (b == 0) return Rational(0);
    return Rational(b - a, b);
}

inline std::int64_t r1(const PathSample& p) { return r1(std::span(p.patterns)); }
inline std::int64_t r2(const PathSample& p) { return r2(std::span(p.patterns)); }
inline Rational chi(const PathSample& p) { return chi(std::span(p.patterns)); }

/// Distances d_H(first, p_i) for every pattern on the path.
inline std::vector<double> distances_from_start(std::span<const ActivationPattern> path) {
    detail::require_nonempty(path, "distances_from_start");
    std::vector<double> d;
    d.reserve(path.size());
    for (const auto& p : path) d.push_back(static_cast<double>(hamming(path.front(), p)));
    return d;
}

/// log(sum(exp(v))), shifted by the maximum so large arguments do not overflow.
inline double log_sum_exp(std::span<const double> v) {
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

/// Soft maximum of the distances to the first pattern at temperature beta.
/// Bounded by r1 <= smooth_r1 <= r1 + ln(n)/beta.
inline double smooth_max(std::span<const double> values, double beta) {
    if (!(beta > 0.0)) throw ValidationError("beta must be positive");
    std::vector<double> scaled(values.begin(), values.end());
    for (double& x : scaled) x *= beta;
    return log_sum_exp(scaled) / beta;
}

inline double smooth_r1(std::span<const ActivationPattern> path, double beta) {
    if (!(beta > 0.0)) throw ValidationError("beta must be positive");
    const auto d = distances_from_start(path);
    return smooth_max(d, beta);
}

inline double smooth_chi(std::span<const ActivationPattern> path, double beta) {
    const auto total = r2(path);
    if (total == 0) throw ValidationError("smooth_chi: path travels no distance (flat)");
    return 1.0 - smooth_r1(path, beta) / static_cast<double>(total);
}

inline double smooth_r1(const PathSample& p, double beta) { return smooth_r1(std::span(p.patterns), beta); }
inline double smooth_chi(const PathSample& p, double beta) { return smooth_chi(std::span(p.patterns), beta); }

/// Same patterns walked backwards. A region entered at t in the forward walk
/// spans [t_i, t_{i+1}), so walking back it is entered at 1 - t_{i+1}.
inline PathSample reverse(const PathSample& p) {
    PathSample r;
    r.patterns.assign(p.patterns.rbegin(), p.patterns.rend());
    r.entry_ts.reserve(p.entry_ts.size());
    if (!p.entry_ts.empty()) {
        r.entry_ts.push_back(0.0);
        for (std::size_t i = p.entry_ts.size(); i-- > 1;) r.entry_ts.push_back(1.0 - p.entry_ts[i]);
    }
    r.stats = p.stats;
    return r;
}

/// Joins connected paths; the shared pattern appears once. The first path is
/// rescaled onto t in [0, 0.5), the second onto [0.5, 1].
inline PathSample concat(const PathSample& p1, const PathSample& p2) {
    if (p1.patterns.empty() || p2.patterns.empty()) throw ValidationError("concat: empty path");
    if (!(p1.back() == p2.front())) {
        throw ValidationError("concat: disconnected paths (last pattern " + p1.back().to_string() +
                              " != first pattern " + p2.front().to_string() + ")");
    }
    PathSample out;
    out.patterns = p1.patterns;
    for (double t : p1.entry_ts) out.entry_ts.push_back(0.5 * t);
    for (std::size_t i = 1; i < p2.patterns.size(); ++i) {
        out.patterns.push_back(p2.patterns[i]);
        out.entry_ts.push_back(0.5 + 0.5 * p2.entry_ts[i]);
    }
    out.stats.total_steps = p1.stats.total_steps + p2.stats.total_steps;
    out.stats.halvings = p1.stats.halvings + p2.stats.halvings;
    out.stats.jumps_accepted_at_dmin = p1.stats.jumps_accepted_at_dmin + p2.stats.jumps_accepted_at_dmin;
    return out;
}

/// Deviation from additivity |chi(p1 + p2) - chi(p1) - chi(p2)|.
inline Rational interaction(const PathSample& p1, const PathSample& p2) {
    const auto joined = concat(p1, p2);
    return abs(chi(joined) - chi(p1) - chi(p2));
}

struct FoldingReport {
    std::int64_t r1 = 0;
    std::int64_t r2 = 0;
    Rational chi;
    Rational chi_reversed;
    std::int64_t n_patterns = 0;
    bool flat = true;
    SamplerStats stats;

    friend bool operator==(const FoldingReport&, const FoldingReport&) = default;
};

inline FoldingReport fold_report(const PathSample& p) {
    FoldingReport r;
    r.r1 = foldscope::r1(p);
    r.r2 = foldscope::r2(p);
    r.chi = foldscope::chi(p);
    r.chi_reversed = foldscope::chi(reverse(p));
    r.n_patterns = static_cast<std::int64_t>(p.patterns.size());
    r.flat = r.chi == Rational(0);
    r.stats = p.stats;
    return r;
}

inline Json to_json(const Rational& q) {
    Json j;
    j["num"] = q.num();
    j["den"] = q.den();
    return j;
}

inline Rational rational_from_json(const Json& j) { return {j.at("num").get<std::int64_t>(), j.at("den").get<std::int64_t>()}; }

inline Json to_json(const FoldingReport& r) {
    Json j;
    j["r1"] = r.r1;
    j["r2"] = r.r2;
    j["chi"] = to_json(r.chi);
    j["chi_decimal"] = r.chi.to_double();
    j["chi_reversed"] = to_json(r.chi_reversed);
    j["chi_reversed_decimal"] = r.chi_reversed.to_double();
    j["n_patterns"] = r.n_patterns;
    j["flat"] = r.flat;
    j["stats"] = to_json(r.stats);
    return j;
}

inline FoldingReport folding_report_from_json(const Json& j) {
    try {
        FoldingReport r;
        r.r1 = j.at("r1").get<std::int64_t>();
        r.r2 = j.at("r2").get<std::int64_t>();
        r.chi = rational_from_json(j.at("chi"));
        r.chi_reversed = rational_from_json(j.at("chi_reversed"));
        r.n_patterns = j.at("n_patterns").get<std::int64_t>();
        r.flat = j.at("flat").get<bool>();
        const auto& st = j.at("stats");
        r.stats.total_steps = st.at("total_steps").get<std::int64_t>();
        r.stats.halvings = st.at("halvings").get<std::int64_t>();
        r.stats.jumps_accepted_at_dmin = st.at("jumps_accepted_at_dmin").get<std::int64_t>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("folding report JSON: ") + e.what());
    }
}

}  // namespace foldscope
