#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "foldscope/json_util.hpp"
#include "foldscope/mlp.hpp"
#include "foldscope/pattern.hpp"

namespace foldscope {

struct SamplerStats {
    std::int64_t total_steps = 0;  // forward evaluations, refinements included
    std::int64_t halvings = 0;
    std::int64_t jumps_accepted_at_dmin = 0;

    friend bool operator==(const SamplerStats&, const SamplerStats&) = default;
};

/// Ordered activation patterns met along a segment, each with the parameter
/// t at which it was first recorded. Consecutive patterns are distinct.
struct PathSample {
    std::vector<ActivationPattern> patterns;
    std::vector<double> entry_ts;
    SamplerStats stats;

    std::size_t size() const noexcept { return patterns.size(); }
    const ActivationPattern& front() const { return patterns.front(); }
    const ActivationPattern& back() const { return patterns.back(); }

    friend bool operator==(const PathSample&, const PathSample&) = default;
};

/// Collapses runs of equal consecutive patterns.
inline std::vector<ActivationPattern> dedup_consecutive(std::span<const ActivationPattern> raw) {
    if (raw.empty()) throw ValidationError("dedup_consecutive: empty pattern list");
    std::vector<ActivationPattern> out;
    out.reserve(raw.size());
    for (const auto& p : raw) {
        if (out.empty() || !(out.back() == p)) out.push_back(p);
    }
    return out;
}

/// Builds a path from an explicit pattern list (consecutive duplicates
/// collapsed), with entries spaced evenly over [0,1).
inline PathSample make_path(std::span<const ActivationPattern> patterns) {
    PathSample p;
    p.patterns = dedup_consecutive(patterns);
    const auto n = p.patterns.size();
    for (std::size_t i = 0; i < n; ++i) p.entry_ts.push_back(static_cast<double>(i) / static_cast<double>(n));
    p.stats.total_steps = static_cast<std::int64_t>(patterns.size());
    return p;
}

inline PathSample make_path(std::initializer_list<const char*> bit_strings) {
    std::vector<ActivationPattern> v;
    for (const char* s : bit_strings) v.push_back(ActivationPattern::from_string(s));
    return make_path(v);
}

namespace detail {

inline void check_segment(const Mlp& net, std::span<const double> x1, std::span<const double> x2) {
    check_input(net, x1);
    check_input(net, x2);
}

inline void point_on_segment(std::span<const double> x1, std::span<const double> x2, double t, std::vector<double>& out) {
    out.resize(x1.size());
    for (std::size_t i = 0; i < x1.size(); ++i) out[i] = x1[i] + t * (x2[i] - x1[i]);
}

}  // namespace detail

inline constexpr double kDefaultDeltaInit = 1e-2;
inline constexpr double kDefaultDeltaMin = 1e-9;
inline constexpr double kSmallestDeltaMin = 1e-15;

/// Adaptive walk from x1 to x2 in the parameter t of x1 + t (x2 - x1).
///
/// A step of size dt is taken from the last accepted t. If the pattern is
/// unchanged the walk advances silently; if it differs in exactly one bit the
/// new pattern is recorded. A larger jump halves dt and retries, until dt is at
/// or below delta_min, at which point the jump is accepted and counted. After
/// every recorded pattern dt is reset to delta_init. The pattern at t = 1 is
/// always evaluated.
inline PathSample sample_adaptive(const Mlp& net, std::span<const double> x1, std::span<const double> x2,
                                  double delta_init = kDefaultDeltaInit, double delta_min = kDefaultDeltaMin) {
    if (!(delta_init > 0.0 && delta_init <= 1.0)) throw ValidationError("delta_init must lie in (0, 1]");
    if (!(delta_min > 0.0 && delta_min <= delta_init)) throw ValidationError("delta_min must lie in (0, delta_init]");
    // Below this, t + dt stops advancing near t = 1.
    if (delta_min < kSmallestDeltaMin) throw ValidationError("delta_min must be at least 1e-15");
    detail::check_segment(net, x1, x2);
    if (std::equal(x1.begin(), x1.end(), x2.begin())) throw ValidationError("segment endpoints coincide");

    PathSample path;
    std::vector<double> x;
    ActivationPattern prev = activation_pattern(net, x1);
    path.patterns.push_back(prev);
    path.entry_ts.push_back(0.0);
    path.stats.total_steps = 1;

    double t = 0.0;
    double dt = delta_init;
    while (t < 1.0) {
        const double t_next = std::min(t + dt, 1.0);
        detail::point_on_segment(x1, x2, t_next, x);
        ActivationPattern next = activation_pattern(net, x);
        ++path.stats.total_steps;
        const std::size_t d = hamming(prev, next);
        if (d == 0) {
            t = t_next;
            continue;
        }
        if (d > 1 && dt > delta_min) {
            dt /= 2.0;
            ++path.stats.halvings;
            continue;
        }
        if (d > 1) ++path.stats.jumps_accepted_at_dmin;
        path.patterns.push_back(next);
        path.entry_ts.push_back(t_next);
        prev = std::move(next);
        t = t_next;
        dt = delta_init;
    }
    return path;
}

/// Evaluates the pattern at t = k / (n_points - 1) and collapses repeats.
inline PathSample sample_equidistant(const Mlp& net, std::span<const double> x1, std::span<const double> x2,
                                     std::int64_t n_points) {
    if (n_points < 2) throw ValidationError("n_points must be at least 2");
    detail::check_segment(net, x1, x2);
    PathSample path;
    std::vector<double> x;
    for (std::int64_t k = 0; k < n_points; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(n_points - 1);
        detail::point_on_segment(x1, x2, t, x);
        auto p = activation_pattern(net, x);
        if (path.patterns.empty() || !(path.patterns.back() == p)) {
            path.patterns.push_back(std::move(p));
            path.entry_ts.push_back(t);
        }
    }
    path.stats.total_steps = n_points;
    return path;
}

inline Json to_json(const SamplerStats& s) {
    Json j;
    j["total_steps"] = s.total_steps;
    j["halvings"] = s.halvings;
    j["jumps_accepted_at_dmin"] = s.jumps_accepted_at_dmin;
    return j;
}

inline Json to_json(const PathSample& p) {
    Json j;
    j["entry_ts"] = p.entry_ts;
    Json pats = Json::array();
    for (const auto& pat : p.patterns) pats.push_back(pat.to_string());
    j["patterns"] = std::move(pats);
    j["stats"] = to_json(p.stats);
    return j;
}

inline PathSample path_from_json(const Json& j) {
    try {
        PathSample p;
        p.entry_ts = j.at("entry_ts").get<std::vector<double>>();
        for (const auto& s : j.at("patterns")) p.patterns.push_back(ActivationPattern::from_string(s.get<std::string>()));
        const auto& st = j.at("stats");
        p.stats.total_steps = st.at("total_steps").get<std::int64_t>();
        p.stats.halvings = st.at("halvings").get<std::int64_t>();
        p.stats.jumps_accepted_at_dmin = st.at("jumps_accepted_at_dmin").get<std::int64_t>();
        if (p.patterns.empty() || p.patterns.size() != p.entry_ts.size()) {
            throw ValidationError("path JSON: patterns and entry_ts must be non-empty and equally long");
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("path JSON: ") + e.what());
    }
}

}  // namespace foldscope
