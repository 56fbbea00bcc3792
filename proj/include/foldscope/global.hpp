#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "foldscope/dataset.hpp"
#include "foldscope/folding.hpp"
#include "foldscope/parallel.hpp"
#include "foldscope/rng.hpp"
#include "foldscope/stats.hpp"

namespace foldscope {

/// Draws up to `budget` distinct ordered pairs (a, b) from [0, n_from) x [0, n_to)
/// uniformly without replacement. A lazy Fisher-Yates shuffle over the flat
/// index space: the first k pairs are the same for every budget >= k.
inline std::vector<std::pair<std::size_t, std::size_t>> sample_pair_indices(std::size_t n_from, std::size_t n_to,
                                                                            std::int64_t budget,
                                                                            std::uint64_t seed) {
    if (n_from == 0 || n_to == 0) throw ValidationError("pair sampling: empty sample list");
    if (budget < 1) throw ValidationError("pair sampling: budget must be at least 1");
    const std::uint64_t total = static_cast<std::uint64_t>(n_from) * n_to;
    const std::uint64_t k = std::min<std::uint64_t>(total, static_cast<std::uint64_t>(budget));
    Rng rng(seed);
    std::unordered_map<std::uint64_t, std::uint64_t> swapped;
    const auto at = [&](std::uint64_t i) {
        const auto it = swapped.find(i);
        return it == swapped.end() ? i : it->second;
    };
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(static_cast<std::size_t>(k));
    for (std::uint64_t i = 0; i < k; ++i) {
        const std::uint64_t j = i + rng.below(total - i);
        const std::uint64_t vi = at(i);
        const std::uint64_t vj = at(j);
        swapped[j] = vi;
        swapped[i] = vj;
        out.emplace_back(static_cast<std::size_t>(vj / n_to), static_cast<std::size_t>(vj % n_to));
    }
    return out;
}

struct SamplerSettings {
    double delta_init = kDefaultDeltaInit;
    double delta_min = kDefaultDeltaMin;
};

/// chi of the adaptive path between two points; coincident points give 0.
inline Rational segment_chi(const Mlp& net, std::span<const double> a, std::span<const double> b,
                            const SamplerSettings& sampler = {}) {
    if (std::equal(a.begin(), a.end(), b.begin(), b.end())) {
        detail::check_input(net, a);
        return Rational(0);
    }
    return chi(sample_adaptive(net, a, b, sampler.delta_init, sampler.delta_min));
}

/// Folding values for up to `budget` sampled ordered pairs (from[i], to[j]).
inline std::vector<Rational> pairwise_chi(const Mlp& net, std::span<const std::vector<double>> from_samples,
                                          std::span<const std::vector<double>> to_samples, std::int64_t budget,
                                          std::uint64_t seed, const SamplerSettings& sampler = {}) {
    if (from_samples.empty() || to_samples.empty()) throw ValidationError("pairwise_chi: empty sample list");
    std::vector<Rational> values;
    for (const auto& [i, j] : sample_pair_indices(from_samples.size(), to_samples.size(), budget, seed)) {
        values.push_back(segment_chi(net, from_samples[i], to_samples[j], sampler));
    }
    return values;
}

/// Median of the strictly positive values (lower middle for even counts), 0 if none.
inline Rational chi_plus(std::span<const Rational> values) {
    if (values.empty()) throw ValidationError("chi_plus: empty value list");
    std::vector<Rational> pos;
    for (const auto& v : values) {
        if (v > Rational(0)) pos.push_back(v);
    }
    if (pos.empty()) return Rational(0);
    std::sort(pos.begin(), pos.end());
    return pos[(pos.size() - 1) / 2];
}

struct ClassPairStats {
    int class_from = 0;
    int class_to = 0;
    std::vector<Rational> chi_values;
    Rational chi_plus;
    std::int64_t n_zero = 0;
    std::int64_t n_pairs_evaluated = 0;

    friend bool operator==(const ClassPairStats&, const ClassPairStats&) = default;
};

struct GlobalFoldingReport {
    std::optional<Rational> phi;  // exact mean; empty if the common denominator overflows 64 bits
    double phi_decimal = 0.0;
    int num_classes = 0;
    std::int64_t budget_per_pair = 0;
    std::uint64_t seed = 0;
    std::vector<ClassPairStats> per_pair;     // ordered pairs with class_from != class_to
    std::vector<ClassPairStats> intra_stats;  // class_from == class_to
    std::optional<MannWhitneyResult> mw_test;  // inter chi_plus vs intra chi_plus

    friend bool operator==(const GlobalFoldingReport&, const GlobalFoldingReport&) = default;
};

struct GlobalOptions {
    SamplerSettings sampler;
    bool include_intra = true;
    unsigned workers = 0;  // 0: worker_count()
};

inline ClassPairStats class_pair_stats(const Mlp& net, int from, int to, std::span<const std::vector<double>> a,
                                       std::span<const std::vector<double>> b, std::int64_t budget, std::uint64_t seed,
                                       const SamplerSettings& sampler) {
    ClassPairStats s;
    s.class_from = from;
    s.class_to = to;
    s.chi_values = pairwise_chi(net, a, b, budget, derive_seed(seed, static_cast<std::uint64_t>(from),
                                                               static_cast<std::uint64_t>(to)),
                                sampler);
    s.chi_plus = chi_plus(s.chi_values);
    s.n_zero = std::count(s.chi_values.begin(), s.chi_values.end(), Rational(0));
    s.n_pairs_evaluated = static_cast<std::int64_t>(s.chi_values.size());
    return s;
}

/// Mean of chi_plus over all L(L-1) ordered pairs of distinct classes. Each
/// class pair uses its own sub-seed, so the report is independent of the
/// order in which pairs are computed.
inline GlobalFoldingReport global_phi(const Mlp& net, const LabeledDataset& data, std::int64_t budget_per_pair,
                                      std::uint64_t seed, const GlobalOptions& opts = {}) {
    data.validate();
    if (data.num_classes < 2) throw ValidationError("global folding needs at least 2 classes");
    if (budget_per_pair < 1) throw ValidationError("budget per class pair must be at least 1");
    if (data.input_dim() != net.input_dim()) {
        throw DimensionError("dataset has dimension " + std::to_string(data.input_dim()) + ", model expects " +
                             std::to_string(net.input_dim()));
    }
    const int L = data.num_classes;
    std::vector<std::vector<std::vector<double>>> classes(static_cast<std::size_t>(L));
    for (std::size_t i = 0; i < data.size(); ++i) classes[static_cast<std::size_t>(data.labels[i])].push_back(data.inputs[i]);
    for (int c = 0; c < L; ++c) {
        if (classes[static_cast<std::size_t>(c)].empty()) throw ValidationError("class " + std::to_string(c) + " has no samples");
    }

    std::vector<std::pair<int, int>> tasks;
    for (int i = 0; i < L; ++i) {
        for (int j = 0; j < L; ++j) {
            if (i != j || opts.include_intra) tasks.emplace_back(i, j);
        }
    }
    std::vector<ClassPairStats> results(tasks.size());
    parallel_for(
        tasks.size(),
        [&](std::size_t k) {
            const auto [i, j] = tasks[k];
            results[k] = class_pair_stats(net, i, j, classes[static_cast<std::size_t>(i)],
                                          classes[static_cast<std::size_t>(j)], budget_per_pair, seed, opts.sampler);
        },
        opts.workers == 0 ? worker_count() : opts.workers);

    GlobalFoldingReport r;
    r.num_classes = L;
    r.budget_per_pair = budget_per_pair;
    r.seed = seed;
    for (auto& s : results) (s.class_from == s.class_to ? r.intra_stats : r.per_pair).push_back(std::move(s));

    const auto n_terms = static_cast<std::int64_t>(r.per_pair.size());
    double sum = 0.0;
    for (const auto& s : r.per_pair) sum += s.chi_plus.to_double();
    r.phi_decimal = sum / static_cast<double>(n_terms);
    try {
        Rational exact(0);
        for (const auto& s : r.per_pair) exact = exact + s.chi_plus;
        r.phi = exact / Rational(n_terms);
        r.phi_decimal = r.phi->to_double();
    } catch (const NumericError&) {
        r.phi.reset();
    }

    if (!r.intra_stats.empty()) {
        std::vector<double> inter;
        std::vector<double> intra;
        for (const auto& s : r.per_pair) inter.push_back(s.chi_plus.to_double());
        for (const auto& s : r.intra_stats) intra.push_back(s.chi_plus.to_double());
        r.mw_test = mann_whitney_u(inter, intra);
    }
    return r;
}

inline Json to_json(const MannWhitneyResult& m) {
    Json j;
    j["u_statistic"] = m.u_statistic;
    j["z_score"] = m.z_score;
    j["effect_size_r"] = m.effect_size_r;
    return j;
}

inline Json to_json(const ClassPairStats& s) {
    Json j;
    j["class_from"] = s.class_from;
    j["class_to"] = s.class_to;
    j["chi_plus"] = to_json(s.chi_plus);
    j["chi_plus_decimal"] = s.chi_plus.to_double();
    j["n_pairs"] = s.n_pairs_evaluated;
    j["n_zero"] = s.n_zero;
    Json vals = Json::array();
    for (const auto& v : s.chi_values) vals.push_back(to_json(v));
    j["chi_values"] = std::move(vals);
    return j;
}

inline Json to_json(const GlobalFoldingReport& r) {
    Json j;
    j["phi"] = r.phi ? to_json(*r.phi) : Json(nullptr);
    j["phi_decimal"] = r.phi_decimal;
    j["num_classes"] = r.num_classes;
    j["budget_per_pair"] = r.budget_per_pair;
    j["seed"] = r.seed;
    Json pairs = Json::array();
    for (const auto& s : r.per_pair) pairs.push_back(to_json(s));
    j["per_pair"] = std::move(pairs);
    Json intra = Json::array();
    for (const auto& s : r.intra_stats) intra.push_back(to_json(s));
    j["intra"] = std::move(intra);
    j["mann_whitney"] = r.mw_test ? to_json(*r.mw_test) : Json(nullptr);
    return j;
}

/// One row per class pair: class_from,class_to,chi_plus,n_pairs,n_zero.
inline std::string global_report_csv(const GlobalFoldingReport& r) {
    std::string out = "class_from,class_to,chi_plus,n_pairs,n_zero\n";
    std::vector<const ClassPairStats*> rows;
    for (const auto& s : r.per_pair) rows.push_back(&s);
    for (const auto& s : r.intra_stats) rows.push_back(&s);
    std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
        return std::pair(a->class_from, a->class_to) < std::pair(b->class_from, b->class_to);
    });
    for (const auto* s : rows) {
        out += std::to_string(s->class_from) + "," + std::to_string(s->class_to) + "," +
               detail::format_double(s->chi_plus.to_double()) + "," + std::to_string(s->n_pairs_evaluated) + "," +
               std::to_string(s->n_zero) + "\n";
    }
    return out;
}

}  // namespace foldscope
