#pragma once

#include <span>
#include <string>
#include <vector>

#include "foldscope/global.hpp"
#include "foldscope/trainer.hpp"

namespace foldscope {

struct DepthSweepRow {
    std::size_t depth = 0;
    double accuracy = 0.0;
    double phi = 0.0;

    friend bool operator==(const DepthSweepRow&, const DepthSweepRow&) = default;
};

/// Trains one network per depth (hidden layers of the template's first hidden
/// width) with the template's seed, then measures global folding on the
/// training set. Exploratory: no trend is asserted.
inline std::vector<DepthSweepRow> depth_sweep(const TrainConfig& tmpl, std::span<const std::size_t> depths,
                                              std::int64_t budget_per_pair, const SamplerSettings& sampler = {},
                                              unsigned workers = 0) {
    if (depths.empty()) throw ValidationError("depth sweep: no depths given");
    if (tmpl.layer_widths.size() < 3) throw ValidationError("depth sweep: template needs a hidden layer to copy its width");
    for (auto d : depths) {
        if (d == 0) throw ValidationError("depth sweep: depths must be >= 1");
    }
    const std::size_t hidden = tmpl.layer_widths[1];
    std::vector<DepthSweepRow> rows(depths.size());
    parallel_for(
        depths.size(),
        [&](std::size_t i) {
            TrainConfig cfg = tmpl;
            cfg.layer_widths.assign(1, tmpl.layer_widths.front());
            cfg.layer_widths.insert(cfg.layer_widths.end(), depths[i], hidden);
            cfg.layer_widths.push_back(tmpl.layer_widths.back());
            const auto res = train(cfg);
            GlobalOptions opts;
            opts.sampler = sampler;
            opts.include_intra = false;
            opts.workers = 1;
            const auto report = global_phi(res.net, res.data, budget_per_pair, tmpl.seed, opts);
            rows[i] = {depths[i], res.history.epochs.back().accuracy, report.phi_decimal};
        },
        workers == 0 ? worker_count() : workers);
    return rows;
}

inline std::string depth_sweep_csv(std::span<const DepthSweepRow> rows) {
    std::string out = "depth,accuracy,phi\n";
    for (const auto& r : rows) {
        out += std::to_string(r.depth) + "," + detail::format_double(r.accuracy) + "," + detail::format_double(r.phi) + "\n";
    }
    return out;
}

}  // namespace foldscope
