#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "foldscope/dataset.hpp"
#include "foldscope/folding.hpp"
#include "foldscope/mlp.hpp"
#include "foldscope/rng.hpp"

namespace foldscope {

struct PenaltyConfig {
    double lambda = 0.1;
    double beta = 10.0;          // log-sum-exp temperature
    double tau = 0.1;            // logistic temperature of the soft pattern
    std::int64_t every_n_epochs = 10;
    std::int64_t phi_budget = 16;  // probe pairs per penalty evaluation
    std::int64_t probe_points = 16;

    void validate() const {
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("penalty lambda must be >= 0");
        if (!(beta > 0.0)) throw ValidationError("penalty beta must be positive");
        if (!(tau > 0.0)) throw ValidationError("penalty tau must be positive");
        if (every_n_epochs < 1) throw ValidationError("penalty every_n_epochs must be >= 1");
        if (phi_budget < 1) throw ValidationError("penalty phi_budget must be >= 1");
        if (probe_points < 2) throw ValidationError("penalty probe_points must be >= 2");
    }
};

struct TrainConfig {
    SyntheticTask task = SyntheticTask::TwoGaussians;
    std::size_t n_samples = 200;
    double noise = 0.0;
    std::vector<std::size_t> layer_widths{2, 8, 2};  // input, hidden..., output
    ActivationKind activation = ActivationKind::ReLU;
    std::int64_t epochs = 200;
    double lr = 0.1;
    std::size_t batch_size = 16;
    std::uint64_t seed = 0;
    std::optional<PenaltyConfig> penalty;

    void validate() const {
        if (layer_widths.size() < 2) throw ValidationError("layer_widths needs at least input and output widths");
        for (auto w : layer_widths) {
            if (w == 0) throw ValidationError("layer widths must be positive");
        }
        if (layer_widths.front() != 2) throw ValidationError("synthetic tasks are 2-D: first width must be 2");
        if (layer_widths.back() < 2) throw ValidationError("output width must be at least the class count (2)");
        if (epochs < 1) throw ValidationError("epochs must be >= 1");
        if (!(lr > 0.0) || !std::isfinite(lr)) throw ValidationError("lr must be positive");
        if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
        if (n_samples < 4) throw ValidationError("n_samples must be >= 4");
        if (penalty) penalty->validate();
    }
};

struct EpochRecord {
    std::int64_t epoch = 0;
    double loss = 0.0;      // mean cross-entropy over the epoch's minibatches
    double accuracy = 0.0;  // train accuracy after the epoch
    std::optional<double> phi;      // smooth estimate, penalty epochs only
    std::optional<double> penalty;  // lambda / (phi + 1)^2, penalty epochs only

    friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;

    friend bool operator==(const TrainHistory&, const TrainHistory&) = default;
};

/// He-style initialisation: weights ~ N(0, 2 / fan_in), zero biases. Hidden
/// layers use `activation`, the output layer is linear.
inline Mlp init_network(std::span<const std::size_t> widths, ActivationKind activation, std::uint64_t seed) {
    if (widths.size() < 2) throw ValidationError("init_network: need at least input and output widths");
    for (auto w : widths) {
        if (w == 0) throw ValidationError("init_network: widths must be positive");
    }
    Rng rng(seed);
    std::vector<Layer> layers;
    for (std::size_t k = 1; k < widths.size(); ++k) {
        Layer l;
        l.weights = Matrix(widths[k], widths[k - 1]);
        const double sd = std::sqrt(2.0 / static_cast<double>(widths[k - 1]));
        for (double& w : l.weights.data) w = rng.normal(0.0, sd);
        l.bias.assign(widths[k], 0.0);
        l.activation = (k + 1 == widths.size()) ? ActivationKind::Identity : activation;
        layers.push_back(std::move(l));
    }
    return Mlp(widths.front(), std::move(layers));
}

inline double logistic(double v) {
    return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
}

/// Relaxed activation pattern: logistic(z / tau) of every hidden neuron's
/// pre-activation z. Since sign(f(z)) = sign(z) for all supported kinds, the
/// hard pattern is recovered as tau -> 0, and zero maps to 0.5.
inline std::vector<double> soft_pattern_from_trace(const ForwardTrace& tr, double tau) {
    std::vector<double> s;
    for (std::size_t k = 0; k + 1 < tr.pre.size(); ++k) {
        for (double z : tr.pre[k]) s.push_back(logistic(z / tau));
    }
    return s;
}

inline std::vector<double> soft_pattern(const Mlp& net, std::span<const double> x, double tau) {
    if (!(tau > 0.0)) throw ValidationError("soft_pattern: tau must be positive");
    return soft_pattern_from_trace(forward_trace(net, x), tau);
}

inline double soft_hamming(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw DimensionError("soft_hamming: length mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
    return d;
}

/// lambda / (phi + 1)^2
inline double folding_penalty(double phi, double lambda) { return lambda / ((phi + 1.0) * (phi + 1.0)); }

using ProbePair = std::pair<std::vector<double>, std::vector<double>>;

struct PenaltyResult {
    double value = 0.0;
    double phi = 0.0;
    Gradients grads;
    std::size_t probes_used = 0;
    std::size_t probes_skipped = 0;
};

namespace detail {

inline double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Smooth folding of one probe and d(chi)/d(soft pattern) at every probe point.
struct ProbeFold {
    double chi = 0.0;
    bool usable = false;
    std::vector<std::vector<double>> dchi_ds;
};

inline ProbeFold probe_fold(const std::vector<std::vector<double>>& s, double beta) {
    ProbeFold out;
    const std::size_t K = s.size();
    const std::size_t N = s.front().size();
    std::vector<double> from_start(K, 0.0);
    for (std::size_t k = 1; k < K; ++k) from_start[k] = soft_hamming(s[k], s[0]);
    double travelled = 0.0;
    for (std::size_t k = 1; k < K; ++k) travelled += soft_hamming(s[k], s[k - 1]);
    if (!(travelled > 1e-12)) return out;
    out.usable = true;

    const double soft_r1 = smooth_max(from_start, beta);
    const double c = 1.0 - soft_r1 / travelled;
    out.dchi_ds.assign(K, std::vector<double>(N, 0.0));
    if (c <= 0.0) return out;  // hinge: clamped at zero
    out.chi = c;

    // softmax weights of the log-sum-exp
    std::vector<double> w(K);
    for (std::size_t k = 0; k < K; ++k) w[k] = std::exp(beta * (from_start[k] - soft_r1));

    const double dc_dr1 = -1.0 / travelled;
    const double dc_dr2 = soft_r1 / (travelled * travelled);
    for (std::size_t k = 1; k < K; ++k) {
        for (std::size_t i = 0; i < N; ++i) {
            const double g1 = dc_dr1 * w[k] * sgn(s[k][i] - s[0][i]);
            out.dchi_ds[k][i] += g1;
            out.dchi_ds[0][i] -= g1;
            const double g2 = dc_dr2 * sgn(s[k][i] - s[k - 1][i]);
            out.dchi_ds[k][i] += g2;
            out.dchi_ds[k - 1][i] -= g2;
        }
    }
    return out;
}

}  // namespace detail

/// Smooth folding penalty over probe segments and its gradient w.r.t. every
/// weight and bias. Each probe is sampled at `probe_points` equidistant
/// points; its smooth chi is max(0, 1 - r1~ / r2) on soft patterns, and phi
/// is the mean over usable probes. Probes with identical endpoints or no
/// travelled distance are skipped.
inline PenaltyResult penalty_value_and_grad(const Mlp& net, std::span<const ProbePair> probes, const PenaltyConfig& cfg) {
    cfg.validate();
    if (probes.empty()) throw ValidationError("penalty: no probe pairs");
    PenaltyResult res{0.0, 0.0, Gradients(net), 0, 0};
    if (cfg.lambda == 0.0) return res;

    const auto K = static_cast<std::size_t>(cfg.probe_points);
    struct Probe {
        std::vector<ForwardTrace> traces;
        std::vector<std::vector<double>> soft;
        detail::ProbeFold fold;
    };
    std::vector<Probe> used;
    std::vector<double> x;
    for (const auto& [a, b] : probes) {
        if (a == b) {
            ++res.probes_skipped;
            continue;
        }
        Probe p;
        for (std::size_t k = 0; k < K; ++k) {
            detail::point_on_segment(a, b, static_cast<double>(k) / static_cast<double>(K - 1), x);
            p.traces.push_back(forward_trace(net, x));
            p.soft.push_back(soft_pattern_from_trace(p.traces.back(), cfg.tau));
        }
        p.fold = detail::probe_fold(p.soft, cfg.beta);
        if (!p.fold.usable) {
            ++res.probes_skipped;
            continue;
        }
        used.push_back(std::move(p));
    }
    res.probes_used = used.size();
    if (used.empty()) {
        res.value = folding_penalty(0.0, cfg.lambda);
        return res;
    }

    const double P = static_cast<double>(used.size());
    for (const auto& p : used) res.phi += p.fold.chi;
    res.phi /= P;
    res.value = folding_penalty(res.phi, cfg.lambda);
    const double dpen_dphi = -2.0 * cfg.lambda / std::pow(res.phi + 1.0, 3);

    const std::vector<double> no_output_grad(net.output_dim(), 0.0);
    for (const auto& p : used) {
        for (std::size_t k = 0; k < K; ++k) {
            std::vector<std::vector<double>> inject;
            std::size_t bit = 0;
            bool any = false;
            for (std::size_t l = 0; l + 1 < net.layers().size(); ++l) {
                std::vector<double> g(net.layers()[l].out_dim());
                for (double& gi : g) {
                    const double s = p.soft[k][bit];
                    gi = dpen_dphi / P * p.fold.dchi_ds[k][bit] * s * (1.0 - s) / cfg.tau;
                    any = any || gi != 0.0;
                    ++bit;
                }
                inject.push_back(std::move(g));
            }
            if (!any) continue;
            inject.emplace_back(net.output_dim(), 0.0);
            backward(net, p.traces[k], no_output_grad, inject, res.grads);
        }
    }
    return res;
}

inline void sgd_step(Mlp& net, const Gradients& g, double lr) {
    auto& layers = net.mutable_layers();
    for (std::size_t k = 0; k < layers.size(); ++k) {
        for (std::size_t i = 0; i < layers[k].weights.data.size(); ++i) layers[k].weights.data[i] -= lr * g.weights[k].data[i];
        for (std::size_t i = 0; i < layers[k].bias.size(); ++i) layers[k].bias[i] -= lr * g.bias[k][i];
    }
}

inline std::size_t predict(const Mlp& net, std::span<const double> x) {
    const auto out = forward(net, x).output;
    return static_cast<std::size_t>(std::max_element(out.begin(), out.end()) - out.begin());
}

inline double accuracy(const Mlp& net, const LabeledDataset& data) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (predict(net, data.inputs[i]) == static_cast<std::size_t>(data.labels[i])) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(data.size());
}

/// Draws `count` probe pairs whose endpoints come from different classes.
inline std::vector<ProbePair> draw_probe_pairs(const LabeledDataset& data, std::int64_t count, Rng& rng) {
    const auto groups = data.by_class();
    std::vector<std::size_t> present;
    for (std::size_t c = 0; c < groups.size(); ++c) {
        if (!groups[c].empty()) present.push_back(c);
    }
    if (present.size() < 2) throw ValidationError("probe pairs need at least two populated classes");
    std::vector<ProbePair> out;
    for (std::int64_t n = 0; n < count; ++n) {
        const std::size_t ci = rng.below(present.size());
        std::size_t cj = rng.below(present.size() - 1);
        if (cj >= ci) ++cj;
        const auto& gi = groups[present[ci]];
        const auto& gj = groups[present[cj]];
        out.emplace_back(data.inputs[gi[rng.below(gi.size())]], data.inputs[gj[rng.below(gj.size())]]);
    }
    return out;
}

struct TrainResult {
    Mlp net;
    TrainHistory history;
    LabeledDataset data;
};

/// Softmax cross-entropy on `net`'s logits for one sample; writes dL/dlogits.
inline double cross_entropy(std::span<const double> logits, std::size_t label, std::vector<double>& grad) {
    const double m = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double v : logits) z += std::exp(v - m);
    grad.resize(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) grad[i] = std::exp(logits[i] - m) / z;
    grad[label] -= 1.0;
    return -(logits[label] - m - std::log(z));
}

/// Minibatch SGD on softmax cross-entropy, optionally with the folding
/// penalty. On every `every_n_epochs`-th epoch the penalty is evaluated on
/// freshly drawn inter-class probe pairs and one extra SGD step on its
/// gradient is taken after the epoch's minibatches.
inline TrainResult train_on(const TrainConfig& cfg, LabeledDataset data) {
    cfg.validate();
    data.validate();
    if (static_cast<std::size_t>(data.num_classes) > cfg.layer_widths.back()) {
        throw ValidationError("output width is smaller than the class count");
    }
    TrainResult result{init_network(cfg.layer_widths, cfg.activation, derive_seed(cfg.seed, 2)), {}, {}};
    Mlp& net = result.net;
    Rng shuffle_rng(derive_seed(cfg.seed, 3));
    Rng probe_rng(derive_seed(cfg.seed, 4));

    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> grad_out;
    const std::vector<std::vector<double>> no_inject;

    for (std::int64_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.below(i)]);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            Gradients g(net);
            for (std::size_t b = start; b < end; ++b) {
                const std::size_t idx = order[b];
                const auto tr = forward_trace(net, data.inputs[idx]);
                loss_sum += cross_entropy(tr.output(), static_cast<std::size_t>(data.labels[idx]), grad_out);
                backward(net, tr, grad_out, no_inject, g);
            }
            g.scale(1.0 / static_cast<double>(end - start));
            sgd_step(net, g, cfg.lr);
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.loss = loss_sum / static_cast<double>(data.size());
        if (!std::isfinite(rec.loss)) {
            throw NumericError("training diverged at epoch " + std::to_string(epoch) + " (non-finite loss)");
        }
        if (cfg.penalty && cfg.penalty->lambda > 0.0 && epoch % cfg.penalty->every_n_epochs == 0) {
            const auto probes = draw_probe_pairs(data, cfg.penalty->phi_budget, probe_rng);
            const auto pen = penalty_value_and_grad(net, probes, *cfg.penalty);
            if (!std::isfinite(pen.value)) throw NumericError("penalty became non-finite at epoch " + std::to_string(epoch));
            sgd_step(net, pen.grads, cfg.lr);
            rec.phi = pen.phi;
            rec.penalty = pen.value;
        }
        rec.accuracy = accuracy(net, data);
        result.history.epochs.push_back(rec);
    }
    result.data = std::move(data);
    return result;
}

inline LabeledDataset dataset_for(const TrainConfig& cfg) {
    return make_dataset(cfg.task, cfg.n_samples, cfg.noise, derive_seed(cfg.seed, 1));
}

inline TrainResult train(const TrainConfig& cfg) {
    cfg.validate();
    return train_on(cfg, dataset_for(cfg));
}

/// epoch,loss,accuracy,phi,penalty (phi and penalty empty on plain epochs)
inline std::string history_to_csv(const TrainHistory& h) {
    std::string out = "epoch,loss,accuracy,phi,penalty\n";
    for (const auto& e : h.epochs) {
        out += std::to_string(e.epoch) + "," + detail::format_double(e.loss) + "," + detail::format_double(e.accuracy) + ",";
        if (e.phi) out += detail::format_double(*e.phi);
        out += ",";
        if (e.penalty) out += detail::format_double(*e.penalty);
        out += "\n";
    }
    return out;
}

}  // namespace foldscope
