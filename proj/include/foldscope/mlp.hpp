#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "foldscope/activation.hpp"
#include "foldscope/error.hpp"
#include "foldscope/pattern.hpp"

namespace foldscope {

/// Dense row-major matrix; rows are output neurons.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

struct Layer {
    Matrix weights;
    std::vector<double> bias;
    ActivationKind activation = ActivationKind::ReLU;
    bool is_output = false;

    std::size_t in_dim() const noexcept { return weights.cols; }
    std::size_t out_dim() const noexcept { return weights.rows; }

    friend bool operator==(const Layer&, const Layer&) = default;
};

/// Feed-forward network. Immutable once constructed; the last layer is the
/// output layer and contributes no pattern bits.
class Mlp {
public:
    Mlp() = default;

    /// Validates shapes and finiteness. Sets is_output on the last layer only.
    Mlp(std::size_t input_dim, std::vector<Layer> layers) : input_dim_(input_dim), layers_(std::move(layers)) {
        if (input_dim_ == 0) throw ModelError(ModelError::Reason::Malformed, std::nullopt, "input_dim must be positive");
        if (layers_.empty()) throw ModelError(ModelError::Reason::Malformed, std::nullopt, "no layers");
        std::size_t expected_in = input_dim_;
        for (std::size_t k = 0; k < layers_.size(); ++k) {
            Layer& layer = layers_[k];
            if (layer.out_dim() == 0) throw ModelError(ModelError::Reason::DimensionMismatch, k, "layer has no neurons");
            if (layer.weights.data.size() != layer.weights.rows * layer.weights.cols) {
                throw ModelError(ModelError::Reason::DimensionMismatch, k, "weight storage does not match shape");
            }
            if (layer.in_dim() != expected_in) {
                throw ModelError(ModelError::Reason::DimensionMismatch, k,
                                 "expects " + std::to_string(layer.in_dim()) + " inputs but previous width is " +
                                     std::to_string(expected_in));
            }
            if (layer.bias.size() != layer.out_dim()) {
                throw ModelError(ModelError::Reason::DimensionMismatch, k,
                                 "bias length " + std::to_string(layer.bias.size()) + " != weight rows " +
                                     std::to_string(layer.out_dim()));
            }
            for (double w : layer.weights.data) {
                if (!std::isfinite(w)) throw ModelError(ModelError::Reason::NonFinite, k, "weight");
            }
            for (double b : layer.bias) {
                if (!std::isfinite(b)) throw ModelError(ModelError::Reason::NonFinite, k, "bias");
            }
            layer.is_output = (k + 1 == layers_.size());
            if (!layer.is_output) total_hidden_ += layer.out_dim();
            expected_in = layer.out_dim();
        }
    }

    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t output_dim() const noexcept { return layers_.empty() ? 0 : layers_.back().out_dim(); }
    std::size_t total_hidden() const noexcept { return total_hidden_; }
    std::size_t hidden_layer_count() const noexcept { return layers_.empty() ? 0 : layers_.size() - 1; }
    const std::vector<Layer>& layers() const noexcept { return layers_; }

    /// Mutable access for trainers. Shapes must not change.
    std::vector<Layer>& mutable_layers() noexcept { return layers_; }

    std::size_t parameter_count() const noexcept {
        std::size_t n = 0;
        for (const auto& l : layers_) n += l.weights.data.size() + l.bias.size();
        return n;
    }

    friend bool operator==(const Mlp&, const Mlp&) = default;

private:
    std::size_t input_dim_ = 0;
    std::size_t total_hidden_ = 0;
    std::vector<Layer> layers_;
};

/// Intermediate values of one forward pass. inputs[k] feeds layer k,
/// pre[k] is the affine output, post[k] the activation.
struct ForwardTrace {
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> post;

    const std::vector<double>& output() const { return post.back(); }
};

namespace detail {

inline void check_input(const Mlp& net, std::span<const double> x) {
    if (x.size() != net.input_dim()) {
        throw DimensionError("input has dimension " + std::to_string(x.size()) + ", model expects " +
                             std::to_string(net.input_dim()));
    }
}

inline void affine(const Layer& layer, std::span<const double> in, std::vector<double>& out) {
    out.resize(layer.out_dim());
    for (std::size_t i = 0; i < layer.out_dim(); ++i) {
        const auto w = layer.weights.row(i);
        double acc = layer.bias[i];
        for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * in[j];
        out[i] = acc;
    }
}

}  // namespace detail

inline ForwardTrace forward_trace(const Mlp& net, std::span<const double> x) {
    detail::check_input(net, x);
    ForwardTrace tr;
    const auto n = net.layers().size();
    tr.inputs.resize(n);
    tr.pre.resize(n);
    tr.post.resize(n);
    std::vector<double> current(x.begin(), x.end());
    for (std::size_t k = 0; k < n; ++k) {
        const Layer& layer = net.layers()[k];
        detail::affine(layer, current, tr.pre[k]);
        tr.post[k].resize(tr.pre[k].size());
        for (std::size_t i = 0; i < tr.pre[k].size(); ++i) tr.post[k][i] = apply_activation(layer.activation, tr.pre[k][i]);
        tr.inputs[k] = std::move(current);
        current = tr.post[k];
    }
    return tr;
}

struct ForwardResult {
    std::vector<std::vector<double>> hidden;  // post-activation per hidden layer
    std::vector<double> output;
};

inline ForwardResult forward(const Mlp& net, std::span<const double> x) {
    auto tr = forward_trace(net, x);
    ForwardResult r;
    r.output = std::move(tr.post.back());
    tr.post.pop_back();
    r.hidden = std::move(tr.post);
    return r;
}

/// Thresholds hidden post-activations at strictly > 0 (no tolerance band).
/// Bits are concatenated in layer order, neuron order within a layer.
inline ActivationPattern activation_pattern(const Mlp& net, std::span<const double> x) {
    detail::check_input(net, x);
    ActivationPattern p(net.total_hidden());
    std::vector<double> current(x.begin(), x.end());
    std::vector<double> next;
    std::size_t bit = 0;
    for (const Layer& layer : net.layers()) {
        if (layer.is_output) break;
        detail::affine(layer, current, next);
        for (double& v : next) {
            v = apply_activation(layer.activation, v);
            p.set(bit++, v > 0.0);
        }
        std::swap(current, next);
    }
    return p;
}

/// Pattern from the sign of the pre-activations. Agrees with
/// activation_pattern for every supported kind since sign(f(z)) = sign(z).
inline ActivationPattern preactivation_pattern(const Mlp& net, std::span<const double> x) {
    const auto tr = forward_trace(net, x);
    ActivationPattern p(net.total_hidden());
    std::size_t bit = 0;
    for (std::size_t k = 0; k + 1 < tr.pre.size(); ++k) {
        for (double z : tr.pre[k]) p.set(bit++, z > 0.0);
    }
    return p;
}

/// Gradient storage mirroring the layer list.
struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> bias;

    explicit Gradients(const Mlp& net) {
        for (const auto& l : net.layers()) {
            weights.emplace_back(l.weights.rows, l.weights.cols);
            bias.emplace_back(l.bias.size(), 0.0);
        }
    }

    void scale(double s) {
        for (auto& m : weights) for (double& v : m.data) v *= s;
        for (auto& b : bias) for (double& v : b) v *= s;
    }

    void add(const Gradients& other, double s = 1.0) {
        for (std::size_t k = 0; k < weights.size(); ++k) {
            for (std::size_t i = 0; i < weights[k].data.size(); ++i) weights[k].data[i] += s * other.weights[k].data[i];
            for (std::size_t i = 0; i < bias[k].size(); ++i) bias[k][i] += s * other.bias[k][i];
        }
    }

    /// Flattened in the same order as flat_parameters().
    std::vector<double> flatten() const {
        std::vector<double> out;
        for (std::size_t k = 0; k < weights.size(); ++k) {
            out.insert(out.end(), weights[k].data.begin(), weights[k].data.end());
            out.insert(out.end(), bias[k].begin(), bias[k].end());
        }
        return out;
    }
};

/// Backpropagates through one recorded pass and accumulates into grads.
/// grad_output is dL/d(post) of the output layer; hidden_pre_grads, when not
/// empty, adds dL/d(pre) injected directly at each hidden layer.
inline void backward(const Mlp& net, const ForwardTrace& tr, std::span<const double> grad_output,
                     const std::vector<std::vector<double>>& hidden_pre_grads, Gradients& grads) {
    const auto& layers = net.layers();
    std::vector<double> g(grad_output.begin(), grad_output.end());
    std::vector<double> dz;
    for (std::size_t k = layers.size(); k-- > 0;) {
        const Layer& layer = layers[k];
        dz.assign(layer.out_dim(), 0.0);
        for (std::size_t i = 0; i < dz.size(); ++i) {
            dz[i] = g[i] * activation_derivative(layer.activation, tr.pre[k][i]);
        }
        if (!layer.is_output && !hidden_pre_grads.empty()) {
            for (std::size_t i = 0; i < dz.size(); ++i) dz[i] += hidden_pre_grads[k][i];
        }
        const auto& in = tr.inputs[k];
        Matrix& gw = grads.weights[k];
        for (std::size_t i = 0; i < dz.size(); ++i) {
            grads.bias[k][i] += dz[i];
            if (dz[i] == 0.0) continue;
            for (std::size_t j = 0; j < in.size(); ++j) gw(i, j) += dz[i] * in[j];
        }
        if (k == 0) break;
        g.assign(layer.in_dim(), 0.0);
        for (std::size_t i = 0; i < dz.size(); ++i) {
            if (dz[i] == 0.0) continue;
            const auto w = layer.weights.row(i);
            for (std::size_t j = 0; j < w.size(); ++j) g[j] += w[j] * dz[i];
        }
    }
}

inline std::vector<double> flat_parameters(const Mlp& net) {
    std::vector<double> out;
    for (const auto& l : net.layers()) {
        out.insert(out.end(), l.weights.data.begin(), l.weights.data.end());
        out.insert(out.end(), l.bias.begin(), l.bias.end());
    }
    return out;
}

inline void set_flat_parameters(Mlp& net, std::span<const double> params) {
    if (params.size() != net.parameter_count()) throw DimensionError("parameter vector has wrong length");
    std::size_t p = 0;
    for (auto& l : net.mutable_layers()) {
        for (double& w : l.weights.data) w = params[p++];
        for (double& b : l.bias) b = params[p++];
    }
}

}  // namespace foldscope
