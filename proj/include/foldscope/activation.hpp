#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

namespace foldscope {

enum class ActivationKind { ReLU, GELU, SiLU, Tanh, Identity };

inline std::string_view activation_name(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::ReLU: return "relu";
        case ActivationKind::GELU: return "gelu";
        case ActivationKind::SiLU: return "silu";
        case ActivationKind::Tanh: return "tanh";
        case ActivationKind::Identity: return "identity";
    }
    return "identity";
}

inline std::optional<ActivationKind> parse_activation(std::string_view name) {
    if (name == "relu") return ActivationKind::ReLU;
    if (name == "gelu") return ActivationKind::GELU;
    if (name == "silu") return ActivationKind::SiLU;
    if (name == "tanh") return ActivationKind::Tanh;
    if (name == "identity") return ActivationKind::Identity;
    return std::nullopt;
}

// GELU is the exact erf form, x * Phi(x).
inline double apply_activation(ActivationKind kind, double v) {
    switch (kind) {
        case ActivationKind::ReLU: return v > 0.0 ? v : 0.0;
        case ActivationKind::GELU: return 0.5 * v * std::erfc(-v * std::numbers::sqrt2 / 2.0);
        case ActivationKind::SiLU: return v / (1.0 + std::exp(-v));
        case ActivationKind::Tanh: return std::tanh(v);
        case ActivationKind::Identity: return v;
    }
    return v;
}

// d/dv of apply_activation. ReLU uses 0 at the kink.
inline double activation_derivative(ActivationKind kind, double v) {
    switch (kind) {
        case ActivationKind::ReLU: return v > 0.0 ? 1.0 : 0.0;
        case ActivationKind::GELU: {
            const double cdf = 0.5 * std::erfc(-v * std::numbers::sqrt2 / 2.0);
            const double pdf = std::exp(-0.5 * v * v) * std::numbers::inv_sqrtpi / std::numbers::sqrt2;
            return cdf + v * pdf;
        }
        case ActivationKind::SiLU: {
            const double s = 1.0 / (1.0 + std::exp(-v));
            return s * (1.0 + v * (1.0 - s));
        }
        case ActivationKind::Tanh: {
            const double t = std::tanh(v);
            return 1.0 - t * t;
        }
        case ActivationKind::Identity: return 1.0;
    }
    return 1.0;
}

}  // namespace foldscope
