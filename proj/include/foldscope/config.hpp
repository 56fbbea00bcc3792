#pragma once

#include <charconv>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "foldscope/trainer.hpp"

namespace foldscope {

namespace detail {

template <class Int>
Int parse_int_value(std::string_view key, std::string_view v) {
    Int out{};
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw ValidationError("config: '" + std::string(key) + "' expects an integer, got '" + std::string(v) + "'");
    }
    return out;
}

inline double parse_real_value(std::string_view key, std::string_view v) {
    double out = 0.0;
    if (!parse_double(v, out) || !std::isfinite(out)) {
        throw ValidationError("config: '" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
    }
    return out;
}

}  // namespace detail

/// Parses a key = value training config. '#' starts a comment. Recognised keys:
///   task, n_samples, noise, layer_widths (comma list), activation, epochs,
///   lr, batch_size, seed, and penalty.{lambda, beta, tau, every_n_epochs,
///   phi_budget, probe_points}. Any penalty.* key enables the penalty.
inline TrainConfig parse_train_config(const std::string& text) {
    TrainConfig cfg;
    PenaltyConfig pen;
    bool has_penalty = false;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        if (value.empty()) throw ValidationError("config line " + std::to_string(line_no) + ": empty value");

        if (key == "task") {
            const auto t = parse_task(value);
            if (!t) throw ValidationError("config: unknown task '" + std::string(value) + "'");
            cfg.task = *t;
        } else if (key == "n_samples") {
            cfg.n_samples = detail::parse_int_value<std::size_t>(key, value);
        } else if (key == "noise") {
            cfg.noise = detail::parse_real_value(key, value);
        } else if (key == "layer_widths") {
            cfg.layer_widths.clear();
            for (auto part : detail::split(value, ',')) {
                cfg.layer_widths.push_back(detail::parse_int_value<std::size_t>(key, detail::trim(part)));
            }
        } else if (key == "activation") {
            const auto a = parse_activation(value);
            if (!a) throw ValidationError("config: unknown activation '" + std::string(value) + "'");
            cfg.activation = *a;
        } else if (key == "epochs") {
            cfg.epochs = detail::parse_int_value<std::int64_t>(key, value);
        } else if (key == "lr") {
            cfg.lr = detail::parse_real_value(key, value);
        } else if (key == "batch_size") {
            cfg.batch_size = detail::parse_int_value<std::size_t>(key, value);
        } else if (key == "seed") {
            cfg.seed = detail::parse_int_value<std::uint64_t>(key, value);
        } else if (key.starts_with("penalty.")) {
            has_penalty = true;
            const auto sub = key.substr(8);
            if (sub == "lambda") {
                pen.lambda = detail::parse_real_value(key, value);
            } else if (sub == "beta") {
                pen.beta = detail::parse_real_value(key, value);
            } else if (sub == "tau") {
                pen.tau = detail::parse_real_value(key, value);
            } else if (sub == "every_n_epochs") {
                pen.every_n_epochs = detail::parse_int_value<std::int64_t>(key, value);
            } else if (sub == "phi_budget") {
                pen.phi_budget = detail::parse_int_value<std::int64_t>(key, value);
            } else if (sub == "probe_points") {
                pen.probe_points = detail::parse_int_value<std::int64_t>(key, value);
            } else {
                throw ValidationError("config: unknown key '" + std::string(key) + "'");
            }
        } else {
            throw ValidationError("config: unknown key '" + std::string(key) + "'");
        }
    }
    if (has_penalty) cfg.penalty = pen;
    cfg.validate();
    return cfg;
}

inline TrainConfig load_train_config_file(const std::string& path) { return parse_train_config(read_text_file(path)); }

}  // namespace foldscope
