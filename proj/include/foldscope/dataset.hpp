#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "foldscope/json_util.hpp"
#include "foldscope/rng.hpp"

namespace foldscope {

/// Input rows with 0-based class ids in [0, num_classes).
struct LabeledDataset {
    std::vector<std::vector<double>> inputs;
    std::vector<int> labels;
    int num_classes = 0;

    std::size_t size() const noexcept { return inputs.size(); }
    std::size_t input_dim() const noexcept { return inputs.empty() ? 0 : inputs.front().size(); }

    void validate() const {
        if (inputs.size() != labels.size()) throw ValidationError("dataset: inputs and labels differ in length");
        const auto d = input_dim();
        for (const auto& x : inputs) {
            if (x.size() != d) throw DimensionError("dataset: rows have different dimensions");
        }
        for (int y : labels) {
            if (y < 0 || y >= num_classes) throw ValidationError("dataset: label " + std::to_string(y) + " out of range");
        }
    }

    /// Row indices grouped by class.
    std::vector<std::vector<std::size_t>> by_class() const {
        std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(num_classes));
        for (std::size_t i = 0; i < labels.size(); ++i) groups[static_cast<std::size_t>(labels[i])].push_back(i);
        return groups;
    }

    friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace detail

/// CSV with header x_0,...,x_{d-1},label.
inline LabeledDataset parse_dataset_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("dataset CSV: missing header");
    const auto header = detail::split(detail::trim(line), ',');
    if (header.size() < 2 || detail::trim(header.back()) != "label") {
        throw ValidationError("dataset CSV: header must be x_0,...,x_{d-1},label");
    }
    const std::size_t d = header.size() - 1;
    for (std::size_t i = 0; i < d; ++i) {
        if (detail::trim(header[i]) != "x_" + std::to_string(i)) {
            throw ValidationError("dataset CSV: expected column x_" + std::to_string(i));
        }
    }
    LabeledDataset ds;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split(detail::trim(line), ',');
        if (cells.size() != d + 1) {
            throw DimensionError("dataset CSV line " + std::to_string(line_no) + ": expected " + std::to_string(d + 1) +
                                 " columns");
        }
        std::vector<double> x(d);
        for (std::size_t i = 0; i < d; ++i) {
            if (!detail::parse_double(cells[i], x[i]) || !std::isfinite(x[i])) {
                throw ValidationError("dataset CSV line " + std::to_string(line_no) + ": bad number in column x_" +
                                      std::to_string(i));
            }
        }
        const auto lab = detail::trim(cells[d]);
        int y = 0;
        const auto res = std::from_chars(lab.data(), lab.data() + lab.size(), y);
        if (res.ec != std::errc{} || res.ptr != lab.data() + lab.size() || y < 0) {
            throw ValidationError("dataset CSV line " + std::to_string(line_no) + ": label must be a non-negative integer");
        }
        ds.inputs.push_back(std::move(x));
        ds.labels.push_back(y);
        ds.num_classes = std::max(ds.num_classes, y + 1);
    }
    if (ds.inputs.empty()) throw ValidationError("dataset CSV: no rows");
    return ds;
}

inline LabeledDataset load_dataset_file(const std::string& path) { return parse_dataset_csv(read_text_file(path)); }

inline std::string dataset_to_csv(const LabeledDataset& ds) {
    std::string out;
    for (std::size_t i = 0; i < ds.input_dim(); ++i) out += "x_" + std::to_string(i) + ",";
    out += "label\n";
    for (std::size_t r = 0; r < ds.size(); ++r) {
        for (double v : ds.inputs[r]) out += detail::format_double(v) + ",";
        out += std::to_string(ds.labels[r]) + "\n";
    }
    return out;
}

enum class SyntheticTask { TwoGaussians, XorQuadrants, ConcentricRings };

inline std::optional<SyntheticTask> parse_task(std::string_view name) {
    if (name == "two_gaussians") return SyntheticTask::TwoGaussians;
    if (name == "xor_quadrants") return SyntheticTask::XorQuadrants;
    if (name == "concentric_rings") return SyntheticTask::ConcentricRings;
    return std::nullopt;
}

inline std::string_view task_name(SyntheticTask t) {
    switch (t) {
        case SyntheticTask::TwoGaussians: return "two_gaussians";
        case SyntheticTask::XorQuadrants: return "xor_quadrants";
        case SyntheticTask::ConcentricRings: return "concentric_rings";
    }
    return "two_gaussians";
}

/// Two-class 2-D toy problems, labels alternating so classes are balanced.
/// Every point is clamped to [-1, 1]^2. `noise` is the standard deviation of
/// extra Gaussian jitter added to each coordinate.
///  - two_gaussians: clouds at (-0.5,-0.5) and (0.5,0.5) with sd 0.15,
///    truncated to radius 0.45, hence separable by x + y = 0 when noise = 0
///  - xor_quadrants: quadrant centres (+-0.5, +-0.5), label = [x > 0] xor [y > 0]
///  - concentric_rings: radius 0.3 (class 0) and 0.8 (class 1)
inline LabeledDataset make_dataset(SyntheticTask task, std::size_t n, double noise, std::uint64_t seed) {
    if (n < 4) throw ValidationError("make_dataset: need at least 4 samples");
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw ValidationError("make_dataset: noise must be >= 0");
    Rng rng(seed);
    LabeledDataset ds;
    ds.num_classes = 2;
    const auto clamp = [](double v) { return std::clamp(v, -1.0, 1.0); };
    for (std::size_t i = 0; i < n; ++i) {
        double x = 0.0;
        double y = 0.0;
        int label = static_cast<int>(i % 2);
        switch (task) {
            case SyntheticTask::TwoGaussians: {
                const double c = label == 0 ? -0.5 : 0.5;
                double dx = 0.0;
                double dy = 0.0;
                do {
                    dx = rng.normal(0.0, 0.15);
                    dy = rng.normal(0.0, 0.15);
                } while (dx * dx + dy * dy > 0.45 * 0.45);
                x = c + dx;
                y = c + dy;
                break;
            }
            case SyntheticTask::XorQuadrants: {
                static constexpr double kCx[4] = {0.5, -0.5, -0.5, 0.5};
                static constexpr double kCy[4] = {0.5, 0.5, -0.5, -0.5};
                const std::size_t q = i % 4;
                x = kCx[q];
                y = kCy[q];
                label = ((x > 0.0) != (y > 0.0)) ? 1 : 0;
                break;
            }
            case SyntheticTask::ConcentricRings: {
                const double r = label == 0 ? 0.3 : 0.8;
                const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
                x = r * std::cos(a);
                y = r * std::sin(a);
                break;
            }
        }
        if (noise > 0.0) {
            x += rng.normal(0.0, noise);
            y += rng.normal(0.0, noise);
        }
        ds.inputs.push_back({clamp(x), clamp(y)});
        ds.labels.push_back(label);
    }
    return ds;
}

}  // namespace foldscope
