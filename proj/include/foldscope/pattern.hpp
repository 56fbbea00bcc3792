#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "foldscope/error.hpp"

namespace foldscope {

/// Binary activation pattern over all hidden neurons, packed 64 bits per word.
/// Bit i is 1 iff hidden neuron i had a strictly positive post-activation.
class ActivationPattern {
public:
    ActivationPattern() = default;
    explicit ActivationPattern(std::size_t n_bits) : size_(n_bits), words_((n_bits + 63) / 64, 0) {}

    /// Parses an ASCII bit string such as "0101".
    static ActivationPattern from_string(std::string_view bits) {
        ActivationPattern p(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] == '1') {
                p.set(i, true);
            } else if (bits[i] != '0') {
                throw ValidationError("pattern string contains '" + std::string(1, bits[i]) + "'");
            }
        }
        return p;
    }

    std::size_t size() const noexcept { return size_; }

    bool get(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }

    void set(std::size_t i, bool value) noexcept {
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (value) {
            words_[i >> 6] |= mask;
        } else {
            words_[i >> 6] &= ~mask;
        }
    }

    std::size_t count() const noexcept {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    std::string to_string() const {
        std::string s(size_, '0');
        for (std::size_t i = 0; i < size_; ++i) {
            if (get(i)) s[i] = '1';
        }
        return s;
    }

    const std::vector<std::uint64_t>& words() const noexcept { return words_; }

    friend bool operator==(const ActivationPattern&, const ActivationPattern&) = default;

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Number of differing bit positions.
inline std::size_t hamming(const ActivationPattern& p, const ActivationPattern& q) {
    if (p.size() != q.size()) {
        throw DimensionError("hamming: pattern lengths differ (" + std::to_string(p.size()) + " vs " +
                             std::to_string(q.size()) + ")");
    }
    std::size_t d = 0;
    const auto& a = p.words();
    const auto& b = q.words();
    for (std::size_t i = 0; i < a.size(); ++i) d += static_cast<std::size_t>(std::popcount(a[i] ^ b[i]));
    return d;
}

}  // namespace foldscope
