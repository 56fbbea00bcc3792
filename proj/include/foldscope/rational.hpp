#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "foldscope/error.hpp"

namespace foldscope {

/// Exact ratio of 64-bit integers, always reduced with a positive denominator.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t num) : num_(num), den_(1) {}  // NOLINT(implicit)
    Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den_ == 0) throw ValidationError("rational with zero denominator");
        normalize();
    }

    constexpr std::int64_t num() const noexcept { return num_; }
    constexpr std::int64_t den() const noexcept { return den_; }
    constexpr double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

    // Arithmetic is carried out in 128 bits and reduced before narrowing;
    // a result that still does not fit in 64 bits raises NumericError.
    friend Rational operator+(const Rational& a, const Rational& b) {
        return make(Wide(a.num_) * b.den_ + Wide(b.num_) * a.den_, Wide(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return make(Wide(a.num_) * b.den_ - Wide(b.num_) * a.den_, Wide(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return make(Wide(a.num_) * b.num_, Wide(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw ValidationError("rational division by zero");
        return make(Wide(a.num_) * b.den_, Wide(a.den_) * b.num_);
    }

    friend constexpr bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
    }

    std::string to_string() const { return std::to_string(num_) + "/" + std::to_string(den_); }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

private:
    using Wide = __int128;

    static Wide wide_gcd(Wide a, Wide b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            const Wide r = a % b;
            a = b;
            b = r;
        }
        return a;
    }

    static Rational make(Wide num, Wide den) {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const Wide g = wide_gcd(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        constexpr Wide lo = std::numeric_limits<std::int64_t>::min();
        constexpr Wide hi = std::numeric_limits<std::int64_t>::max();
        if (num < lo || num > hi || den > hi) throw NumericError("rational overflow");
        return {static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
    }

    void normalize() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        const std::int64_t g = std::gcd(num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline Rational abs(const Rational& r) { return r.num() < 0 ? Rational(-r.num(), r.den()) : r; }

}  // namespace foldscope
