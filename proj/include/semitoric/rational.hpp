#pragma once

// Exact rational arithmetic on 64-bit integers. All polygon computations run
// on this type; Delzant determinants must be exactly +-1 with no tolerance,
// so nothing here is allowed to round. Intermediate products go through
// __int128 and overflow of the reduced result throws rather than wrapping.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

#include "semitoric/errors.hpp"

namespace semitoric {

class Rational {
public:
    Rational() = default;
    Rational(std::int64_t n) : num_(n), den_(1) {} // NOLINT(google-explicit-constructor)
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

    static Rational parse(std::string_view s) {
        const auto slash = s.find('/');
        try {
            if (slash == std::string_view::npos)
                return Rational(to_i64(s));
            return Rational(to_i64(s.substr(0, slash)), to_i64(s.substr(slash + 1)));
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw SchemaError("invalid rational literal '" + std::string(s) + "'");
        }
    }

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }

    double to_double() const noexcept {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    int sign() const noexcept { return (num_ > 0) - (num_ < 0); }
    Rational abs() const { return num_ < 0 ? Rational(-num_, den_) : *this; }

    bool is_integer() const noexcept { return den_ == 1; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from_i128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                         i128(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return from_i128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                         i128(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_i128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw SchemaError("division by zero rational");
        return from_i128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }
    Rational operator-() const { return Rational(-num_, den_); }

    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) noexcept { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) noexcept {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) noexcept { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) noexcept { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) noexcept { return !(a < b); }

    // Best rational approximation of x with denominator <= max_den
    // (continued-fraction convergents / semiconvergents).
    static Rational approximate(double x, std::int64_t max_den);

private:
    using i128 = __int128;

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;

    static std::int64_t to_i64(std::string_view s) {
        if (s.empty()) throw SchemaError("empty integer literal");
        std::size_t pos = 0;
        const long long v = std::stoll(std::string(s), &pos);
        if (pos != s.size()) throw SchemaError("trailing characters in integer literal");
        return v;
    }

    void normalize() {
        if (den_ == 0) throw SchemaError("zero denominator in rational");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
        if (num_ == 0) den_ = 1;
    }

    static Rational from_i128(i128 n, i128 d) {
        if (d == 0) throw SchemaError("zero denominator in rational");
        if (d < 0) { n = -n; d = -d; }
        const i128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        constexpr i128 lo = -i128(INT64_MAX) - 1, hi = INT64_MAX;
        if (n < lo || n > hi || d > hi)
            throw OverflowError("rational arithmetic exceeded 64-bit range");
        Rational r;
        r.num_ = static_cast<std::int64_t>(n == 0 ? 0 : n);
        r.den_ = static_cast<std::int64_t>(n == 0 ? 1 : d);
        return r;
    }

    static i128 gcd128(i128 a, i128 b) {
        while (b != 0) { const i128 t = a % b; a = b; b = t; }
        return a;
    }
};

inline Rational Rational::approximate(double x, std::int64_t max_den) {
    const bool neg = x < 0.0;
    const double v = neg ? -x : x;
    // Continued-fraction convergents p/q with q bounded; finish with the
    // best semiconvergent if the next convergent overshoots max_den.
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = v;
    for (int it = 0; it < 64; ++it) {
        const double fa = std::floor(frac);
        if (fa > 9e17) break;
        const auto a = static_cast<std::int64_t>(fa);
        const std::int64_t p2 = a * p1 + p0;
        const std::int64_t q2 = a * q1 + q0;
        if (q2 > max_den) {
            if (q1 > 0) {
                const std::int64_t k = (max_den - q0) / q1;
                const std::int64_t ps = p0 + k * p1, qs = q0 + k * q1;
                if (qs > 0) {
                    const double e1 = std::abs(v - double(p1) / double(q1));
                    const double es = std::abs(v - double(ps) / double(qs));
                    if (es < e1) { p1 = ps; q1 = qs; }
                }
            }
            break;
        }
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        const double rem = frac - fa;
        if (rem < 1e-15) break;
        frac = 1.0 / rem;
    }
    const Rational r(p1, q1 == 0 ? 1 : q1);
    return neg ? -r : r;
}

struct RatPoint {
    Rational x, y;
    friend bool operator==(const RatPoint& a, const RatPoint& b) {
        return a.x == b.x && a.y == b.y;
    }
    friend RatPoint operator+(const RatPoint& a, const RatPoint& b) {
        return {a.x + b.x, a.y + b.y};
    }
    friend RatPoint operator-(const RatPoint& a, const RatPoint& b) {
        return {a.x - b.x, a.y - b.y};
    }
};

inline Rational cross(const RatPoint& a, const RatPoint& b) {
    return a.x * b.y - a.y * b.x;
}

} // namespace semitoric
