#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "hypsing/error.hpp"

namespace hypsing {

/// Reduced fraction num/den with den > 0. Operations that would overflow
/// 64 bits report failure through std::optional instead of wrapping.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {}

    Rational(std::int64_t n, std::int64_t d)
    {
        if (d == 0) throw Error(ErrorCode::InvalidData, "zero denominator");
        if (d < 0) { n = -n; d = -d; }
        const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
        num_ = g ? n / g : 0;
        den_ = g ? d / g : 1;
    }

    [[nodiscard]] constexpr std::int64_t num() const noexcept { return num_; }
    [[nodiscard]] constexpr std::int64_t den() const noexcept { return den_; }
    [[nodiscard]] constexpr bool is_integer() const noexcept { return den_ == 1; }
    [[nodiscard]] double to_double() const noexcept
    {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    friend bool operator==(const Rational&, const Rational&) = default;

    static std::optional<Rational> checked_add(const Rational& a, const Rational& b)
    {
        return make(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                    static_cast<__int128>(a.den_) * b.den_);
    }
    static std::optional<Rational> checked_sub(const Rational& a, const Rational& b)
    {
        return checked_add(a, Rational(-b.num_, b.den_));
    }
    static std::optional<Rational> checked_mul(const Rational& a, const Rational& b)
    {
        return make(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
    }
    static std::optional<Rational> checked_div(const Rational& a, const Rational& b)
    {
        if (b.num_ == 0) return std::nullopt;
        return make(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
    }

private:
    static std::optional<Rational> make(__int128 n, __int128 d)
    {
        if (d < 0) { n = -n; d = -d; }
        __int128 a = n < 0 ? -n : n;
        __int128 b = d;
        while (b != 0) { const __int128 t = a % b; a = b; b = t; }
        if (a > 1) { n /= a; d /= a; }
        constexpr __int128 lim = INT64_MAX;
        if (n > lim || -n > lim || d > lim) return std::nullopt;
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d);
        return r;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// A real quantity that is either an exact rational or a floating value.
///
/// Exponents, cone angles and divisor weights are carried this way so that
/// integer tests (s2 - s1 in Z, the sign of chi + sum(theta - 1)) are decided
/// exactly whenever the caller supplied exact input. Arithmetic stays exact
/// while both operands are exact and no overflow occurs.
class Real {
public:
    static constexpr double kIntegerTolerance = 1e-9;

    Real() : exact_(Rational(0)), value_(0.0) {}
    Real(double v) : value_(v) {}
    Real(int v) : exact_(Rational(v)), value_(v) {}
    Real(Rational r) : exact_(r), value_(r.to_double()) {}

    static Real fraction(std::int64_t n, std::int64_t d) { return Real(Rational(n, d)); }

    /// Accepts "p/q", "p" (exact) or any decimal literal such as "0.25" (floating).
    static Real parse(std::string_view text)
    {
        std::string s(text);
        const auto slash = s.find('/');
        char* end = nullptr;
        if (slash != std::string::npos) {
            const std::string ns = s.substr(0, slash);
            const std::string ds = s.substr(slash + 1);
            const long long n = std::strtoll(ns.c_str(), &end, 10);
            if (ns.empty() || *end != '\0') throw Error(ErrorCode::InvalidData, "bad fraction '" + s + "'");
            const long long d = std::strtoll(ds.c_str(), &end, 10);
            if (ds.empty() || *end != '\0') throw Error(ErrorCode::InvalidData, "bad fraction '" + s + "'");
            return Real(Rational(n, d));
        }
        const long long n = std::strtoll(s.c_str(), &end, 10);
        if (!s.empty() && *end == '\0') return Real(Rational(n));
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || *end != '\0') throw Error(ErrorCode::InvalidData, "bad number '" + s + "'");
        return Real(v);
    }

    [[nodiscard]] double value() const noexcept { return value_; }
    [[nodiscard]] bool is_exact() const noexcept { return exact_.has_value(); }
    [[nodiscard]] const std::optional<Rational>& exact() const noexcept { return exact_; }

    /// Integer test: exact when possible, otherwise within kIntegerTolerance.
    [[nodiscard]] bool is_integer() const noexcept
    {
        if (exact_) return exact_->is_integer();
        return std::abs(value_ - std::round(value_)) < kIntegerTolerance;
    }

    /// True when is_integer() held only through the floating tolerance.
    [[nodiscard]] bool integer_by_tolerance() const noexcept { return !exact_ && is_integer(); }

    [[nodiscard]] std::int64_t nearest_integer() const noexcept
    {
        if (exact_ && exact_->is_integer()) return exact_->num();
        return static_cast<std::int64_t>(std::llround(value_));
    }

    [[nodiscard]] bool is_zero() const noexcept
    {
        if (exact_) return exact_->num() == 0;
        return value_ == 0.0;
    }

    friend Real operator+(const Real& a, const Real& b) { return combine(a, b, &Rational::checked_add, a.value_ + b.value_); }
    friend Real operator-(const Real& a, const Real& b) { return combine(a, b, &Rational::checked_sub, a.value_ - b.value_); }
    friend Real operator*(const Real& a, const Real& b) { return combine(a, b, &Rational::checked_mul, a.value_ * b.value_); }
    friend Real operator/(const Real& a, const Real& b) { return combine(a, b, &Rational::checked_div, a.value_ / b.value_); }
    Real operator-() const { return Real(0) - *this; }

    /// Exact comparison when both sides are exact, else |a - b| <= 1e-12 (1 + |a|).
    friend bool operator==(const Real& a, const Real& b)
    {
        if (a.exact_ && b.exact_) return *a.exact_ == *b.exact_;
        return std::abs(a.value_ - b.value_) <= 1e-12 * (1.0 + std::abs(a.value_));
    }

    [[nodiscard]] std::string to_string() const
    {
        if (exact_) {
            if (exact_->is_integer()) return std::to_string(exact_->num());
            return std::to_string(exact_->num()) + "/" + std::to_string(exact_->den());
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", value_);
        return buf;
    }

    friend std::ostream& operator<<(std::ostream& os, const Real& r) { return os << r.to_string(); }

private:
    using CheckedOp = std::optional<Rational> (*)(const Rational&, const Rational&);

    static Real combine(const Real& a, const Real& b, CheckedOp op, double fallback)
    {
        if (a.exact_ && b.exact_) {
            if (auto r = op(*a.exact_, *b.exact_)) return Real(*r);
        }
        return Real(fallback);
    }

    std::optional<Rational> exact_;
    double value_;
};

} // namespace hypsing
