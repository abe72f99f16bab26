#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <utility>
#include <vector>

#include "hypsing/error.hpp"
#include "hypsing/mobius.hpp"
#include "hypsing/real.hpp"

namespace hypsing {

inline constexpr int kDefaultOrder = 32;

/// Truncated power series x^shift * (c_0 + c_1 x + ... + c_N x^N).
///
/// The truncation order N is part of the value: every operation returns the
/// order up to which its coefficients are determined by its inputs.
class TruncSeries {
public:
    TruncSeries() : coeffs_(1, Complex{}) {}

    explicit TruncSeries(std::vector<Complex> coeffs, Real shift = Real(0))
        : coeffs_(std::move(coeffs)), shift_(shift)
    {
        if (coeffs_.empty()) coeffs_.push_back(Complex{});
    }

    static TruncSeries zero(int order, Real shift = Real(0))
    {
        return TruncSeries(std::vector<Complex>(static_cast<std::size_t>(order) + 1, Complex{}), shift);
    }

    static TruncSeries constant(Complex c, int order)
    {
        auto s = zero(order);
        s.coeffs_[0] = c;
        return s;
    }

    /// The coordinate x itself, truncated at `order`.
    static TruncSeries variable(int order)
    {
        auto s = zero(order);
        if (order >= 1) s.coeffs_[1] = 1.0;
        return s;
    }

    /// Zero-shift polynomial padded (or cut) to `order`.
    static TruncSeries polynomial(const std::vector<Complex>& coeffs, int order)
    {
        auto s = zero(order);
        for (std::size_t k = 0; k < coeffs.size() && k <= static_cast<std::size_t>(order); ++k) s.coeffs_[k] = coeffs[k];
        return s;
    }

    [[nodiscard]] int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    [[nodiscard]] const Real& shift() const noexcept { return shift_; }
    [[nodiscard]] const std::vector<Complex>& coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] Complex operator[](int k) const { return k <= order() && k >= 0 ? coeffs_[static_cast<std::size_t>(k)] : Complex{}; }
    [[nodiscard]] Complex& at(int k) { return coeffs_.at(static_cast<std::size_t>(k)); }

    [[nodiscard]] bool has_zero_shift() const { return shift_.is_zero() || (shift_.is_integer() && shift_.nearest_integer() == 0); }

    [[nodiscard]] double max_abs() const noexcept
    {
        double m = 0.0;
        for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
        return m;
    }

    /// Same shift, coefficients cut or zero-padded to `order`.
    [[nodiscard]] TruncSeries truncated(int order) const
    {
        std::vector<Complex> c(static_cast<std::size_t>(order) + 1, Complex{});
        for (int k = 0; k <= std::min(order, this->order()); ++k) c[static_cast<std::size_t>(k)] = coeffs_[static_cast<std::size_t>(k)];
        return TruncSeries(std::move(c), shift_);
    }

    [[nodiscard]] TruncSeries with_shift(Real s) const { return TruncSeries(coeffs_, s); }

    TruncSeries& operator*=(Complex k)
    {
        for (auto& c : coeffs_) c *= k;
        return *this;
    }

    friend TruncSeries operator*(Complex k, TruncSeries f) { return f *= k; }
    friend TruncSeries operator*(TruncSeries f, Complex k) { return f *= k; }
    TruncSeries operator-() const { return Complex(-1.0) * *this; }

    friend std::ostream& operator<<(std::ostream& os, const TruncSeries& f)
    {
        os << "x^" << f.shift_ << " * [";
        for (int k = 0; k <= f.order(); ++k) os << (k ? ", " : "") << f.coeffs_[static_cast<std::size_t>(k)];
        return os << "] + O(x^" << f.order() + 1 << ")";
    }

private:
    std::vector<Complex> coeffs_;
    Real shift_;
};

enum class ArithKind { Add, Sub, Mul, Div };

namespace detail {

inline std::vector<Complex> mul_coeffs(const TruncSeries& f, const TruncSeries& g, int order)
{
    std::vector<Complex> out(static_cast<std::size_t>(order) + 1, Complex{});
    for (int i = 0; i <= std::min(order, f.order()); ++i) {
        const Complex fi = f[i];
        if (fi == Complex{}) continue;
        for (int j = 0; j <= std::min(order - i, g.order()); ++j) out[static_cast<std::size_t>(i + j)] += fi * g[j];
    }
    return out;
}

/// Moves leading zero coefficients into the shift.
inline TruncSeries strip_leading_zeros(const TruncSeries& g)
{
    int k = 0;
    while (k <= g.order() && std::abs(g[k]) <= 1e-300) ++k;
    if (k > g.order()) throw Error(ErrorCode::DivisionByZeroSeries, "divisor vanishes through its truncation order");
    if (k == 0) return g;
    std::vector<Complex> c(g.coeffs().begin() + k, g.coeffs().end());
    return TruncSeries(std::move(c), g.shift() + Real(k));
}

} // namespace detail

inline TruncSeries arith(ArithKind kind, const TruncSeries& f, const TruncSeries& g)
{
    switch (kind) {
    case ArithKind::Add:
    case ArithKind::Sub: {
        if (!(f.shift() == g.shift())) throw Error(ErrorCode::ShiftMismatch, "add/sub of series with different shifts");
        const int n = std::min(f.order(), g.order());
        std::vector<Complex> c(static_cast<std::size_t>(n) + 1);
        const double sign = kind == ArithKind::Add ? 1.0 : -1.0;
        for (int k = 0; k <= n; ++k) c[static_cast<std::size_t>(k)] = f[k] + sign * g[k];
        return TruncSeries(std::move(c), f.shift());
    }
    case ArithKind::Mul: {
        const int n = std::min(f.order(), g.order());
        return TruncSeries(detail::mul_coeffs(f, g, n), f.shift() + g.shift());
    }
    case ArithKind::Div: {
        const TruncSeries den = detail::strip_leading_zeros(g);
        const int n = std::min(f.order(), den.order());
        std::vector<Complex> h(static_cast<std::size_t>(n) + 1, Complex{});
        const Complex g0 = den[0];
        for (int k = 0; k <= n; ++k) {
            Complex acc = f[k];
            for (int j = 1; j <= k; ++j) acc -= den[j] * h[static_cast<std::size_t>(k - j)];
            h[static_cast<std::size_t>(k)] = acc / g0;
        }
        return TruncSeries(std::move(h), f.shift() - den.shift());
    }
    }
    return f;
}

inline TruncSeries operator+(const TruncSeries& f, const TruncSeries& g) { return arith(ArithKind::Add, f, g); }
inline TruncSeries operator-(const TruncSeries& f, const TruncSeries& g) { return arith(ArithKind::Sub, f, g); }
inline TruncSeries operator*(const TruncSeries& f, const TruncSeries& g) { return arith(ArithKind::Mul, f, g); }
inline TruncSeries operator/(const TruncSeries& f, const TruncSeries& g) { return arith(ArithKind::Div, f, g); }

/// Adds a constant to a zero-shift series.
inline TruncSeries operator+(TruncSeries f, Complex c)
{
    f.at(0) += c;
    return f;
}

/// Multiplies a zero-shift series by x^m, keeping the truncation order.
inline TruncSeries times_x_power(const TruncSeries& f, int m)
{
    auto out = TruncSeries::zero(f.order(), f.shift());
    for (int k = 0; k + m <= f.order(); ++k) out.at(k + m) = f[k];
    return out;
}

/// Taylor coefficients of f(g(x)); needs zero shifts and g(0) = 0.
inline TruncSeries compose(const TruncSeries& f, const TruncSeries& g)
{
    if (!f.has_zero_shift() || !g.has_zero_shift()) throw Error(ErrorCode::ShiftMismatch, "compose needs zero shifts");
    if (std::abs(g[0]) > 1e-12 * (1.0 + g.max_abs())) throw Error(ErrorCode::InnerNotVanishing, "inner series has g(0) != 0");
    const int n = std::min(f.order(), g.order());
    TruncSeries inner = g.truncated(n);
    inner.at(0) = 0.0;
    // Horner: f_N; then acc = acc * g + f_k.
    TruncSeries acc = TruncSeries::constant(f[n], n);
    for (int k = n - 1; k >= 0; --k) {
        acc = TruncSeries(detail::mul_coeffs(acc, inner, n));
        acc.at(0) += f[k];
    }
    return acc;
}

/// Termwise derivative of x^s * sum c_k x^k. For zero shift the (vanishing)
/// x^-1 term is dropped and the order falls by one; otherwise the shift
/// falls by one.
inline TruncSeries derive(const TruncSeries& f)
{
    if (f.has_zero_shift()) {
        if (f.order() == 0) return TruncSeries::zero(0);
        std::vector<Complex> c(static_cast<std::size_t>(f.order()));
        for (int k = 1; k <= f.order(); ++k) c[static_cast<std::size_t>(k - 1)] = static_cast<double>(k) * f[k];
        return TruncSeries(std::move(c));
    }
    std::vector<Complex> c(static_cast<std::size_t>(f.order()) + 1);
    const double s = f.shift().value();
    for (int k = 0; k <= f.order(); ++k) c[static_cast<std::size_t>(k)] = (s + k) * f[k];
    return TruncSeries(std::move(c), f.shift() - Real(1));
}

/// exp(f) for f(0) = 0.
inline TruncSeries exp_unit(const TruncSeries& f)
{
    if (!f.has_zero_shift() || std::abs(f[0]) > 1e-12 * (1.0 + f.max_abs())) {
        throw Error(ErrorCode::BadConstantTerm, "exp_unit needs f(0) = 0 and zero shift");
    }
    const int n = f.order();
    std::vector<Complex> g(static_cast<std::size_t>(n) + 1, Complex{});
    g[0] = 1.0;
    // n g_n = sum_{k=1}^{n} k f_k g_{n-k}
    for (int m = 1; m <= n; ++m) {
        Complex acc{};
        for (int k = 1; k <= m; ++k) acc += static_cast<double>(k) * f[k] * g[static_cast<std::size_t>(m - k)];
        g[static_cast<std::size_t>(m)] = acc / static_cast<double>(m);
    }
    return TruncSeries(std::move(g));
}

/// log(f) for f(0) = 1, principal branch (log 1 = 0).
inline TruncSeries log_unit(const TruncSeries& f)
{
    if (!f.has_zero_shift() || std::abs(f[0] - 1.0) > 1e-12 * (1.0 + f.max_abs())) {
        throw Error(ErrorCode::BadConstantTerm, "log_unit needs f(0) = 1 and zero shift");
    }
    const int n = f.order();
    std::vector<Complex> g(static_cast<std::size_t>(n) + 1, Complex{});
    // f g' = f'  =>  m g_m = m f_m - sum_{k=1}^{m-1} k g_k f_{m-k}
    for (int m = 1; m <= n; ++m) {
        Complex acc = static_cast<double>(m) * f[m];
        for (int k = 1; k < m; ++k) acc -= static_cast<double>(k) * g[static_cast<std::size_t>(k)] * f[m - k];
        g[static_cast<std::size_t>(m)] = acc / static_cast<double>(m);
    }
    return TruncSeries(std::move(g));
}

/// f^beta = exp(beta log f) for f(0) = 1.
inline TruncSeries pow_unit(const TruncSeries& f, Complex beta)
{
    return exp_unit(beta * log_unit(f));
}

/// Argument window for x^s: arg x is taken in (cut - 2 pi, cut] shifted by
/// 2 pi * sheet. With `strict`, points on the cut ray are refused.
struct BranchSpec {
    double cut = std::numbers::pi;
    int sheet = 0;
    bool strict = false;

    static BranchSpec principal() { return {}; }
};

/// log x in the window described by `branch`.
inline Complex branch_log(Complex x, const BranchSpec& branch = {})
{
    if (x == Complex{}) throw Error(ErrorCode::BranchCutHit, "log at the branch point 0");
    double a = std::arg(x);
    const double lo = branch.cut - kTwoPi;
    while (a <= lo) a += kTwoPi;
    while (a > branch.cut) a -= kTwoPi;
    if (branch.strict && std::abs(a - branch.cut) <= 1e-14 * (1.0 + std::abs(branch.cut))) {
        throw Error(ErrorCode::BranchCutHit, "point lies on the configured branch cut");
    }
    return {std::log(std::abs(x)), a + kTwoPi * branch.sheet};
}

/// x^s in the window described by `branch`; integer exponents need no branch.
inline Complex branch_pow(Complex x, const Real& s, const BranchSpec& branch = {})
{
    if (s.is_exact() && s.exact()->is_integer()) {
        const auto n = s.exact()->num();
        if (n >= 0) return std::pow(x, static_cast<int>(n));
        if (x == Complex{}) throw Error(ErrorCode::BranchCutHit, "negative power at 0");
        return std::pow(x, static_cast<int>(n));
    }
    if (x == Complex{}) {
        if (s.value() > 0.0) return 0.0;
        throw Error(ErrorCode::BranchCutHit, "non-integer power at the branch point 0");
    }
    return std::exp(s.value() * branch_log(x, branch));
}

/// x^shift * sum c_k x^k, Horner on the polynomial part.
inline Complex evaluate(const TruncSeries& f, Complex x, const BranchSpec& branch = {})
{
    Complex acc{};
    for (int k = f.order(); k >= 0; --k) acc = acc * x + f[k];
    if (f.has_zero_shift()) return acc;
    return branch_pow(x, f.shift(), branch) * acc;
}

/// Max coefficient difference over the common order, relative to
/// 1 + the largest input magnitude.
inline double coeff_distance(const TruncSeries& f, const TruncSeries& g)
{
    const int n = std::min(f.order(), g.order());
    double diff = 0.0;
    double scale = 0.0;
    for (int k = 0; k <= n; ++k) {
        diff = std::max(diff, std::abs(f[k] - g[k]));
        scale = std::max({scale, std::abs(f[k]), std::abs(g[k])});
    }
    return diff / (1.0 + scale);
}

} // namespace hypsing
