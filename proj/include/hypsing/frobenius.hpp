#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hypsing/error.hpp"
#include "hypsing/mobius.hpp"
#include "hypsing/real.hpp"
#include "hypsing/schwarzian.hpp"
#include "hypsing/series.hpp"

namespace hypsing {

/// Roots of the indicial polynomial f(s) = s(s - 1) + b0, with s1 <= s2.
struct IndicialData {
    Real s1;
    Real s2;
    /// s2 - s1, which is theta for operators built from Schwarzian data.
    Real difference;
    bool integer_difference = false;
    /// The integer test only passed through the floating tolerance.
    bool integer_by_tolerance = false;
};

/// u1 = x^{s1} sum c_k(s1) x^k.
struct PowerSolution {
    TruncSeries u1;
};

/// u_log = u2 log x + x^{s1} v(x); `v` carries shift s1.
struct LogSolution {
    TruncSeries v;
};

/// u_log = u2 log x + x^{s2} sum c'_k(s2) x^k; `partner` is the zero-shift sum.
struct EqualRootsLog {
    TruncSeries partner;
};

using SecondSolution = std::variant<PowerSolution, LogSolution, EqualRootsLog>;

struct FrobeniusBasis {
    IndicialData indicial;
    /// The operator actually solved (b0 snapped to an exact value when the
    /// integer test passed by tolerance).
    OperatorCoeffs op;
    /// u(s2, x), c_0 = 1.
    TruncSeries u2;
    SecondSolution second;
    /// R_m when s2 - s1 = m is a positive integer.
    std::optional<Complex> rm;
    std::optional<int> m;
    std::vector<std::string> warnings;
};

/// ratio = x^alpha * unit(x), unit(0) = 1.
struct PowerRatio {
    Real alpha;
    TruncSeries unit;
};

/// ratio = log x + psi(x), psi(0) = 0.
struct LogRatio {
    TruncSeries psi;
};

/// ratio = log x + x^{-m} phi(x), phi(0) = -f'(s2)/R_m != 0.
struct ObstructedLogRatio {
    int m = 0;
    TruncSeries phi;
};

using RatioForm = std::variant<PowerRatio, LogRatio, ObstructedLogRatio>;

inline Complex indicial_value(const Real& b0, Complex s) { return s * (s - 1.0) + b0.value(); }
inline Complex indicial_slope(Complex s) { return 2.0 * s - 1.0; }

namespace detail {

/// Square root of a nonnegative Real; exact for perfect-square rationals.
inline Real sqrt_real(const Real& x)
{
    if (x.is_exact()) {
        const Rational r = *x.exact();
        auto isqrt = [](std::int64_t v) -> std::optional<std::int64_t> {
            if (v < 0) return std::nullopt;
            auto s = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
            for (std::int64_t t = std::max<std::int64_t>(0, s - 2); t <= s + 2; ++t) {
                if (t * t == v) return t;
            }
            return std::nullopt;
        };
        const auto n = isqrt(r.num());
        const auto d = isqrt(r.den());
        if (n && d) return Real(Rational(*n, *d));
    }
    return Real(std::sqrt(x.value()));
}

inline bool vanishes(const Real& v, double scale)
{
    if (v.is_exact()) return v.is_zero();
    return std::abs(v.value()) < 1e-12 * (1.0 + scale);
}

/// f(s + n) as a Real, exact when s and b0 are.
inline Real shifted_indicial(const Real& s, int n, const Real& b0)
{
    const Real t = s + Real(n);
    return t * (t - Real(1)) + b0;
}

/// c_0..c_order of u(s, x) from the recurrence f(s + n) c_n + R_n = 0.
/// At `free_index` the coefficient is set to 0 instead of solved for.
inline std::vector<Complex> run_recurrence(const OperatorCoeffs& op, const Real& s, int order,
                                           std::optional<int> free_index = std::nullopt)
{
    std::vector<Complex> c(static_cast<std::size_t>(order) + 1, Complex{});
    c[0] = 1.0;
    for (int n = 1; n <= order; ++n) {
        if (free_index && n == *free_index) continue;
        Complex rn{};
        for (int i = 0; i < n; ++i) rn += c[static_cast<std::size_t>(i)] * op.b(n - i);
        const Real fn = shifted_indicial(s, n, op.b0);
        if (vanishes(fn, std::abs(s.value() + n) * std::abs(s.value() + n))) throw ResonantIndexError(n);
        c[static_cast<std::size_t>(n)] = -rn / fn.value();
    }
    return c;
}

} // namespace detail

/// Both roots of s(s - 1) + b0 = 0, ordered. Roots are exact when b0 (or the
/// operator's theta) is exact and 1 - 4 b0 is a rational square.
inline IndicialData indicial_roots(const OperatorCoeffs& op)
{
    Real theta;
    if (op.theta) {
        theta = *op.theta;
    } else {
        const Real disc = Real(1) - Real(4) * op.b0;
        if (disc.value() < -1e-14) {
            throw Error(ErrorCode::InvalidOperator, "complex indicial roots (b0 > 1/4) are outside the supported class");
        }
        theta = disc.value() <= 0.0 ? Real(0) : detail::sqrt_real(disc);
    }
    IndicialData out;
    out.s1 = (Real(1) - theta) / Real(2);
    out.s2 = (Real(1) + theta) / Real(2);
    out.difference = theta;
    out.integer_difference = theta.is_integer();
    out.integer_by_tolerance = theta.integer_by_tolerance();
    return out;
}

/// u(s, x) = x^s sum c_n x^n with c_0 = 1 and c_n = -R_n / f(s + n).
inline TruncSeries frobenius_series(const OperatorCoeffs& op, const Real& s, int order = kDefaultOrder)
{
    return TruncSeries(detail::run_recurrence(op, s, order), s);
}

/// The s-derivatives c'_k(s) of the recurrence coefficients, from
/// f(s+n) c'_n + f'(s+n) c_n + R'_n = 0 with c'_0 = 0.
inline TruncSeries derivative_coefficients(const OperatorCoeffs& op, const Real& s, int order = kDefaultOrder)
{
    const auto c = detail::run_recurrence(op, s, order);
    std::vector<Complex> dc(static_cast<std::size_t>(order) + 1, Complex{});
    for (int n = 1; n <= order; ++n) {
        Complex drn{};
        for (int i = 0; i < n; ++i) drn += dc[static_cast<std::size_t>(i)] * op.b(n - i);
        const Complex sn = s.value() + n;
        dc[static_cast<std::size_t>(n)] =
            -(indicial_slope(sn) * c[static_cast<std::size_t>(n)] + drn) / indicial_value(op.b0, sn);
    }
    return TruncSeries(std::move(dc));
}

/// R_m = sum_{i<m} c_i(s1) b_{m-i} for an integer root difference m >= 1.
inline Complex obstruction_Rm(const OperatorCoeffs& op)
{
    const IndicialData ind = indicial_roots(op);
    if (!ind.integer_difference || ind.difference.nearest_integer() < 1) {
        throw Error(ErrorCode::NotIntegerDifference, "s2 - s1 is not a positive integer");
    }
    const int m = static_cast<int>(ind.difference.nearest_integer());
    const Real s1 = ind.integer_by_tolerance ? ind.s2 - Real(m) : ind.s1;
    const auto c = detail::run_recurrence(op, s1, m - 1);
    Complex rm{};
    for (int i = 0; i < m; ++i) rm += c[static_cast<std::size_t>(i)] * op.b(m - i);
    return rm;
}

namespace detail {

inline OperatorCoeffs snap_to_integer(const OperatorCoeffs& op, std::int64_t m)
{
    const Real theta(static_cast<int>(m));
    const Real b0 = (Real(1) - theta * theta) / Real(4);
    TruncSeries q = op.q;
    q.at(0) = b0.value();
    return OperatorCoeffs(std::move(q), b0, theta);
}

} // namespace detail

/// Two independent local solutions of L u = 0, selected by case:
/// non-integer difference (power pair), integer m with R_m = 0 (power pair,
/// free coefficient c_m = 0), integer m with R_m != 0 (logarithmic), equal
/// roots (logarithmic).
inline FrobeniusBasis solve_basis(const OperatorCoeffs& input, int order = kDefaultOrder)
{
    std::vector<std::string> warnings;
    if (input.theta) {
        const Real expected = (Real(1) - *input.theta * *input.theta) / Real(4);
        if (!(expected == input.b0) || std::abs(input.q[0].real() - expected.value()) > 1e-12) {
            throw Error(ErrorCode::InvalidOperator, "b0 does not match (1 - theta^2)/4");
        }
    }
    OperatorCoeffs op = input;
    IndicialData ind = indicial_roots(op);
    if (ind.integer_by_tolerance) {
        warnings.push_back("root difference " + ind.difference.to_string() +
                           " treated as the integer " + std::to_string(ind.difference.nearest_integer()));
        op = detail::snap_to_integer(op, ind.difference.nearest_integer());
        ind = indicial_roots(op);
    }

    const TruncSeries u2 = frobenius_series(op, ind.s2, order);

    if (ind.difference.is_zero()) {
        return {ind, op, u2, EqualRootsLog{derivative_coefficients(op, ind.s2, order)}, std::nullopt, 0, warnings};
    }
    if (!ind.integer_difference) {
        return {ind, op, u2, PowerSolution{frobenius_series(op, ind.s1, order)}, std::nullopt, std::nullopt, warnings};
    }

    const int m = static_cast<int>(ind.difference.nearest_integer());
    if (m == 1) warnings.push_back("root difference 1 lies outside the cone-angle hypotheses (theta != 1)");
    const Complex rm = obstruction_Rm(op);
    const auto c1 = detail::run_recurrence(op, ind.s1, order, m);
    double rm_scale = 0.0;
    for (int i = 0; i < m; ++i) rm_scale += std::abs(c1[static_cast<std::size_t>(i)] * op.b(m - i));

    if (std::abs(rm) <= 1e-12 * (1.0 + rm_scale)) {
        warnings.push_back("R_m = 0: free coefficient c_m set to 0");
        return {ind, op, u2, PowerSolution{TruncSeries(c1, ind.s1)}, Complex{}, m, warnings};
    }

    // v = -(f'(s2)/R_m) sum c_k(s1) x^k + x^m sum c'_k(s2) x^k
    const Complex v0 = -indicial_slope(ind.s2.value()) / rm;
    const TruncSeries dc2 = derivative_coefficients(op, ind.s2, order);
    TruncSeries v = v0 * TruncSeries(c1) + times_x_power(dc2, m);
    return {ind, op, u2, LogSolution{v.with_shift(ind.s1)}, rm, m, warnings};
}

/// Coefficients of L(x^s sum c_n x^n) = x^s sum r_n x^n together with the
/// per-index magnitude sum of the contributing terms.
inline std::pair<TruncSeries, std::vector<double>> apply_operator(const OperatorCoeffs& op, const TruncSeries& u)
{
    const int n_max = u.order();
    const double s = u.shift().value();
    auto r = TruncSeries::zero(n_max, u.shift());
    std::vector<double> mag(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (int n = 0; n <= n_max; ++n) {
        Complex acc = (s + n) * (s + n - 1.0) * u[n];
        double m = std::abs(acc);
        for (int i = 0; i <= n; ++i) {
            const Complex t = u[i] * op.b(n - i);
            acc += t;
            m += std::abs(t);
        }
        r.at(n) = acc;
        mag[static_cast<std::size_t>(n)] = m;
    }
    return {r, mag};
}

/// L(u log x) - log x * L(u) = 2x u' - u = x^s sum (2(s+n) - 1) c_n x^n.
inline TruncSeries log_defect(const TruncSeries& u)
{
    auto out = TruncSeries::zero(u.order(), u.shift());
    for (int n = 0; n <= u.order(); ++n) out.at(n) = indicial_slope(u.shift().value() + n) * u[n];
    return out;
}

namespace detail {

inline double relative_residual(const TruncSeries& r, const std::vector<double>& mag, int through)
{
    double worst = 0.0;
    for (int n = 0; n <= std::min(through, r.order()); ++n) {
        const double m = mag[static_cast<std::size_t>(n)];
        if (m == 0.0) continue;
        worst = std::max(worst, std::abs(r[n]) / m);
    }
    return worst;
}

} // namespace detail

/// Largest relative coefficient of L u over both solutions, through `through`
/// (default: order - 2). Logarithmic solutions are checked stream by stream:
/// the log x stream is L u2, the log-free stream 2x u2' - u2 + L(x^{s} w).
inline double ode_residual(const FrobeniusBasis& basis, std::optional<int> through = std::nullopt)
{
    const int upto = through.value_or(basis.u2.order() - 2);
    auto [r2, m2] = apply_operator(basis.op, basis.u2);
    double worst = detail::relative_residual(r2, m2, upto);

    std::visit(
        [&](const auto& sol) {
            using T = std::decay_t<decltype(sol)>;
            if constexpr (std::is_same_v<T, PowerSolution>) {
                auto [r1, m1] = apply_operator(basis.op, sol.u1);
                worst = std::max(worst, detail::relative_residual(r1, m1, upto));
            } else {
                const TruncSeries w = [&] {
                    if constexpr (std::is_same_v<T, LogSolution>) return sol.v;
                    else return sol.partner.with_shift(basis.indicial.s2);
                }();
                const int offset = static_cast<int>((basis.indicial.s2 - w.shift()).nearest_integer());
                TruncSeries defect = log_defect(basis.u2);
                defect = times_x_power(defect.with_shift(Real(0)), offset);
                auto [rw, mw] = apply_operator(basis.op, w);
                for (int n = 0; n <= rw.order(); ++n) {
                    rw.at(n) += defect[n];
                    mw[static_cast<std::size_t>(n)] += std::abs(defect[n]);
                }
                worst = std::max(worst, detail::relative_residual(rw, mw, upto));
            }
        },
        basis.second);
    return worst;
}

/// F = u2/u1 for a power pair, u_log/u2 for logarithmic pairs.
inline RatioForm projective_ratio(const FrobeniusBasis& basis)
{
    const TruncSeries u2c = basis.u2.with_shift(Real(0));
    return std::visit(
        [&](const auto& sol) -> RatioForm {
            using T = std::decay_t<decltype(sol)>;
            if constexpr (std::is_same_v<T, PowerSolution>) {
                return PowerRatio{basis.indicial.difference, u2c / sol.u1.with_shift(Real(0))};
            } else if constexpr (std::is_same_v<T, LogSolution>) {
                return ObstructedLogRatio{*basis.m, sol.v.with_shift(Real(0)) / u2c};
            } else {
                return LogRatio{sol.partner / u2c};
            }
        },
        basis.second);
}

inline Complex evaluate_ratio(const RatioForm& ratio, Complex x, const BranchSpec& branch = {})
{
    return std::visit(
        [&](const auto& r) -> Complex {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, PowerRatio>) {
                return branch_pow(x, r.alpha, branch) * evaluate(r.unit, x);
            } else if constexpr (std::is_same_v<T, LogRatio>) {
                return branch_log(x, branch) + evaluate(r.psi, x);
            } else {
                return branch_log(x, branch) + std::pow(x, -r.m) * evaluate(r.phi, x);
            }
        },
        ratio);
}

/// Action on the ratio of one positive loop x -> e^{2 pi i} x.
inline MobiusMap local_monodromy(const RatioForm& ratio)
{
    if (const auto* p = std::get_if<PowerRatio>(&ratio)) {
        if (p->alpha.is_exact() && p->alpha.exact()->is_integer()) return MobiusMap::identity();
        return MobiusMap::scaling(std::polar(1.0, kTwoPi * p->alpha.value()));
    }
    return MobiusMap::translation(Complex(0.0, kTwoPi));
}

inline MobiusMap local_monodromy(const FrobeniusBasis& basis) { return local_monodromy(projective_ratio(basis)); }

/// Result of integrating L u = 0 once around |x| = radius.
struct ContinuationCheck {
    Complex start;
    Complex end;
    Complex predicted;
    /// |end - predicted| / (1 + |predicted|)
    double mismatch = 0.0;
};

/// Continues the numerator and denominator solutions of the ratio along
/// x = r e^{it}, t in [0, 2 pi], with classical RK4 on (u, du/dx), and
/// compares the continued ratio with the local monodromy applied to the
/// starting value.
inline ContinuationCheck continue_around(const FrobeniusBasis& basis, double radius = 0.1, int steps = 720)
{
    const Complex x0 = radius;
    auto value_and_slope = [&](const TruncSeries& u) -> std::array<Complex, 2> {
        return {evaluate(u, x0), evaluate(derive(u), x0)};
    };
    const auto u2 = value_and_slope(basis.u2);
    std::array<Complex, 2> num{};
    std::array<Complex, 2> den{};
    std::visit(
        [&](const auto& sol) {
            using T = std::decay_t<decltype(sol)>;
            if constexpr (std::is_same_v<T, PowerSolution>) {
                num = u2;
                den = value_and_slope(sol.u1);
            } else {
                const TruncSeries w = [&] {
                    if constexpr (std::is_same_v<T, LogSolution>) return sol.v;
                    else return sol.partner.with_shift(basis.indicial.s2);
                }();
                const auto wv = value_and_slope(w);
                const Complex lg = std::log(x0);
                num = {u2[0] * lg + wv[0], u2[1] * lg + u2[0] / x0 + wv[1]};
                den = u2;
            }
        },
        basis.second);

    const TruncSeries& q = basis.op.q;
    // y = (u, u'), x(t) = r e^{it}: du/dt = i x u', du'/dt = -i q(x) u / x
    auto rhs = [&](double t, const std::array<Complex, 2>& y) -> std::array<Complex, 2> {
        const Complex x = std::polar(radius, t);
        return {kI * x * y[1], -kI * evaluate(q, x) * y[0] / x};
    };
    auto integrate = [&](std::array<Complex, 2> y) {
        const double h = kTwoPi / steps;
        for (int k = 0; k < steps; ++k) {
            const double t = k * h;
            const auto k1 = rhs(t, y);
            const auto k2 = rhs(t + h / 2, {y[0] + h / 2 * k1[0], y[1] + h / 2 * k1[1]});
            const auto k3 = rhs(t + h / 2, {y[0] + h / 2 * k2[0], y[1] + h / 2 * k2[1]});
            const auto k4 = rhs(t + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
            for (int i = 0; i < 2; ++i) y[static_cast<std::size_t>(i)] += h / 6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        return y;
    };
    const auto num_end = integrate(num);
    const auto den_end = integrate(den);

    ContinuationCheck out;
    out.start = num[0] / den[0];
    out.end = num_end[0] / den_end[0];
    out.predicted = apply(local_monodromy(basis), ExtendedComplex(out.start)).value();
    out.mismatch = std::abs(out.end - out.predicted) / (1.0 + std::abs(out.predicted));
    return out;
}

} // namespace hypsing
