#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "hypsing/error.hpp"
#include "hypsing/germ.hpp"
#include "hypsing/mobius.hpp"
#include "hypsing/real.hpp"
#include "hypsing/series.hpp"

namespace hypsing {

/// Schwarzian data at one puncture:
///   {F, x} = (1 - theta^2)/(2 x^2) + d/x + phi(x).
/// theta = 0 encodes a cusp. phi is taken as an exact polynomial: terms past
/// its stored order are zero.
struct SingularityData {
    Real theta;
    Complex d;
    TruncSeries phi;

    SingularityData(Real theta_, Complex d_, TruncSeries phi_ = TruncSeries::zero(0))
        : theta(theta_), d(d_), phi(std::move(phi_))
    {
        if (theta.value() < 0.0) throw Error(ErrorCode::InvalidData, "theta must be nonnegative");
        if (theta == Real(1)) throw Error(ErrorCode::InvalidData, "theta = 1 is not a singularity");
        if (!phi.has_zero_shift()) throw Error(ErrorCode::InvalidData, "phi must be a power series");
    }

    [[nodiscard]] bool is_cusp() const { return theta.is_zero() || (!theta.is_exact() && theta.value() == 0.0); }
};

/// Coefficients b_k of q(x) in L = x^2 d^2/dx^2 + q(x).
struct OperatorCoeffs {
    TruncSeries q;
    /// Exact leading coefficient when known.
    Real b0;
    /// The cone parameter the operator was built from, if any.
    std::optional<Real> theta;

    explicit OperatorCoeffs(TruncSeries q_) : q(std::move(q_)), b0(q[0].real())
    {
        if (!q.has_zero_shift()) throw Error(ErrorCode::InvalidOperator, "q must be a power series");
        if (std::abs(q[0].imag()) > 1e-14 * (1.0 + std::abs(q[0]))) {
            throw Error(ErrorCode::InvalidOperator, "b0 must be real");
        }
    }

    OperatorCoeffs(TruncSeries q_, Real b0_, std::optional<Real> theta_)
        : q(std::move(q_)), b0(b0_), theta(theta_)
    {
    }

    [[nodiscard]] int order() const { return q.order(); }
    [[nodiscard]] Complex b(int k) const { return k == 0 ? Complex(b0.value()) : q[k]; }
};

/// Schwarzian derivative f'''/f' - (3/2)(f''/f')^2 as a series, order N - 3.
inline TruncSeries schwarzian_of_series(const TruncSeries& f)
{
    if (!f.has_zero_shift()) throw Error(ErrorCode::ShiftMismatch, "schwarzian needs a power series");
    if (f.order() < 3) throw Error(ErrorCode::InvalidData, "need order >= 3");
    const TruncSeries d1 = derive(f);
    if (std::abs(d1[0]) <= 1e-14 * (1.0 + f.max_abs())) {
        throw Error(ErrorCode::NotLocallyUnivalent, "f'(0) = 0");
    }
    const TruncSeries d2 = derive(d1);
    const TruncSeries d3 = derive(d2);
    const TruncSeries r2 = d2 / d1;
    const TruncSeries r3 = d3 / d1;
    return (r3 - Complex(1.5) * (r2 * r2)).truncated(f.order() - 3);
}

/// L o f = (a f + b)/(c f + d) as a series; needs c f(0) + d != 0.
inline TruncSeries apply_mobius(const MobiusMap& m, const TruncSeries& f)
{
    const TruncSeries num = m.a() * f + m.b();
    const TruncSeries den = m.c() * f + m.d();
    if (std::abs(den[0]) <= 1e-300) throw Error(ErrorCode::DivisionByZeroSeries, "pole at the expansion point");
    return num / den;
}

/// Laurent data of xi^2 {F, xi} for a germ: principal part (theta, d) and tail phi.
struct GermSchwarzian {
    double theta = 0.0;
    Complex d;
    TruncSeries tail;
    /// Raw coefficients of xi^2 {F, xi} (index k <-> xi^k), before denoising.
    std::vector<Complex> raw;
};

/// Sampling parameters of the numerical Schwarzian.
struct SchwarzianSampling {
    /// Radius of the circle the Laurent projection runs on.
    double radius = 0.05;
    /// Radius of the Cauchy circles used for derivatives, as a fraction of `radius`.
    double cauchy_ratio = 0.5;
    int circle_points = 64;
    int cauchy_points = 64;
    /// Coefficients with |c_k| radius^k below this floor are reported as 0.
    double noise_floor = 1e-11;
};

namespace detail {

/// F', F'', F''' at xi0 by the trapezoidal Cauchy integral on a circle of
/// radius rho, evaluating F on the sheet continuous at xi0.
inline std::array<Complex, 3> cauchy_derivatives(const DevelopingGerm& germ, Complex xi0, double rho, int nodes)
{
    BranchSpec sheet;
    sheet.cut = std::arg(xi0) + std::numbers::pi;
    std::array<Complex, 3> acc{};
    for (int k = 0; k < nodes; ++k) {
        const Complex w = std::polar(1.0, kTwoPi * k / nodes);
        const Complex val = germ(xi0 + rho * w, sheet);
        Complex wp = 1.0;
        for (int n = 1; n <= 3; ++n) {
            wp /= w;
            acc[static_cast<std::size_t>(n - 1)] += val * wp;
        }
    }
    const double fact[3] = {1.0, 2.0, 6.0};
    for (int n = 1; n <= 3; ++n) {
        acc[static_cast<std::size_t>(n - 1)] *= fact[n - 1] / (nodes * std::pow(rho, n));
    }
    return acc;
}

} // namespace detail

/// Numerical Schwarzian of a germ near 0.
///
/// Derivatives come from Cauchy integrals around each of `circle_points`
/// samples on |xi| = radius; xi^2 {F, xi} is then projected onto Laurent
/// coefficients. theta = sqrt(1 - 2 c_0), d = c_1, tail_k = c_{k+2} for
/// k <= order - 3. The germ must be holomorphic (no poles) on the annulus
/// radius * (1 -+ cauchy_ratio).
inline GermSchwarzian schwarzian_of_germ(const DevelopingGerm& germ, int order = kDefaultOrder,
                                         const SchwarzianSampling& opt = {})
{
    const int m = opt.circle_points;
    if (order - 1 >= m / 2) throw Error(ErrorCode::InvalidData, "order too large for the sampling grid");
    const double rho = opt.radius * opt.cauchy_ratio;
    std::vector<Complex> samples(static_cast<std::size_t>(m));
    std::vector<Complex> points(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        // half-step offset keeps samples off the negative real axis
        const Complex xi = std::polar(opt.radius, kTwoPi * (j + 0.5) / m);
        const auto der = detail::cauchy_derivatives(germ, xi, rho, opt.cauchy_points);
        const Complex r2 = der[1] / der[0];
        const Complex s = der[2] / der[0] - 1.5 * r2 * r2;
        samples[static_cast<std::size_t>(j)] = xi * xi * s;
        points[static_cast<std::size_t>(j)] = xi;
    }

    GermSchwarzian out;
    out.raw.assign(static_cast<std::size_t>(order), Complex{});
    for (int k = 0; k < order; ++k) {
        Complex acc{};
        for (int j = 0; j < m; ++j) acc += samples[static_cast<std::size_t>(j)] * std::pow(points[static_cast<std::size_t>(j)], -k);
        out.raw[static_cast<std::size_t>(k)] = acc / static_cast<double>(m);
    }

    auto denoised = [&](int k) {
        const Complex c = out.raw[static_cast<std::size_t>(k)];
        return std::abs(c) * std::pow(opt.radius, k) < opt.noise_floor ? Complex{} : c;
    };
    // 1 - 2 c_0 = theta^2; below the floor the square root only amplifies noise
    const Complex theta_sq = Complex(1.0) - 2.0 * out.raw[0];
    out.theta = std::abs(theta_sq) < opt.noise_floor ? 0.0 : std::abs(std::sqrt(theta_sq).real());
    out.d = denoised(1);
    out.tail = TruncSeries::zero(std::max(0, order - 3));
    for (int k = 0; k <= order - 3; ++k) out.tail.at(k) = denoised(k + 2);
    return out;
}

/// q = ((1 - theta^2)/2 + d x + x^2 phi(x))/2 to order N; b0 = (1 - theta^2)/4 exactly.
inline OperatorCoeffs ode_from_schwarzian(const SingularityData& data, int order = kDefaultOrder)
{
    const Real b0 = (Real(1) - data.theta * data.theta) / Real(4);
    auto q = TruncSeries::zero(order);
    q.at(0) = b0.value();
    if (order >= 1) q.at(1) = data.d / 2.0;
    for (int k = 0; k + 2 <= order; ++k) q.at(k + 2) = data.phi[k] / 2.0;
    return OperatorCoeffs(std::move(q), b0, data.theta);
}

/// Weighted coefficient mismatch between the germ's Schwarzian and the data:
/// max_k |c_k(germ) - c_k(data)| r0^k over the Laurent coefficients of
/// xi^2 {F, xi}, with r0 the sampling radius (a sup-norm on |xi| = r0).
inline double verify_compatibility(const DevelopingGerm& germ, const SingularityData& data,
                                   int order = kDefaultOrder, const SchwarzianSampling& opt = {})
{
    const GermSchwarzian gs = schwarzian_of_germ(germ, order, opt);
    double residual = 0.0;
    for (int k = 0; k < order; ++k) {
        Complex expected;
        if (k == 0) expected = (1.0 - data.theta.value() * data.theta.value()) / 2.0;
        else if (k == 1) expected = data.d;
        else expected = data.phi[k - 2];
        residual = std::max(residual, std::abs(gs.raw[static_cast<std::size_t>(k)] - expected) * std::pow(opt.radius, k));
    }
    return residual;
}

} // namespace hypsing
