#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <variant>
#include <vector>

#include "hypsing/error.hpp"
#include "hypsing/germ.hpp"
#include "hypsing/mobius.hpp"
#include "hypsing/real.hpp"

namespace hypsing {

/// 4 alpha^2 |z|^{2 alpha - 2} / (1 - |z|^{2 alpha})^2 on 0 < |z| < 1.
/// At z = 0: 4 for alpha = 1, 0 for alpha > 1, OutOfDomain for alpha < 1.
inline double conical_density(double alpha, Complex z)
{
    if (!(alpha > 0.0)) throw Error(ErrorCode::OutOfDomain, "cone exponent must be positive");
    const double r = std::abs(z);
    if (r >= 1.0) throw Error(ErrorCode::OutOfDomain, "|z| >= 1");
    if (r == 0.0) {
        if (alpha == 1.0) return 4.0;
        if (alpha > 1.0) return 0.0;
        throw Error(ErrorCode::OutOfDomain, "density is infinite at the cone point for alpha < 1");
    }
    const double r2a = std::pow(r, 2.0 * alpha);
    const double den = 1.0 - r2a;
    return 4.0 * alpha * alpha * std::pow(r, 2.0 * alpha - 2.0) / (den * den);
}

/// |z|^{-2} (ln |z|)^{-2} on 0 < |z| < 1.
inline double cusp_density(Complex z)
{
    const double r = std::abs(z);
    if (!(r > 0.0) || r >= 1.0) throw Error(ErrorCode::OutOfDomain, "cusp density needs 0 < |z| < 1");
    const double l = std::log(r);
    return 1.0 / (r * r * l * l);
}

/// Conformal factor of the model metric at w: 4/(1 - |w|^2)^2 or 1/(Im w)^2.
inline double model_density(Model model, Complex w)
{
    if (model == Model::Disk) {
        const double s = 1.0 - std::norm(w);
        if (!(s > 0.0)) throw Error(ErrorCode::ImageOutsideModel, "image outside the unit disk");
        return 4.0 / (s * s);
    }
    if (!(w.imag() > 0.0)) throw Error(ErrorCode::ImageOutsideModel, "image outside the upper half-plane");
    return 1.0 / (w.imag() * w.imag());
}

/// |F'(z)|^2 times the model density at F(z).
inline double pullback_density(const DevelopingGerm& germ, Model model, Complex z, const BranchSpec& branch = {})
{
    if (z == Complex{}) throw Error(ErrorCode::OutOfDomain, "the puncture is not in the germ's domain");
    const double base = model_density(model, germ(z, branch));
    return std::norm(germ.derivative(z, branch)) * base;
}

inline double pullback_density(const DevelopingGerm& germ, Complex z, const BranchSpec& branch = {})
{
    return pullback_density(germ, germ.model(), z, branch);
}

/// Annulus r_min < |z| < r_max on which a density field is smooth.
struct Annulus {
    double r_min = 0.0;
    double r_max = 1.0;
};

using DensityField = std::function<double(Complex)>;

/// K = -e^{-2u} Lap u with u = ln(density)/2.
///
/// The Laplacian uses the fourth-order central stencil
/// (-f(-2h) + 16 f(-h) - 30 f(0) + 16 f(h) - f(2h)) / (12 h^2) on each axis.
/// The step is clipped so that every stencil point stays at least 2h inside
/// `domain`.
inline double curvature_fd(const DensityField& density, Complex z, double h = 1e-3, const Annulus& domain = {})
{
    const double r = std::abs(z);
    const double margin = std::min(r - domain.r_min, domain.r_max - r);
    if (!(margin > 0.0) || !(h > 0.0)) throw Error(ErrorCode::StencilOutOfDomain, "point outside the domain");
    const double step = std::min(h, margin / 4.0);
    auto u = [&](Complex w) { return 0.5 * std::log(density(w)); };
    const double u0 = u(z);
    const double w1[2] = {16.0, -1.0};
    double lap = -60.0 * u0;
    for (int k = 1; k <= 2; ++k) {
        const double s = k * step;
        const double sum = u(z + s) + u(z - s) + u(z + Complex(0.0, s)) + u(z - Complex(0.0, s));
        lap += w1[k - 1] * sum;
    }
    lap /= 12.0 * step * step;
    return -std::exp(-2.0 * u0) * lap;
}

struct ConicalKind {
    double alpha;
};
struct CuspKind {};
using SingularityKind = std::variant<ConicalKind, CuspKind>;

/// Length of the radial segment r1 <= |z| <= r2 in the model metric, with the
/// radii given as ln r1 < ln r2 < 0 so that radii below the double range
/// (e^{-1000}) stay usable. ln r1 = -inf is the puncture.
inline double radial_distance_log(const SingularityKind& kind, double log_r1, double log_r2)
{
    if (std::isnan(log_r1) || !(log_r1 < log_r2) || !(log_r2 < 0.0)) {
        throw Error(ErrorCode::OutOfDomain, "need ln r1 < ln r2 < 0");
    }
    if (const auto* c = std::get_if<ConicalKind>(&kind)) {
        if (!(c->alpha > 0.0)) throw Error(ErrorCode::OutOfDomain, "cone exponent must be positive");
        auto antideriv = [&](double log_r) {
            const double ra = std::exp(c->alpha * log_r);
            return std::log1p(ra) - std::log1p(-ra);
        };
        return antideriv(log_r2) - antideriv(log_r1);
    }
    if (std::isinf(log_r1)) throw Error(ErrorCode::OutOfDomain, "the cusp lies at infinite distance");
    return std::log(-log_r1) - std::log(-log_r2);
}

/// Length of the radial segment r1 <= |z| <= r2 in the model metric.
inline double radial_distance(const SingularityKind& kind, double r1, double r2)
{
    if (!(r1 >= 0.0) || !(r1 < r2) || !(r2 < 1.0)) throw Error(ErrorCode::OutOfDomain, "need 0 <= r1 < r2 < 1");
    return radial_distance_log(kind, std::log(r1), std::log(r2));
}

/// R-divisor sum (theta_i - 1) p_i on a closed surface of the given genus.
struct Divisor {
    int genus = 0;
    std::vector<Real> thetas;

    Divisor(int genus_, std::vector<Real> thetas_) : genus(genus_), thetas(std::move(thetas_))
    {
        if (genus < 0) throw Error(ErrorCode::InvalidData, "genus must be nonnegative");
        for (const Real& t : thetas) {
            if (t.value() < 0.0) throw Error(ErrorCode::InvalidData, "theta must be nonnegative");
            if (t == Real(1)) throw Error(ErrorCode::InvalidData, "theta = 1 is not a singularity");
        }
    }
};

struct GaussBonnetVerdict {
    /// chi + sum (theta_i - 1), exact when every theta is.
    Real sum;
    bool admissible = false;
};

/// A hyperbolic metric representing D exists iff chi + sum (theta_i - 1) < 0.
inline GaussBonnetVerdict gauss_bonnet_admissible(const Divisor& divisor)
{
    Real sum(2 - 2 * divisor.genus);
    for (const Real& t : divisor.thetas) sum = sum + (t - Real(1));
    const bool zero = sum == Real(0);
    return {sum, !zero && sum.value() < 0.0};
}

} // namespace hypsing
