#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "hypsing/error.hpp"
#include "hypsing/frobenius.hpp"
#include "hypsing/germ.hpp"
#include "hypsing/metric.hpp"
#include "hypsing/mobius.hpp"
#include "hypsing/real.hpp"
#include "hypsing/schwarzian.hpp"
#include "hypsing/series.hpp"

namespace hypsing {

struct Conical {
    Real alpha;
};

struct Cusp {};

enum class InconsistencyReason {
    HyperbolicMonodromyConical,
    ParabolicMonodromyConical,
    EllipticMonodromyCusp,
    HyperbolicMonodromyCusp,
    WrongLogOrientation,
    ObstructedLogEscape,
};

inline std::string to_string(InconsistencyReason r)
{
    switch (r) {
    case InconsistencyReason::HyperbolicMonodromyConical: return "HyperbolicMonodromyConical";
    case InconsistencyReason::ParabolicMonodromyConical: return "ParabolicMonodromyConical";
    case InconsistencyReason::EllipticMonodromyCusp: return "EllipticMonodromyCusp";
    case InconsistencyReason::HyperbolicMonodromyCusp: return "HyperbolicMonodromyCusp";
    case InconsistencyReason::WrongLogOrientation: return "WrongLogOrientation";
    case InconsistencyReason::ObstructedLogEscape: return "ObstructedLogEscape";
    }
    return "unknown";
}

struct Inconsistency {
    InconsistencyReason reason;
    /// Set for ObstructedLogEscape: a point where the ratio leaves the disk.
    std::optional<Complex> witness;
};

using Classification = std::variant<Conical, Cusp, Inconsistency>;

/// Normalizing coordinate z(xi): the metric is the conical model in z
/// (developing map z^alpha into the disk) or the cusp model (developing map
/// -i log z into the half-plane). z is unique up to z -> lambda z, |lambda| = 1.
struct NormalForm {
    std::variant<Conical, Cusp> kind;
    TruncSeries coord;
    std::vector<std::string> warnings;
};

inline SingularityKind metric_kind(const NormalForm& nf)
{
    if (const auto* c = std::get_if<Conical>(&nf.kind)) return ConicalKind{c->alpha.value()};
    return CuspKind{};
}

/// Deck action on F under xi -> e^{2 pi i} xi.
inline MobiusMap germ_monodromy(const DevelopingGerm& germ)
{
    const MobiusMap& m = germ.moebius();
    if (germ.is_log()) return m * MobiusMap::translation(Complex(0.0, kTwoPi)) * inverse(m);
    const Real alpha = *germ.alpha();
    if (alpha.is_exact() && alpha.exact()->is_integer()) return MobiusMap::identity();
    return m * MobiusMap::scaling(std::polar(1.0, kTwoPi * alpha.value())) * inverse(m);
}

namespace detail {

inline constexpr double kMatchTolerance = 1e-9;

inline MobiusMap effective_monodromy(const DevelopingGerm& germ)
{
    const MobiusMap l = germ.declared_monodromy().value_or(germ_monodromy(germ));
    if (!preserves(l, germ.model())) {
        throw Error(ErrorCode::MonodromyNotIsometric, "monodromy is not an isometry of the target model");
    }
    return l;
}

inline bool inside_model(Model model, const ExtendedComplex& w)
{
    if (w.is_infinite()) return false;
    return model == Model::Disk ? std::abs(w.value()) < 1.0 : w.value().imag() > 0.0;
}

/// Germ and monodromy moved to the half-plane model.
inline std::pair<MobiusMap, MobiusMap> to_halfplane(const DevelopingGerm& germ, const MobiusMap& l)
{
    if (germ.model() == Model::HalfPlane) return {germ.moebius(), l};
    const MobiusMap ci = inverse(cayley());
    return {ci * germ.moebius(), ci * l * cayley()};
}

/// For a log germ with parabolic monodromy: N = K M in det-one form with
/// c = 0, where K conjugates the monodromy to a real translation.
inline MobiusMap cusp_normalizer(const DevelopingGerm& germ, const MobiusMap& l)
{
    const auto [mh, lh] = to_halfplane(germ, l);
    const auto [k, cls] = conjugate_to_normal_form(lh, Model::HalfPlane);
    (void)cls;
    const MobiusMap n = normalize_det(k * mh);
    if (std::abs(n.c()) > kMatchTolerance * n.max_abs()) {
        throw Error(ErrorCode::InconsistentGerm, "normalized log germ has c != 0");
    }
    return n;
}

} // namespace detail

/// Singularity type of a germ from its branch and monodromy (the declared one
/// when present, the germ's own otherwise).
inline Classification classify_singularity(const DevelopingGerm& germ)
{
    const MobiusMap l = detail::effective_monodromy(germ);
    const IsometryClass cls = classify(l, germ.model());
    const bool matches_germ = approx_equal(l, germ_monodromy(germ), detail::kMatchTolerance);

    if (!germ.is_log()) {
        switch (cls.kind) {
        case IsometryKind::Hyperbolic: return Inconsistency{InconsistencyReason::HyperbolicMonodromyConical, {}};
        case IsometryKind::Parabolic: return Inconsistency{InconsistencyReason::ParabolicMonodromyConical, {}};
        default: break;
        }
        if (!matches_germ) throw Error(ErrorCode::InconsistentGerm, "declared monodromy differs from the germ's");
        if (!detail::inside_model(germ.model(), apply(germ.moebius(), ExtendedComplex(Complex{})))) {
            throw Error(ErrorCode::InconsistentGerm, "F(0) lies outside the model");
        }
        return Conical{*germ.alpha()};
    }

    switch (cls.kind) {
    case IsometryKind::Elliptic: return Inconsistency{InconsistencyReason::EllipticMonodromyCusp, {}};
    case IsometryKind::Hyperbolic: return Inconsistency{InconsistencyReason::HyperbolicMonodromyCusp, {}};
    case IsometryKind::Identity: throw Error(ErrorCode::InconsistentGerm, "log germ with trivial monodromy");
    case IsometryKind::Parabolic: break;
    }
    if (!matches_germ) throw Error(ErrorCode::InconsistentGerm, "declared monodromy differs from the germ's");

    // g = a^2 log xi + ab with a^2 = i delta; the half-plane forces delta < 0
    const MobiusMap n = detail::cusp_normalizer(germ, l);
    const Complex a2 = n.a() / n.d();
    if (std::abs(a2.real()) > detail::kMatchTolerance * std::abs(a2)) {
        throw Error(ErrorCode::InconsistentGerm, "a^2 is not purely imaginary");
    }
    if (a2.imag() > 0.0) return Inconsistency{InconsistencyReason::WrongLogOrientation, {}};
    return Cusp{};
}

/// The normalizing coordinate of a realizable germ.
///
/// Conical: the germ is moved to the disk with F(0) = 0, giving
/// F = mu xi^alpha / (1 + kappa xi^alpha). For integer alpha = n,
/// z = xi mu^{1/n} (1 + kappa xi^n)^{-1/n}; otherwise kappa vanishes and
/// z = mu^{1/alpha} xi. Cusp: the germ is normalized to a^2 log xi + ab and
/// z = e^{b/a} xi. Roots use the principal branch.
inline NormalForm normal_coordinate(const DevelopingGerm& germ, int order = kDefaultOrder)
{
    const Classification cls = classify_singularity(germ);
    if (std::holds_alternative<Inconsistency>(cls)) {
        throw Error(ErrorCode::NotNormalizable, "singularity classified as inconsistent");
    }
    const TruncSeries xi = TruncSeries::variable(order);

    if (std::holds_alternative<Cusp>(cls)) {
        const MobiusMap n = detail::cusp_normalizer(germ, detail::effective_monodromy(germ));
        return {Cusp{}, std::exp(n.b() / n.a()) * xi, {}};
    }

    const Real alpha = std::get<Conical>(cls).alpha;
    const MobiusMap md = germ.model() == Model::Disk ? germ.moebius() : cayley() * germ.moebius();
    const Complex p = apply(md, ExtendedComplex(Complex{})).value();
    const MobiusMap n = MobiusMap(1.0, -p, -std::conj(p), 1.0) * md;
    const Complex mu = n.a() / n.d();
    const Complex kappa = n.c() / n.d();
    std::vector<std::string> warnings;

    if (alpha.is_integer()) {
        const auto deg = static_cast<int>(alpha.nearest_integer());
        if (!alpha.is_exact()) warnings.push_back("alpha treated as the integer " + std::to_string(deg));
        warnings.push_back("BranchChoice: principal branch of the " + std::to_string(deg) + "-th root");
        auto unit = TruncSeries::constant(1.0, order);
        if (deg <= order) unit.at(deg) = kappa;
        const Complex root = std::exp(std::log(mu) / static_cast<double>(deg));
        return {Conical{alpha}, root * (xi * pow_unit(unit, -1.0 / deg)), warnings};
    }

    if (std::abs(kappa) > detail::kMatchTolerance * (1.0 + std::abs(mu))) {
        throw Error(ErrorCode::NotNormalizable, "elliptic normalization left a nonzero off-diagonal entry");
    }
    warnings.push_back("BranchChoice: principal branch of mu^(1/alpha)");
    return {Conical{alpha}, std::exp(std::log(mu) / alpha.value()) * xi, warnings};
}

/// Normal coordinate from a Frobenius ratio: x unit^{1/alpha} for a power
/// ratio, x e^{psi} for a logarithmic one.
inline TruncSeries ratio_coordinate(const RatioForm& ratio)
{
    if (const auto* p = std::get_if<PowerRatio>(&ratio)) {
        const TruncSeries x = TruncSeries::variable(p->unit.order());
        return x * pow_unit(p->unit, 1.0 / p->alpha.value());
    }
    if (const auto* l = std::get_if<LogRatio>(&ratio)) {
        return TruncSeries::variable(l->psi.order()) * exp_unit(l->psi);
    }
    throw Error(ErrorCode::NotNormalizable, "an obstructed logarithmic ratio has no normal coordinate");
}

/// 50 points on |xi| = 0.05 s and 0.15 s at fixed pseudo-random phases in
/// (-0.95 pi, 0.95 pi). s <= 1 shrinks the circles so that |z(xi)| stays
/// below about 1/2 when the coordinate has a large linear coefficient.
inline std::vector<Complex> default_samples(const NormalForm& nf)
{
    const double slope = std::abs(nf.coord[1]);
    const double s = slope > 0.0 ? std::min(1.0, 0.5 / (0.15 * slope)) : 1.0;
    std::mt19937_64 rng(20161);
    std::uniform_real_distribution<double> phase(-0.95 * std::numbers::pi, 0.95 * std::numbers::pi);
    std::vector<Complex> out;
    for (double r : {0.05, 0.15}) {
        for (int k = 0; k < 25; ++k) out.push_back(std::polar(r * s, phase(rng)));
    }
    return out;
}

/// Max relative gap between the germ's metric and the model metric pulled
/// back through nf.coord.
inline double verify_normal_form(const NormalForm& nf, const DevelopingGerm& germ, const std::vector<Complex>& samples)
{
    const TruncSeries dz = derive(nf.coord);
    double worst = 0.0;
    for (const Complex xi : samples) {
        if (std::abs(xi) > 0.2 || xi == Complex{}) throw Error(ErrorCode::OutOfDomain, "sample outside 0 < |xi| <= 0.2");
        const double pd = pullback_density(germ, xi);
        const Complex z = evaluate(nf.coord, xi);
        const double base = std::visit(
            [&](const auto& k) {
                if constexpr (std::is_same_v<std::decay_t<decltype(k)>, Conical>) return conical_density(k.alpha.value(), z);
                else return cusp_density(z);
            },
            nf.kind);
        worst = std::max(worst, std::abs(pd - base * std::norm(evaluate(dz, xi))) / pd);
    }
    return worst;
}

inline double verify_normal_form(const NormalForm& nf, const DevelopingGerm& germ)
{
    return verify_normal_form(nf, germ, default_samples(nf));
}

/// lambda with z2 = lambda z1, |lambda| = 1, coefficientwise within 1e-10.
inline Complex rotation_class(const TruncSeries& z1, const TruncSeries& z2, double tol = 1e-10)
{
    if (std::abs(z1[1]) == 0.0) throw Error(ErrorCode::NotRotationRelated, "z1 is not a coordinate (z'(0) = 0)");
    const Complex lambda = z2[1] / z1[1];
    if (std::abs(std::abs(lambda) - 1.0) >= tol) {
        throw Error(ErrorCode::NotRotationRelated, "ratio of linear terms is not unimodular");
    }
    const int n = std::min(z1.order(), z2.order());
    if (coeff_distance(z2.truncated(n), lambda * z1.truncated(n)) >= tol) {
        throw Error(ErrorCode::NotRotationRelated, "coordinates are not proportional");
    }
    return lambda;
}

/// F(x) = L(log x + x^{-m} phi(x)) with L = (a, b; c, d), ad - bc = 1, written
/// as (a/c)(1 + h(x) x^m), h = -1/(ac(x^m log x + phi) + ad x^m).
inline Complex escape_value(int m, const TruncSeries& phi, Complex a, Complex c, Complex d, Complex x)
{
    const Complex xm = std::pow(x, m);
    const Complex h = -1.0 / (a * c * (xm * std::log(x) + evaluate(phi, x)) + a * d * xm);
    return (a / c) * (1.0 + h * xm);
}

/// A point 0 < |x| < 0.2 with |F(x)| > 1, found by aiming arg x so that
/// Re(h(x) x^m) > 0 and halving |x| from 0.19 down to 1e-8.
inline Complex escape_witness(int m, const TruncSeries& phi, Complex a, Complex c, Complex d)
{
    if (m < 1) throw Error(ErrorCode::PreconditionFailed, "m must be a positive integer");
    if (std::abs(a) == 0.0 || std::abs(c) == 0.0) throw Error(ErrorCode::PreconditionFailed, "a and c must be nonzero");
    if (std::abs(std::abs(a) - std::abs(c)) > 1e-12 * std::abs(a)) {
        throw Error(ErrorCode::PreconditionFailed, "parabolic PSU(1,1) constraint |a| = |c| violated");
    }
    if (std::abs(phi[0]) == 0.0) throw Error(ErrorCode::PreconditionFailed, "phi(0) must be nonzero");

    const Complex h0 = -1.0 / (a * c * phi[0]);
    const double base = -std::arg(h0) / m;
    std::vector<double> angles;
    for (double off : {0.0, 0.125, -0.125, 0.25, -0.25}) {
        for (int k = 0; k < m; ++k) {
            double t = base + (kTwoPi * k + off * std::numbers::pi) / m;
            t = std::remainder(t, kTwoPi);
            // stay clear of the principal cut
            if (std::abs(t) > std::numbers::pi - 1e-6) t = std::copysign(std::numbers::pi - 1e-6, t);
            angles.push_back(t);
        }
    }
    for (double r = 0.19; r >= 1e-8; r /= 2.0) {
        for (double t : angles) {
            const Complex x = std::polar(r, t);
            if (std::abs(escape_value(m, phi, a, c, d, x)) > 1.0 + 1e-12) return x;
        }
    }
    throw Error(ErrorCode::WitnessNotFound, "no escape point found down to |x| = 1e-8");
}

struct ConeCandidate {
    Real alpha;
};
struct CuspCandidate {};
struct NeverDiskValued {};
using SchwarzianVerdict = std::variant<ConeCandidate, CuspCandidate, NeverDiskValued>;

struct SchwarzianReport {
    FrobeniusBasis basis;
    RatioForm ratio;
    MobiusMap monodromy;
    SchwarzianVerdict verdict;
};

/// Schwarzian data -> operator -> Frobenius basis -> ratio -> monodromy and
/// verdict. NeverDiskValued exactly for an obstructed logarithmic ratio.
inline SchwarzianReport analyze_schwarzian(const SingularityData& data, int order = kDefaultOrder)
{
    FrobeniusBasis basis = solve_basis(ode_from_schwarzian(data, order), order);
    RatioForm ratio = projective_ratio(basis);
    const MobiusMap mono = local_monodromy(ratio);
    SchwarzianVerdict verdict;
    if (std::holds_alternative<ObstructedLogRatio>(ratio)) verdict = NeverDiskValued{};
    else if (std::holds_alternative<LogRatio>(ratio)) verdict = CuspCandidate{};
    else verdict = ConeCandidate{basis.indicial.difference};
    return {std::move(basis), std::move(ratio), mono, verdict};
}

} // namespace hypsing
