#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include "hypsing/error.hpp"

namespace hypsing {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// A point of the Riemann sphere.
class ExtendedComplex {
public:
    constexpr ExtendedComplex() = default;
    constexpr ExtendedComplex(Complex z) : value_(z) {}
    constexpr ExtendedComplex(double x) : value_(x, 0.0) {}

    static constexpr ExtendedComplex infinity()
    {
        ExtendedComplex p;
        p.infinite_ = true;
        return p;
    }

    [[nodiscard]] constexpr bool is_infinite() const noexcept { return infinite_; }

    /// Finite value; meaningless (NaN) at infinity.
    [[nodiscard]] Complex value() const noexcept
    {
        if (infinite_) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
        return value_;
    }

    friend std::ostream& operator<<(std::ostream& os, const ExtendedComplex& p)
    {
        if (p.infinite_) return os << "inf";
        return os << p.value_;
    }

private:
    Complex value_{};
    bool infinite_ = false;
};

enum class Model { Disk, HalfPlane };

enum class IsometryKind { Identity, Elliptic, Parabolic, Hyperbolic };

constexpr const char* to_string(Model m) noexcept { return m == Model::Disk ? "disk" : "halfplane"; }

constexpr const char* to_string(IsometryKind k) noexcept
{
    switch (k) {
    case IsometryKind::Identity: return "identity";
    case IsometryKind::Elliptic: return "elliptic";
    case IsometryKind::Parabolic: return "parabolic";
    case IsometryKind::Hyperbolic: return "hyperbolic";
    }
    return "?";
}

/// Conjugacy data of an isometry. `parameter` is the rotation angle in
/// (-pi, pi] for elliptic maps, the translation length of the canonical
/// conjugate for parabolic maps, and the multiplier (>= 1) for hyperbolic
/// maps. Identity carries 0.
struct IsometryClass {
    IsometryKind kind = IsometryKind::Identity;
    double parameter = 0.0;
    /// Set when the class was decided inside the parabolic band |tr^2 - 4| <= eps.
    std::optional<std::string> warning;
};

/// Fractional linear transformation z -> (az + b)/(cz + d), defined modulo a
/// nonzero scalar.
class MobiusMap {
public:
    /// Relative threshold on |ad - bc| against the largest squared entry.
    static constexpr double kDegenerateTolerance = 1e-13;

    MobiusMap(Complex a, Complex b, Complex c, Complex d) : m_{a, b, c, d}
    {
        const double scale = max_abs();
        if (!(scale > 0.0) || !std::isfinite(scale) ||
            std::abs(det()) <= kDegenerateTolerance * scale * scale) {
            throw Error(ErrorCode::DegenerateMatrix, "ad - bc vanishes");
        }
    }

    static MobiusMap identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static MobiusMap translation(Complex t) { return {1.0, t, 0.0, 1.0}; }
    static MobiusMap scaling(Complex k) { return {k, 0.0, 0.0, 1.0}; }
    static MobiusMap rotation(double theta) { return scaling(std::polar(1.0, theta)); }

    [[nodiscard]] Complex a() const noexcept { return m_[0]; }
    [[nodiscard]] Complex b() const noexcept { return m_[1]; }
    [[nodiscard]] Complex c() const noexcept { return m_[2]; }
    [[nodiscard]] Complex d() const noexcept { return m_[3]; }
    [[nodiscard]] const std::array<Complex, 4>& entries() const noexcept { return m_; }

    [[nodiscard]] Complex det() const noexcept { return m_[0] * m_[3] - m_[1] * m_[2]; }
    [[nodiscard]] Complex trace() const noexcept { return m_[0] + m_[3]; }

    [[nodiscard]] double max_abs() const noexcept
    {
        double s = 0.0;
        for (const auto& e : m_) s = std::max(s, std::abs(e));
        return s;
    }

    /// Finite-point evaluation; returns a huge value rather than infinity when
    /// the denominator vanishes exactly. Use apply() for projective handling.
    [[nodiscard]] Complex operator()(Complex z) const { return (m_[0] * z + m_[1]) / (m_[2] * z + m_[3]); }

    /// Derivative (ad - bc)/(cz + d)^2.
    [[nodiscard]] Complex derivative(Complex z) const
    {
        const Complex den = m_[2] * z + m_[3];
        return det() / (den * den);
    }

    friend std::ostream& operator<<(std::ostream& os, const MobiusMap& m)
    {
        return os << "(" << m.a() << ", " << m.b() << "; " << m.c() << ", " << m.d() << ")";
    }

private:
    std::array<Complex, 4> m_;
};

/// Matrix product: apply(compose(m1, m2), z) == apply(m1, apply(m2, z)).
inline MobiusMap compose(const MobiusMap& m1, const MobiusMap& m2)
{
    return {m1.a() * m2.a() + m1.b() * m2.c(), m1.a() * m2.b() + m1.b() * m2.d(),
            m1.c() * m2.a() + m1.d() * m2.c(), m1.c() * m2.b() + m1.d() * m2.d()};
}

inline MobiusMap operator*(const MobiusMap& m1, const MobiusMap& m2) { return compose(m1, m2); }

inline MobiusMap inverse(const MobiusMap& m) { return {m.d(), -m.b(), -m.c(), m.a()}; }

inline ExtendedComplex apply(const MobiusMap& m, const ExtendedComplex& z)
{
    if (z.is_infinite()) {
        if (m.c() == Complex{}) return ExtendedComplex::infinity();
        return ExtendedComplex(m.a() / m.c());
    }
    const Complex w = z.value();
    const Complex den = m.c() * w + m.d();
    if (den == Complex{}) return ExtendedComplex::infinity();
    return ExtendedComplex((m.a() * w + m.b()) / den);
}

inline MobiusMap scaled(const MobiusMap& m, Complex k) { return {k * m.a(), k * m.b(), k * m.c(), k * m.d()}; }

/// Determinant-one representative. The global sign is fixed so that the first
/// entry (in a, b, c, d order) with nonzero modulus has nonnegative real part.
inline MobiusMap normalize_det(const MobiusMap& m)
{
    MobiusMap n = scaled(m, 1.0 / std::sqrt(m.det()));
    const double floor = 1e-300;
    for (const auto& e : n.entries()) {
        if (std::abs(e) > floor) {
            if (e.real() < 0.0) n = scaled(n, -1.0);
            break;
        }
    }
    return n;
}

/// Representative whose largest-modulus entry equals 1 exactly.
inline MobiusMap scalar_normalized(const MobiusMap& m)
{
    const auto& e = m.entries();
    std::size_t k = 0;
    for (std::size_t i = 1; i < 4; ++i) {
        if (std::abs(e[i]) > std::abs(e[k])) k = i;
    }
    return scaled(m, 1.0 / e[k]);
}

/// Entrywise distance between two maps after both are scaled so that the
/// entry where m1 is largest becomes 1.
inline double scalar_distance(const MobiusMap& m1, const MobiusMap& m2)
{
    const auto& e1 = m1.entries();
    const auto& e2 = m2.entries();
    std::size_t k = 0;
    for (std::size_t i = 1; i < 4; ++i) {
        if (std::abs(e1[i]) > std::abs(e1[k])) k = i;
    }
    if (e2[k] == Complex{}) return std::numeric_limits<double>::infinity();
    double dist = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        dist = std::max(dist, std::abs(e1[i] / e1[k] - e2[i] / e2[k]));
    }
    return dist;
}

inline bool approx_equal(const MobiusMap& m1, const MobiusMap& m2, double tol = 1e-10)
{
    return scalar_distance(m1, m2) <= tol;
}

/// Cayley map z -> (z - i)/(z + i), sending the upper half-plane onto the disk
/// and i to 0.
inline MobiusMap cayley() { return {1.0, -kI, 1.0, kI}; }

namespace detail {

inline constexpr double kModelTolerance = 1e-9;
inline constexpr double kParabolicBand = 1e-9;

inline bool is_scalar(const MobiusMap& n, double tol)
{
    const double s = n.max_abs();
    return std::abs(n.b()) <= tol * s && std::abs(n.c()) <= tol * s && std::abs(n.a() - n.d()) <= tol * s;
}

/// Fixed points of a non-scalar map; infinity is reported as nullopt.
inline std::array<std::optional<Complex>, 2> fixed_points(const MobiusMap& m)
{
    // c z^2 + (d - a) z - b = 0
    const Complex qa = m.c();
    const Complex qb = m.d() - m.a();
    const Complex qc = -m.b();
    const double scale = m.max_abs();
    if (std::abs(qa) <= 1e-15 * scale) {
        if (std::abs(qb) <= 1e-15 * scale) return {std::nullopt, std::nullopt};
        return {Complex(-qc / qb), std::nullopt};
    }
    const Complex disc = std::sqrt(qb * qb - 4.0 * qa * qc);
    // Pick the numerically stable pairing of the quadratic formula.
    const Complex q = -0.5 * (qb + (std::real(std::conj(qb) * disc) >= 0.0 ? disc : -disc));
    if (q == Complex{}) return {Complex(0.0), Complex(0.0)};
    return {Complex(q / qa), Complex(qc / q)};
}

} // namespace detail

/// True iff some scalar multiple of m lies in PSU(1,1) (Disk) or PSL(2,R)
/// (HalfPlane), within a relative tolerance of 1e-9.
inline bool preserves(const MobiusMap& m, Model model)
{
    const MobiusMap n = normalize_det(m);
    const double tol = detail::kModelTolerance * n.max_abs();
    if (model == Model::Disk) {
        return std::abs(n.d() - std::conj(n.a())) <= tol && std::abs(n.c() - std::conj(n.b())) <= tol;
    }
    for (const auto& e : n.entries()) {
        if (std::abs(e.imag()) > tol) return false;
    }
    return true;
}

namespace detail {

struct NormalFormData {
    MobiusMap conjugator;
    IsometryClass cls;
};

inline MobiusMap real_part(const MobiusMap& m)
{
    return {m.a().real(), m.b().real(), m.c().real(), m.d().real()};
}

inline double squared_trace(const MobiusMap& n)
{
    const Complex t2 = n.trace() * n.trace();
    if (std::abs(t2.imag()) > kModelTolerance * (1.0 + std::abs(t2))) {
        throw Error(ErrorCode::NotAnIsometry, "squared trace is not real");
    }
    return t2.real();
}

inline IsometryKind kind_from_trace(double tr2)
{
    if (tr2 < 4.0 - kParabolicBand) return IsometryKind::Elliptic;
    if (tr2 > 4.0 + kParabolicBand) return IsometryKind::Hyperbolic;
    return IsometryKind::Parabolic;
}

inline std::optional<std::string> band_warning(double tr2)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, "parabolic within band: |tr^2 - 4| = %.3g <= %.0e; classification is ill-conditioned",
                  std::abs(tr2 - 4.0), kParabolicBand);
    return std::string(buf);
}

/// Elliptic case in the disk: move the interior fixed point to 0.
inline NormalFormData disk_elliptic(const MobiusMap& n)
{
    const auto fps = fixed_points(n);
    std::optional<Complex> p;
    for (const auto& fp : fps) {
        if (fp && std::abs(*fp) < 1.0 && (!p || std::abs(*fp) < std::abs(*p))) p = fp;
    }
    if (!p) throw Error(ErrorCode::NotAnIsometry, "elliptic map without interior fixed point");
    MobiusMap k = MobiusMap::identity();
    if (std::abs(*p) > 1e-15) k = normalize_det(MobiusMap(1.0, -*p, -std::conj(*p), 1.0));
    const MobiusMap conj = k * n * inverse(k);
    const double theta = std::arg(conj.a() / conj.d());
    return {k, {IsometryKind::Elliptic, theta, std::nullopt}};
}

/// Parabolic and hyperbolic cases in the half-plane.
inline NormalFormData halfplane_boundary(const MobiusMap& m, IsometryKind kind)
{
    MobiusMap r = real_part(normalize_det(m));
    if ((r.a() + r.d()).real() < 0.0) r = scaled(r, -1.0);
    const double a = r.a().real(), b = r.b().real(), c = r.c().real(), d = r.d().real();
    const double scale = r.max_abs();
    const double tiny = 1e-14 * scale;

    if (kind == IsometryKind::Parabolic) {
        MobiusMap k = MobiusMap::identity();
        if (std::abs(c) > tiny) {
            const double x0 = (a - d) / (2.0 * c);
            k = MobiusMap(0.0, -1.0, 1.0, -x0);
        }
        const MobiusMap conj = k * r * inverse(k);
        return {k, {IsometryKind::Parabolic, (conj.b() / conj.d()).real(), std::nullopt}};
    }

    // Hyperbolic: send the repelling fixed point to 0 and the attracting one to infinity.
    MobiusMap k = MobiusMap::identity();
    if (std::abs(c) <= tiny) {
        const double x1 = b / (d - a);
        const bool x1_repelling = std::abs(a / d) > 1.0;
        if (x1_repelling) {
            if (std::abs(x1) > tiny) k = MobiusMap(1.0, -x1, 0.0, 1.0);
        } else {
            k = MobiusMap(0.0, -1.0, 1.0, -x1);
        }
    } else {
        const double disc = std::sqrt(std::max(0.0, (d - a) * (d - a) + 4.0 * b * c));
        double r1 = ((a - d) + disc) / (2.0 * c);
        double r2 = ((a - d) - disc) / (2.0 * c);
        // multiplier at a fixed point x is 1/(cx + d)^2
        if (std::abs(c * r1 + d) > std::abs(c * r2 + d)) std::swap(r1, r2);
        MobiusMap raw = (r1 - r2 > 0.0) ? MobiusMap(1.0, -r1, 1.0, -r2) : MobiusMap(-1.0, r1, 1.0, -r2);
        k = scaled(raw, 1.0 / std::sqrt(std::abs(r1 - r2)));
    }
    const MobiusMap conj = k * r * inverse(k);
    return {k, {IsometryKind::Hyperbolic, std::abs(conj.a() / conj.d()), std::nullopt}};
}

inline NormalFormData normal_form(const MobiusMap& m, Model model)
{
    if (!preserves(m, model)) throw Error(ErrorCode::NotAnIsometry, "map does not preserve the model");
    const MobiusMap n = normalize_det(m);
    if (is_scalar(n, kModelTolerance)) {
        throw Error(ErrorCode::IdentityInput, "identity has no normal form");
    }
    const double tr2 = squared_trace(n);
    const IsometryKind kind = kind_from_trace(tr2);
    const MobiusMap c = cayley();

    NormalFormData out{MobiusMap::identity(), {}};
    if (kind == IsometryKind::Elliptic) {
        if (model == Model::Disk) {
            out = disk_elliptic(n);
        } else {
            out = disk_elliptic(normalize_det(c * n * inverse(c)));
            out.conjugator = normalize_det(inverse(c) * out.conjugator * c);
        }
    } else {
        if (model == Model::HalfPlane) {
            out = halfplane_boundary(n, kind);
        } else {
            out = halfplane_boundary(normalize_det(inverse(c) * n * c), kind);
            out.conjugator = normalize_det(c * out.conjugator * inverse(c));
        }
    }
    if (kind == IsometryKind::Parabolic) out.cls.warning = band_warning(tr2);
    return out;
}

} // namespace detail

/// Trace-based classification of an isometry of the given model.
inline IsometryClass classify(const MobiusMap& m, Model model)
{
    if (!preserves(m, model)) throw Error(ErrorCode::NotAnIsometry, "map does not preserve the model");
    const MobiusMap n = normalize_det(m);
    if (detail::is_scalar(n, detail::kModelTolerance)) return {IsometryKind::Identity, 0.0, std::nullopt};
    const double tr2 = detail::squared_trace(n);
    const IsometryKind kind = detail::kind_from_trace(tr2);
    if (kind == IsometryKind::Hyperbolic) {
        const double tr = std::sqrt(tr2);
        const double mu = 0.5 * (tr + std::sqrt(tr2 - 4.0));
        return {kind, mu * mu, std::nullopt};
    }
    return detail::normal_form(m, model).cls;
}

/// Classification from the location of fixed points (interior / boundary),
/// independent of the trace. Parameters are left at 0.
inline IsometryKind classify_by_fixed_points(const MobiusMap& m, Model model, double tol = 1e-7)
{
    if (!preserves(m, model)) throw Error(ErrorCode::NotAnIsometry, "map does not preserve the model");
    const MobiusMap n = normalize_det(m);
    if (detail::is_scalar(n, detail::kModelTolerance)) return IsometryKind::Identity;
    auto fps = detail::fixed_points(n);
    // A double root splits by sqrt(rounding error) / |c|; merge such pairs.
    if (fps[0] && fps[1] && std::abs(*fps[0] - *fps[1]) * std::abs(n.c()) <= 1e-6) {
        const Complex mid = 0.5 * (*fps[0] + *fps[1]);
        fps = {mid, mid};
    }
    int interior = 0;
    int boundary = 0;
    std::optional<Complex> first_boundary;
    bool infinity_seen = false;
    for (const auto& fp : fps) {
        if (!fp) {
            if (model == Model::HalfPlane && !infinity_seen) {
                infinity_seen = true;
                ++boundary;
            }
            continue;
        }
        const bool inside = model == Model::Disk ? std::abs(*fp) < 1.0 - tol : fp->imag() > tol;
        const bool on_edge = model == Model::Disk ? std::abs(std::abs(*fp) - 1.0) <= tol : std::abs(fp->imag()) <= tol;
        if (inside) ++interior;
        if (on_edge) {
            if (first_boundary && std::abs(*first_boundary - *fp) <= std::sqrt(tol)) continue;
            if (!first_boundary) first_boundary = fp;
            ++boundary;
        }
    }
    if (interior > 0) return IsometryKind::Elliptic;
    if (boundary >= 2) return IsometryKind::Hyperbolic;
    return IsometryKind::Parabolic;
}

/// Returns K preserving the model with K M K^-1 in standard form: a rotation
/// about 0 (Disk elliptic), z + t or lambda z (HalfPlane parabolic or
/// hyperbolic). Off-diagonal combinations are the Cayley transports of these:
/// rotation about i in the half-plane, and C(z + t)C^-1 or C(lambda z)C^-1 in
/// the disk. K is the identity when M is already standard.
inline std::pair<MobiusMap, IsometryClass> conjugate_to_normal_form(const MobiusMap& m, Model model)
{
    auto nf = detail::normal_form(m, model);
    return {nf.conjugator, nf.cls};
}

/// The standard representative of a class in a model, matching
/// conjugate_to_normal_form.
inline MobiusMap standard_form(const IsometryClass& cls, Model model)
{
    const MobiusMap c = cayley();
    switch (cls.kind) {
    case IsometryKind::Identity: return MobiusMap::identity();
    case IsometryKind::Elliptic: {
        const MobiusMap rot = MobiusMap(std::polar(1.0, cls.parameter / 2.0), 0.0, 0.0, std::polar(1.0, -cls.parameter / 2.0));
        return model == Model::Disk ? rot : inverse(c) * rot * c;
    }
    case IsometryKind::Parabolic: {
        const MobiusMap tr = MobiusMap::translation(cls.parameter);
        return model == Model::HalfPlane ? tr : c * tr * inverse(c);
    }
    case IsometryKind::Hyperbolic: {
        const MobiusMap sc = MobiusMap::scaling(cls.parameter);
        return model == Model::HalfPlane ? sc : c * sc * inverse(c);
    }
    }
    return MobiusMap::identity();
}

} // namespace hypsing
