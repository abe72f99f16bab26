#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "test_support.hpp"

using namespace hypsing;
using hypsing::testing::rel_err;
using hypsing::testing::Rng;

namespace {

const double kE = std::exp(1.0);

DevelopingGerm minus_i_log() { return DevelopingGerm::log(MobiusMap(-kI, 0.0, 0.0, 1.0), Model::HalfPlane); }

/// Points on cell-centred polar grids strictly inside r_lo < |z| < r_hi.
std::vector<Complex> annulus_grid(double r_lo, double r_hi, int nr, int nt)
{
    std::vector<Complex> out;
    for (int i = 0; i < nr; ++i) {
        const double r = r_lo + (r_hi - r_lo) * (i + 0.5) / nr;
        for (int j = 0; j < nt; ++j) out.push_back(std::polar(r, kTwoPi * (j + 0.5) / nt));
    }
    return out;
}

} // namespace

TEST(MetricConical, Examples)
{
    EXPECT_EQ(conical_density(1.0, 0.0), 4.0);
    EXPECT_NEAR(conical_density(2.0, 0.5), 4.0 / 0.87890625, 1e-14);
    EXPECT_EQ(conical_density(2.0, 0.0), 0.0);
}

TEST(MetricConical, Domain)
{
    EXPECT_THROW(conical_density(0.5, 0.0), Error);
    EXPECT_THROW(conical_density(0.5, 1.0), Error);
    EXPECT_THROW(conical_density(0.5, Complex(0.9, 0.9)), Error);
    try {
        (void)conical_density(0.5, 1.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::OutOfDomain);
    }
}

TEST(MetricCusp, Examples)
{
    EXPECT_NEAR(cusp_density(std::exp(-1.0)), kE * kE, 1e-13);
    EXPECT_NEAR(cusp_density(std::exp(-2.0)), std::pow(kE, 4) / 4.0, 1e-12);
    EXPECT_GT(cusp_density(0.999), cusp_density(0.99));
    EXPECT_GT(cusp_density(1.0 - 1e-6), 1e11);
    EXPECT_THROW(cusp_density(0.0), Error);
    EXPECT_THROW(cusp_density(1.0), Error);
}

TEST(MetricDensities, RotationInvariant)
{
    Rng rng(41);
    for (int i = 0; i < 200; ++i) {
        const Complex z = rng.complex(0.95) + 1e-3;
        const Complex w = z * std::polar(1.0, rng.uniform(-3.0, 3.0));
        const double alpha = rng.uniform(0.1, 3.0);
        EXPECT_LE(rel_err(conical_density(alpha, w), conical_density(alpha, z)), 1e-12);
        EXPECT_LE(rel_err(cusp_density(w), cusp_density(z)), 1e-12);
    }
}

TEST(MetricPullback, ConicalIdentity)
{
    Rng rng(42);
    for (const Real alpha : {Real::fraction(1, 3), Real::fraction(1, 2), Real::fraction(2, 3), Real(2), Real::fraction(5, 2)}) {
        const DevelopingGerm g = DevelopingGerm::power(MobiusMap::identity(), alpha, Model::Disk);
        for (int i = 0; i < 50; ++i) {
            const Complex z = std::polar(rng.uniform(0.01, 0.95), rng.uniform(-3.1, 3.1));
            EXPECT_LE(rel_err(pullback_density(g, Model::Disk, z), conical_density(alpha.value(), z)), 1e-12);
        }
    }
}

TEST(MetricPullback, CuspIdentity)
{
    Rng rng(43);
    const DevelopingGerm h = minus_i_log();
    for (int i = 0; i < 200; ++i) {
        const Complex z = std::polar(rng.uniform(0.001, 0.99), rng.uniform(-3.1, 3.1));
        EXPECT_LE(rel_err(pullback_density(h, Model::HalfPlane, z), cusp_density(z)), 1e-12);
    }
}

TEST(MetricPullback, WrongOrientationLeavesTheModel)
{
    const DevelopingGerm h = DevelopingGerm::log(MobiusMap(kI, 0.0, 0.0, 1.0), Model::HalfPlane);
    try {
        (void)pullback_density(h, Model::HalfPlane, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ImageOutsideModel);
    }
}

TEST(MetricPullback, InvariantUnderModelIsometries)
{
    Rng rng(44);
    for (int i = 0; i < 50; ++i) {
        const MobiusMap l = rng.disk_isometry();
        const DevelopingGerm g = DevelopingGerm::power(l, Real::fraction(1, 2), Model::Disk);
        const Complex z = std::polar(rng.uniform(0.05, 0.9), rng.uniform(-3.0, 3.0));
        EXPECT_LE(rel_err(pullback_density(g, z), conical_density(0.5, z)), 1e-10);
    }
}

TEST(MetricCurvature, Examples)
{
    const auto cone = [](Complex z) { return conical_density(0.5, z); };
    EXPECT_NEAR(curvature_fd(cone, Complex(0.3, 0.1), 1e-3), -1.0, 1e-4);
    EXPECT_NEAR(curvature_fd([](Complex z) { return cusp_density(z); }, 0.2, 1e-3), -1.0, 1e-4);
    EXPECT_NEAR(curvature_fd([](Complex) { return 1.0; }, Complex(0.3, 0.1), 1e-3), 0.0, 1e-8);
}

TEST(MetricCurvature, ModelsHaveCurvatureMinusOneOnAnnulus)
{
    const auto pts = annulus_grid(0.05, 0.8, 12, 12);
    for (double alpha : {1.0 / 3.0, 0.5, 2.0 / 3.0, 2.0, 2.5}) {
        const auto f = [alpha](Complex z) { return conical_density(alpha, z); };
        for (const Complex z : pts) EXPECT_LE(std::abs(curvature_fd(f, z) + 1.0), 1e-4) << alpha << " " << z;
    }
    const auto c = [](Complex z) { return cusp_density(z); };
    for (const Complex z : pts) EXPECT_LE(std::abs(curvature_fd(c, z) + 1.0), 1e-4) << z;
}

TEST(MetricCurvature, PoincareDiskAtCentre)
{
    EXPECT_NEAR(curvature_fd([](Complex z) { return conical_density(1.0, z); }, 0.0, 1e-3, Annulus{-1.0, 1.0}), -1.0, 1e-6);
}

TEST(MetricCurvature, StencilMustFitInDomain)
{
    const auto cone = [](Complex z) { return conical_density(0.5, z); };
    try {
        (void)curvature_fd(cone, 1.2, 1e-3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::StencilOutOfDomain);
    }
    // near the boundary the step is clipped; accuracy then degrades with the margin
    const double e1 = std::abs(curvature_fd(cone, 0.998, 1e-3) + 1.0);
    const double e2 = std::abs(curvature_fd(cone, 0.99, 1e-3) + 1.0);
    EXPECT_LT(e1, 1e-2);
    EXPECT_LT(e2, e1);
}

TEST(MetricDistance, Examples)
{
    EXPECT_NEAR(radial_distance(ConicalKind{1.0}, 0.0, 0.5), std::log(3.0), 1e-15);
    EXPECT_NEAR(radial_distance(CuspKind{}, std::exp(-2.0), std::exp(-1.0)), std::log(2.0), 1e-15);
    for (double k : {10.0, 100.0, 1000.0}) {
        EXPECT_NEAR(radial_distance_log(CuspKind{}, -k, -1.0), std::log(k), 1e-13);
    }
    // e^{-1000} underflows, so the plain-radius form is checked where it is representable
    for (double k : {10.0, 100.0}) {
        EXPECT_NEAR(radial_distance(CuspKind{}, std::exp(-k), std::exp(-1.0)), std::log(k), 1e-13);
    }
}

TEST(MetricDistance, LogRadiusFormAgrees)
{
    Rng rng(46);
    for (int i = 0; i < 50; ++i) {
        const double r1 = rng.uniform(1e-3, 0.5), r2 = rng.uniform(r1 + 0.01, 0.99);
        const double alpha = rng.uniform(0.2, 3.0);
        EXPECT_NEAR(radial_distance_log(ConicalKind{alpha}, std::log(r1), std::log(r2)), radial_distance(ConicalKind{alpha}, r1, r2), 1e-13);
        EXPECT_NEAR(radial_distance_log(CuspKind{}, std::log(r1), std::log(r2)), radial_distance(CuspKind{}, r1, r2), 1e-13);
    }
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_NEAR(radial_distance_log(ConicalKind{1.0}, -inf, std::log(0.5)), std::log(3.0), 1e-15);
    EXPECT_THROW((void)radial_distance_log(CuspKind{}, -inf, -1.0), Error);
    EXPECT_THROW((void)radial_distance_log(CuspKind{}, -1.0, 0.0), Error);
}

TEST(MetricDistance, Domain)
{
    EXPECT_THROW(radial_distance(CuspKind{}, 0.0, 0.5), Error);
    EXPECT_THROW(radial_distance(ConicalKind{0.5}, 0.5, 0.4), Error);
    EXPECT_THROW(radial_distance(ConicalKind{0.5}, 0.1, 1.0), Error);
    EXPECT_THROW(radial_distance(ConicalKind{0.5}, -0.1, 0.5), Error);
}

TEST(MetricDistance, MatchesQuadrature)
{
    Rng rng(45);
    boost::math::quadrature::tanh_sinh<double> ts;
    for (int i = 0; i < 30; ++i) {
        const double alpha = rng.uniform(0.2, 3.0);
        const double r1 = rng.uniform(0.0, 0.5);
        const double r2 = rng.uniform(r1 + 0.05, 0.95);
        const auto len = [alpha](double r) { return 2.0 * alpha * std::pow(r, alpha - 1.0) / (1.0 - std::pow(r, 2.0 * alpha)); };
        EXPECT_NEAR(radial_distance(ConicalKind{alpha}, r1, r2), ts.integrate(len, r1, r2), 1e-8);

        const double c1 = rng.uniform(1e-6, 0.5);
        const double c2 = rng.uniform(c1 + 0.05, 0.95);
        const auto cusp_len = [](double r) { return -1.0 / (r * std::log(r)); };
        const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(cusp_len, c1, c2, 15, 1e-14);
        EXPECT_NEAR(radial_distance(CuspKind{}, c1, c2), q, 1e-8);
    }
}

TEST(MetricDistance, CuspDivergesConeStaysFinite)
{
    double prev = 0.0;
    for (int k = 2; k < 300; k += 7) {
        const double d = radial_distance(CuspKind{}, std::exp(-static_cast<double>(k)), std::exp(-1.0));
        EXPECT_GT(d, prev);
        prev = d;
    }
    EXPECT_GT(radial_distance(CuspKind{}, 1e-300, std::exp(-1.0)), 6.0);
    for (double alpha : {0.25, 1.0, 3.0}) {
        const double r = 0.9;
        EXPECT_LE(radial_distance(ConicalKind{alpha}, 0.0, r), std::log((1 + std::pow(r, alpha)) / (1 - std::pow(r, alpha))) + 1e-14);
    }
}

TEST(MetricGaussBonnet, Examples)
{
    const auto v1 = gauss_bonnet_admissible(Divisor(0, {Real::fraction(1, 2), Real::fraction(1, 2), Real::fraction(1, 2)}));
    EXPECT_EQ(*v1.sum.exact(), Rational(1, 2));
    EXPECT_FALSE(v1.admissible);

    const auto v2 = gauss_bonnet_admissible(Divisor(1, {Real(0)}));
    EXPECT_EQ(*v2.sum.exact(), Rational(-1));
    EXPECT_TRUE(v2.admissible);

    const auto v3 = gauss_bonnet_admissible(Divisor(0, {Real(0), Real(0)}));
    EXPECT_TRUE(v3.sum.is_zero());
    EXPECT_FALSE(v3.admissible);
}

TEST(MetricGaussBonnet, DivisorValidation)
{
    EXPECT_THROW(Divisor(0, {Real(1)}), Error);
    EXPECT_THROW(Divisor(0, {Real(-1)}), Error);
    EXPECT_THROW(Divisor(-1, {}), Error);
}
