#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace hypsing;
using hypsing::testing::Rng;

TEST(SchwarzianSeries, MobiusHasZeroSchwarzian)
{
    const int n = 24;
    const TruncSeries f = TruncSeries::variable(n) / TruncSeries::polynomial({1.0, -1.0}, n);
    const TruncSeries s = schwarzian_of_series(f);
    EXPECT_EQ(s.order(), n - 3);
    EXPECT_LT(s.max_abs(), 1e-12);
}

TEST(SchwarzianSeries, XPlusXSquared)
{
    // closed form -6/(1+2x)^2 = sum (-6)(k+1)(-2)^k x^k
    const TruncSeries s = schwarzian_of_series(TruncSeries::polynomial({0.0, 1.0, 1.0}, 20));
    for (int k = 0; k <= s.order(); ++k) {
        const double want = -6.0 * (k + 1) * std::pow(-2.0, k);
        EXPECT_NEAR(s[k].real(), want, 1e-12 * std::abs(want)) << k;
    }
    EXPECT_NEAR(s[0].real(), -6.0, 1e-14);
    EXPECT_NEAR(s[1].real(), 24.0, 1e-13);
    EXPECT_NEAR(s[2].real(), -72.0, 1e-12);
}

TEST(SchwarzianSeries, NotLocallyUnivalent)
{
    try {
        (void)schwarzian_of_series(TruncSeries::polynomial({0.0, 0.0, 1.0}, 8));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotLocallyUnivalent);
    }
}

TEST(SchwarzianSeries, MobiusCocycle)
{
    Rng rng(21);
    int checked = 0;
    while (checked < 40) {
        TruncSeries f = rng.series(24, 0.5);
        f.at(0) = rng.complex(0.3);
        f.at(1) = 1.0 + rng.complex(0.5);
        const MobiusMap l = rng.generic(1.0);
        // keep the pole of L o f outside the unit disk so L o f stays well conditioned
        if (std::abs(l.c() * f[0] + l.d()) < 2.0 * std::abs(l.c()) + 0.2) continue;
        const TruncSeries a = schwarzian_of_series(f);
        const TruncSeries b = schwarzian_of_series(apply_mobius(l, f));
        EXPECT_LT(coeff_distance(a, b), 1e-10);
        ++checked;
    }
}

TEST(SchwarzianGerm, PowerGermPrincipalPart)
{
    for (const Real alpha : {Real::fraction(1, 2), Real::fraction(1, 3), Real::fraction(5, 2), Real(3)}) {
        const GermSchwarzian gs = schwarzian_of_germ(DevelopingGerm::power(MobiusMap::identity(), alpha, Model::Disk));
        EXPECT_NEAR(gs.theta, alpha.value(), 1e-10);
        EXPECT_NEAR(std::abs(gs.raw[0] - (1.0 - alpha.value() * alpha.value()) / 2.0), 0.0, 1e-10);
        EXPECT_EQ(gs.d, Complex{});
        EXPECT_EQ(gs.tail.max_abs(), 0.0);
    }
}

TEST(SchwarzianGerm, LogGermIsCusp)
{
    const GermSchwarzian gs = schwarzian_of_germ(DevelopingGerm::log(MobiusMap::identity(), Model::HalfPlane));
    EXPECT_EQ(gs.theta, 0.0);
    EXPECT_NEAR(std::abs(gs.raw[0] - 0.5), 0.0, 1e-10);
    EXPECT_EQ(gs.d, Complex{});
    EXPECT_EQ(gs.tail.max_abs(), 0.0);
}

TEST(SchwarzianGerm, PrincipalPartIgnoresMobiusFactor)
{
    Rng rng(22);
    for (int i = 0; i < 20; ++i) {
        const Real alpha(rng.uniform(0.2, 3.0));
        // keep poles of L(w) away from the sampled values |w| ~ 0.05^alpha
        const MobiusMap l = rng.disk_isometry(0.5);
        const GermSchwarzian base = schwarzian_of_germ(DevelopingGerm::power(MobiusMap::identity(), alpha, Model::Disk));
        const GermSchwarzian moved = schwarzian_of_germ(DevelopingGerm::power(l, alpha, Model::Disk));
        EXPECT_NEAR(moved.theta, alpha.value(), 1e-9);
        EXPECT_NEAR(std::abs(moved.d - base.d), 0.0, 1e-9);
        EXPECT_LT(coeff_distance(moved.tail, base.tail), 1e-9);
    }
}

TEST(SchwarzianOde, Examples)
{
    const OperatorCoeffs q1 = ode_from_schwarzian(SingularityData(Real::fraction(1, 2), 0.0));
    EXPECT_EQ(*q1.b0.exact(), Rational(3, 16));
    EXPECT_EQ(q1.q[1], Complex{});

    const OperatorCoeffs q2 = ode_from_schwarzian(SingularityData(Real(0), 0.0));
    EXPECT_EQ(*q2.b0.exact(), Rational(1, 4));

    const OperatorCoeffs q3 = ode_from_schwarzian(SingularityData(Real(2), 2.0));
    EXPECT_EQ(*q3.b0.exact(), Rational(-3, 4));
    EXPECT_EQ(q3.q[1], Complex(1.0));
    EXPECT_EQ(q3.q[2], Complex{});
}

TEST(SchwarzianOde, TailEntersAtSecondOrder)
{
    const OperatorCoeffs q = ode_from_schwarzian(SingularityData(Real::fraction(1, 3), Complex(0.5, 1.0),
                                                                 TruncSeries({Complex(2.0, -2.0), 4.0})));
    EXPECT_EQ(q.q[1], Complex(0.25, 0.5));
    EXPECT_EQ(q.q[2], Complex(1.0, -1.0));
    EXPECT_EQ(q.q[3], Complex(2.0));
    EXPECT_EQ(q.q[4], Complex{});
}

TEST(SchwarzianOde, RoundTripToExactIndicialRoots)
{
    for (const Real theta : {Real::fraction(1, 3), Real::fraction(1, 2), Real::fraction(3, 2), Real(2), Real(0)}) {
        const IndicialData ind = indicial_roots(ode_from_schwarzian(SingularityData(theta, 0.0)));
        ASSERT_TRUE(ind.s1.is_exact());
        ASSERT_TRUE(ind.s2.is_exact());
        EXPECT_EQ(*ind.s1.exact(), *((Real(1) - theta) / Real(2)).exact());
        EXPECT_EQ(*ind.s2.exact(), *((Real(1) + theta) / Real(2)).exact());
    }
}

TEST(SchwarzianData, Validation)
{
    EXPECT_THROW(SingularityData(Real(1), 0.0), Error);
    EXPECT_THROW(SingularityData(Real(-1), 0.0), Error);
    EXPECT_THROW(SingularityData(Real(2), 0.0, TruncSeries({1.0}, Real::fraction(1, 2))), Error);
}

TEST(SchwarzianCompatibility, MatchingAndMismatchedData)
{
    const DevelopingGerm g = DevelopingGerm::power(MobiusMap::identity(), Real::fraction(1, 2), Model::Disk);
    EXPECT_LT(verify_compatibility(g, SingularityData(Real::fraction(1, 2), 0.0)), 1e-12);
    const double mismatch = verify_compatibility(g, SingularityData(Real::fraction(1, 3), 0.0));
    EXPECT_GE(mismatch, std::abs((1.0 - 0.25) - (1.0 - 1.0 / 9.0)) / 2.0 - 1e-12);
}

TEST(SchwarzianCompatibility, MovedGermMatchesItsOwnData)
{
    Rng rng(23);
    for (int i = 0; i < 10; ++i) {
        const MobiusMap l = rng.disk_isometry(0.5);
        const DevelopingGerm g = DevelopingGerm::power(l, Real::fraction(1, 2), Model::Disk);
        const GermSchwarzian gs = schwarzian_of_germ(g);
        const SingularityData data(Real::fraction(1, 2), gs.d, gs.tail);
        EXPECT_LT(verify_compatibility(g, data), 1e-10);
    }
}
