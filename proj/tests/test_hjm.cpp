#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "curveforge/error.hpp"
#include "curveforge/hjm.hpp"
#include "curveforge/shortrate.hpp"

using namespace curveforge;

namespace {

DiscountCurve market_curve() {
    std::vector<Pillar> pillars;
    double logp = 0.0, prev = 0.0;
    for (double t : {0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0}) {
        logp -= (0.02 + 0.003 * std::sqrt(t)) * (t - prev);
        prev = t;
        pillars.push_back({t, std::exp(logp)});
    }
    return DiscountCurve(pillars);
}

const std::vector<double> kGrid{1.0 / 12, 2.0 / 12, 3.0 / 12, 6.0 / 12, 9.0 / 12, 1, 2, 3, 5, 7, 10, 15, 20, 25};

}  // namespace

TEST(HjmDrift, ConstantVolatility) {
    const HoLeeParams p{0.0232};
    EXPECT_EQ(hjm_drift(p, 1.0, 1.0), 0.0);
    EXPECT_NEAR(hjm_drift(p, 2.0, 3.0), 5.3824e-4, 1e-18);
    EXPECT_NEAR(hjm_drift(p, 0.5, 3.0), 0.0232 * 0.0232 * 2.5, 1e-18);
    EXPECT_THROW(hjm_drift(p, 2.0, 1.0), Error);
}

TEST(HjmDrift, MatchesQuadratureForBothForms) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> a(0.01, 3.0), sig(0.001, 0.5), s(0.0, 10.0), h(0.0, 20.0);
    for (int i = 0; i < 20; ++i) {
        const double s0 = s(rng), t = s0 + h(rng);
        for (const HjmVolatility vol : {HjmVolatility{HoLeeParams{sig(rng)}}, HjmVolatility{HullWhiteParams{a(rng), sig(rng)}}}) {
            const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                [&](double u) { return hjm_volatility(vol, s0, u); }, s0, t, 15, 1e-15);
            EXPECT_NEAR(hjm_drift(vol, s0, t), hjm_volatility(vol, s0, t) * integral, 1e-10);
        }
    }
}

TEST(HoLee, NormalizationAndInitialFit) {
    const DiscountCurve c = market_curve();
    const HoLeeParams p{0.3071};
    EXPECT_EQ(holee_price(p, c, 0.05, 2.0, 2.0), 1.0);
    const double r0 = c.forward(0.0);
    for (const auto& pl : c.pillars()) EXPECT_NEAR(holee_price(p, c, r0, 0.0, pl.maturity), pl.discount, 1e-12);
}

TEST(HoLee, MatchesDirectFormula) {
    const std::vector<Time> ts{1.0, 2.0, 3.0, 5.0, 10.0};
    const DiscountCurve flat = DiscountCurve::flat(0.04, ts);
    const double s = 0.3071, t = 1.0, T = 3.0, r = 0.05;
    const double expected = std::exp(-0.04 * 2.0 + 2.0 * 0.04 - 0.5 * s * s * t * 4.0 - 2.0 * r);
    EXPECT_NEAR(holee_price(HoLeeParams{s}, flat, r, t, T), expected, 1e-15);
}

TEST(HullWhite, NormalizationAndInitialFit) {
    const DiscountCurve c = market_curve();
    const HullWhiteParams p{0.0813, 0.0215};
    EXPECT_EQ(hullwhite_price(p, c, 0.05, 2.0, 2.0), 1.0);
    const double r0 = c.forward(0.0);
    for (const auto& pl : c.pillars()) {
        EXPECT_NEAR(hullwhite_price(p, c, r0, 0.0, pl.maturity), pl.discount, 1e-12);
        EXPECT_NEAR(hullwhite_price(p, c, r0, 0.0, pl.maturity, HullWhiteDamping::Printed), pl.discount, 1e-12);
    }
}

TEST(HullWhite, PrintedDampingDiffersAwayFromUnitSpeed) {
    const DiscountCurve c = market_curve();
    const HullWhiteParams p{0.0813, 0.0215};
    const double standard = hullwhite_price(p, c, 0.04, 2.0, 12.0);
    const double printed = hullwhite_price(p, c, 0.04, 2.0, 12.0, HullWhiteDamping::Printed);
    EXPECT_GT(std::abs(standard - printed), 1e-6);
    const HullWhiteParams unit{1.0, 0.0215};
    EXPECT_DOUBLE_EQ(hullwhite_price(unit, c, 0.04, 2.0, 12.0),
                     hullwhite_price(unit, c, 0.04, 2.0, 12.0, HullWhiteDamping::Printed));
}

TEST(HullWhite, ConvergesToHoLeeAsSpeedVanishes) {
    const DiscountCurve c = market_curve();
    for (double sigma : {0.0215, 0.0232}) {
        for (double t : {0.0, 0.5, 2.0}) {
            for (double tenor : kGrid) {
                const double hl = holee_price(HoLeeParams{sigma}, c, 0.04, t, t + tenor);
                EXPECT_NEAR(hullwhite_price(HullWhiteParams{1e-8, sigma}, c, 0.04, t, t + tenor) / hl, 1.0, 1e-5);
                EXPECT_NEAR(hullwhite_price(HullWhiteParams{1e-6, sigma}, c, 0.04, t, t + tenor) / hl, 1.0, 1e-4);
            }
        }
    }
}

TEST(HullWhite, GapToHoLeeIsLinearInSpeed) {
    const DiscountCurve c = market_curve();
    const double sigma = 0.3071, t = 2.0, T = 27.0;
    const double hl = std::log(holee_price(HoLeeParams{sigma}, c, 0.04, t, T));
    const double g6 = std::log(hullwhite_price(HullWhiteParams{1e-6, sigma}, c, 0.04, t, T)) - hl;
    const double g7 = std::log(hullwhite_price(HullWhiteParams{1e-7, sigma}, c, 0.04, t, T)) - hl;
    EXPECT_NEAR(g6 / g7, 10.0, 1e-3);
}

TEST(HjmPrices, DecreasingInShortRate) {
    const DiscountCurve c = market_curve();
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> t(0.0, 5.0), tau(0.05, 25.0), r(-0.02, 0.15);
    const double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        const double t0 = t(rng), T = t0 + tau(rng), r0 = r(rng);
        const HoLeeParams hl{0.02};
        const HullWhiteParams hw{0.3, 0.02};
        const double dhl = (holee_price(hl, c, r0 + h, t0, T) - holee_price(hl, c, r0 - h, t0, T)) / (2 * h);
        const double dhw = (hullwhite_price(hw, c, r0 + h, t0, T) - hullwhite_price(hw, c, r0 - h, t0, T)) / (2 * h);
        EXPECT_LT(dhl, 0.0);
        EXPECT_LT(dhw, 0.0);
        EXPECT_NEAR(dhl, -(T - t0) * holee_price(hl, c, r0, t0, T), 1e-6);
        EXPECT_NEAR(dhw, -decay_factor(hw.a, T - t0) * hullwhite_price(hw, c, r0, t0, T), 1e-6);
    }
}

TEST(HjmPrices, Preconditions) {
    const DiscountCurve c = market_curve();
    EXPECT_THROW(holee_price(HoLeeParams{0.0}, c, 0.04, 0.0, 1.0), Error);
    EXPECT_THROW(hullwhite_price(HullWhiteParams{0.0, 0.01}, c, 0.04, 0.0, 1.0), Error);
    EXPECT_THROW(holee_price(HoLeeParams{0.01}, c, 0.04, 2.0, 1.0), Error);
    try {
        holee_price(HoLeeParams{0.01}, c, 0.04, 1.0, 50.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Extrapolation);
    }
}
