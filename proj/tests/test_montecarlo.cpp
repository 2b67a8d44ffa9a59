#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "curveforge/error.hpp"
#include "curveforge/estimation.hpp"
#include "curveforge/montecarlo.hpp"

using namespace curveforge;

namespace {

struct Moments {
    double mean, var, se_mean, se_var;
};

Moments moments(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double m = pairwise_sum(v) / n;
    double s2 = 0.0, m4 = 0.0;
    for (double x : v) {
        s2 += (x - m) * (x - m);
        m4 += std::pow(x - m, 4);
    }
    s2 /= n - 1;
    m4 /= n;
    return {m, s2, std::sqrt(s2 / n), std::sqrt((m4 - s2 * s2) / n)};
}

double correlation(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

constexpr std::size_t kPaths = 100000;

}  // namespace

TEST(CounterRng, DeterministicAndOrderFree) {
    CounterRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        EXPECT_EQ(va, b.next_u64());
        EXPECT_NE(va, c.next_u64());
        EXPECT_NE(va, d.next_u64());
    }
    EXPECT_EQ(a.counter(), 100u);
    // Stream s does not depend on how many other streams were drawn first.
    CounterRng late(42, 7);
    for (int s = 0; s < 5; ++s) {
        CounterRng other(42, static_cast<std::uint64_t>(s));
        other.normal();
    }
    CounterRng fresh(42, 7);
    EXPECT_EQ(late.normal(), fresh.normal());
}

TEST(CounterRng, UniformMoments) {
    CounterRng rng(1, 0);
    std::vector<double> u(kPaths);
    for (auto& x : u) {
        x = rng.uniform();
        ASSERT_GT(x, 0.0);
        ASSERT_LT(x, 1.0);
    }
    const auto m = moments(u);
    EXPECT_NEAR(m.mean, 0.5, 4 * m.se_mean);
    EXPECT_NEAR(m.var, 1.0 / 12.0, 4 * m.se_var);
}

TEST(InverseNormal, MatchesBoostQuantile) {
    const boost::math::normal_distribution<double> n01;
    for (double p : {1e-300, 1e-20, 1e-10, 1e-5, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.9, 0.97575, 0.999, 1 - 1e-10}) {
        const double q = boost::math::quantile(n01, p);
        EXPECT_NEAR(inverse_normal_cdf(p), q, 1e-14 * std::max(1.0, std::abs(q))) << p;
    }
    EXPECT_EQ(inverse_normal_cdf(0.5), 0.0);
    EXPECT_THROW(inverse_normal_cdf(0.0), Error);
    EXPECT_THROW(inverse_normal_cdf(1.0), Error);
}

TEST(PairwiseSum, BeatsNaiveAccumulation) {
    std::vector<double> v(1 << 20, 0.1);
    EXPECT_NEAR(pairwise_sum(v), 0.1 * (1 << 20), 1e-7);
    EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
    EXPECT_EQ(pairwise_sum(std::vector<double>{3.5}), 3.5);
}

TEST(SimulateOu, ZeroVolatilityAtLevelIsConstant) {
    const std::vector<Time> grid{0, 0.1, 0.5, 2.0, 7.0};
    CounterRng rng(42, 0);
    for (double x : simulate_ou(1.7, 0.09, 0.0, 0.09, grid, rng)) EXPECT_EQ(x, 0.09);
    CounterRng rng2(42, 0);
    const auto path = simulate_ou(0.5, 0.05, 0.0, 0.01, grid, rng2);
    for (std::size_t k = 0; k < grid.size(); ++k)
        EXPECT_NEAR(path[k], 0.05 + (0.01 - 0.05) * std::exp(-0.5 * grid[k]), 1e-15);
}

TEST(SimulateOu, MomentsMatchTransition) {
    const VasicekParams p{1.7051, 0.0937, 0.3721};
    const std::vector<Time> grid{0, 0.25, 0.5, 0.75, 1.0};
    std::vector<double> end(kPaths);
    for (std::size_t i = 0; i < kPaths; ++i) {
        CounterRng rng(42, i);
        end[i] = simulate_ou(p.a, p.b, p.sigma, 0.05, grid, rng).back();
    }
    const auto m = moments(end);
    const auto exact = vasicek_transition(p, 0.05, 1.0);
    EXPECT_NEAR(m.mean, exact.mean, 4 * m.se_mean);
    EXPECT_NEAR(m.var, exact.variance, 4 * m.se_var);
}

TEST(SimulateOu, SeededPathIsReproducible) {
    std::vector<Time> grid;
    for (int k = 0; k <= 52; ++k) grid.push_back(k / 52.0);
    CounterRng a(42, 3), b(42, 3);
    const auto pa = simulate_ou(1.0, 0.05, 0.02, 0.03, grid, a);
    const auto pb = simulate_ou(1.0, 0.05, 0.02, 0.03, grid, b);
    EXPECT_EQ(0, std::memcmp(pa.data(), pb.data(), pa.size() * sizeof(double)));
}

TEST(SimulateOu, OneStepEqualsTwoHalfSteps) {
    const double a = 0.8, level = 0.04, sigma = 0.05, x0 = 0.01;
    const std::vector<Time> one{0, 0.5}, two{0, 0.25, 0.5};
    std::vector<double> e1(kPaths), e2(kPaths);
    for (std::size_t i = 0; i < kPaths; ++i) {
        CounterRng r1(5, i), r2(6, i);
        e1[i] = simulate_ou(a, level, sigma, x0, one, r1).back();
        e2[i] = simulate_ou(a, level, sigma, x0, two, r2).back();
    }
    const auto m1 = moments(e1), m2 = moments(e2);
    EXPECT_NEAR(m1.mean, m2.mean, 4 * std::hypot(m1.se_mean, m2.se_mean));
    EXPECT_NEAR(m1.var, m2.var, 4 * std::hypot(m1.se_var, m2.se_var));
}

TEST(SimulateOu, Preconditions) {
    CounterRng rng(1, 0);
    const std::vector<Time> bad_start{0.1, 0.2}, unsorted{0, 0.2, 0.1};
    EXPECT_THROW(simulate_ou(1, 0, 0.1, 0, bad_start, rng), Error);
    EXPECT_THROW(simulate_ou(1, 0, 0.1, 0, unsorted, rng), Error);
    const std::vector<Time> ok{0, 1};
    EXPECT_THROW(simulate_ou(0, 0, 0.1, 0, ok, rng), Error);
    EXPECT_THROW(simulate_ou(1, 0, -0.1, 0, ok, rng), Error);
}

TEST(SimulateG2, CovarianceMatchesTransition) {
    const G2Params p{0.13, 0.3526, 0.2062, 0.4892, -0.7};
    const std::vector<Time> grid{0, 0.5, 1.0, 1.5, 2.0};
    std::vector<double> x(kPaths), y(kPaths), xy(kPaths);
    for (std::size_t i = 0; i < kPaths; ++i) {
        CounterRng rng(42, i);
        const auto end = simulate_g2(p, {0.01, -0.02}, grid, rng).back();
        x[i] = end[0];
        y[i] = end[1];
    }
    const auto exact = g2pp_transition(p, G2State{0.01, -0.02, 0.0}, 2.0);
    const auto mx = moments(x), my = moments(y);
    EXPECT_NEAR(mx.mean, exact.mean[0], 4 * mx.se_mean);
    EXPECT_NEAR(my.mean, exact.mean[1], 4 * my.se_mean);
    EXPECT_NEAR(mx.var, exact.cov[0][0], 4 * mx.se_var);
    EXPECT_NEAR(my.var, exact.cov[1][1], 4 * my.se_var);
    for (std::size_t i = 0; i < kPaths; ++i) xy[i] = (x[i] - mx.mean) * (y[i] - my.mean);
    const auto mxy = moments(xy);
    EXPECT_NEAR(mxy.mean, exact.cov[0][1], 4 * mxy.se_mean);
}

TEST(SimulateG2, UncorrelatedFactorsAreIndependent) {
    const G2Params p{0.5, 1.2, 0.01, 0.015, 0.0};
    const std::vector<Time> grid{0, 1.0};
    std::vector<double> x(kPaths), y(kPaths);
    for (std::size_t i = 0; i < kPaths; ++i) {
        CounterRng rng(9, i);
        const auto end = simulate_g2(p, {0, 0}, grid, rng).back();
        x[i] = end[0];
        y[i] = end[1];
    }
    EXPECT_LT(std::abs(correlation(x, y)), 4.0 / std::sqrt(static_cast<double>(kPaths)));
}

TEST(SimulateG2, DeterministicSecondFactor) {
    const G2Params p{0.3, 0.7, 0.02, 0.0, 0.5};
    const std::vector<Time> grid{0, 0.5, 1.0, 3.0};
    CounterRng rng(11, 0);
    const auto path = simulate_g2(p, {0.01, 0.03}, grid, rng);
    for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(path[k][1], 0.03 * std::exp(-0.7 * grid[k]), 1e-15);
    G2Params extreme = p;
    extreme.eta = 0.01;
    extreme.rho = -1.0;
    EXPECT_THROW(simulate_g2(extreme, {0, 0}, grid, rng), Error);
}

TEST(McZeroPrice, DeterministicVasicek) {
    const VasicekParams p{1.0, 0.05, 0.0};
    SimConfig cfg;
    cfg.n_paths = 10;
    const auto est = mc_zero_price(p, nullptr, StatePoint{{}, 0.0, 0.05, 0.0}, 4.0, cfg);
    EXPECT_NEAR(est.value, std::exp(-0.2), 1e-14);
    EXPECT_EQ(est.std_error, 0.0);
    EXPECT_EQ(est.n_paths, 10u);
}

TEST(McZeroPrice, ResolutionAndPreconditions) {
    SimConfig cfg;
    cfg.step = 0.1;
    const VasicekParams p{1.0, 0.05, 0.01};
    try {
        mc_zero_price(p, nullptr, StatePoint{{}, 0.0, 0.05, 0.0}, 2.0, cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Resolution);
    }
    cfg.step = 1.0 / 252;
    cfg.horizon = 5.0;
    EXPECT_THROW(mc_zero_price(p, nullptr, StatePoint{{}, 0.0, 0.05, 0.0}, 6.0, cfg), Error);
    EXPECT_THROW(mc_zero_price(HoLeeParams{0.01}, nullptr, StatePoint{{}, 0.0, 0.05, 0.0}, 1.0, cfg), Error);
    cfg.n_paths = 0;
    EXPECT_THROW(cfg.validate(), Error);
    EXPECT_EQ(mc_zero_price(p, nullptr, StatePoint{{}, 1.0, 0.05, 0.0}, 1.0, SimConfig{}).value, 1.0);
}

TEST(McZeroPrice, PathValuesDependOnlyOnTheirIndex) {
    const VasicekParams p{0.5, 0.05, 0.01};
    SimConfig cfg;
    cfg.step = 0.01;
    cfg.seed = 17;
    // Replays paths 0 and 1 by hand from their own streams.
    auto replay = [&](std::uint64_t i) {
        CounterRng rng(cfg.seed, i);
        const double decay = std::exp(-p.a * 0.01);
        const double sd = std::sqrt(vasicek_transition(p, p.b, 0.01).variance);
        double r = 0.04, sum = 0.0;
        for (int k = 0; k < 100; ++k) {
            const double next = p.b + (r - p.b) * decay + sd * rng.normal();
            sum += r + next;
            r = next;
        }
        return std::exp(-0.005 * sum);
    };
    cfg.n_paths = 1;
    EXPECT_NEAR(mc_zero_price(p, nullptr, StatePoint{{}, 0.0, 0.04, 0.0}, 1.0, cfg).value, replay(0), 1e-15);
    cfg.n_paths = 2;
    EXPECT_NEAR(mc_zero_price(p, nullptr, StatePoint{{}, 0.0, 0.04, 0.0}, 1.0, cfg).value,
                0.5 * (replay(0) + replay(1)), 1e-15);
}

// Reduced-size version of the oracle sweep; the acceptance binary runs it at 1e5 paths.
TEST(McZeroPrice, ClosedFormsWithinThreeStandardErrors) {
    const DiscountCurve curve = oracle_curve();
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.step = 1.0 / 100.0;
    for (ModelKind kind : {ModelKind::Vasicek, ModelKind::G2pp, ModelKind::HoLee, ModelKind::HullWhite}) {
        const auto cases = standard_oracle_cases(kind);
        ASSERT_GE(cases.size(), 5u);
        for (const auto& c : cases) {
            const double closed = model_price(c.params, &curve, c.state, c.maturity);
            const auto mc = mc_zero_price(c.params, &curve, c.state, c.maturity, cfg);
            EXPECT_GT(mc.std_error, 0.0);
            // Trapezoid bias is O(step^2); it is small next to the sampling error here.
            EXPECT_LT(std::abs(closed - mc.value), 3.0 * mc.std_error) << c.label;
        }
    }
}

TEST(McZeroPrice, ByteIdenticalReruns) {
    const auto c = standard_oracle_cases(ModelKind::G2pp).front();
    const DiscountCurve curve = oracle_curve();
    SimConfig cfg;
    cfg.n_paths = 5000;
    const auto a = mc_zero_price(c.params, &curve, c.state, c.maturity, cfg);
    const auto b = mc_zero_price(c.params, &curve, c.state, c.maturity, cfg);
    EXPECT_EQ(0, std::memcmp(&a.value, &b.value, sizeof(double)));
    EXPECT_EQ(0, std::memcmp(&a.std_error, &b.std_error, sizeof(double)));
}

TEST(SynthPanel, InversionRecoversSimulatedStates) {
    const G2Params p{0.5, 1.2, 0.01, 0.015, 0.3};
    const DiscountCurve curve = oracle_curve();
    std::vector<Date> schedule;
    for (int k = 0; k < 100; ++k) schedule.push_back(Date(2013, 1, 7).add_days(3L * k + (k % 2)));
    const std::vector<Instrument> bonds{{"A", Date(2025, 1, 7)}, {"B", Date(2033, 1, 7)}};
    const auto synth = synth_panel(p, &curve, schedule, bonds, StatePoint{schedule[0], 0, 0.001, -0.002}, 4);
    const auto filtered = filter_states(p, &curve, ObservedSeries::from_panel(synth.panel));
    ASSERT_EQ(filtered.points.size(), 100u);
    for (std::size_t k = 0; k < 100; ++k) {
        EXPECT_NEAR(filtered.points[k].x, synth.states.points[k].x, 1e-10);
        EXPECT_NEAR(filtered.points[k].y, synth.states.points[k].y, 1e-10);
        EXPECT_EQ(filtered.points[k].t, synth.states.points[k].t);
    }
}

TEST(SynthPanel, Preconditions) {
    const G2Params p{0.5, 1.2, 0.01, 0.015, 0.3};
    const DiscountCurve curve = oracle_curve();
    const std::vector<Date> schedule{Date(2013, 1, 7), Date(2013, 1, 14)};
    const std::vector<Instrument> same{{"A", Date(2025, 1, 7)}, {"B", Date(2025, 1, 7)}};
    try {
        synth_panel(p, &curve, schedule, same, StatePoint{}, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Precondition);
    }
    const std::vector<Instrument> one{{"A", Date(2025, 1, 7)}};
    EXPECT_THROW(synth_panel(p, &curve, schedule, one, StatePoint{}, 1), Error);
    EXPECT_THROW(synth_panel(p, nullptr, schedule, one, StatePoint{}, 1), Error);
    EXPECT_THROW(synth_panel(HoLeeParams{0.01}, &curve, schedule, one, StatePoint{}, 1), Error);
    const std::vector<Date> backwards{Date(2013, 1, 14), Date(2013, 1, 7)};
    EXPECT_THROW(synth_panel(VasicekParams{1, 0.05, 0.01}, nullptr, backwards, one, StatePoint{}, 1), Error);
}
