#include "curveforge/diagnostics.hpp"

#include <cmath>

#include "curveforge/error.hpp"

namespace curveforge {

double g2pp_dlogp_dt(const G2Params& p, const DiscountCurve& curve, const G2State& state, Time T) {
    p.validate();
    CURVEFORGE_REQUIRE(T > state.t, ErrorKind::Ordering, "derivative needs T > t");
    const Time tau = T - state.t;
    const double ga_t = -std::expm1(-p.a * tau), ga_0 = -std::expm1(-p.a * T);
    const double gb_t = -std::expm1(-p.b * tau), gb_0 = -std::expm1(-p.b * T);
    return -curve.forward(T) +
           p.sigma * p.sigma / (2.0 * p.a * p.a) * (ga_t * ga_t - ga_0 * ga_0) +
           p.eta * p.eta / (2.0 * p.b * p.b) * (gb_t * gb_t - gb_0 * gb_0) +
           p.rho * p.sigma * p.eta / (p.a * p.b) * (ga_t * gb_t - ga_0 * gb_0) -
           std::exp(-p.a * tau) * state.x - std::exp(-p.b * tau) * state.y;
}

double g2pp_dpdt(const G2Params& p, const DiscountCurve& curve, const G2State& state, Time T) {
    return g2pp_price(p, curve, state, T) * g2pp_dlogp_dt(p, curve, state, T);
}

ArbitrageReport check_monotone(std::span<const Pillar> prices) {
    for (std::size_t i = 1; i < prices.size(); ++i)
        CURVEFORGE_REQUIRE(prices[i].maturity > prices[i - 1].maturity, ErrorKind::Ordering,
                           "maturities must be strictly increasing");
    for (const auto& p : prices)
        CURVEFORGE_REQUIRE(p.discount > 0.0, ErrorKind::Domain, "prices must be positive");
    ArbitrageReport report;
    for (std::size_t i = 0; i < prices.size(); ++i)
        for (std::size_t j = i + 1; j < prices.size(); ++j)
            if (prices[i].discount < prices[j].discount)
                report.violations.push_back(
                    {prices[i].maturity, prices[j].maturity, prices[i].discount, prices[j].discount});
    return report;
}

std::vector<Time> g2pp_derivative_sign_changes(const G2Params& p, const DiscountCurve& curve,
                                               const G2State& state, std::span<const Time> grid) {
    std::vector<Time> out;
    const auto d = [&](Time T) { return g2pp_dlogp_dt(p, curve, state, T); };
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double lo = grid[i - 1], hi = grid[i];
        double dlo = d(lo), dhi = d(hi);
        if ((dlo > 0.0) == (dhi > 0.0)) continue;
        for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double dm = d(mid);
            if ((dm > 0.0) == (dlo > 0.0)) { lo = mid; dlo = dm; }
            else hi = mid;
        }
        out.push_back(0.5 * (lo + hi));
    }
    return out;
}

ArbitrageReport audit_g2pp_slice(const G2Params& p, const DiscountCurve& curve, const G2State& state,
                                 std::span<const Time> maturities) {
    std::vector<Pillar> prices;
    for (Time T : maturities) prices.push_back({T, g2pp_price(p, curve, state, T)});
    ArbitrageReport report = check_monotone(prices);
    report.derivative_sign_changes = g2pp_derivative_sign_changes(p, curve, state, maturities);
    return report;
}

std::optional<ArbitrageWitness> search_g2pp_arbitrage(const G2Params& p, const DiscountCurve& curve, Time t,
                                                      const ArbitrageSearchGrid& grid) {
    std::optional<ArbitrageWitness> best;
    const int n_state = static_cast<int>(std::lround(grid.state_limit / grid.state_step));
    const int n_mat = static_cast<int>(std::lround((grid.maturity_max - grid.maturity_min) / grid.maturity_step));
    for (int i = -n_state; i <= n_state; ++i) {
        for (int j = -n_state; j <= n_state; ++j) {
            if (i == 0 || j == 0 || (i > 0) == (j > 0)) continue;
            const G2State s{i * grid.state_step, j * grid.state_step, t};
            for (int m = 0; m <= n_mat; ++m) {
                const Time T = t + grid.maturity_min + m * grid.maturity_step;
                const double d = g2pp_dpdt(p, curve, s, T);
                if (d > 0.0 && (!best || d > best->derivative)) best = ArbitrageWitness{s, T, d};
            }
        }
    }
    return best;
}

const std::array<GridTenor, 14>& standard_tenor_grid() {
    static const std::array<GridTenor, 14> grid{{{"1m", 1.0 / 12.0},
                                                 {"2m", 2.0 / 12.0},
                                                 {"3m", 3.0 / 12.0},
                                                 {"6m", 6.0 / 12.0},
                                                 {"9m", 9.0 / 12.0},
                                                 {"1y", 1.0},
                                                 {"2y", 2.0},
                                                 {"3y", 3.0},
                                                 {"5y", 5.0},
                                                 {"7y", 7.0},
                                                 {"10y", 10.0},
                                                 {"15y", 15.0},
                                                 {"20y", 20.0},
                                                 {"25y", 25.0}}};
    return grid;
}

PriceSurface build_surface(const ModelParams& params, const StateSeries& states, const DiscountCurve* curve,
                           HullWhiteDamping damping) {
    CURVEFORGE_REQUIRE(!states.points.empty(), ErrorKind::Precondition, "surface needs at least one state");
    CURVEFORGE_REQUIRE(states.factors == factor_count(kind_of(params)), ErrorKind::Precondition,
                       "state series does not match the model's factor count");
    PriceSurface surface;
    const auto& grid = standard_tenor_grid();
    surface.tenors.assign(grid.begin(), grid.end());
    for (const auto& s : states.points) {
        surface.dates.push_back(s.date);
        surface.times.push_back(s.t);
        std::vector<std::optional<double>> row;
        row.reserve(grid.size());
        for (const auto& g : grid) {
            try {
                const double v = model_price(params, curve, s, s.t + g.tenor, damping);
                row.push_back(std::isfinite(v) ? std::optional<double>(v) : std::nullopt);
            } catch (const Error&) {
                row.push_back(std::nullopt);
            }
        }
        surface.values.push_back(std::move(row));
    }
    return surface;
}

}  // namespace curveforge
