#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curveforge/curve.hpp"
#include "curveforge/model.hpp"

namespace curveforge {

/// d log P(t,T) / dT under G2++ with the market-fitted price.
double g2pp_dlogp_dt(const G2Params& p, const DiscountCurve& curve, const G2State& state, Time T);

/// Maturity derivative dP(t,T)/dT = P(t,T) * d log P(t,T)/dT. The market term
/// uses the curve's analytic forward, so it is exact between pillars.
double g2pp_dpdt(const G2Params& p, const DiscountCurve& curve, const G2State& state, Time T);

/// A pair of maturities where the price rises with maturity.
struct PriceInversion {
    Time tau_low;
    Time tau_high;
    double p_low;
    double p_high;
};

struct ArbitrageReport {
    std::vector<PriceInversion> violations;
    std::vector<Time> derivative_sign_changes;

    bool clean() const { return violations.empty() && derivative_sign_changes.empty(); }
};

/// Reports every pair i < j with P_i < P_j. Input maturities must be strictly increasing.
ArbitrageReport check_monotone(std::span<const Pillar> prices);

/// Maturities in (grid.front(), grid.back()) where dP/dT changes sign, located
/// by bisection between grid points.
std::vector<Time> g2pp_derivative_sign_changes(const G2Params& p, const DiscountCurve& curve,
                                               const G2State& state, std::span<const Time> grid);

/// Price and derivative audit of one G2++ curve slice on `maturities`.
ArbitrageReport audit_g2pp_slice(const G2Params& p, const DiscountCurve& curve, const G2State& state,
                                 std::span<const Time> maturities);

struct ArbitrageSearchGrid {
    double state_limit = 0.2;
    double state_step = 0.02;
    Time maturity_min = 1.0;
    Time maturity_max = 25.0;
    Time maturity_step = 0.25;
};

struct ArbitrageWitness {
    G2State state;
    Time maturity;
    double derivative;
};

/// Deterministic scan over opposite-sign states (x, y) at time t and maturities
/// t + [maturity_min, maturity_max]; returns the point with the largest positive
/// dP/dT, if any.
std::optional<ArbitrageWitness> search_g2pp_arbitrage(const G2Params& p, const DiscountCurve& curve, Time t,
                                                      const ArbitrageSearchGrid& grid = {});

struct GridTenor {
    std::string_view label;
    Time tenor;
};

/// 1m, 2m, 3m, 6m, 9m, 1y, 2y, 3y, 5y, 7y, 10y, 15y, 20y, 25y. Months are exact twelfths.
const std::array<GridTenor, 14>& standard_tenor_grid();

struct PriceSurface {
    std::vector<Date> dates;
    std::vector<Time> times;
    std::vector<GridTenor> tenors;
    std::vector<std::vector<std::optional<double>>> values;  // [date][tenor]; empty cell = failure
};

/// Prices every state date at t + tenor. A failing cell is left empty.
PriceSurface build_surface(const ModelParams& params, const StateSeries& states, const DiscountCurve* curve,
                           HullWhiteDamping damping = HullWhiteDamping::Standard);

}  // namespace curveforge
