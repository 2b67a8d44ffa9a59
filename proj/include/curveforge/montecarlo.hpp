#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "curveforge/curve.hpp"
#include "curveforge/model.hpp"
#include "curveforge/panel.hpp"

namespace curveforge {

/// Counter-based generator: the k-th draw of stream `s` is a pure function of
/// (seed, s, k), so streams can be handed out per path in any order.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1).
    double uniform();
    /// Standard normal by inverse CDF.
    double normal();

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Standard normal quantile (Wichura AS241, ~1e-16 relative accuracy).
double inverse_normal_cdf(double p);

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

struct SimConfig {
    std::size_t n_paths = 100000;
    Time step = 1.0 / 252.0;
    Time horizon = 30.0;
    std::uint64_t seed = 42;

    void validate() const;
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;  // sample sd / sqrt(n_paths)
    std::size_t n_paths = 0;
};

/// Exact OU path x_k on `grid` (strictly increasing from 0), x_0 = x0:
/// dx = a (mean_level - x) dt + sigma dW.
std::vector<double> simulate_ou(double a, double mean_level, double sigma, double x0,
                                std::span<const Time> grid, CounterRng& rng);

/// Exact bivariate G2++ factor path from (x0, y0) on `grid`. Requires |rho| <= 0.9999;
/// sigma or eta may be zero for degenerate factors.
std::vector<std::array<double, 2>> simulate_g2(const G2Params& p, std::array<double, 2> state0,
                                               std::span<const Time> grid, CounterRng& rng);

/// Monte-Carlo estimate of P(t, T) = E[exp(-int_t^T r du)] with trapezoidal
/// integration of exactly-sampled short-rate paths. The initial-curve part of
/// the curve-fitted models enters through the market ratio P^M(0,T)/P^M(0,t).
McEstimate mc_zero_price(const ModelParams& params, const DiscountCurve* curve, const StatePoint& state0,
                         Time T, const SimConfig& config);

struct SyntheticPanel {
    PricePanel panel;
    StateSeries states;
};

/// Simulates Vasicek or G2++ states on `schedule` (exact transitions over the
/// actual gaps) and prices every instrument in closed form. The model clock
/// starts at schedule[0]; `initial` holds the state there.
SyntheticPanel synth_panel(const ModelParams& params, const DiscountCurve* curve,
                           std::span<const Date> schedule, std::span<const Instrument> instruments,
                           const StatePoint& initial, std::uint64_t seed);

struct OracleCase {
    std::string label;
    ModelParams params;
    StatePoint state;
    Time maturity;
};

/// Flat 4% curve with pillars out to 40y, used by the built-in oracle cases.
DiscountCurve oracle_curve();

/// Five fixed (params, state, maturity) cases per model, including the
/// reference parameter sets.
std::vector<OracleCase> standard_oracle_cases(ModelKind kind);

}  // namespace curveforge
