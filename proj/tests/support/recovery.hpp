#pragma once

#include <cstdint>
#include <vector>

#include "curveforge/estimation.hpp"
#include "curveforge/montecarlo.hpp"

namespace curveforge::testing {

inline const VasicekParams kRecoveryTruth{1.7, 0.09, 0.37};
inline constexpr int kRecoveryObservations = 2000;

struct Replication {
    std::uint64_t seed;
    VasicekParams fitted;
    double loglik;
    bool converged;
};

// Weekly single-bond panel. The bond matures 45y after the first date so it
// outlives all 2000 observations.
inline PricePanel weekly_vasicek_panel(std::uint64_t seed, const VasicekParams& truth = kRecoveryTruth,
                                       int n = kRecoveryObservations) {
    const Date start(2010, 1, 4);
    std::vector<Date> schedule;
    for (int k = 0; k < n; ++k) schedule.push_back(start.add_days(7L * k));
    const std::vector<Instrument> bond{{"Z45", start.add_months(45 * 12)}};
    return synth_panel(truth, nullptr, schedule, bond, StatePoint{start, 0.0, truth.b, 0.0}, seed).panel;
}

inline Replication run_replication(std::uint64_t seed) {
    const FitResult fit = fit_ml(ModelKind::Vasicek, weekly_vasicek_panel(seed), nullptr);
    return {seed, std::get<VasicekParams>(fit.params), fit.loglik, fit.report.converged};
}

}  // namespace curveforge::testing
