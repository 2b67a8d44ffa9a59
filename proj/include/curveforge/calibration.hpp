#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curveforge/curve.hpp"
#include "curveforge/model.hpp"
#include "curveforge/optimize.hpp"

namespace curveforge {

struct ZeroQuote {
    Time maturity;  // time to maturity from the asof date
    double price;
};

/// One day's zero prices P^M(t, t + tau_i) with the short-rate proxy r(t) and
/// the initial curve P^M(0, .). `t` is the asof date on the curve's clock.
struct CrossSection {
    Date asof;
    Time t = 0.0;
    std::vector<ZeroQuote> quotes;
    double short_rate = 0.0;
    DiscountCurve curve;

    void validate(ModelKind model) const;
};

struct CalibrationConfig {
    int restarts = 8;
    std::uint64_t seed = 7;
    bool maturity_weighted = false;
    HullWhiteDamping damping = HullWhiteDamping::Standard;
    NelderMeadOptions optimizer{4000, 1e-24, 1e-10, 0.5, 3};
};

/// Mean squared price error (1/I) sum (P^M - P^model)^2. With maturity weighting
/// each term is scaled by tau_i / mean(tau).
double ls_objective(const ModelParams& params, const CrossSection& xs, const CalibrationConfig& config = {});

struct CalibrationResult {
    ModelParams params;
    double objective = 0.0;
    int evaluations = 0;
    bool converged = false;
    bool at_boundary = false;
};

/// Ho-Lee: golden-section on log sigma in [1e-5, 2]. Hull-White: multi-start
/// Nelder-Mead on (log a, log sigma) inside a in [1e-4, 5], sigma in [1e-5, 2],
/// plus one start taken from a profile scan over log a.
CalibrationResult calibrate(ModelKind model, const CrossSection& xs, const CalibrationConfig& config = {});

struct CalibrationRecord {
    Date asof;
    std::optional<CalibrationResult> result;
    std::string error;  // set when this date failed
};

struct ParameterSummary {
    std::string name;
    double mean = 0.0;
    std::optional<double> sd;  // unbiased; absent for fewer than two records
    std::size_t count = 0;
};

struct CalibrationSeries {
    ModelKind model = ModelKind::HoLee;
    std::vector<CalibrationRecord> records;
    std::vector<ParameterSummary> summary;
};

std::vector<ParameterSummary> summarize(ModelKind model, std::span<const CalibrationRecord> records);

/// Independent per-date calibrations. A failing date is recorded, not fatal;
/// throws only when every date fails.
CalibrationSeries calibrate_series(ModelKind model, std::span<const CrossSection> sections,
                                   const CalibrationConfig& config = {});

inline constexpr double kHwMinA = 1e-4, kHwMaxA = 5.0;
inline constexpr double kMinSigma = 1e-5, kMaxSigma = 2.0;

}  // namespace curveforge
