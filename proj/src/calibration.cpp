#include "curveforge/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curveforge/error.hpp"
#include "curveforge/montecarlo.hpp"

namespace curveforge {

void CrossSection::validate(ModelKind model) const {
    CURVEFORGE_REQUIRE(model == ModelKind::HoLee || model == ModelKind::HullWhite, ErrorKind::Domain,
                       "cross-sectional calibration supports holee and hullwhite");
    const std::size_t needed = model == ModelKind::HullWhite ? 2 : 1;
    CURVEFORGE_REQUIRE(quotes.size() >= needed, ErrorKind::Precondition,
                       std::string(to_string(model)) + " needs at least " + std::to_string(needed) + " quote(s)");
    CURVEFORGE_REQUIRE(t >= 0.0, ErrorKind::Ordering, "cross-section precedes the initial curve");
    for (std::size_t i = 0; i < quotes.size(); ++i) {
        CURVEFORGE_REQUIRE(quotes[i].maturity > 0.0, ErrorKind::Precondition,
                           "quote maturities must be after the asof date");
        CURVEFORGE_REQUIRE(quotes[i].price > 0.0, ErrorKind::Domain, "quote prices must be positive");
        for (std::size_t j = i + 1; j < quotes.size(); ++j)
            CURVEFORGE_REQUIRE(quotes[i].maturity != quotes[j].maturity, ErrorKind::Precondition,
                               "duplicate maturity in cross-section " + asof.iso());
    }
}

double ls_objective(const ModelParams& params, const CrossSection& xs, const CalibrationConfig& config) {
    const ModelKind model = kind_of(params);
    xs.validate(model);
    double mean_tau = 0.0;
    for (const auto& q : xs.quotes) mean_tau += q.maturity;
    mean_tau /= static_cast<double>(xs.quotes.size());

    const StatePoint state{xs.asof, xs.t, xs.short_rate, 0.0};
    double sum = 0.0;
    for (const auto& q : xs.quotes) {
        const double resid = q.price - model_price(params, &xs.curve, state, xs.t + q.maturity, config.damping);
        const double w = config.maturity_weighted ? q.maturity / mean_tau : 1.0;
        sum += w * resid * resid;
    }
    return sum / static_cast<double>(xs.quotes.size());
}

namespace {

CalibrationResult calibrate_holee(const CrossSection& xs, const CalibrationConfig& config) {
    const double lo = std::log(kMinSigma), hi = std::log(kMaxSigma);
    const auto f = [&](double log_sigma) {
        return ls_objective(HoLeeParams{std::exp(log_sigma)}, xs, config);
    };
    const auto r = golden_section(f, lo, hi, 1e-12);
    const double z = r.x[0];
    const double objective = ls_objective(HoLeeParams{std::exp(z)}, xs, config);
    // sigma only enters through t (tau)^2, so it is unidentified at t = 0.
    return {HoLeeParams{std::exp(z)}, objective, r.evaluations, r.converged && xs.t > 0.0,
            z - lo < 1e-6 || hi - z < 1e-6};
}

CalibrationResult calibrate_hullwhite(const CrossSection& xs, const CalibrationConfig& config) {
    const double lo[2] = {std::log(kHwMinA), std::log(kMinSigma)};
    const double hi[2] = {std::log(kHwMaxA), std::log(kMaxSigma)};
    const auto project = [&](std::span<const double> z) {
        return HullWhiteParams{std::exp(std::clamp(z[0], lo[0], hi[0])), std::exp(std::clamp(z[1], lo[1], hi[1]))};
    };
    const Objective f = [&](std::span<const double> z) {
        double excess = 0.0;
        for (int i = 0; i < 2; ++i) excess += std::max(0.0, lo[i] - z[i]) + std::max(0.0, z[i] - hi[i]);
        return ls_objective(project(z), xs, config) + excess * excess;
    };

    // Extra start from a coarse profile over log a (sigma minimized by golden
    // section at each node). The valley can be too thin for random starts.
    int evaluations = 0;
    std::vector<double> profiled{lo[0], lo[1]};
    double profiled_value = std::numeric_limits<double>::infinity();
    constexpr int kProfileNodes = 41;
    for (int j = 0; j < kProfileNodes; ++j) {
        const double za = lo[0] + (hi[0] - lo[0]) * j / (kProfileNodes - 1);
        const auto g = golden_section(
            [&](double zs) { return ls_objective(HullWhiteParams{std::exp(za), std::exp(zs)}, xs, config); },
            lo[1], hi[1], 1e-4);
        evaluations += g.evaluations;
        if (g.value < profiled_value) {
            profiled_value = g.value;
            profiled = {za, g.x[0]};
        }
    }

    OptimizeResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= config.restarts; ++k) {
        std::vector<double> z0 = profiled;
        if (k < config.restarts) {
            CounterRng rng(config.seed, static_cast<std::uint64_t>(k));
            for (int i = 0; i < 2; ++i) z0[i] = lo[i] + rng.uniform() * (hi[i] - lo[i]);
        }
        auto r = nelder_mead(f, z0, config.optimizer);
        evaluations += r.evaluations;
        if (r.value < best.value) best = std::move(r);
    }
    const HullWhiteParams p = project(best.x);
    const double za = std::log(p.a), zs = std::log(p.sigma);
    const bool boundary = za - lo[0] < 1e-6 || hi[0] - za < 1e-6 || zs - lo[1] < 1e-6 || hi[1] - zs < 1e-6;
    return {p, ls_objective(p, xs, config), evaluations, best.converged, boundary};
}

}  // namespace

CalibrationResult calibrate(ModelKind model, const CrossSection& xs, const CalibrationConfig& config) {
    xs.validate(model);
    return model == ModelKind::HoLee ? calibrate_holee(xs, config) : calibrate_hullwhite(xs, config);
}

std::vector<ParameterSummary> summarize(ModelKind model, std::span<const CalibrationRecord> records) {
    std::vector<ParameterSummary> out;
    std::vector<std::vector<double>> values;
    for (const auto& rec : records) {
        if (!rec.result) continue;
        const auto named = named_values(rec.result->params);
        if (out.empty()) {
            for (const auto& [name, v] : named) out.push_back({name, 0.0, std::nullopt, 0});
            values.resize(named.size());
        }
        for (std::size_t i = 0; i < named.size(); ++i) values[i].push_back(named[i].second);
    }
    if (out.empty()) {
        const ModelParams probe = model == ModelKind::HoLee ? ModelParams{HoLeeParams{}} : ModelParams{HullWhiteParams{}};
        for (const auto& [name, v] : named_values(probe)) out.push_back({name, 0.0, std::nullopt, 0});
        return out;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& v = values[i];
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        out[i].mean = mean;
        out[i].count = v.size();
        if (v.size() >= 2) {
            double ss = 0.0;
            for (double x : v) ss += (x - mean) * (x - mean);
            out[i].sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
        }
    }
    return out;
}

CalibrationSeries calibrate_series(ModelKind model, std::span<const CrossSection> sections,
                                   const CalibrationConfig& config) {
    CURVEFORGE_REQUIRE(!sections.empty(), ErrorKind::Precondition, "no cross-sections to calibrate");
    CalibrationSeries series;
    series.model = model;
    std::size_t failures = 0;
    for (const auto& xs : sections) {
        CalibrationRecord rec{xs.asof, std::nullopt, {}};
        try {
            rec.result = calibrate(model, xs, config);
        } catch (const Error& e) {
            rec.error = e.what();
            ++failures;
        }
        series.records.push_back(std::move(rec));
    }
    CURVEFORGE_REQUIRE(failures < sections.size(), ErrorKind::OptimizationFailed,
                       "calibration failed on every date");
    series.summary = summarize(model, series.records);
    return series;
}

}  // namespace curveforge
