#include "curveforge/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "curveforge/montecarlo.hpp"

namespace curveforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void require_shape(const ObservedSeries& s, std::size_t instruments) {
    CURVEFORGE_REQUIRE(s.maturities.size() == instruments, ErrorKind::Precondition,
                       "model needs exactly " + std::to_string(instruments) + " instrument(s)");
    CURVEFORGE_REQUIRE(s.times.size() >= 2, ErrorKind::Precondition, "likelihood needs two observations");
}

}  // namespace

ObservedSeries ObservedSeries::from_panel(const PricePanel& panel, std::optional<Date> origin) {
    CURVEFORGE_REQUIRE(panel.size() > 0, ErrorKind::Precondition, "empty panel");
    ObservedSeries s;
    s.origin = origin.value_or(panel.observations().front().date);
    CURVEFORGE_REQUIRE(s.origin <= panel.observations().front().date, ErrorKind::Ordering,
                       "clock origin after the first observation");
    std::vector<std::string> ids;
    for (const auto& inst : panel.instruments()) {
        ids.push_back(inst.id);
        s.maturities.push_back(model_time(s.origin, inst.maturity));
    }
    for (const auto& obs : panel.observations()) {
        std::vector<double> row;
        for (const auto& id : ids) {
            const auto it = obs.prices.find(id);
            if (it == obs.prices.end()) break;
            row.push_back(it->second);
        }
        if (row.size() != ids.size()) continue;
        s.dates.push_back(obs.date);
        s.times.push_back(model_time(s.origin, obs.date));
        s.prices.push_back(std::move(row));
    }
    return s;
}

namespace {

double normal_logpdf(double x, const GaussianMoments& m) {
    CURVEFORGE_REQUIRE(m.variance > 0.0 && std::isfinite(m.variance), ErrorKind::DegenerateStep,
                       "transition variance underflow");
    const double d = x - m.mean;
    return -0.5 * (kLog2Pi + std::log(m.variance)) - d * d / (2.0 * m.variance);
}

}  // namespace

LoglikTerms loglik_vasicek_terms(const VasicekParams& p, const ObservedSeries& series) {
    p.validate();
    require_shape(series, 1);
    const Time T = series.maturities[0];
    LoglikTerms out;
    double prev = vasicek_invert_state(p, series.prices[0][0], series.times[0], T);
    for (std::size_t k = 1; k < series.times.size(); ++k) {
        const double price = series.prices[k][0];
        const double B = decay_factor(p.a, T - series.times[k]);
        const double r = (vasicek_log_a(p, series.times[k], T) - std::log(price)) / B;
        out.density += normal_logpdf(r, vasicek_transition(p, prev, series.times[k] - series.times[k - 1]));
        out.log_jacobian += std::log(B) + std::log(price);
        prev = r;
    }
    CURVEFORGE_REQUIRE(std::isfinite(out.total()), ErrorKind::DegenerateStep, "non-finite likelihood");
    return out;
}

double loglik_vasicek(const VasicekParams& p, const ObservedSeries& series) {
    return loglik_vasicek_terms(p, series).total();
}

double loglik_vasicek(const VasicekParams& p, const PricePanel& panel) {
    return loglik_vasicek(p, ObservedSeries::from_panel(panel));
}

double loglik_vasicek_uniform(const VasicekParams& p, const ObservedSeries& series, Time dt) {
    p.validate();
    require_shape(series, 1);
    CURVEFORGE_REQUIRE(dt > 0.0, ErrorKind::Domain, "step must be positive");
    const Time T = series.maturities[0];
    const double decay = std::exp(-p.a * dt);
    const double variance = p.sigma * p.sigma * (-std::expm1(-2.0 * p.a * dt)) / (2.0 * p.a);
    double ll = 0.0;
    double prev = vasicek_invert_state(p, series.prices[0][0], series.times[0], T);
    for (std::size_t k = 1; k < series.times.size(); ++k) {
        const double price = series.prices[k][0];
        const double B = decay_factor(p.a, T - series.times[k]);
        const double r = (vasicek_log_a(p, series.times[k], T) - std::log(price)) / B;
        ll += normal_logpdf(r, {prev * decay + p.b * (1.0 - decay), variance});
        ll -= std::log(B) + std::log(price);
        prev = r;
    }
    return ll;
}

LoglikTerms loglik_g2pp_terms(const G2Params& p, const DiscountCurve& curve, const ObservedSeries& series) {
    p.validate();
    require_shape(series, 2);
    CURVEFORGE_REQUIRE(std::abs(p.rho) < 1.0, ErrorKind::Boundary,
                       "|rho| = 1 gives a singular transition covariance");
    const Time T1 = series.maturities[0], T2 = series.maturities[1];
    LoglikTerms out;
    G2State prev = g2pp_invert_states(p, curve, {series.prices[0][0], series.prices[0][1]},
                                      series.times[0], T1, T2);
    for (std::size_t k = 1; k < series.times.size(); ++k) {
        const Time t = series.times[k];
        const double p1 = series.prices[k][0], p2 = series.prices[k][1];
        const G2State s = g2pp_invert_states(p, curve, {p1, p2}, t, T1, T2);
        const auto m = g2pp_transition(p, prev, t - series.times[k - 1]);
        const double vx = m.cov[0][0], vy = m.cov[1][1], c = m.cov[0][1];
        const double det = vx * vy - c * c;
        CURVEFORGE_REQUIRE(det > 0.0 && std::isfinite(det), ErrorKind::Boundary,
                           "transition covariance is not positive definite");
        const double dx = s.x - m.mean[0], dy = s.y - m.mean[1];
        const double q = (vy * dx * dx - 2.0 * c * dx * dy + vx * dy * dy) / det;
        out.density += -kLog2Pi - 0.5 * std::log(det) - 0.5 * q;
        out.log_jacobian += std::log(p1) + std::log(p2) + std::log(std::abs(g2pp_loading_det(p, T1 - t, T2 - t)));
        prev = s;
    }
    CURVEFORGE_REQUIRE(std::isfinite(out.total()), ErrorKind::DegenerateStep, "non-finite likelihood");
    return out;
}

double loglik_g2pp(const G2Params& p, const DiscountCurve& curve, const ObservedSeries& series) {
    return loglik_g2pp_terms(p, curve, series).total();
}

double loglik_g2pp(const G2Params& p, const DiscountCurve& curve, const PricePanel& panel) {
    return loglik_g2pp(p, curve, ObservedSeries::from_panel(panel, curve.asof()));
}

StateSeries filter_states(const ModelParams& params, const DiscountCurve* curve, const ObservedSeries& series) {
    const ModelKind kind = kind_of(params);
    StateSeries out{factor_count(kind), {}};
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        const Time t = series.times[k];
        if (kind == ModelKind::Vasicek) {
            require_shape(series, 1);
            out.points.push_back({series.dates[k], t,
                                  vasicek_invert_state(std::get<VasicekParams>(params), series.prices[k][0], t,
                                                       series.maturities[0]),
                                  0.0});
        } else if (kind == ModelKind::G2pp) {
            require_shape(series, 2);
            CURVEFORGE_REQUIRE(curve != nullptr, ErrorKind::Precondition, "g2pp needs an initial curve");
            const auto s = g2pp_invert_states(std::get<G2Params>(params), *curve,
                                              {series.prices[k][0], series.prices[k][1]}, t,
                                              series.maturities[0], series.maturities[1]);
            out.points.push_back({series.dates[k], t, s.x, s.y});
        } else {
            throw Error(ErrorKind::Domain, "state filtering supports vasicek and g2pp");
        }
    }
    return out;
}

std::vector<double> to_unconstrained(const ModelParams& params) {
    switch (kind_of(params)) {
        case ModelKind::Vasicek: {
            const auto& p = std::get<VasicekParams>(params);
            return {std::log(p.a), std::log(p.b), std::log(p.sigma)};
        }
        case ModelKind::G2pp: {
            const auto& p = std::get<G2Params>(params);
            return {std::log(p.a), std::log(p.b), std::log(p.sigma), std::log(p.eta),
                    std::atanh(std::clamp(p.rho, -kMaxAbsRho, kMaxAbsRho))};
        }
        default: throw Error(ErrorKind::Domain, "ML estimation supports vasicek and g2pp");
    }
}

ModelParams from_unconstrained(ModelKind model, std::span<const double> z) {
    switch (model) {
        case ModelKind::Vasicek: return VasicekParams{std::exp(z[0]), std::exp(z[1]), std::exp(z[2])};
        case ModelKind::G2pp:
            return G2Params{std::exp(z[0]), std::exp(z[1]), std::exp(z[2]), std::exp(z[3]),
                            std::clamp(std::tanh(z[4]), -kMaxAbsRho, kMaxAbsRho)};
        default: throw Error(ErrorKind::Domain, "ML estimation supports vasicek and g2pp");
    }
}

namespace {

struct Bounds {
    std::vector<double> lo, hi;
    bool contains(std::span<const double> z) const {
        for (std::size_t i = 0; i < z.size(); ++i)
            if (!(z[i] >= lo[i] && z[i] <= hi[i])) return false;
        return true;
    }
    void clamp(std::vector<double>& z) const {
        for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::clamp(z[i], lo[i], hi[i]);
    }
    bool touches(std::span<const double> z, double margin) const {
        for (std::size_t i = 0; i < z.size(); ++i)
            if (z[i] - lo[i] < margin || hi[i] - z[i] < margin) return true;
        return false;
    }
};

Bounds bounds_for(ModelKind model) {
    const auto L = [](double v) { return std::log(v); };
    if (model == ModelKind::Vasicek) return {{L(1e-4), L(1e-6), L(1e-8)}, {L(50.0), L(5.0), L(10.0)}};
    const double zr = std::atanh(kMaxAbsRho);
    return {{L(1e-4), L(1e-4), L(1e-8), L(1e-8), -zr}, {L(50.0), L(50.0), L(10.0), L(10.0), zr}};
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// AR(1) mean-reversion speed from a series sampled every dt years on average.
double ar1_speed(const std::vector<double>& v, double dt, double fallback) {
    const double m = mean_of(v);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 1; k < v.size(); ++k) {
        num += (v[k] - m) * (v[k - 1] - m);
        den += (v[k - 1] - m) * (v[k - 1] - m);
    }
    const double phi = den > 0.0 ? num / den : 0.0;
    if (!(phi > 0.0 && phi < 1.0)) return fallback;
    return std::clamp(-std::log(phi) / dt, 0.01, 10.0);
}

std::vector<double> increments(const std::vector<double>& v) {
    std::vector<double> d;
    for (std::size_t k = 1; k < v.size(); ++k) d.push_back(v[k] - v[k - 1]);
    return d;
}

// Moment-matched starting point: invert states under a provisional guess, then
// re-estimate level, increment volatility and AR(1) speed from them.
ModelParams initial_guess(ModelKind model, const ObservedSeries& s, const DiscountCurve* curve) {
    const double dt = (s.times.back() - s.times.front()) / static_cast<double>(s.times.size() - 1);
    if (model == ModelKind::Vasicek) {
        std::vector<double> yields;
        for (std::size_t k = 0; k < s.times.size(); ++k)
            yields.push_back(-std::log(s.prices[k][0]) / (s.maturities[0] - s.times[k]));
        VasicekParams g{0.5, std::max(mean_of(yields), 1e-3), std::max(sd_of(increments(yields)) / std::sqrt(dt), 1e-3)};
        for (int it = 0; it < 5; ++it) {
            std::vector<double> r;
            try {
                for (const auto& p : filter_states(g, nullptr, s).points) r.push_back(p.x);
            } catch (const Error&) {
                break;
            }
            if (!std::all_of(r.begin(), r.end(), [](double v) { return std::isfinite(v); })) break;
            g.b = std::clamp(mean_of(r), 1e-4, 1.0);
            g.sigma = std::clamp(sd_of(increments(r)) / std::sqrt(dt), 1e-4, 2.0);
            g.a = ar1_speed(r, dt, g.a);
        }
        return g;
    }
    G2Params g{0.1, 0.5, 0.02, 0.02, 0.0};
    for (int it = 0; it < 3; ++it) {
        std::vector<double> x, y;
        try {
            for (const auto& p : filter_states(g, curve, s).points) {
                x.push_back(p.x);
                y.push_back(p.y);
            }
        } catch (const Error&) {
            break;
        }
        if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); }) ||
            !std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); }))
            break;
        const auto dx = increments(x), dy = increments(y);
        const double sx = sd_of(dx), sy = sd_of(dy);
        double cxy = 0.0;
        const double mx = mean_of(dx), my = mean_of(dy);
        for (std::size_t k = 0; k < dx.size(); ++k) cxy += (dx[k] - mx) * (dy[k] - my);
        cxy /= static_cast<double>(dx.size() - 1);
        G2Params next{ar1_speed(x, dt, g.a), ar1_speed(y, dt, g.b), std::clamp(sx / std::sqrt(dt), 1e-4, 2.0),
                      std::clamp(sy / std::sqrt(dt), 1e-4, 2.0),
                      sx > 0.0 && sy > 0.0 ? std::clamp(cxy / (sx * sy), -0.95, 0.95) : 0.0};
        if (std::abs(next.a - next.b) < 0.2 * std::max(next.a, next.b)) next.b = 2.5 * next.a;
        g = next;
    }
    return g;
}

// Factor labels are interchangeable in G2++; report the slower factor as x.
G2Params canonical(G2Params p) {
    if (p.a > p.b) {
        std::swap(p.a, p.b);
        std::swap(p.sigma, p.eta);
    }
    return p;
}

}  // namespace

FitResult fit_ml(ModelKind model, const ObservedSeries& series, const DiscountCurve* curve, const FitConfig& config) {
    CURVEFORGE_REQUIRE(model == ModelKind::Vasicek || model == ModelKind::G2pp, ErrorKind::Domain,
                       "fit-ml supports vasicek and g2pp");
    require_shape(series, model == ModelKind::Vasicek ? 1 : 2);
    CURVEFORGE_REQUIRE(model == ModelKind::Vasicek || curve != nullptr, ErrorKind::Precondition,
                       "g2pp estimation needs an initial curve");
    CURVEFORGE_REQUIRE(config.restarts >= 1, ErrorKind::Domain, "need at least one restart");

    const Bounds bounds = bounds_for(model);
    const Objective objective = [&](std::span<const double> z) {
        if (!bounds.contains(z)) return kInf;
        try {
            const ModelParams p = from_unconstrained(model, z);
            return model == ModelKind::Vasicek ? -loglik_vasicek(std::get<VasicekParams>(p), series)
                                               : -loglik_g2pp(std::get<G2Params>(p), *curve, series);
        } catch (const Error&) {
            return kInf;
        }
    };

    const ModelParams guess = initial_guess(model, series, curve);
    const std::vector<double> z_guess = to_unconstrained(guess);

    std::vector<OptimizeResult> runs;
    OptimizerReport report;
    report.restarts = config.restarts;
    for (int k = 0; k < config.restarts; ++k) {
        CounterRng rng(config.seed, static_cast<std::uint64_t>(k));
        std::vector<double> z0 = z_guess;
        for (std::size_t i = 0; i < z0.size(); ++i) {
            const bool is_rho = model == ModelKind::G2pp && i == 4;
            z0[i] += is_rho ? rng.uniform() - 0.5 : std::log(0.5) + rng.uniform() * std::log(4.0);
        }
        bounds.clamp(z0);
        auto run = nelder_mead(objective, z0, config.optimizer);
        report.evaluations += run.evaluations;
        if (!std::isfinite(run.value)) ++report.failed_restarts;
        runs.push_back(std::move(run));
    }

    std::sort(runs.begin(), runs.end(), [](const auto& l, const auto& r) { return l.value < r.value; });
    const OptimizeResult& best = runs.front();

    FitResult fit;
    if (!std::isfinite(best.value)) {
        fit.params = guess;
        fit.loglik = -kInf;
        fit.report = report;
        throw OptimizationFailed("all " + std::to_string(config.restarts) + " restarts failed", fit);
    }
    fit.params = from_unconstrained(model, best.x);
    if (model == ModelKind::G2pp) fit.params = canonical(std::get<G2Params>(fit.params));
    report.converged = runs.size() < 2 ? best.converged
                                       : std::isfinite(runs[1].value) &&
                                             runs[1].value - best.value <= config.agreement_tolerance;
    report.at_boundary = bounds.touches(best.x, 1e-3);
    fit.loglik = -best.value;
    fit.states = filter_states(fit.params, curve, series);
    fit.report = report;
    return fit;
}

FitResult fit_ml(ModelKind model, const PricePanel& panel, const DiscountCurve* curve, const FitConfig& config) {
    const std::optional<Date> origin = curve != nullptr ? curve->asof() : std::nullopt;
    return fit_ml(model, ObservedSeries::from_panel(panel, origin), curve, config);
}

}  // namespace curveforge
