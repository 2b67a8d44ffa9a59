#include "curveforge/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "curveforge/error.hpp"

namespace curveforge {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

template <std::size_t N>
double horner(const double (&c)[N], double x) {
    double v = c[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) v = v * x + c[i];
    return v;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed + kGolden) ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL))) {}

std::uint64_t CounterRng::next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() { return inverse_normal_cdf(uniform()); }

double inverse_normal_cdf(double p) {
    CURVEFORGE_REQUIRE(p > 0.0 && p < 1.0, ErrorKind::Domain, "normal quantile needs p in (0, 1)");
    static constexpr double a[] = {3.3871328727963666080e0, 1.3314166789178437745e+2,
                                   1.9715909503065514427e+3, 1.3731693765509461125e+4,
                                   4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                   3.3430575583588128105e+4, 2.5090809287301226727e+3};
    static constexpr double b[] = {1.0, 4.2313330701600911252e+1, 6.8718700749205790830e+2,
                                   5.3941960214247511077e+3, 2.1213794301586595867e+4,
                                   3.9307895800092710610e+4, 2.8729085735721942674e+4,
                                   5.2264952788528545610e+3};
    static constexpr double c[] = {1.42343711074968357734e0, 4.63033784615654529590e0,
                                   5.76949722146069140550e0, 3.64784832476320460504e0,
                                   1.27045825245236838258e0, 2.41780725177450611770e-1,
                                   2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static constexpr double d[] = {1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
                                   6.89767334985100004550e-1, 1.48103976427480074590e-1,
                                   1.51986665636164571966e-2, 5.47593808499534494600e-4,
                                   1.05075007164441684324e-9};
    static constexpr double e[] = {6.65790464350110377720e0, 5.46378491116411436990e0,
                                   1.78482653991729133580e0, 2.96560571828504891230e-1,
                                   2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                   2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static constexpr double f[] = {1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
                                   1.48753612908506148525e-2, 7.86869131145613259100e-4,
                                   1.84631831751005468180e-5, 1.42151175831644588870e-7,
                                   2.04426310338993978564e-15};

    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * horner(a, r) / horner(b, r);
    }
    double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
    double v;
    if (r <= 5.0) {
        r -= 1.6;
        v = horner(c, r) / horner(d, r);
    } else {
        r -= 5.0;
        v = horner(e, r) / horner(f, r);
    }
    return q < 0.0 ? -v : v;
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 16) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

void SimConfig::validate() const {
    CURVEFORGE_REQUIRE(n_paths >= 1, ErrorKind::Domain, "n_paths must be at least 1");
    CURVEFORGE_REQUIRE(step > 0.0 && step <= horizon, ErrorKind::Domain, "need 0 < step <= horizon");
}

namespace {

void require_grid(std::span<const Time> grid) {
    CURVEFORGE_REQUIRE(!grid.empty() && grid.front() == 0.0, ErrorKind::Precondition,
                       "simulation grid must start at 0");
    for (std::size_t k = 1; k < grid.size(); ++k)
        CURVEFORGE_REQUIRE(grid[k] > grid[k - 1], ErrorKind::Ordering,
                           "simulation grid must be strictly increasing");
}

struct CholeskyStep {
    double decay_x, decay_y, l11, l21, l22;
};

CholeskyStep g2_step(const G2Params& p, Time dt) {
    const auto m = g2pp_transition(p, {1.0, 1.0, 0.0}, dt);
    const double vx = m.cov[0][0], vy = m.cov[1][1], cv = m.cov[0][1];
    const double l11 = std::sqrt(vx);
    const double l21 = l11 > 0.0 ? cv / l11 : 0.0;
    double rest = vy - l21 * l21;
    CURVEFORGE_REQUIRE(rest >= -1e-14 * std::max(vy, 1e-300), ErrorKind::Boundary,
                       "G2++ step covariance is not positive semi-definite");
    return {m.mean[0], m.mean[1], l11, l21, std::sqrt(std::max(rest, 0.0))};
}

// Runs `path(rng)` for every path index with its own stream and reduces.
template <class PathFn>
McEstimate run_paths(const SimConfig& config, double scale, PathFn&& path) {
    const std::size_t n = config.n_paths;
    std::vector<double> values(n);
    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, n / 2048));
    const auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            CounterRng rng(config.seed, i);
            values[i] = path(rng);
        }
    };
    if (workers == 1) {
        work(0, n);
    } else {
        std::vector<std::jthread> threads;
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w)
            threads.emplace_back(work, std::min(n, w * chunk), std::min(n, (w + 1) * chunk));
    }
    // Shifted by the first value so identical paths give exactly zero spread.
    const double shift = values[0];
    for (double& v : values) v -= shift;
    const double offset = pairwise_sum(values) / static_cast<double>(n);
    double sd = 0.0;
    if (n > 1) {
        for (double& v : values) v = (v - offset) * (v - offset);
        sd = std::sqrt(pairwise_sum(values) / static_cast<double>(n - 1));
    }
    return {scale * (shift + offset), scale * sd / std::sqrt(static_cast<double>(n)), n};
}

}  // namespace

std::vector<double> simulate_ou(double a, double mean_level, double sigma, double x0,
                                std::span<const Time> grid, CounterRng& rng) {
    CURVEFORGE_REQUIRE(a > 0.0 && sigma >= 0.0, ErrorKind::Domain, "OU needs a > 0 and sigma >= 0");
    require_grid(grid);
    std::vector<double> path(grid.size());
    path[0] = x0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double dt = grid[k] - grid[k - 1];
        const double decay = std::exp(-a * dt);
        const double var = sigma * sigma * (-std::expm1(-2.0 * a * dt)) / (2.0 * a);
        path[k] = mean_level + (path[k - 1] - mean_level) * decay + std::sqrt(var) * rng.normal();
    }
    return path;
}

std::vector<std::array<double, 2>> simulate_g2(const G2Params& p, std::array<double, 2> state0,
                                               std::span<const Time> grid, CounterRng& rng) {
    CURVEFORGE_REQUIRE(p.a > 0.0 && p.b > 0.0 && p.sigma >= 0.0 && p.eta >= 0.0, ErrorKind::Domain,
                       "G2++ simulation needs a, b > 0 and sigma, eta >= 0");
    CURVEFORGE_REQUIRE(std::abs(p.rho) <= 0.9999, ErrorKind::Boundary,
                       "G2++ simulation needs |rho| <= 0.9999");
    require_grid(grid);
    std::vector<std::array<double, 2>> path(grid.size());
    path[0] = state0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const auto s = g2_step(p, grid[k] - grid[k - 1]);
        const double z1 = rng.normal(), z2 = rng.normal();
        path[k] = {path[k - 1][0] * s.decay_x + s.l11 * z1,
                   path[k - 1][1] * s.decay_y + s.l21 * z1 + s.l22 * z2};
    }
    return path;
}

McEstimate mc_zero_price(const ModelParams& params, const DiscountCurve* curve, const StatePoint& state0,
                         Time T, const SimConfig& config) {
    config.validate();
    const ModelKind kind = kind_of(params);
    CURVEFORGE_REQUIRE(!needs_curve(kind) || curve != nullptr, ErrorKind::Precondition,
                       std::string(to_string(kind)) + " Monte Carlo needs an initial curve");
    const Time t = state0.t;
    CURVEFORGE_REQUIRE(t >= 0.0 && T >= t, ErrorKind::Ordering, "Monte Carlo needs 0 <= t <= T");
    if (T == t) return {1.0, 0.0, config.n_paths};
    const Time tau = T - t;
    CURVEFORGE_REQUIRE(tau <= config.horizon, ErrorKind::Precondition,
                       "maturity beyond the simulation horizon");
    CURVEFORGE_REQUIRE(config.step <= tau / 50.0, ErrorKind::Resolution,
                       "step " + std::to_string(config.step) + " coarser than (T - t)/50");

    const auto n_steps = static_cast<std::size_t>(std::ceil(tau / config.step - 1e-9));
    const double dt = tau / static_cast<double>(n_steps);
    const double half_dt = 0.5 * dt;
    const double curve_ratio =
        curve != nullptr ? std::exp(curve->log_discount(T) - curve->log_discount(t)) : 1.0;

    switch (kind) {
        case ModelKind::Vasicek: {
            const auto& p = std::get<VasicekParams>(params);
            const double decay = std::exp(-p.a * dt);
            const double sd = std::sqrt(vasicek_transition(p, p.b, dt).variance);
            return run_paths(config, 1.0, [&](CounterRng& rng) {
                double r = state0.x, sum = 0.0;
                for (std::size_t k = 0; k < n_steps; ++k) {
                    const double next = p.b + (r - p.b) * decay + sd * rng.normal();
                    sum += r + next;
                    r = next;
                }
                return std::exp(-half_dt * sum);
            });
        }
        case ModelKind::G2pp: {
            const auto& p = std::get<G2Params>(params);
            const auto s = g2_step(p, dt);
            // exp(-int_t^T phi) = P^M(0,T)/P^M(0,t) exp(-(V(0,T) - V(0,t))/2)
            const double scale = curve_ratio * std::exp(-0.5 * (g2pp_v(p, 0.0, T) - g2pp_v(p, 0.0, t)));
            return run_paths(config, scale, [&](CounterRng& rng) {
                double x = state0.x, y = state0.y, sum = 0.0;
                for (std::size_t k = 0; k < n_steps; ++k) {
                    const double z1 = rng.normal(), z2 = rng.normal();
                    const double nx = x * s.decay_x + s.l11 * z1;
                    const double ny = y * s.decay_y + s.l21 * z1 + s.l22 * z2;
                    sum += x + y + nx + ny;
                    x = nx;
                    y = ny;
                }
                return std::exp(-half_dt * sum);
            });
        }
        case ModelKind::HoLee: {
            // r(u) - f(0,u) = r(t) - f(0,t) + sigma^2 (u^2 - t^2)/2 + sigma (W_u - W_t)
            const auto& p = std::get<HoLeeParams>(params);
            const double base = state0.x - curve->forward(t);
            std::vector<double> drift(n_steps + 1);
            for (std::size_t k = 0; k <= n_steps; ++k) {
                const double u = t + static_cast<double>(k) * dt;
                drift[k] = 0.5 * p.sigma * p.sigma * (u * u - t * t);
            }
            const double vol = p.sigma * std::sqrt(dt);
            return run_paths(config, curve_ratio, [&](CounterRng& rng) {
                double w = 0.0, prev = base, sum = 0.0;
                for (std::size_t k = 1; k <= n_steps; ++k) {
                    w += vol * rng.normal();
                    const double next = base + drift[k] + w;
                    sum += prev + next;
                    prev = next;
                }
                return std::exp(-half_dt * sum);
            });
        }
        case ModelKind::HullWhite: {
            // r(u) - f(0,u) = X(u) + sigma^2/(2a^2) (1 - e^{-a u})^2 with X an OU from 0.
            const auto& p = std::get<HullWhiteParams>(params);
            const double c = p.sigma * p.sigma / (2.0 * p.a * p.a);
            const auto convexity = [&](Time u) {
                const double g = -std::expm1(-p.a * u);
                return c * g * g;
            };
            std::vector<double> drift(n_steps + 1);
            for (std::size_t k = 0; k <= n_steps; ++k) drift[k] = convexity(t + static_cast<double>(k) * dt);
            const double x0 = state0.x - curve->forward(t) - convexity(t);
            const double decay = std::exp(-p.a * dt);
            const double sd = p.sigma * std::sqrt(-std::expm1(-2.0 * p.a * dt) / (2.0 * p.a));
            return run_paths(config, curve_ratio, [&](CounterRng& rng) {
                double x = x0, prev = x0 + drift[0], sum = 0.0;
                for (std::size_t k = 1; k <= n_steps; ++k) {
                    x = x * decay + sd * rng.normal();
                    const double next = x + drift[k];
                    sum += prev + next;
                    prev = next;
                }
                return std::exp(-half_dt * sum);
            });
        }
    }
    throw Error(ErrorKind::Domain, "unknown model");
}

SyntheticPanel synth_panel(const ModelParams& params, const DiscountCurve* curve,
                           std::span<const Date> schedule, std::span<const Instrument> instruments,
                           const StatePoint& initial, std::uint64_t seed) {
    const ModelKind kind = kind_of(params);
    CURVEFORGE_REQUIRE(kind == ModelKind::Vasicek || kind == ModelKind::G2pp, ErrorKind::Domain,
                       "synthetic panels are generated for vasicek and g2pp");
    CURVEFORGE_REQUIRE(!schedule.empty(), ErrorKind::Precondition, "empty observation schedule");
    CURVEFORGE_REQUIRE(!instruments.empty(), ErrorKind::Precondition, "no instruments");
    CURVEFORGE_REQUIRE(!needs_curve(kind) || curve != nullptr, ErrorKind::Precondition,
                       "g2pp panels need an initial curve");
    const Date origin = curve != nullptr && curve->asof() ? *curve->asof() : schedule.front();

    if (kind == ModelKind::G2pp) {
        CURVEFORGE_REQUIRE(instruments.size() >= 2, ErrorKind::Precondition,
                           "g2pp panels need two instruments");
        for (std::size_t i = 0; i < instruments.size(); ++i)
            for (std::size_t j = i + 1; j < instruments.size(); ++j)
                CURVEFORGE_REQUIRE(instruments[i].maturity != instruments[j].maturity,
                                   ErrorKind::Precondition,
                                   "instruments with equal maturities cannot be inverted to states");
    }

    std::vector<Time> grid(schedule.size());
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        grid[k] = model_time(schedule.front(), schedule[k]);
        CURVEFORGE_REQUIRE(k == 0 || grid[k] > grid[k - 1], ErrorKind::Ordering,
                           "observation schedule must be increasing");
    }

    CounterRng rng(seed, 0);
    const Time t0 = model_time(origin, schedule.front());
    StateSeries states{factor_count(kind), {}};
    if (kind == ModelKind::Vasicek) {
        const auto& p = std::get<VasicekParams>(params);
        const auto path = simulate_ou(p.a, p.b, p.sigma, initial.x, grid, rng);
        for (std::size_t k = 0; k < grid.size(); ++k)
            states.points.push_back({schedule[k], t0 + grid[k], path[k], 0.0});
    } else {
        const auto path = simulate_g2(std::get<G2Params>(params), {initial.x, initial.y}, grid, rng);
        for (std::size_t k = 0; k < grid.size(); ++k)
            states.points.push_back({schedule[k], t0 + grid[k], path[k][0], path[k][1]});
    }

    std::vector<PanelObservation> observations;
    observations.reserve(schedule.size());
    for (const auto& s : states.points) {
        PanelObservation obs{s.date, {}, {}};
        for (const auto& inst : instruments)
            obs.prices.emplace(inst.id, model_price(params, curve, s, model_time(origin, inst.maturity)));
        observations.push_back(std::move(obs));
    }
    return {PricePanel({instruments.begin(), instruments.end()}, std::move(observations)), std::move(states)};
}

DiscountCurve oracle_curve() {
    std::vector<Time> maturities;
    for (int i = 1; i <= 160; ++i) maturities.push_back(0.25 * i);
    return DiscountCurve::flat(0.04, maturities);
}

std::vector<OracleCase> standard_oracle_cases(ModelKind kind) {
    const auto at = [](Time t, double x, double y = 0.0) { return StatePoint{Date{}, t, x, y}; };
    switch (kind) {
        case ModelKind::Vasicek: {
            const VasicekParams all{1.7051, 0.0937, 0.3721}, traded{1.7145, 0.0896, 0.4971};
            return {{"reference r=0.05 T=5", all, at(0.0, 0.05), 5.0},
                    {"reference r=0.05 T=1", all, at(0.0, 0.05), 1.0},
                    {"traded-only r=0.03 T=2", traded, at(0.0, 0.03), 2.0},
                    {"slow r=0.05 T=3", VasicekParams{0.5, 0.05, 0.02}, at(0.0, 0.05), 3.0},
                    {"low start t=1 T=4", VasicekParams{0.3, 0.06, 0.05}, at(1.0, 0.02), 4.0}};
        }
        case ModelKind::G2pp: {
            const G2Params ref{0.1300, 0.3526, 0.2062, 0.4892, -0.99};
            return {{"reference t=1 T=6", ref, at(1.0, 0.01, -0.01), 6.0},
                    {"reference zero state T=2", ref, at(0.0, 0.0, 0.0), 2.0},
                    {"reference t=0.5 T=3", ref, at(0.5, -0.05, 0.05), 3.0},
                    {"positive rho t=2 T=5", G2Params{0.5, 1.2, 0.01, 0.015, 0.3}, at(2.0, 0.002, -0.001), 5.0},
                    {"moderate rho T=4", G2Params{0.2, 0.8, 0.03, 0.02, -0.5}, at(0.0, 0.0, 0.01), 4.0}};
        }
        case ModelKind::HoLee: {
            return {{"sigma 0.3071 t=1 T=3", HoLeeParams{0.3071}, at(1.0, 0.04), 3.0},
                    {"sigma 0.3071 T=1", HoLeeParams{0.3071}, at(0.0, 0.04), 1.0},
                    {"sigma 0.0232 T=5", HoLeeParams{0.0232}, at(0.0, 0.04), 5.0},
                    {"sigma 0.0232 t=2 T=4", HoLeeParams{0.0232}, at(2.0, 0.03), 4.0},
                    {"sigma 0.1 t=0.5 T=2", HoLeeParams{0.1}, at(0.5, 0.05), 2.0}};
        }
        case ModelKind::HullWhite: {
            const HullWhiteParams ref{0.0813, 0.0215};
            return {{"reference T=3", ref, at(0.0, 0.04), 3.0},
                    {"reference t=1 T=5", ref, at(1.0, 0.05), 5.0},
                    {"mean fit t=2 T=4", HullWhiteParams{0.0693, 0.0177}, at(2.0, 0.03), 4.0},
                    {"fast t=0.5 T=2.5", HullWhiteParams{0.5, 0.1}, at(0.5, 0.04), 2.5},
                    {"very fast T=2", HullWhiteParams{1.5, 0.2}, at(0.0, 0.06), 2.0}};
        }
    }
    return {};
}

}  // namespace curveforge

