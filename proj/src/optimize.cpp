#include "curveforge/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace curveforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Simplex {
    std::vector<std::vector<double>> x;
    std::vector<double> f;
};

class CountedObjective {
public:
    CountedObjective(const Objective& f, int budget) : f_(f), budget_(budget) {}

    double operator()(const std::vector<double>& x) {
        ++count_;
        const double v = f_(x);
        return std::isfinite(v) ? v : kInf;
    }
    bool exhausted() const { return count_ >= budget_; }
    int count() const { return count_; }

private:
    const Objective& f_;
    int budget_;
    int count_ = 0;
};

Simplex initial_simplex(CountedObjective& f, const std::vector<double>& x0, double step) {
    const std::size_t n = x0.size();
    Simplex s;
    s.x.assign(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) s.x[i + 1][i] += step;
    for (const auto& v : s.x) s.f.push_back(f(v));
    return s;
}

// One Nelder-Mead run; returns true on tolerance-based convergence.
bool run_simplex(CountedObjective& f, Simplex& s, const NelderMeadOptions& opt) {
    const std::size_t n = s.x.size() - 1;
    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);

    const auto point = [&](const std::vector<double>& from, double coef, std::vector<double>& out) {
        for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + coef * (from[j] - centroid[j]);
    };

    while (!f.exhausted()) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return s.f[l] < s.f[r]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        double spread = s.f[worst] - s.f[best];
        if (!std::isfinite(spread)) spread = kInf;
        double size = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j) size = std::max(size, std::abs(s.x[i][j] - s.x[best][j]));
        if (std::isfinite(s.f[best]) && spread <= opt.f_tolerance && size <= opt.x_tolerance) return true;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += s.x[i][j] / static_cast<double>(n);
        }

        point(s.x[worst], -1.0, trial);
        const double fr = f(trial);
        if (fr < s.f[best]) {
            point(s.x[worst], -2.0, trial2);
            const double fe = f(trial2);
            if (fe < fr) { s.x[worst] = trial2; s.f[worst] = fe; }
            else { s.x[worst] = trial; s.f[worst] = fr; }
            continue;
        }
        if (fr < s.f[second]) {
            s.x[worst] = trial;
            s.f[worst] = fr;
            continue;
        }
        if (fr < s.f[worst]) {
            point(s.x[worst], -0.5, trial2);
            const double fc = f(trial2);
            if (fc <= fr) { s.x[worst] = trial2; s.f[worst] = fc; continue; }
        } else {
            point(s.x[worst], 0.5, trial2);
            const double fc = f(trial2);
            if (fc < s.f[worst]) { s.x[worst] = trial2; s.f[worst] = fc; continue; }
        }
        // shrink toward best
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) s.x[i][j] = s.x[best][j] + 0.5 * (s.x[i][j] - s.x[best][j]);
            s.f[i] = f(s.x[i]);
        }
    }
    return false;
}

}  // namespace

OptimizeResult nelder_mead(const Objective& objective, std::vector<double> x0, const NelderMeadOptions& options) {
    CountedObjective f(objective, options.max_evaluations);
    Simplex s = initial_simplex(f, x0, options.initial_step);
    bool converged = run_simplex(f, s, options);

    const auto best_of = [](const Simplex& sx) {
        return static_cast<std::size_t>(std::min_element(sx.f.begin(), sx.f.end()) - sx.f.begin());
    };
    for (int k = 0; k < options.polish_restarts && converged && !f.exhausted(); ++k) {
        const std::size_t b = best_of(s);
        const double before = s.f[b];
        Simplex again = initial_simplex(f, s.x[b], std::max(options.initial_step * 1e-2, 1e3 * options.x_tolerance));
        converged = run_simplex(f, again, options);
        const std::size_t b2 = best_of(again);
        if (again.f[b2] <= before) s = std::move(again);
        if (before - s.f[best_of(s)] <= options.f_tolerance) break;
    }

    const std::size_t b = best_of(s);
    return {s.x[b], s.f[b], f.count(), converged && std::isfinite(s.f[b])};
}

OptimizeResult golden_section(const std::function<double(double)>& f, double lo, double hi,
                              double tolerance, int max_iterations) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c), fd = f(d);
    int evaluations = 2;
    int it = 0;
    for (; it < max_iterations && hi - lo > tolerance; ++it) {
        if (fc < fd) {
            hi = d; d = c; fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c; c = d; fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
        ++evaluations;
    }
    const double x = fc < fd ? c : d;
    return {{x}, std::min(fc, fd), evaluations, hi - lo <= tolerance};
}

}  // namespace curveforge
