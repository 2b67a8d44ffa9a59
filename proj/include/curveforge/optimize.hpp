#pragma once

#include <functional>
#include <span>
#include <vector>

namespace curveforge {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
    int max_evaluations = 5000;
    double f_tolerance = 1e-12;  // absolute spread of simplex values
    double x_tolerance = 1e-9;   // max vertex distance from the best vertex
    double initial_step = 0.1;
    int polish_restarts = 2;     // re-seed the simplex at the optimum after convergence
};

struct OptimizeResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Derivative-free minimization. Non-finite objective values rank as +inf.
OptimizeResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& options = {});

/// Golden-section search for a unimodal function on [lo, hi].
OptimizeResult golden_section(const std::function<double(double)>& f, double lo, double hi,
                              double tolerance = 1e-12, int max_iterations = 500);

}  // namespace curveforge
