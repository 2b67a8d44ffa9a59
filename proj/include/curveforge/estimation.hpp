#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "curveforge/curve.hpp"
#include "curveforge/error.hpp"
#include "curveforge/model.hpp"
#include "curveforge/optimize.hpp"
#include "curveforge/panel.hpp"

namespace curveforge {

/// Panel projected onto a model clock: times t_k, maturities T_i (both in years
/// from `origin`) and prices[k][i]. Only dates quoting every instrument survive.
struct ObservedSeries {
    Date origin;
    std::vector<Date> dates;
    std::vector<Time> times;
    std::vector<Time> maturities;
    std::vector<std::vector<double>> prices;

    /// Origin defaults to the first observation date.
    static ObservedSeries from_panel(const PricePanel& panel, std::optional<Date> origin = std::nullopt);
};

/// Log-likelihood split into the state transition density and the change of
/// variables term: total = density - log_jacobian.
struct LoglikTerms {
    double density = 0.0;
    double log_jacobian = 0.0;
    double total() const { return density - log_jacobian; }
};

LoglikTerms loglik_vasicek_terms(const VasicekParams& p, const ObservedSeries& series);
double loglik_vasicek(const VasicekParams& p, const ObservedSeries& series);
double loglik_vasicek(const VasicekParams& p, const PricePanel& panel);
/// Same likelihood with one transition law shared by every step of length dt.
double loglik_vasicek_uniform(const VasicekParams& p, const ObservedSeries& series, Time dt);

LoglikTerms loglik_g2pp_terms(const G2Params& p, const DiscountCurve& curve, const ObservedSeries& series);
double loglik_g2pp(const G2Params& p, const DiscountCurve& curve, const ObservedSeries& series);
/// Clock origin is the curve asof when present, else the first panel date.
double loglik_g2pp(const G2Params& p, const DiscountCurve& curve, const PricePanel& panel);

/// States implied by inverting every observation under `params`.
StateSeries filter_states(const ModelParams& params, const DiscountCurve* curve, const ObservedSeries& series);

struct FitConfig {
    int restarts = 16;
    std::uint64_t seed = 1;
    double agreement_tolerance = 1e-4;
    NelderMeadOptions optimizer{3000, 1e-9, 1e-7, 0.1, 2};
};

struct OptimizerReport {
    int evaluations = 0;
    int restarts = 0;
    int failed_restarts = 0;
    bool converged = false;    // best two restarts agree within the tolerance
    bool at_boundary = false;  // best point sits on a parameter bound
};

struct FitResult {
    ModelParams params;
    double loglik = 0.0;
    StateSeries states;
    OptimizerReport report;
};

/// Raised when no restart produced a finite likelihood; carries the best attempt.
class OptimizationFailed : public Error {
public:
    OptimizationFailed(const std::string& what, FitResult best)
        : Error(ErrorKind::OptimizationFailed, what), best_(std::move(best)) {}
    const FitResult& best() const { return best_; }

private:
    FitResult best_;
};

/// Maximum-likelihood fit of Vasicek (one instrument) or G2++ (two instruments,
/// curve required) by multi-start Nelder-Mead in log/atanh coordinates.
FitResult fit_ml(ModelKind model, const ObservedSeries& series, const DiscountCurve* curve,
                 const FitConfig& config = {});
FitResult fit_ml(ModelKind model, const PricePanel& panel, const DiscountCurve* curve,
                 const FitConfig& config = {});

/// Transformed coordinates used by fit_ml, exposed for tests.
std::vector<double> to_unconstrained(const ModelParams& params);
ModelParams from_unconstrained(ModelKind model, std::span<const double> z);

inline constexpr double kMaxAbsRho = 0.9999;

}  // namespace curveforge
