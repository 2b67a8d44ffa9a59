#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "curveforge/curve.hpp"
#include "curveforge/date.hpp"
#include "curveforge/hjm.hpp"
#include "curveforge/shortrate.hpp"

namespace curveforge {

enum class ModelKind { Vasicek, G2pp, HoLee, HullWhite };

std::string_view to_string(ModelKind kind) noexcept;
/// Accepts "vasicek", "g2pp", "holee", "hullwhite". Throws Error(Domain) otherwise.
ModelKind parse_model_kind(std::string_view name);

using ModelParams = std::variant<VasicekParams, G2Params, HoLeeParams, HullWhiteParams>;

ModelKind kind_of(const ModelParams& params) noexcept;
/// Number of state factors: 2 for G2++, 1 otherwise.
int factor_count(ModelKind kind) noexcept;
/// True for models whose prices are ratios against an initial market curve.
bool needs_curve(ModelKind kind) noexcept;

/// Named parameter values in canonical order, e.g. {"a", 0.13}, {"b", ...}.
std::vector<std::pair<std::string, double>> named_values(const ModelParams& params);
ModelParams params_from_named(ModelKind kind,
                              const std::vector<std::pair<std::string, double>>& values);

/// Model state at time t. One-factor models carry the short rate in x.
struct StatePoint {
    Date date;
    Time t = 0.0;
    double x = 0.0;
    double y = 0.0;
};

struct StateSeries {
    int factors = 1;
    std::vector<StatePoint> points;
};

/// Zero price P(t,T) for any supported model. `curve` is required for G2++,
/// Ho-Lee and Hull-White.
double model_price(const ModelParams& params, const DiscountCurve* curve, const StatePoint& state,
                   Time T, HullWhiteDamping damping = HullWhiteDamping::Standard);

}  // namespace curveforge
