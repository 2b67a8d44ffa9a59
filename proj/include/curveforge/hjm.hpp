#pragma once

#include <variant>

#include "curveforge/curve.hpp"
#include "curveforge/date.hpp"

namespace curveforge {

/// Ho-Lee: constant forward-rate volatility sigma.
struct HoLeeParams {
    double sigma = 0.0;

    void validate() const;
};

/// Hull-White: forward-rate volatility sigma exp(-a (u - s)).
struct HullWhiteParams {
    double a = 0.0;
    double sigma = 0.0;

    void validate() const;
};

/// Deterministic HJM volatility structure sigma(s, u).
using HjmVolatility = std::variant<HoLeeParams, HullWhiteParams>;

double hjm_volatility(const HjmVolatility& vol, Time s, Time u);

/// No-arbitrage drift alpha(s,t) = sigma(s,t) * integral_s^t sigma(s,u) du.
double hjm_drift(const HjmVolatility& vol, Time s, Time t);

double holee_price(const HoLeeParams& p, const DiscountCurve& curve, double r, Time t, Time T);

/// Which damping factor multiplies the B^2 term of the Hull-White price.
enum class HullWhiteDamping {
    Standard,  // 1 - exp(-2 a t)
    Printed,   // 1 - exp(-2 t), reproduced verbatim for comparison runs
};

double hullwhite_price(const HullWhiteParams& p, const DiscountCurve& curve, double r, Time t, Time T,
                       HullWhiteDamping damping = HullWhiteDamping::Standard);

}  // namespace curveforge
