#include "curveforge/hjm.hpp"

#include <cmath>
#include <string>

#include "curveforge/error.hpp"
#include "curveforge/shortrate.hpp"

namespace curveforge {

void HoLeeParams::validate() const {
    CURVEFORGE_REQUIRE(sigma > 0.0, ErrorKind::Domain, "Ho-Lee sigma must be positive");
}

void HullWhiteParams::validate() const {
    CURVEFORGE_REQUIRE(a > 0.0 && sigma > 0.0, ErrorKind::Domain,
                       "Hull-White a and sigma must be positive");
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_ordered(Time t, Time T) {
    CURVEFORGE_REQUIRE(t >= 0.0 && t <= T, ErrorKind::Ordering,
                       "expected 0 <= t <= T, got t=" + std::to_string(t) + " T=" + std::to_string(T));
}

}  // namespace

double hjm_volatility(const HjmVolatility& vol, Time s, Time u) {
    return std::visit(overloaded{[](const HoLeeParams& p) { return p.sigma; },
                                 [&](const HullWhiteParams& p) { return p.sigma * std::exp(-p.a * (u - s)); }},
                      vol);
}

double hjm_drift(const HjmVolatility& vol, Time s, Time t) {
    CURVEFORGE_REQUIRE(s <= t, ErrorKind::Ordering, "HJM drift requires s <= t");
    const Time h = t - s;
    return std::visit(overloaded{[&](const HoLeeParams& p) { return p.sigma * p.sigma * h; },
                                 [&](const HullWhiteParams& p) {
                                     const double e = std::exp(-p.a * h);
                                     return p.sigma * p.sigma / p.a * e * (1.0 - e);
                                 }},
                      vol);
}

double holee_price(const HoLeeParams& p, const DiscountCurve& curve, double r, Time t, Time T) {
    p.validate();
    require_ordered(t, T);
    if (T == t) return 1.0;
    const Time tau = T - t;
    const double ratio_log = curve.log_discount(T) - curve.log_discount(t);
    return std::exp(ratio_log + tau * curve.forward(t) - 0.5 * p.sigma * p.sigma * t * tau * tau -
                    tau * r);
}

double hullwhite_price(const HullWhiteParams& p, const DiscountCurve& curve, double r, Time t, Time T,
                       HullWhiteDamping damping) {
    p.validate();
    require_ordered(t, T);
    if (T == t) return 1.0;
    const double B = decay_factor(p.a, T - t);
    const double damp = damping == HullWhiteDamping::Standard ? -std::expm1(-2.0 * p.a * t)
                                                              : -std::expm1(-2.0 * t);
    const double ratio_log = curve.log_discount(T) - curve.log_discount(t);
    return std::exp(ratio_log + B * curve.forward(t) - p.sigma * p.sigma / (4.0 * p.a) * damp * B * B -
                    B * r);
}

}  // namespace curveforge
