#include "curveforge/shortrate.hpp"

#include <cmath>
#include <string>

#include "curveforge/error.hpp"

namespace curveforge {

void VasicekParams::validate() const {
    CURVEFORGE_REQUIRE(a > 0.0 && b > 0.0 && sigma > 0.0, ErrorKind::Domain,
                       "Vasicek parameters a, b, sigma must be positive");
}

void G2Params::validate() const {
    CURVEFORGE_REQUIRE(a > 0.0 && b > 0.0 && sigma > 0.0 && eta > 0.0, ErrorKind::Domain,
                       "G2++ parameters a, b, sigma, eta must be positive");
    CURVEFORGE_REQUIRE(rho >= -1.0 && rho <= 1.0, ErrorKind::Domain,
                       "G2++ correlation must lie in [-1, 1]");
}

namespace {

void require_ordered(Time t, Time T) {
    CURVEFORGE_REQUIRE(t >= 0.0 && t <= T, ErrorKind::Ordering,
                       "expected 0 <= t <= T, got t=" + std::to_string(t) + " T=" + std::to_string(T));
}

}  // namespace

double vasicek_log_a(const VasicekParams& p, Time t, Time T) {
    p.validate();
    require_ordered(t, T);
    const Time tau = T - t;
    if (tau == 0.0) return 0.0;
    const double B = decay_factor(p.a, tau);
    const double s2 = p.sigma * p.sigma;
    return (p.b - s2 / (2.0 * p.a * p.a)) * (B - tau) - s2 * B * B / (4.0 * p.a);
}

AffineCoefficients vasicek_ab(const VasicekParams& p, Time t, Time T) {
    const double logA = vasicek_log_a(p, t, T);
    return {std::exp(logA), T == t ? 0.0 : decay_factor(p.a, T - t)};
}

double vasicek_price(const VasicekParams& p, double r, Time t, Time T) {
    const double logA = vasicek_log_a(p, t, T);
    return T == t ? 1.0 : std::exp(logA - decay_factor(p.a, T - t) * r);
}

GaussianMoments vasicek_transition(const VasicekParams& p, double r_s, Time dt) {
    CURVEFORGE_REQUIRE(dt > 0.0, ErrorKind::Domain, "transition step must be positive");
    const double decay = std::exp(-p.a * dt);
    const double mean = r_s * decay + p.b * (1.0 - decay);
    const double variance = p.sigma * p.sigma * (-std::expm1(-2.0 * p.a * dt)) / (2.0 * p.a);
    return {mean, variance};
}

double vasicek_invert_state(const VasicekParams& p, double price, Time t, Time T) {
    CURVEFORGE_REQUIRE(price > 0.0, ErrorKind::Domain, "price must be positive");
    CURVEFORGE_REQUIRE(T > t, ErrorKind::Conditioning, "state inversion is singular at T = t");
    return (vasicek_log_a(p, t, T) - std::log(price)) / decay_factor(p.a, T - t);
}

double g2pp_v(const G2Params& p, Time t, Time T) {
    require_ordered(t, T);
    const Time tau = T - t;
    if (tau == 0.0) return 0.0;
    const double a = p.a, b = p.b;
    const double ea = std::exp(-a * tau), eb = std::exp(-b * tau), eab = std::exp(-(a + b) * tau);
    const double x_term = p.sigma * p.sigma / (a * a) *
                          (tau + 2.0 / a * ea - 1.0 / (2.0 * a) * ea * ea - 3.0 / (2.0 * a));
    const double y_term = p.eta * p.eta / (b * b) *
                          (tau + 2.0 / b * eb - 1.0 / (2.0 * b) * eb * eb - 3.0 / (2.0 * b));
    const double cross = 2.0 * p.rho * p.sigma * p.eta / (a * b) *
                         (tau + (ea - 1.0) / a + (eb - 1.0) / b - (eab - 1.0) / (a + b));
    return x_term + y_term + cross;
}

double g2pp_log_intercept(const G2Params& p, const DiscountCurve& curve, Time t, Time T) {
    return curve.log_discount(T) - curve.log_discount(t) +
           0.5 * (g2pp_v(p, t, T) - g2pp_v(p, 0.0, T) + g2pp_v(p, 0.0, t));
}

double g2pp_price(const G2Params& p, const DiscountCurve& curve, const G2State& state, Time T) {
    p.validate();
    require_ordered(state.t, T);
    if (T == state.t) return 1.0;
    const Time tau = T - state.t;
    const double log_p = g2pp_log_intercept(p, curve, state.t, T) -
                         decay_factor(p.a, tau) * state.x - decay_factor(p.b, tau) * state.y;
    return std::exp(log_p);
}

BivariateMoments g2pp_transition(const G2Params& p, const G2State& state, Time dt) {
    CURVEFORGE_REQUIRE(dt > 0.0, ErrorKind::Domain, "transition step must be positive");
    const double var_x = p.sigma * p.sigma * (-std::expm1(-2.0 * p.a * dt)) / (2.0 * p.a);
    const double var_y = p.eta * p.eta * (-std::expm1(-2.0 * p.b * dt)) / (2.0 * p.b);
    const double cov = p.rho * p.sigma * p.eta * (-std::expm1(-(p.a + p.b) * dt)) / (p.a + p.b);
    return {{state.x * std::exp(-p.a * dt), state.y * std::exp(-p.b * dt)},
            {{{var_x, cov}, {cov, var_y}}}};
}

double g2pp_loading_det(const G2Params& p, Time tau1, Time tau2) {
    return decay_factor(p.a, tau1) * decay_factor(p.b, tau2) -
           decay_factor(p.a, tau2) * decay_factor(p.b, tau1);
}

G2State g2pp_invert_states(const G2Params& p, const DiscountCurve& curve,
                           std::array<double, 2> prices, Time t, Time T1, Time T2) {
    p.validate();
    CURVEFORGE_REQUIRE(prices[0] > 0.0 && prices[1] > 0.0, ErrorKind::Domain,
                       "prices must be positive");
    CURVEFORGE_REQUIRE(T1 > t && T2 > t, ErrorKind::Precondition,
                       "both maturities must exceed the observation time");
    CURVEFORGE_REQUIRE(T1 != T2, ErrorKind::Conditioning, "two equal maturities give a singular system");
    const Time tau1 = T1 - t, tau2 = T2 - t;
    const double a1 = decay_factor(p.a, tau1), b1 = decay_factor(p.b, tau1);
    const double a2 = decay_factor(p.a, tau2), b2 = decay_factor(p.b, tau2);
    const double det = a1 * b2 - a2 * b1;
    CURVEFORGE_REQUIRE(std::abs(det) >= kG2SingularDet, ErrorKind::Conditioning,
                       "G2++ loading matrix is near-singular");
    // x a_i + y b_i = k_i - log P_i
    const double r1 = g2pp_log_intercept(p, curve, t, T1) - std::log(prices[0]);
    const double r2 = g2pp_log_intercept(p, curve, t, T2) - std::log(prices[1]);
    return {(r1 * b2 - r2 * b1) / det, (a1 * r2 - a2 * r1) / det, t};
}

}  // namespace curveforge
