#pragma once

#include <array>
#include <cmath>

#include "curveforge/curve.hpp"
#include "curveforge/date.hpp"

namespace curveforge {

/// Vasicek: dr = a(b - r)dt + sigma dW.
struct VasicekParams {
    double a = 0.0;      // mean-reversion speed
    double b = 0.0;      // long-run level
    double sigma = 0.0;  // volatility

    void validate() const;
};

/// G2++: r = x + y + phi, dx = -a x dt + sigma dW1, dy = -b y dt + eta dW2,
/// d<W1,W2> = rho dt.
struct G2Params {
    double a = 0.0;
    double b = 0.0;
    double sigma = 0.0;
    double eta = 0.0;
    double rho = 0.0;

    void validate() const;
};

/// Factor values of G2++ at model time t. No sign restriction.
struct G2State {
    double x = 0.0;
    double y = 0.0;
    Time t = 0.0;
};

struct AffineCoefficients {
    double A;
    double B;
};

struct GaussianMoments {
    double mean;
    double variance;
};

struct BivariateMoments {
    std::array<double, 2> mean;
    std::array<std::array<double, 2>, 2> cov;
};

/// (1 - exp(-c tau)) / c.
inline double decay_factor(double c, Time tau) { return -std::expm1(-c * tau) / c; }

/// log A(t,T), finite even where A itself would overflow.
double vasicek_log_a(const VasicekParams& p, Time t, Time T);
/// Affine coefficients of P(t,T) = A exp(-B r).
AffineCoefficients vasicek_ab(const VasicekParams& p, Time t, Time T);
double vasicek_price(const VasicekParams& p, double r, Time t, Time T);
/// Exact conditional law of r_{s+dt} given r_s.
GaussianMoments vasicek_transition(const VasicekParams& p, double r_s, Time dt);
/// Short rate implied by one observed zero price.
double vasicek_invert_state(const VasicekParams& p, double price, Time t, Time T);

/// Variance of the integral of x + y over [t, T].
double g2pp_v(const G2Params& p, Time t, Time T);

/// Market-fitted G2++ zero price: P^M(0,T)/P^M(0,t) exp(A(t,T)). The shift phi
/// never appears; the curve ratio absorbs it.
double g2pp_price(const G2Params& p, const DiscountCurve& curve, const G2State& state, Time T);

/// Deterministic part of log P(t,T) excluding the state terms.
double g2pp_log_intercept(const G2Params& p, const DiscountCurve& curve, Time t, Time T);

BivariateMoments g2pp_transition(const G2Params& p, const G2State& state, Time dt);

/// Solves for (x, y) from two zero prices observed at t for maturities T1, T2.
/// Throws Error(Conditioning) when |det| < 1e-14.
G2State g2pp_invert_states(const G2Params& p, const DiscountCurve& curve,
                           std::array<double, 2> prices, Time t, Time T1, Time T2);

/// det of the loading matrix [[B_a(tau1), B_b(tau1)], [B_a(tau2), B_b(tau2)]].
double g2pp_loading_det(const G2Params& p, Time tau1, Time tau2);

inline constexpr double kG2SingularDet = 1e-14;

}  // namespace curveforge
