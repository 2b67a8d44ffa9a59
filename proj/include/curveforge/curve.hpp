#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curveforge/date.hpp"

namespace curveforge {

/// Fixed-coupon bond. Coupons fall on dates stepped back from maturity by
/// 12/frequency months, no earlier than `first_coupon`.
struct CouponBond {
    std::string id;
    double face = 100.0;
    double coupon_rate = 0.0;  // annual, decimal
    int frequency = 1;         // payments per year: 1, 2, 4 or 12
    Date maturity;
    Date first_coupon;

    void validate() const;
};

struct CashFlow {
    Date date;
    Time time;  // ACT/365 from settlement
    double amount;
};

/// Cash flows strictly after `settlement`, in increasing time order. The last
/// flow is at maturity and carries face plus the final coupon.
std::vector<CashFlow> remaining_cash_flows(const CouponBond& bond, Date settlement);

/// Accrued coupon at settlement, straight-line between surrounding coupon dates.
double accrued_interest(const CouponBond& bond, Date settlement);

enum class QuoteConvention { Dirty, Clean };

/// Continuously-compounded yield solving price = sum c_i exp(-y tau_i).
/// Bisection-secured Newton on [-0.5, 2.0]; |f(y)| < 1e-10 on exit.
double ytm_from_price(const CouponBond& bond, Date settlement, double price,
                      QuoteConvention convention = QuoteConvention::Dirty);

/// Price of the remaining flows discounted at flat continuous yield y.
double price_from_yield(const CouponBond& bond, Date settlement, double y);

/// exp(-y tau): zero-coupon discount factor at continuous yield y.
inline double zero_price_from_yield(double y, Time tau) { return std::exp(-y * tau); }

struct Pillar {
    Time maturity;
    double discount;
};

/// Initial term structure P^M(0, .) with log-linear interpolation in discount
/// factors, so the instantaneous forward is piecewise constant between pillars.
/// An implicit anchor (0, 1) precedes the first pillar.
class DiscountCurve {
public:
    DiscountCurve() = default;
    explicit DiscountCurve(std::vector<Pillar> pillars, std::optional<Date> asof = std::nullopt,
                           bool flat_extrapolation = false);

    /// Flat continuously-compounded curve with pillars at `maturities`.
    static DiscountCurve flat(double rate, std::span<const Time> maturities,
                              std::optional<Date> asof = std::nullopt);

    double discount(Time t) const;
    double log_discount(Time t) const;
    /// f^M(0,t) = -d log P^M(0,t)/dt, right limit at pillar knots.
    double forward(Time t) const;

    Time span() const { return pillars_.empty() ? 0.0 : pillars_.back().maturity; }
    const std::vector<Pillar>& pillars() const { return pillars_; }
    const std::optional<Date>& asof() const { return asof_; }
    bool flat_extrapolation() const { return flat_extrapolation_; }
    DiscountCurve with_flat_extrapolation(bool on) const;

private:
    std::size_t segment(Time t) const;
    double segment_forward(std::size_t i) const;

    std::vector<Pillar> pillars_;
    std::vector<double> log_df_;
    std::optional<Date> asof_;
    bool flat_extrapolation_ = false;
};

struct BondQuote {
    CouponBond bond;
    Date settlement;
    double price;  // per 100 face
};

struct CurveBuildOptions {
    QuoteConvention convention = QuoteConvention::Dirty;
    Time short_anchor_max = 0.5;
};

/// Converts each quote to a zero pillar through its yield and assembles the
/// curve. All quotes must share one settlement date, which becomes the asof.
DiscountCurve build_initial_curve(std::span<const BondQuote> quotes,
                                  const CurveBuildOptions& options = {});

double instantaneous_forward(const DiscountCurve& curve, Time t);

}  // namespace curveforge
