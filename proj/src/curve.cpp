#include "curveforge/curve.hpp"

#include <algorithm>
#include <cmath>

#include "curveforge/error.hpp"

namespace curveforge {

void CouponBond::validate() const {
    CURVEFORGE_REQUIRE(face > 0.0, ErrorKind::Domain, "bond " + id + ": face must be positive");
    CURVEFORGE_REQUIRE(coupon_rate >= 0.0, ErrorKind::Domain,
                       "bond " + id + ": coupon_rate must be non-negative");
    CURVEFORGE_REQUIRE(frequency == 1 || frequency == 2 || frequency == 4 || frequency == 12,
                       ErrorKind::Domain, "bond " + id + ": frequency must be 1, 2, 4 or 12");
    CURVEFORGE_REQUIRE(first_coupon <= maturity, ErrorKind::Ordering,
                       "bond " + id + ": first coupon after maturity");
}

namespace {

// Coupon dates in increasing order, maturity last.
std::vector<Date> coupon_schedule(const CouponBond& bond) {
    const int step = 12 / bond.frequency;
    std::vector<Date> dates;
    for (int k = 0;; ++k) {
        const Date d = bond.maturity.add_months(-k * step);
        if (d < bond.first_coupon) break;
        dates.push_back(d);
    }
    std::reverse(dates.begin(), dates.end());
    return dates;
}

}  // namespace

std::vector<CashFlow> remaining_cash_flows(const CouponBond& bond, Date settlement) {
    bond.validate();
    CURVEFORGE_REQUIRE(settlement < bond.maturity, ErrorKind::Precondition,
                       "bond " + bond.id + " has no cash flow after " + settlement.iso());
    const double coupon = bond.face * bond.coupon_rate / bond.frequency;
    std::vector<CashFlow> flows;
    for (const Date& d : coupon_schedule(bond)) {
        if (d <= settlement) continue;
        flows.push_back({d, year_fraction(settlement, d), coupon});
    }
    flows.back().amount += bond.face;
    return flows;
}

double accrued_interest(const CouponBond& bond, Date settlement) {
    const int step = 12 / bond.frequency;
    const auto schedule = coupon_schedule(bond);
    auto next = std::upper_bound(schedule.begin(), schedule.end(), settlement);
    if (next == schedule.end()) return 0.0;
    const Date prev = next == schedule.begin() ? next->add_months(-step) : *std::prev(next);
    const double period = static_cast<double>(next->serial() - prev.serial());
    const double elapsed = static_cast<double>(settlement.serial() - prev.serial());
    return bond.face * bond.coupon_rate / bond.frequency * std::clamp(elapsed / period, 0.0, 1.0);
}

double price_from_yield(const CouponBond& bond, Date settlement, double y) {
    double pv = 0.0;
    for (const auto& cf : remaining_cash_flows(bond, settlement))
        pv += cf.amount * std::exp(-y * cf.time);
    return pv;
}

double ytm_from_price(const CouponBond& bond, Date settlement, double price,
                      QuoteConvention convention) {
    CURVEFORGE_REQUIRE(price > 0.0 && std::isfinite(price), ErrorKind::Domain,
                       "bond " + bond.id + ": price must be positive");
    const auto flows = remaining_cash_flows(bond, settlement);
    const double target =
        convention == QuoteConvention::Clean ? price + accrued_interest(bond, settlement) : price;

    // f is strictly decreasing in y for positive cash flows.
    const auto eval = [&](double y, double& deriv) {
        double f = -target;
        deriv = 0.0;
        for (const auto& cf : flows) {
            const double v = cf.amount * std::exp(-y * cf.time);
            f += v;
            deriv -= cf.time * v;
        }
        return f;
    };

    double lo = -0.5, hi = 2.0, d = 0.0;
    const double f_lo = eval(lo, d);
    const double f_hi = eval(hi, d);
    CURVEFORGE_REQUIRE(f_lo >= 0.0 && f_hi <= 0.0, ErrorKind::NoSolution,
                       "bond " + bond.id + ": no yield in [-0.5, 2.0] reproduces the price");
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;

    double y = 0.05;
    for (int iter = 0; iter < 200; ++iter) {
        const double f = eval(y, d);
        if (std::abs(f) < 1e-10) return y;
        if (f > 0.0) lo = y; else hi = y;
        double next = d != 0.0 ? y - f / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo < 1e-15) return next;
        y = next;
    }
    throw Error(ErrorKind::NoSolution, "bond " + bond.id + ": yield iteration did not converge");
}

DiscountCurve::DiscountCurve(std::vector<Pillar> pillars, std::optional<Date> asof,
                             bool flat_extrapolation)
    : pillars_(std::move(pillars)), asof_(asof), flat_extrapolation_(flat_extrapolation) {
    CURVEFORGE_REQUIRE(!pillars_.empty(), ErrorKind::Precondition, "curve needs at least one pillar");
    log_df_.reserve(pillars_.size());
    Time prev = 0.0;
    for (const auto& p : pillars_) {
        CURVEFORGE_REQUIRE(p.maturity > prev, ErrorKind::Ordering,
                           "curve pillar maturities must be positive and strictly increasing");
        CURVEFORGE_REQUIRE(p.discount > 0.0 && p.discount <= 1.0, ErrorKind::Domain,
                           "curve discount factors must lie in (0, 1]");
        log_df_.push_back(std::log(p.discount));
        prev = p.maturity;
    }
}

DiscountCurve DiscountCurve::flat(double rate, std::span<const Time> maturities,
                                  std::optional<Date> asof) {
    std::vector<Pillar> pillars;
    pillars.reserve(maturities.size());
    for (Time t : maturities) pillars.push_back({t, std::exp(-rate * t)});
    return DiscountCurve(std::move(pillars), asof);
}

DiscountCurve DiscountCurve::with_flat_extrapolation(bool on) const {
    DiscountCurve c = *this;
    c.flat_extrapolation_ = on;
    return c;
}

// Index of the segment [knot_i, knot_{i+1}) holding t, where knot_0 = 0 is the anchor.
std::size_t DiscountCurve::segment(Time t) const {
    CURVEFORGE_REQUIRE(t >= 0.0, ErrorKind::Domain, "curve evaluated at negative time");
    const Time last = pillars_.back().maturity;
    if (t > last) {
        CURVEFORGE_REQUIRE(flat_extrapolation_, ErrorKind::Extrapolation,
                           "time " + std::to_string(t) + " beyond last pillar " + std::to_string(last));
        return pillars_.size() - 1;
    }
    const auto it = std::upper_bound(pillars_.begin(), pillars_.end(), t,
                                     [](Time v, const Pillar& p) { return v < p.maturity; });
    const auto i = static_cast<std::size_t>(it - pillars_.begin());
    return std::min(i, pillars_.size() - 1);
}

double DiscountCurve::segment_forward(std::size_t i) const {
    const Time t0 = i == 0 ? 0.0 : pillars_[i - 1].maturity;
    const double l0 = i == 0 ? 0.0 : log_df_[i - 1];
    return -(log_df_[i] - l0) / (pillars_[i].maturity - t0);
}

double DiscountCurve::log_discount(Time t) const {
    const std::size_t i = segment(t);
    const Time t0 = i == 0 ? 0.0 : pillars_[i - 1].maturity;
    const double l0 = i == 0 ? 0.0 : log_df_[i - 1];
    if (t == pillars_[i].maturity) return log_df_[i];
    return l0 - segment_forward(i) * (t - t0);
}

double DiscountCurve::discount(Time t) const { return std::exp(log_discount(t)); }

double DiscountCurve::forward(Time t) const { return segment_forward(segment(t)); }

DiscountCurve build_initial_curve(std::span<const BondQuote> quotes, const CurveBuildOptions& options) {
    CURVEFORGE_REQUIRE(quotes.size() >= 2, ErrorKind::Precondition,
                       "initial curve needs at least two quotes");
    const Date settlement = quotes.front().settlement;
    std::vector<Pillar> pillars;
    pillars.reserve(quotes.size());
    for (const auto& q : quotes) {
        CURVEFORGE_REQUIRE(q.settlement == settlement, ErrorKind::Precondition,
                           "all quotes must share one settlement date");
        const double y = ytm_from_price(q.bond, settlement, q.price, options.convention);
        const Time tau = year_fraction(settlement, q.bond.maturity);
        pillars.push_back({tau, zero_price_from_yield(y, tau)});
    }
    std::sort(pillars.begin(), pillars.end(),
              [](const Pillar& l, const Pillar& r) { return l.maturity < r.maturity; });
    for (std::size_t i = 1; i < pillars.size(); ++i)
        CURVEFORGE_REQUIRE(pillars[i].maturity != pillars[i - 1].maturity, ErrorKind::Ambiguity,
                           "two quotes share maturity " + std::to_string(pillars[i].maturity));
    CURVEFORGE_REQUIRE(pillars.front().maturity <= options.short_anchor_max, ErrorKind::Precondition,
                       "initial curve needs a short anchor quote");
    return DiscountCurve(std::move(pillars), settlement);
}

double instantaneous_forward(const DiscountCurve& curve, Time t) { return curve.forward(t); }

}  // namespace curveforge
