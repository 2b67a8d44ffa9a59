#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace curveforge {

/// Model time in years.
using Time = double;

/// Calendar date with day resolution.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
    Date(int year, unsigned month, unsigned day);

    /// Parses strict ISO-8601 `YYYY-MM-DD`. Throws Error(Domain) on malformed input.
    static Date parse(std::string_view iso);

    std::string iso() const;
    std::chrono::year_month_day ymd() const { return std::chrono::year_month_day{days_}; }
    std::chrono::sys_days days() const { return days_; }
    long serial() const { return days_.time_since_epoch().count(); }

    Date add_days(long n) const { return Date{days_ + std::chrono::days{n}}; }
    /// Calendar month shift; the day is clamped to the end of the target month.
    Date add_months(int n) const;

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

/// ACT/365-fixed year fraction between two dates. Throws Error(Ordering) if d1 > d2.
Time year_fraction(Date d1, Date d2);

/// Signed ACT/365-fixed offset of `d` from `origin`, used for model clocks.
inline Time model_time(Date origin, Date d) {
    return static_cast<double>(d.serial() - origin.serial()) / 365.0;
}

}  // namespace curveforge
