#include "curveforge/date.hpp"

#include <charconv>
#include <cstdio>

#include "curveforge/error.hpp"

namespace curveforge {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Ordering: return "ordering error";
        case ErrorKind::Domain: return "domain error";
        case ErrorKind::NoSolution: return "no-solution error";
        case ErrorKind::Ambiguity: return "ambiguity error";
        case ErrorKind::Precondition: return "precondition error";
        case ErrorKind::Extrapolation: return "extrapolation error";
        case ErrorKind::Conditioning: return "conditioning error";
        case ErrorKind::Boundary: return "boundary error";
        case ErrorKind::DegenerateStep: return "degenerate-step error";
        case ErrorKind::Resolution: return "resolution error";
        case ErrorKind::Ingestion: return "ingestion error";
        case ErrorKind::OptimizationFailed: return "optimization-failed error";
    }
    return "error";
}

namespace {

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    CURVEFORGE_REQUIRE(ymd.ok(), ErrorKind::Domain, "invalid calendar date");
    days_ = sys_days{ymd};
}

Date Date::parse(std::string_view iso) {
    const auto fail = [&] {
        return Error(ErrorKind::Domain, "malformed ISO-8601 date '" + std::string(iso) + "'");
    };
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') throw fail();
    int y = 0;
    unsigned m = 0, d = 0;
    if (!parse_int(iso.substr(0, 4), y) || !parse_int(iso.substr(5, 2), m) ||
        !parse_int(iso.substr(8, 2), d))
        throw fail();
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) throw fail();
    return Date{std::chrono::sys_days{ymd}};
}

std::string Date::iso() const {
    const auto v = ymd();
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(v.year()),
                  static_cast<unsigned>(v.month()), static_cast<unsigned>(v.day()));
    return buf;
}

Date Date::add_months(int n) const {
    using namespace std::chrono;
    const auto v = ymd();
    const year_month ym = year_month{v.year(), v.month()} + months{n};
    const auto last = year_month_day_last{ym.year(), month_day_last{ym.month()}}.day();
    const auto d = v.day() > last ? last : v.day();
    return Date{sys_days{year_month_day{ym.year(), ym.month(), d}}};
}

Time year_fraction(Date d1, Date d2) {
    CURVEFORGE_REQUIRE(d1 <= d2, ErrorKind::Ordering,
                       "year_fraction requires d1 <= d2 (" + d1.iso() + " > " + d2.iso() + ")");
    return static_cast<double>(d2.serial() - d1.serial()) / 365.0;
}

}  // namespace curveforge
