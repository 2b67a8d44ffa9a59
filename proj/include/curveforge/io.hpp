#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curveforge/calibration.hpp"
#include "curveforge/curve.hpp"
#include "curveforge/diagnostics.hpp"
#include "curveforge/model.hpp"
#include "curveforge/panel.hpp"

namespace curveforge::io {

namespace fs = std::filesystem;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
/// Locale-independent strict parse. Throws Error(Domain).
double parse_double(std::string_view s);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;  // 1-based source line of each row
};

/// Plain comma-separated reader (no quoting). Blank lines are skipped.
CsvTable read_csv(const fs::path& path);

/// Writes through a temporary sibling file and renames it into place.
void write_atomic(const fs::path& path, const std::string& content);

/// `id,face,coupon_rate,frequency,maturity,first_coupon`
std::vector<CouponBond> read_bonds(const fs::path& path);
/// `id,settlement,price`, ids resolved against `bonds`.
std::vector<BondQuote> read_bond_quotes(const fs::path& path, const std::vector<CouponBond>& bonds);

/// Long-format panel `date,instrument_id,price` with optional `maturity` and
/// `negotiated` columns. Maturities come from the `maturity` column or from
/// `bonds`. Every malformed row is reported, with its line number, in one
/// Error(Ingestion).
PricePanel ingest_panel(const fs::path& path, const std::vector<CouponBond>* bonds = nullptr);
void write_panel(const fs::path& path, const PricePanel& panel);

/// `asof,maturity_years,discount_factor`
DiscountCurve read_curve(const fs::path& path);
void write_curve(const fs::path& path, const DiscountCurve& curve);

struct DatedQuotes {
    Date asof;
    std::vector<ZeroQuote> quotes;
    std::optional<double> short_rate;
};

/// `date,maturity_years,zero_price` with an optional `short_rate` column,
/// grouped by date in increasing order.
std::vector<DatedQuotes> read_cross_sections(const fs::path& path);

/// `date,param_name,value,objective,converged`
void write_calibration_series(const fs::path& path, const CalibrationSeries& series);
std::string format_calibration_series(const CalibrationSeries& series);

struct CalibrationRow {
    Date date;
    std::string param_name;
    double value;
    double objective;
    bool converged;
};
std::vector<CalibrationRow> read_calibration_rows(const fs::path& path);

/// `param_name,mean,sd,count`; sd is empty when undefined.
void write_calibration_summary(const fs::path& path, const std::vector<ParameterSummary>& summary);
std::string format_calibration_summary(const std::vector<ParameterSummary>& summary);
std::vector<ParameterSummary> read_calibration_summary(const fs::path& path);

/// Flat `key=value` lines: `model=<name>` then one line per parameter.
ModelParams read_params(const fs::path& path);
void write_params(const fs::path& path, const ModelParams& params);
std::string format_params(const ModelParams& params);

/// `date,t,r` for one-factor models, `date,t,x,y` for G2++.
StateSeries read_states(const fs::path& path);
void write_states(const fs::path& path, const StateSeries& states);

/// `date,P_1m,...,P_25y`; failed cells are empty.
void write_surface(const fs::path& path, const PriceSurface& surface);
std::string format_surface(const PriceSurface& surface);
PriceSurface read_surface(const fs::path& path);

/// `tau_low,tau_high,p_low,p_high`
void write_violations(const fs::path& path, const ArbitrageReport& report);
std::vector<PriceInversion> read_violations(const fs::path& path);
std::string format_report_text(const ArbitrageReport& report);

}  // namespace curveforge::io
