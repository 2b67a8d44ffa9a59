#include "curveforge/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

#include "curveforge/error.hpp"

namespace curveforge::io {

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

double parse_double(std::string_view s) {
    double v = 0.0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    CURVEFORGE_REQUIRE(ec == std::errc{} && ptr == s.data() + s.size() && !s.empty(), ErrorKind::Domain,
                       "malformed number '" + std::string(s) + "'");
    return v;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

long column(const CsvTable& t, std::string_view name) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    return it == t.header.end() ? -1 : static_cast<long>(it - t.header.begin());
}

void require_header_prefix(const CsvTable& t, const fs::path& path, std::initializer_list<std::string_view> expected) {
    std::size_t i = 0;
    for (auto name : expected) {
        CURVEFORGE_REQUIRE(i < t.header.size() && t.header[i] == name, ErrorKind::Ingestion,
                           path.string() + ": header must start with the expected columns (missing '" +
                               std::string(name) + "' at position " + std::to_string(i + 1) + ")");
        ++i;
    }
}

// Accumulates per-line problems so one error can list all of them.
class LineErrors {
public:
    explicit LineErrors(fs::path path) : path_(std::move(path)) {}
    void add(std::size_t line, const std::string& what) {
        msg_ << "\n  line " << line << ": " << what;
        ++count_;
    }
    void raise_if_any() const {
        if (count_ > 0)
            throw Error(ErrorKind::Ingestion,
                        path_.string() + ": " + std::to_string(count_) + " malformed row(s)" + msg_.str());
    }

private:
    fs::path path_;
    std::ostringstream msg_;
    std::size_t count_ = 0;
};

bool parse_bool(std::string_view s) {
    if (s == "1" || s == "true" || s == "TRUE" || s == "True" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "FALSE" || s == "False" || s == "no") return false;
    throw Error(ErrorKind::Domain, "malformed boolean '" + std::string(s) + "'");
}

std::string error_text(const std::exception& e) { return e.what(); }

}  // namespace

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    CURVEFORGE_REQUIRE(in.good(), ErrorKind::Ingestion, "cannot open " + path.string());
    CsvTable t;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        if (t.header.empty()) {
            t.header = split(line);
            continue;
        }
        t.rows.push_back(split(line));
        t.lines.push_back(n);
    }
    CURVEFORGE_REQUIRE(!t.header.empty(), ErrorKind::Ingestion, path.string() + ": missing header");
    return t;
}

void write_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        CURVEFORGE_REQUIRE(out.good(), ErrorKind::Domain, "cannot write " + tmp.string());
        out << content;
        out.flush();
        CURVEFORGE_REQUIRE(out.good(), ErrorKind::Domain, "write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorKind::Domain, "cannot move output into place at " + path.string());
    }
}

std::vector<CouponBond> read_bonds(const fs::path& path) {
    const auto t = read_csv(path);
    require_header_prefix(t, path, {"id", "face", "coupon_rate", "frequency", "maturity", "first_coupon"});
    LineErrors errors(path);
    std::vector<CouponBond> bonds;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        try {
            CURVEFORGE_REQUIRE(r.size() >= 6, ErrorKind::Ingestion, "expected 6 fields");
            CouponBond b{r[0], parse_double(r[1]), parse_double(r[2]), 0, Date::parse(r[4]), Date::parse(r[5])};
            const double f = parse_double(r[3]);
            b.frequency = static_cast<int>(f);
            CURVEFORGE_REQUIRE(static_cast<double>(b.frequency) == f, ErrorKind::Domain, "frequency must be an integer");
            b.validate();
            bonds.push_back(std::move(b));
        } catch (const Error& e) {
            errors.add(t.lines[i], error_text(e));
        }
    }
    errors.raise_if_any();
    return bonds;
}

std::vector<BondQuote> read_bond_quotes(const fs::path& path, const std::vector<CouponBond>& bonds) {
    const auto t = read_csv(path);
    require_header_prefix(t, path, {"id", "settlement", "price"});
    LineErrors errors(path);
    std::vector<BondQuote> quotes;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        try {
            CURVEFORGE_REQUIRE(r.size() >= 3, ErrorKind::Ingestion, "expected 3 fields");
            const auto it = std::find_if(bonds.begin(), bonds.end(), [&](const CouponBond& b) { return b.id == r[0]; });
            CURVEFORGE_REQUIRE(it != bonds.end(), ErrorKind::Ingestion, "unknown bond id '" + r[0] + "'");
            const double price = parse_double(r[2]);
            CURVEFORGE_REQUIRE(price > 0.0, ErrorKind::Domain, "price must be positive");
            quotes.push_back({*it, Date::parse(r[1]), price});
        } catch (const Error& e) {
            errors.add(t.lines[i], error_text(e));
        }
    }
    errors.raise_if_any();
    return quotes;
}

PricePanel ingest_panel(const fs::path& path, const std::vector<CouponBond>* bonds) {
    const auto t = read_csv(path);
    require_header_prefix(t, path, {"date", "instrument_id", "price"});
    const long c_mat = column(t, "maturity");
    const long c_neg = column(t, "negotiated");
    LineErrors errors(path);

    std::vector<Instrument> instruments;
    std::map<Date, PanelObservation> by_date;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        try {
            CURVEFORGE_REQUIRE(r.size() == t.header.size(), ErrorKind::Ingestion,
                               "expected " + std::to_string(t.header.size()) + " fields, got " + std::to_string(r.size()));
            const Date date = Date::parse(r[0]);
            const std::string& id = r[1];
            CURVEFORGE_REQUIRE(!id.empty(), ErrorKind::Ingestion, "empty instrument_id");
            const double price = parse_double(r[2]);
            CURVEFORGE_REQUIRE(price > 0.0 && price <= 1.0, ErrorKind::Domain,
                               "price " + r[2] + " outside (0, 1]");

            std::optional<Date> maturity;
            if (c_mat >= 0 && !r[static_cast<std::size_t>(c_mat)].empty())
                maturity = Date::parse(r[static_cast<std::size_t>(c_mat)]);
            if (!maturity && bonds != nullptr) {
                const auto b = std::find_if(bonds->begin(), bonds->end(), [&](const CouponBond& x) { return x.id == id; });
                if (b != bonds->end()) maturity = b->maturity;
            }
            auto inst = std::find_if(instruments.begin(), instruments.end(), [&](const Instrument& x) { return x.id == id; });
            if (inst == instruments.end()) {
                CURVEFORGE_REQUIRE(maturity.has_value(), ErrorKind::Ingestion,
                                   "no maturity known for instrument '" + id + "'");
                instruments.push_back({id, *maturity});
                inst = std::prev(instruments.end());
            } else {
                CURVEFORGE_REQUIRE(!maturity || *maturity == inst->maturity, ErrorKind::Ingestion,
                                   "conflicting maturity for instrument '" + id + "'");
            }
            CURVEFORGE_REQUIRE(inst->maturity > date, ErrorKind::Ingestion,
                               "instrument '" + id + "' quoted on or after maturity");

            auto& obs = by_date[date];
            obs.date = date;
            CURVEFORGE_REQUIRE(obs.prices.emplace(id, price).second, ErrorKind::Ingestion,
                               "duplicate quote for '" + id + "' on " + date.iso());
            if (c_neg >= 0) obs.negotiated[id] = parse_bool(r[static_cast<std::size_t>(c_neg)]);
        } catch (const Error& e) {
            errors.add(t.lines[i], error_text(e));
        }
    }
    errors.raise_if_any();
    std::vector<PanelObservation> observations;
    observations.reserve(by_date.size());
    for (auto& [d, obs] : by_date) observations.push_back(std::move(obs));
    return PricePanel(std::move(instruments), std::move(observations));
}

void write_panel(const fs::path& path, const PricePanel& panel) {
    bool any_flag = false;
    for (const auto& obs : panel.observations()) any_flag = any_flag || !obs.negotiated.empty();
    std::ostringstream out;
    out << "date,instrument_id,price,maturity" << (any_flag ? ",negotiated" : "") << '\n';
    for (const auto& obs : panel.observations()) {
        for (const auto& inst : panel.instruments()) {
            const auto it = obs.prices.find(inst.id);
            if (it == obs.prices.end()) continue;
            out << obs.date.iso() << ',' << inst.id << ',' << format_double(it->second) << ','
                << inst.maturity.iso();
            if (any_flag) {
                const auto n = obs.negotiated.find(inst.id);
                out << ',' << (n == obs.negotiated.end() || n->second ? "1" : "0");
            }
            out << '\n';
        }
    }
    write_atomic(path, out.str());
}

DiscountCurve read_curve(const fs::path& path) {
    const auto t = read_csv(path);
    require_header_prefix(t, path, {"asof", "maturity_years", "discount_factor"});
    LineErrors errors(path);
    std::optional<Date> asof;
    std::vector<Pillar> pillars;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        try {
            CURVEFORGE_REQUIRE(r.size() >= 3, ErrorKind::Ingestion, "expected 3 fields");
            if (!r[0].empty()) {
                const Date d = Date::parse(r[0]);
                CURVEFORGE_REQUIRE(!asof || *asof == d, ErrorKind::Ingestion, "curve rows disagree on asof");
                asof = d;
            }
            pillars.push_back({parse_double(r[1]), parse_double(r[2])});
        } catch (const Error& e) {
            errors.add(t.lines[i], error_text(e));
        }
    }
    errors.raise_if_any();
    try {
        return DiscountCurve(std::move(pillars), asof);
    } catch (const Error& e) {
        throw Error(ErrorKind::Ingestion, path.string() + ": " + e.what());
    }
}

void write_curve(const fs::path& path, const DiscountCurve& curve) {
    std::ostringstream out;
    out << "asof,maturity_years,discount_factor\n";
    const std::string asof = curve.asof() ? curve.asof()->iso() : "";
    for (const auto& p : curve.pillars())
        out << asof << ',' << format_double(p.maturity) << ',' << format_double(p.discount) << '\n';
    write_atomic(path, out.str());
}

std::vector<DatedQuotes> read_cross_sections(const fs::path& path) {
    const auto t = read_csv(path);
    require_header_prefix(t, path, {"date", "maturity_years", "zero_price"});
    const long c_short = column(t, "short_rate");
    LineErrors errors(path);
    std::map<Date, DatedQuotes> by_date;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        try {
            CURVEFORGE_REQUIRE(r.size() == t.header.size(), ErrorKind::Ingestion, "wrong field count");
            const Date d = Date::parse(r[0]);
            const double tau = parse_double(r[1]);
            const double price = parse_double(r[2]);
            CURVEFORGE_REQUIRE(tau > 0.0, ErrorKind::Domain, "maturity_years must be positive");
            CURVEFORGE_REQUIRE(price > 0.0 && price <= 1.0, ErrorKind::Domain, "zero_price outside (0, 1]");
            auto& dq = by_date[d];
            dq.asof = d;
            dq.quotes.push_back({tau, price});
            if (c_short >= 0 && !r[static_cast<std::size_t>(c_short)].empty()) {
                const double sr = parse_double(r[static_cast<std::size_t>(c_short)]);
                CURVEFORGE_REQUIRE(!dq.short_rate || *dq.short_rate == sr, ErrorKind::Ingestion,
                                   "conflicting short_rate on " + d.iso());
                dq.short_rate = sr;
            }
        } catch (const Error& e) {
            errors.add(t.lines[i], error_text(e));
        }
    }
    errors.raise_if_any();
    std::vector<DatedQuotes> out;
    for (auto& [d, dq] : by_date) {
        std::sort(dq.quotes.begin(), dq.quotes.end(), [](const ZeroQuote& l, const ZeroQuote& r) { return l.maturity < r.maturity; });
        out.push_back(std::move(dq));
    }
    return out;
}

std::string format_calibration_series(const CalibrationSeries& series) {
    std::ostringstream out;
    out << "date,param_name,value,objective,converged\n";
    for (const auto& rec : series.records) {
        if (!rec.result) {
            out << rec.asof.iso() << ",,,,0\n";
            continue;
        }
        for (const auto& [name, v] : named_values(rec.result->params))
            out << rec.asof.iso() << ',' << name << ',' << format_double(v) << ','
                << format_double(rec.result->objective) << ',' << (rec.result->converged ? 1 : 0) << '\n';
    }
    return out.str();
}

void write_calibration_series(const fs::path& path, const CalibrationSeries& series) {
    write_atomic(path, format_calibration_series(series));
}

std::vector<CalibrationRow> read_calibration_rows(const fs::path& path) {
    const auto t = read_csv(path);
    require_header_prefix(t, path, {"date", "param_name", "value", "objective", "converged"});
    LineErrors errors(path);
    std::vector<CalibrationRow> rows;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        try {
            CURVEFORGE_REQUIRE(r.size() == 5, ErrorKind::Ingestion, "expected 5 fields");
            rows.push_back({Date::parse(r[0]), r[1], r[2].empty() ? nan : parse_double(r[2]),
                            r[3].empty() ? nan : parse_double(r[3]), parse_bool(r[4])});
        } catch (const Error& e) {
            errors.add(t.lines[i], error_text(e));
        }
    }
    errors.raise_if_any();
    return rows;
}

std::string format_calibration_summary(const std::vector<ParameterSummary>& summary) {
    std::ostringstream out;
    out << "param_name,mean,sd,count\n";
    for (const auto& s : summary)
        out << s.name << ',' << format_double(s.mean) << ',' << (s.sd ? format_double(*s.sd) : "") << ','
            << s.count << '\n';
    return out.str();
}

void write_calibration_summary(const fs::path& path, const std::vector<ParameterSummary>& summary) {
    write_atomic(path, format_calibration_summary(summary));
}

std::vector<ParameterSummary> read_calibration_summary(const fs::path& path) {
    const auto t = read_csv(path);
    require_header_prefix(t, path, {"param_name", "mean", "sd", "count"});
    LineErrors errors(path);
    std::vector<ParameterSummary> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        try {
            CURVEFORGE_REQUIRE(r.size() == 4, ErrorKind::Ingestion, "expected 4 fields");
            const double n = parse_double(r[3]);
            CURVEFORGE_REQUIRE(n >= 0.0 && n == std::floor(n), ErrorKind::Domain, "count must be a whole number");
            out.push_back({r[0], parse_double(r[1]), r[2].empty() ? std::nullopt : std::optional<double>(parse_double(r[2])),
                           static_cast<std::size_t>(n)});
        } catch (const Error& e) {
            errors.add(t.lines[i], error_text(e));
        }
    }
    errors.raise_if_any();
    return out;
}

std::string format_params(const ModelParams& params) {
    std::ostringstream out;
    out << "model=" << to_string(kind_of(params)) << '\n';
    for (const auto& [name, v] : named_values(params)) out << name << '=' << format_double(v) << '\n';
    return out.str();
}

void write_params(const fs::path& path, const ModelParams& params) { write_atomic(path, format_params(params)); }

ModelParams read_params(const fs::path& path) {
    std::ifstream in(path);
    CURVEFORGE_REQUIRE(in.good(), ErrorKind::Ingestion, "cannot open " + path.string());
    std::optional<ModelKind> kind;
    std::vector<std::pair<std::string, double>> values;
    std::string line;
    LineErrors errors(path);
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        const std::string s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        const auto eq = s.find('=');
        try {
            CURVEFORGE_REQUIRE(eq != std::string::npos, ErrorKind::Ingestion, "expected key=value");
            const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
            if (key == "model") kind = parse_model_kind(value);
            else values.emplace_back(key, parse_double(value));
        } catch (const Error& e) {
            errors.add(n, error_text(e));
        }
    }
    errors.raise_if_any();
    CURVEFORGE_REQUIRE(kind.has_value(), ErrorKind::Ingestion, path.string() + ": missing model=");
    return params_from_named(*kind, values);
}

StateSeries read_states(const fs::path& path) {
    const auto t = read_csv(path);
    const bool two = t.header.size() >= 4 && t.header[2] == "x" && t.header[3] == "y";
    if (two) require_header_prefix(t, path, {"date", "t", "x", "y"});
    else require_header_prefix(t, path, {"date", "t", "r"});
    LineErrors errors(path);
    StateSeries s{two ? 2 : 1, {}};
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        try {
            CURVEFORGE_REQUIRE(r.size() == (two ? 4u : 3u), ErrorKind::Ingestion, "wrong field count");
            s.points.push_back({Date::parse(r[0]), parse_double(r[1]), parse_double(r[2]), two ? parse_double(r[3]) : 0.0});
        } catch (const Error& e) {
            errors.add(t.lines[i], error_text(e));
        }
    }
    errors.raise_if_any();
    return s;
}

void write_states(const fs::path& path, const StateSeries& states) {
    std::ostringstream out;
    out << (states.factors == 2 ? "date,t,x,y\n" : "date,t,r\n");
    for (const auto& p : states.points) {
        out << p.date.iso() << ',' << format_double(p.t) << ',' << format_double(p.x);
        if (states.factors == 2) out << ',' << format_double(p.y);
        out << '\n';
    }
    write_atomic(path, out.str());
}

std::string format_surface(const PriceSurface& surface) {
    std::ostringstream out;
    out << "date";
    for (const auto& g : surface.tenors) out << ",P_" << g.label;
    out << '\n';
    for (std::size_t k = 0; k < surface.dates.size(); ++k) {
        out << surface.dates[k].iso();
        for (const auto& v : surface.values[k]) {
            out << ',';
            if (v) out << format_double(*v);
        }
        out << '\n';
    }
    return out.str();
}

void write_surface(const fs::path& path, const PriceSurface& surface) { write_atomic(path, format_surface(surface)); }

PriceSurface read_surface(const fs::path& path) {
    const auto t = read_csv(path);
    const auto& grid = standard_tenor_grid();
    CURVEFORGE_REQUIRE(t.header.size() == grid.size() + 1 && t.header[0] == "date", ErrorKind::Ingestion,
                       path.string() + ": unexpected surface header");
    PriceSurface s;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        CURVEFORGE_REQUIRE(t.header[j + 1] == "P_" + std::string(grid[j].label), ErrorKind::Ingestion,
                           path.string() + ": unexpected surface column " + t.header[j + 1]);
        s.tenors.push_back(grid[j]);
    }
    LineErrors errors(path);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        try {
            CURVEFORGE_REQUIRE(r.size() == t.header.size(), ErrorKind::Ingestion, "wrong field count");
            std::vector<std::optional<double>> row;
            for (std::size_t j = 1; j < r.size(); ++j)
                row.push_back(r[j].empty() ? std::nullopt : std::optional<double>(parse_double(r[j])));
            s.dates.push_back(Date::parse(r[0]));
            s.values.push_back(std::move(row));
        } catch (const Error& e) {
            errors.add(t.lines[i], error_text(e));
        }
    }
    errors.raise_if_any();
    return s;
}

void write_violations(const fs::path& path, const ArbitrageReport& report) {
    std::ostringstream out;
    out << "tau_low,tau_high,p_low,p_high\n";
    for (const auto& v : report.violations)
        out << format_double(v.tau_low) << ',' << format_double(v.tau_high) << ',' << format_double(v.p_low) << ','
            << format_double(v.p_high) << '\n';
    write_atomic(path, out.str());
}

std::vector<PriceInversion> read_violations(const fs::path& path) {
    const auto t = read_csv(path);
    require_header_prefix(t, path, {"tau_low", "tau_high", "p_low", "p_high"});
    LineErrors errors(path);
    std::vector<PriceInversion> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        try {
            CURVEFORGE_REQUIRE(r.size() == 4, ErrorKind::Ingestion, "expected 4 fields");
            out.push_back({parse_double(r[0]), parse_double(r[1]), parse_double(r[2]), parse_double(r[3])});
        } catch (const Error& e) {
            errors.add(t.lines[i], error_text(e));
        }
    }
    errors.raise_if_any();
    return out;
}

std::string format_report_text(const ArbitrageReport& report) {
    std::ostringstream out;
    if (report.clean()) {
        out << "no static arbitrage: prices are non-increasing in maturity\n";
        return out.str();
    }
    out << report.violations.size() << " price inversion(s)\n";
    for (const auto& v : report.violations)
        out << "  P(" << format_double(v.tau_low) << ") = " << format_double(v.p_low) << " < P("
            << format_double(v.tau_high) << ") = " << format_double(v.p_high) << '\n';
    if (!report.derivative_sign_changes.empty()) {
        out << report.derivative_sign_changes.size() << " sign change(s) of dP/dT at";
        for (Time T : report.derivative_sign_changes) out << ' ' << format_double(T);
        out << '\n';
    }
    return out.str();
}

}  // namespace curveforge::io
