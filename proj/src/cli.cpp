#include "curveforge/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <unistd.h>

#include "curveforge/calibration.hpp"
#include "curveforge/curve.hpp"
#include "curveforge/diagnostics.hpp"
#include "curveforge/error.hpp"
#include "curveforge/estimation.hpp"
#include "curveforge/io.hpp"
#include "curveforge/montecarlo.hpp"

namespace curveforge::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string out_dir;
    std::string config;
    std::string model;
    std::string panel, curve, bonds, quotes, cross_section, params, states, surface;
    std::vector<std::string> instruments;
    bool negotiated_only = false;
    bool clean = false;
    bool per_date_curve = false;
    bool printed_formula = false;
    bool weighted = false;
    bool flat_extrapolation = false;
    bool search = false;
    int restarts = 16;
    std::uint64_t seed = 0;
    double short_anchor = 0.5;
    double short_tenor = 0.25;
    double maturity = 1.0;
    double time = 0.0;
    std::size_t paths = 100000;
    double step = 1.0 / 252.0;
    std::string start = "2010-01-04";
    int count = 200;
    int gap_days = 7;
    std::optional<double> x0;
    double y0 = 0.0;
};

// Every command writes here and returns its headline results for the run log.
// Files are staged in a private subdirectory and moved into place only once
// the whole command has succeeded.
class Context {
public:
    Context(const Options& o, std::ostream& out)
        : opt(o), out(out), staging_(fs::path(o.out_dir) / (".staging-" + std::to_string(::getpid()))) {}
    ~Context() {
        std::error_code ec;
        fs::remove_all(staging_, ec);
    }
    const Options& opt;
    std::ostream& out;
    std::vector<std::string> written;

    fs::path path(const std::string& name) {
        fs::create_directories(staging_);
        written.push_back(name);
        return staging_ / name;
    }
    void commit() {
        for (const auto& name : written) fs::rename(staging_ / name, fs::path(opt.out_dir) / name);
    }

private:
    fs::path staging_;
};

HullWhiteDamping damping(const Options& o) {
    return o.printed_formula ? HullWhiteDamping::Printed : HullWhiteDamping::Standard;
}

DiscountCurve load_curve(const Options& o) {
    DiscountCurve c = io::read_curve(o.curve);
    return o.flat_extrapolation ? c.with_flat_extrapolation(true) : c;
}

std::optional<DiscountCurve> maybe_curve(const Options& o) {
    if (o.curve.empty()) return std::nullopt;
    return load_curve(o);
}

const DiscountCurve* ptr(const std::optional<DiscountCurve>& c) { return c ? &*c : nullptr; }

ModelParams load_params(const Options& o) {
    ModelParams p = io::read_params(o.params);
    if (!o.model.empty() && parse_model_kind(o.model) != kind_of(p))
        throw UsageError("--model " + o.model + " does not match the params file (" +
                         std::string(to_string(kind_of(p))) + ")");
    return p;
}

json params_json(const ModelParams& p) {
    json j = json::object();
    for (const auto& [name, v] : named_values(p)) j[name] = v;
    return j;
}

std::string violations_with_dates(const std::vector<std::pair<Date, ArbitrageReport>>& reports) {
    std::ostringstream csv;
    csv << "tau_low,tau_high,p_low,p_high,date\n";
    for (const auto& [d, r] : reports)
        for (const auto& v : r.violations)
            csv << io::format_double(v.tau_low) << ',' << io::format_double(v.tau_high) << ','
                << io::format_double(v.p_low) << ',' << io::format_double(v.p_high) << ',' << d.iso() << '\n';
    return csv.str();
}

json cmd_bootstrap(Context& cx) {
    const auto& o = cx.opt;
    const auto bonds = io::read_bonds(o.bonds);
    const auto quotes = io::read_bond_quotes(o.quotes, bonds);
    CurveBuildOptions build;
    build.convention = o.clean ? QuoteConvention::Clean : QuoteConvention::Dirty;
    build.short_anchor_max = o.short_anchor;
    const DiscountCurve curve = build_initial_curve(quotes, build);
    const ArbitrageReport report = check_monotone(curve.pillars());
    io::write_curve(cx.path("curve.csv"), curve);
    io::write_violations(cx.path("violations.csv"), report);
    cx.out << "curve with " << curve.pillars().size() << " pillars as of " << curve.asof()->iso() << '\n'
           << io::format_report_text(report);
    return {{"pillars", curve.pillars().size()}, {"inversions", report.violations.size()}};
}

json cmd_fit_ml(Context& cx) {
    const auto& o = cx.opt;
    const ModelKind kind = parse_model_kind(o.model);
    std::optional<std::vector<CouponBond>> bonds;
    if (!o.bonds.empty()) bonds = io::read_bonds(o.bonds);
    PricePanel panel = io::ingest_panel(o.panel, bonds ? &*bonds : nullptr);
    if (o.negotiated_only) panel = panel.negotiated_only();
    if (!o.instruments.empty()) panel = panel.select(o.instruments);
    const auto curve = maybe_curve(o);
    if (kind == ModelKind::G2pp && !curve) throw UsageError("fit-ml --model g2pp requires --curve");

    FitConfig config;
    config.restarts = o.restarts;
    config.seed = o.seed;
    const FitResult fit = fit_ml(kind, panel, ptr(curve), config);
    io::write_params(cx.path("params.txt"), fit.params);
    io::write_states(cx.path("states.csv"), fit.states);

    cx.out << io::format_params(fit.params) << "loglik=" << io::format_double(fit.loglik) << '\n'
           << "observations=" << fit.states.points.size() << " converged=" << fit.report.converged
           << " at_boundary=" << fit.report.at_boundary << '\n';
    return {{"params", params_json(fit.params)},
            {"loglik", fit.loglik},
            {"observations", fit.states.points.size()},
            {"evaluations", fit.report.evaluations},
            {"failed_restarts", fit.report.failed_restarts},
            {"converged", fit.report.converged},
            {"at_boundary", fit.report.at_boundary}};
}

double proxy_short_rate(const std::vector<ZeroQuote>& quotes, Time tenor) {
    std::vector<Pillar> pillars;
    for (const auto& q : quotes) pillars.push_back({q.maturity, q.price});
    const DiscountCurve c(std::move(pillars), std::nullopt, true);
    return -c.log_discount(tenor) / tenor;
}

json cmd_calibrate(Context& cx) {
    const auto& o = cx.opt;
    const ModelKind kind = parse_model_kind(o.model);
    const DiscountCurve base = load_curve(o);
    CURVEFORGE_REQUIRE(base.asof().has_value(), ErrorKind::Precondition, "calibration curve needs an asof date");
    CURVEFORGE_REQUIRE(o.short_tenor > 0.0, ErrorKind::Domain, "--short-tenor must be positive");
    const auto days = io::read_cross_sections(o.cross_section);

    std::vector<CrossSection> sections;
    for (std::size_t k = 0; k < days.size(); ++k) {
        const auto& day = days[k];
        DiscountCurve curve = base;
        if (o.per_date_curve && k > 0) {
            std::vector<Pillar> pillars;
            for (const auto& q : days[k - 1].quotes) pillars.push_back({q.maturity, q.price});
            curve = DiscountCurve(std::move(pillars), days[k - 1].asof, o.flat_extrapolation);
        }
        const double r = day.short_rate ? *day.short_rate : proxy_short_rate(day.quotes, o.short_tenor);
        sections.push_back({day.asof, model_time(*curve.asof(), day.asof), day.quotes, r, std::move(curve)});
    }

    CalibrationConfig config;
    config.seed = o.seed;
    config.damping = damping(o);
    config.maturity_weighted = o.weighted;
    const CalibrationSeries series = calibrate_series(kind, sections, config);
    io::write_calibration_series(cx.path("calibration.csv"), series);
    io::write_calibration_summary(cx.path("calibration_summary.csv"), series.summary);

    std::size_t failed = 0;
    for (const auto& rec : series.records)
        if (!rec.result) {
            ++failed;
            cx.out << rec.asof.iso() << " failed: " << rec.error << '\n';
        }
    json summary = json::object();
    for (const auto& s : series.summary) {
        cx.out << s.name << ": mean " << io::format_double(s.mean) << " sd "
               << (s.sd ? io::format_double(*s.sd) : std::string("n/a")) << " over " << s.count << " dates\n";
        summary[s.name] = {{"mean", s.mean}, {"sd", s.sd ? json(*s.sd) : json(nullptr)}};
    }
    return {{"dates", series.records.size()}, {"failed_dates", failed}, {"summary", summary}};
}

json cmd_price(Context& cx) {
    const auto& o = cx.opt;
    const ModelParams params = load_params(o);
    const auto curve = maybe_curve(o);
    if (needs_curve(kind_of(params)) && !curve) throw UsageError("price: this model requires --curve");
    CURVEFORGE_REQUIRE(o.maturity >= 0.0, ErrorKind::Domain, "--maturity must be non-negative");
    const StateSeries states = io::read_states(o.states);
    CURVEFORGE_REQUIRE(states.factors == factor_count(kind_of(params)), ErrorKind::Precondition,
                       "state file does not match the model's factor count");

    std::ostringstream csv;
    csv << "date,t,maturity,price\n";
    for (const auto& s : states.points) {
        const Time T = s.t + o.maturity;
        const double p = model_price(params, ptr(curve), s, T, damping(o));
        csv << s.date.iso() << ',' << io::format_double(s.t) << ',' << io::format_double(T) << ','
            << io::format_double(p) << '\n';
    }
    io::write_atomic(cx.path("prices.csv"), csv.str());
    cx.out << csv.str();
    return {{"rows", states.points.size()}};
}

json cmd_surface(Context& cx) {
    const auto& o = cx.opt;
    const ModelParams params = load_params(o);
    const auto curve = maybe_curve(o);
    if (needs_curve(kind_of(params)) && !curve) throw UsageError("surface: this model requires --curve");
    StateSeries states;
    if (!o.states.empty()) {
        states = io::read_states(o.states);
    } else if (!o.panel.empty()) {
        PricePanel panel = io::ingest_panel(o.panel);
        if (!o.instruments.empty()) panel = panel.select(o.instruments);
        const std::optional<Date> origin = curve ? curve->asof() : std::nullopt;
        states = filter_states(params, ptr(curve), ObservedSeries::from_panel(panel, origin));
    } else {
        throw UsageError("surface needs --states or --panel");
    }
    const PriceSurface surface = build_surface(params, states, ptr(curve), damping(o));
    io::write_surface(cx.path("surface.csv"), surface);
    std::size_t missing = 0;
    for (const auto& row : surface.values)
        missing += static_cast<std::size_t>(std::count(row.begin(), row.end(), std::nullopt));
    cx.out << "surface: " << surface.dates.size() << " dates x " << surface.tenors.size() << " maturities, "
           << missing << " missing cells\n";
    return {{"dates", surface.dates.size()}, {"maturities", surface.tenors.size()}, {"missing_cells", missing}};
}

json cmd_check_arbitrage(Context& cx) {
    const auto& o = cx.opt;
    const int sources = !o.surface.empty() + !o.cross_section.empty() + o.search;
    if (sources > 1 || (sources == 0 && o.curve.empty()))
        throw UsageError("check-arbitrage needs exactly one of --curve, --surface, --cross-section, --search");

    if (o.search) {
        if (o.params.empty() || o.curve.empty()) throw UsageError("--search needs --params and --curve");
        const ModelParams params = load_params(o);
        if (kind_of(params) != ModelKind::G2pp) throw UsageError("--search applies to g2pp parameters");
        const auto& p = std::get<G2Params>(params);
        const DiscountCurve curve = load_curve(o);
        const auto witness = search_g2pp_arbitrage(p, curve, o.time);
        ArbitrageReport report;
        json head = {{"found", witness.has_value()}};
        if (witness) {
            std::vector<Time> grid;
            for (int i = 0; i <= 96; ++i) grid.push_back(o.time + 1.0 + 0.25 * i);
            report = audit_g2pp_slice(p, curve, witness->state, grid);
            for (auto& v : report.violations) {
                v.tau_low -= o.time;
                v.tau_high -= o.time;
            }
            head["x"] = witness->state.x;
            head["y"] = witness->state.y;
            head["maturity"] = witness->maturity;
            head["dpdt"] = witness->derivative;
            cx.out << "positive dP/dT " << io::format_double(witness->derivative) << " at x="
                   << io::format_double(witness->state.x) << " y=" << io::format_double(witness->state.y)
                   << " T=" << io::format_double(witness->maturity) << '\n';
        } else {
            cx.out << "no state on the search grid gives a positive dP/dT\n";
        }
        io::write_violations(cx.path("violations.csv"), report);
        const std::string text = io::format_report_text(report);
        io::write_atomic(cx.path("arbitrage_report.txt"), text);
        cx.out << text;
        head["inversions"] = report.violations.size();
        return head;
    }

    if (!o.curve.empty() && sources == 0) {
        const DiscountCurve curve = io::read_curve(o.curve);
        const ArbitrageReport report = check_monotone(curve.pillars());
        io::write_violations(cx.path("violations.csv"), report);
        const std::string text = io::format_report_text(report);
        io::write_atomic(cx.path("arbitrage_report.txt"), text);
        cx.out << text;
        return {{"inversions", report.violations.size()}};
    }

    std::vector<std::pair<Date, ArbitrageReport>> reports;
    if (!o.surface.empty()) {
        const PriceSurface s = io::read_surface(o.surface);
        for (std::size_t k = 0; k < s.dates.size(); ++k) {
            std::vector<Pillar> row;
            for (std::size_t j = 0; j < s.tenors.size(); ++j)
                if (s.values[k][j]) row.push_back({s.tenors[j].tenor, *s.values[k][j]});
            reports.emplace_back(s.dates[k], check_monotone(row));
        }
    } else {
        for (const auto& day : io::read_cross_sections(o.cross_section)) {
            std::vector<Pillar> row;
            for (const auto& q : day.quotes) row.push_back({q.maturity, q.price});
            reports.emplace_back(day.asof, check_monotone(row));
        }
    }
    std::ostringstream text;
    std::size_t total = 0, dirty_dates = 0;
    for (const auto& [d, r] : reports) {
        total += r.violations.size();
        if (r.clean()) continue;
        ++dirty_dates;
        text << d.iso() << ": " << io::format_report_text(r);
    }
    if (total == 0) text << io::format_report_text(ArbitrageReport{});
    io::write_atomic(cx.path("violations.csv"), violations_with_dates(reports));
    io::write_atomic(cx.path("arbitrage_report.txt"), text.str());
    cx.out << text.str();
    return {{"dates", reports.size()}, {"dates_with_inversions", dirty_dates}, {"inversions", total}};
}

json cmd_oracle(Context& cx) {
    const auto& o = cx.opt;
    const ModelKind kind = parse_model_kind(o.model);
    auto cases = standard_oracle_cases(kind);
    if (!o.params.empty()) {
        const ModelParams p = load_params(o);
        for (auto& c : cases) c.params = p;
    }
    const DiscountCurve curve = o.curve.empty() ? oracle_curve() : load_curve(o);
    const DiscountCurve* cp = needs_curve(kind) ? &curve : nullptr;
    SimConfig sim;
    sim.n_paths = o.paths;
    sim.step = o.step;
    sim.seed = o.seed;

    std::ostringstream csv;
    csv << "case,t,maturity,closed_form,mc_value,std_error,z_score\n";
    double worst = 0.0;
    for (const auto& c : cases) {
        const double closed = model_price(c.params, cp, c.state, c.maturity);
        const McEstimate mc = mc_zero_price(c.params, cp, c.state, c.maturity, sim);
        const double diff = closed - mc.value;
        const double z = mc.std_error > 0.0 ? diff / mc.std_error : (diff == 0.0 ? 0.0 : HUGE_VAL);
        worst = std::max(worst, std::abs(z));
        csv << c.label << ',' << io::format_double(c.state.t) << ',' << io::format_double(c.maturity) << ','
            << io::format_double(closed) << ',' << io::format_double(mc.value) << ','
            << io::format_double(mc.std_error) << ',' << io::format_double(z) << '\n';
    }
    io::write_atomic(cx.path("oracle.csv"), csv.str());
    cx.out << csv.str() << "max |z| = " << io::format_double(worst) << '\n';
    return {{"cases", cases.size()}, {"max_abs_z", worst}, {"within_3_se", worst < 3.0}};
}

std::vector<Instrument> parse_instruments(const std::vector<std::string>& specs) {
    std::vector<Instrument> out;
    for (const auto& s : specs) {
        const auto colon = s.find(':');
        if (colon == std::string::npos || colon == 0)
            throw UsageError("--instrument expects ID:YYYY-MM-DD, got '" + s + "'");
        out.push_back({s.substr(0, colon), Date::parse(s.substr(colon + 1))});
    }
    return out;
}

json cmd_synth(Context& cx) {
    const auto& o = cx.opt;
    const ModelParams params = load_params(o);
    const ModelKind kind = kind_of(params);
    if (kind != ModelKind::Vasicek && kind != ModelKind::G2pp) throw UsageError("synth supports vasicek and g2pp");
    const auto curve = maybe_curve(o);
    if (kind == ModelKind::G2pp && !curve) throw UsageError("synth --model g2pp requires --curve");
    CURVEFORGE_REQUIRE(o.count >= 1 && o.gap_days >= 1, ErrorKind::Domain, "--count and --gap-days must be positive");

    const Date start = Date::parse(o.start);
    std::vector<Date> schedule;
    for (int k = 0; k < o.count; ++k) schedule.push_back(start.add_days(static_cast<long>(k) * o.gap_days));
    std::vector<Instrument> instruments = parse_instruments(o.instruments);
    if (instruments.empty()) {
        if (kind == ModelKind::Vasicek) instruments = {{"Z45", start.add_months(45 * 12)}};
        else instruments = {{"Z12", start.add_months(12 * 12)}, {"Z20", start.add_months(20 * 12)}};
    }
    const Date origin = curve && curve->asof() ? *curve->asof() : start;
    StatePoint initial{start, model_time(origin, start), 0.0, o.y0};
    initial.x = o.x0 ? *o.x0 : (kind == ModelKind::Vasicek ? std::get<VasicekParams>(params).b : 0.0);

    const SyntheticPanel synth = synth_panel(params, ptr(curve), schedule, instruments, initial, o.seed);
    io::write_panel(cx.path("panel.csv"), synth.panel);
    io::write_states(cx.path("states.csv"), synth.states);
    cx.out << "panel: " << synth.panel.size() << " dates x " << synth.panel.instruments().size()
           << " instruments\n";
    return {{"dates", synth.panel.size()}, {"instruments", synth.panel.instruments().size()}};
}

// Reads flat key=value lines and splices them in as --key=value ahead of the
// user's own flags, skipping keys the user already set.
std::vector<std::string> apply_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty() || args.empty()) return args;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    const auto given = [&](const std::string& key) {
        return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == "--" + key || a.rfind("--" + key + "=", 0) == 0;
        });
    };
    std::vector<std::string> extra;
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(n) + ": expected key=value");
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty() || key == "config") throw UsageError(path + ":" + std::to_string(n) + ": bad key");
        if (!given(key)) extra.push_back("--" + key + "=" + value);
    }
    args.insert(args.begin() + 1, extra.begin(), extra.end());
    return args;
}

void append_run_log(const fs::path& dir, const json& entry) {
    std::ofstream log(dir / "run_log.jsonl", std::ios::app);
    log << entry.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    Options o;
    const std::map<std::string, std::uint64_t> default_seed{{"fit-ml", 1}, {"calibrate", 7}, {"oracle", 42}, {"synth", 42}};
    if (!raw_args.empty() && default_seed.count(raw_args.front()) > 0) o.seed = default_seed.at(raw_args.front());
    CLI::App app{"Term-structure estimation, calibration and arbitrage audit"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--out", o.out_dir, "Output directory");
        sub->add_option("--config", o.config, "Flat key=value file; command-line flags take precedence");
    };
    const auto model_opt = [&](CLI::App* sub, std::vector<std::string> allowed, bool required) {
        auto* opt = sub->add_option("--model", o.model, "Model")->check(CLI::IsMember(allowed));
        if (required) opt->required();
    };
    const auto existing = [&](CLI::App* sub, const std::string& name, std::string& target, const std::string& help,
                              bool required = false) {
        auto* opt = sub->add_option(name, target, help)->check(CLI::ExistingFile);
        if (required) opt->required();
    };
    const std::vector<std::string> all_models{"vasicek", "g2pp", "holee", "hullwhite"};

    auto* bootstrap = app.add_subcommand("bootstrap", "Build the initial discount curve from coupon-bond quotes");
    existing(bootstrap, "--bonds", o.bonds, "Bond definitions CSV", true);
    existing(bootstrap, "--quotes", o.quotes, "Bond quotes CSV (id,settlement,price)", true);
    bootstrap->add_flag("--clean", o.clean, "Quotes are clean prices; accrued interest is added");
    bootstrap->add_option("--short-anchor", o.short_anchor, "Longest maturity accepted as the short anchor");

    auto* fit = app.add_subcommand("fit-ml", "Maximum-likelihood fit of vasicek or g2pp to a price panel");
    model_opt(fit, {"vasicek", "g2pp"}, true);
    existing(fit, "--panel", o.panel, "Panel CSV", true);
    existing(fit, "--curve", o.curve, "Initial curve CSV (g2pp)");
    existing(fit, "--bonds", o.bonds, "Bond definitions supplying maturities");
    fit->add_option("--instrument", o.instruments, "Restrict the panel to these instrument ids");
    fit->add_flag("--negotiated-only", o.negotiated_only, "Keep only dates where every price was traded");
    fit->add_option("--restarts", o.restarts, "Optimizer restarts")->check(CLI::PositiveNumber);
    fit->add_option("--seed", o.seed, "Restart seed");

    auto* cal = app.add_subcommand("calibrate", "Per-date least-squares calibration of holee or hullwhite");
    model_opt(cal, {"holee", "hullwhite"}, true);
    existing(cal, "--cross-section", o.cross_section, "Cross-section CSV", true);
    existing(cal, "--curve", o.curve, "Initial curve CSV", true);
    cal->add_flag("--per-date-curve", o.per_date_curve, "Use the previous date's quotes as the initial curve");
    cal->add_flag("--printed-formula", o.printed_formula, "Hull-White damping 1-exp(-2t) instead of 1-exp(-2at)");
    cal->add_flag("--weighted", o.weighted, "Weight residuals by maturity");
    cal->add_flag("--flat-extrapolation", o.flat_extrapolation, "Extrapolate the curve with its last forward");
    cal->add_option("--short-tenor", o.short_tenor, "Tenor of the short-rate proxy in years");
    cal->add_option("--seed", o.seed, "Restart seed");

    auto* price = app.add_subcommand("price", "Zero prices at a fixed time to maturity for each state");
    model_opt(price, all_models, true);
    existing(price, "--params", o.params, "Params file", true);
    existing(price, "--state", o.states, "State CSV", true);
    existing(price, "--curve", o.curve, "Initial curve CSV");
    price->add_option("--maturity", o.maturity, "Time to maturity in years")->required();
    price->add_flag("--printed-formula", o.printed_formula, "Hull-White damping 1-exp(-2t)");
    price->add_flag("--flat-extrapolation", o.flat_extrapolation, "Extrapolate the curve with its last forward");

    auto* surface = app.add_subcommand("surface", "Price surface on the 1m..25y grid");
    model_opt(surface, all_models, false);
    existing(surface, "--params", o.params, "Params file", true);
    existing(surface, "--states", o.states, "State CSV");
    existing(surface, "--panel", o.panel, "Panel CSV to filter states from");
    existing(surface, "--curve", o.curve, "Initial curve CSV");
    surface->add_option("--instrument", o.instruments, "Panel instruments to invert");
    surface->add_flag("--printed-formula", o.printed_formula, "Hull-White damping 1-exp(-2t)");
    surface->add_flag("--flat-extrapolation", o.flat_extrapolation, "Extrapolate the curve with its last forward");

    auto* arb = app.add_subcommand("check-arbitrage", "Report price inversions across maturities");
    existing(arb, "--curve", o.curve, "Curve CSV (checked directly, or the initial curve for --search)");
    existing(arb, "--surface", o.surface, "Surface CSV");
    existing(arb, "--cross-section", o.cross_section, "Cross-section CSV");
    existing(arb, "--params", o.params, "G2++ params for --search");
    arb->add_flag("--search", o.search, "Grid search of opposite-sign G2++ states for a positive dP/dT");
    arb->add_option("--time", o.time, "Model time of the searched states");
    arb->add_flag("--flat-extrapolation", o.flat_extrapolation, "Extrapolate the curve with its last forward");

    auto* oracle = app.add_subcommand("oracle", "Closed form against Monte Carlo on the built-in cases");
    model_opt(oracle, all_models, true);
    existing(oracle, "--params", o.params, "Replace the built-in parameters");
    existing(oracle, "--curve", o.curve, "Initial curve CSV (default flat 4%)");
    oracle->add_option("--paths", o.paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
    oracle->add_option("--step", o.step, "Time step in years")->check(CLI::PositiveNumber);
    oracle->add_option("--seed", o.seed, "Simulation seed");

    auto* synth = app.add_subcommand("synth", "Simulate a vasicek or g2pp price panel");
    model_opt(synth, {"vasicek", "g2pp"}, false);
    existing(synth, "--params", o.params, "Params file", true);
    existing(synth, "--curve", o.curve, "Initial curve CSV (g2pp)");
    synth->add_option("--start", o.start, "First observation date");
    synth->add_option("--count", o.count, "Number of observations");
    synth->add_option("--gap-days", o.gap_days, "Days between observations");
    synth->add_option("--instrument", o.instruments, "ID:YYYY-MM-DD, repeatable");
    synth->add_option("--x0", o.x0, "Initial short rate (vasicek) or x factor (g2pp)");
    synth->add_option("--y0", o.y0, "Initial y factor (g2pp)");
    synth->add_option("--seed", o.seed, "Simulation seed");

    for (auto* sub : app.get_subcommands({})) common(sub);

    std::vector<std::string> args;
    try {
        args = apply_config(raw_args);
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kSuccess;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsageError;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsageError;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    if (o.out_dir.empty()) {
        const char* env = std::getenv("CURVEFORGE_OUTPUT_DIR");
        o.out_dir = env != nullptr && *env != '\0' ? env : ".";
    }

    json config = json::object();
    std::string canonical = command + '\n';
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || name == "out" || name == "config") continue;
        std::string value;
        if (opt->count() > 0) {
            for (const auto& r : opt->results()) value += (value.empty() ? "" : " ") + r;
        } else {
            value = opt->get_default_str();
        }
        config[name] = value;
        canonical += name + '=' + value + '\n';
    }
    const bool seeded = default_seed.count(command) > 0;

    json entry = {{"command", command}, {"argv", args}, {"config", config}, {"config_hash", fnv1a_hex(canonical)}};
    if (seeded) entry["seed"] = o.seed;

    std::error_code ec;
    fs::create_directories(o.out_dir, ec);
    if (ec || !fs::is_directory(o.out_dir)) {
        err << "usage error: cannot create output directory " << o.out_dir << '\n';
        return kUsageError;
    }

    Context cx(o, out);
    int status = kSuccess;
    try {
        json results;
        if (command == "bootstrap") results = cmd_bootstrap(cx);
        else if (command == "fit-ml") results = cmd_fit_ml(cx);
        else if (command == "calibrate") results = cmd_calibrate(cx);
        else if (command == "price") results = cmd_price(cx);
        else if (command == "surface") results = cmd_surface(cx);
        else if (command == "check-arbitrage") results = cmd_check_arbitrage(cx);
        else if (command == "oracle") results = cmd_oracle(cx);
        else results = cmd_synth(cx);
        cx.commit();
        entry["results"] = results;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        entry["error"] = e.what();
        status = kUsageError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        entry["error"] = e.what();
        status = kDomainError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        entry["error"] = e.what();
        status = kDomainError;
    }
    entry["outputs"] = status == kSuccess ? cx.written : std::vector<std::string>{};
    entry["exit_code"] = status;
    append_run_log(o.out_dir, entry);
    return status;
}

}  // namespace curveforge::cli
