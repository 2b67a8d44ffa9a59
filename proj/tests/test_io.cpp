#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "curveforge/error.hpp"
#include "curveforge/io.hpp"
#include "curveforge/montecarlo.hpp"

using namespace curveforge;
namespace fs = std::filesystem;

namespace {

class IoTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("curveforge_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& text) {
        const fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }
    static std::string slurp(const fs::path& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path dir_;
};

std::string ingestion_message(const fs::path& p) {
    try {
        io::ingest_panel(p);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Ingestion);
        return e.what();
    }
    ADD_FAILURE() << "no error";
    return {};
}

}  // namespace

TEST(Numbers, ShortestRoundTrip) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 2000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        const double back = io::parse_double(io::format_double(v));
        EXPECT_EQ(0, std::memcmp(&v, &back, sizeof v));
    }
    EXPECT_EQ(io::format_double(0.1), "0.1");
    EXPECT_EQ(io::parse_double("+2.5"), 2.5);
    EXPECT_EQ(io::parse_double("1e-3"), 1e-3);
    for (const char* bad : {"", "abc", "1.0x", "1,5", " 1", "--1"}) EXPECT_THROW(io::parse_double(bad), Error) << bad;
}

TEST_F(IoTest, WellFormedPanel) {
    const auto p = write("panel.csv",
                         "date,instrument_id,price,maturity\n"
                         "2013-01-14,Z25,0.61,2025-01-07\n"
                         "\n"
                         "2013-01-07,Z25,0.60,2025-01-07\n"
                         "2013-01-21,Z25,0.62,2025-01-07\n");
    const PricePanel panel = io::ingest_panel(p);
    ASSERT_EQ(panel.size(), 3u);
    EXPECT_EQ(panel.observations()[0].date, Date(2013, 1, 7));
    EXPECT_EQ(panel.observations()[2].prices.at("Z25"), 0.62);
    EXPECT_EQ(panel.instrument("Z25").maturity, Date(2025, 1, 7));
}

TEST_F(IoTest, PriceAboveOneNamesTheLine) {
    const auto p = write("panel.csv",
                         "date,instrument_id,price,maturity\n"
                         "2013-01-07,Z25,0.60,2025-01-07\n"
                         "2013-01-14,Z25,1.5,2025-01-07\n");
    const std::string msg = ingestion_message(p);
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST_F(IoTest, AllMalformedLinesReported) {
    const auto p = write("panel.csv",
                         "date,instrument_id,price,maturity\n"
                         "2013-01-07,Z25,0.60,2025-01-07\n"
                         "2013-13-14,Z25,0.61,2025-01-07\n"
                         "2013-01-21,Z25,zero,2025-01-07\n"
                         "2013-01-28,Z25,-0.2,2025-01-07\n"
                         "2013-02-04,Z25\n");
    const std::string msg = ingestion_message(p);
    for (const char* line : {"line 3", "line 4", "line 5", "line 6"}) EXPECT_NE(msg.find(line), std::string::npos) << line;
    EXPECT_EQ(msg.find("line 2:"), std::string::npos);
}

TEST_F(IoTest, PanelSchemaAndConsistency) {
    EXPECT_THROW(io::ingest_panel(write("a.csv", "when,instrument_id,price\n2013-01-07,Z,0.5\n")), Error);
    // No maturity column and no bond list to resolve it.
    EXPECT_THROW(io::ingest_panel(write("b.csv", "date,instrument_id,price\n2013-01-07,Z,0.5\n")), Error);
    // Duplicate (date, instrument).
    EXPECT_THROW(io::ingest_panel(write("c.csv", "date,instrument_id,price,maturity\n2013-01-07,Z,0.5,2020-01-01\n"
                                                 "2013-01-07,Z,0.6,2020-01-01\n")),
                 Error);
    // Quote on the maturity date.
    EXPECT_THROW(io::ingest_panel(write("d.csv", "date,instrument_id,price,maturity\n2020-01-01,Z,0.99,2020-01-01\n")),
                 Error);
    EXPECT_THROW(io::ingest_panel(dir_ / "missing.csv"), Error);
}

TEST_F(IoTest, NegotiatedColumnAndBondMaturities) {
    const auto bonds_path = write("bonds.csv",
                                  "id,face,coupon_rate,frequency,maturity,first_coupon\n"
                                  "B25,100,0.05,2,2025-01-07,2010-07-07\n"
                                  "B33,100,0.04,1,2033-01-07,2011-01-07\n");
    const auto bonds = io::read_bonds(bonds_path);
    ASSERT_EQ(bonds.size(), 2u);
    EXPECT_EQ(bonds[0].frequency, 2);
    const auto p = write("panel.csv",
                         "date,instrument_id,price,negotiated\n"
                         "2013-01-07,B25,0.60,1\n"
                         "2013-01-07,B33,0.50,0\n"
                         "2013-01-14,B25,0.61,true\n"
                         "2013-01-14,B33,0.51,true\n");
    const PricePanel panel = io::ingest_panel(p, &bonds);
    EXPECT_EQ(panel.instrument("B33").maturity, Date(2033, 1, 7));
    EXPECT_EQ(panel.size(), 2u);
    EXPECT_EQ(panel.negotiated_only().size(), 1u);
    EXPECT_EQ(panel.negotiated_only().observations()[0].date, Date(2013, 1, 14));
}

TEST_F(IoTest, SyntheticPanelRoundTripsBitIdentically) {
    std::vector<Date> schedule;
    for (int k = 0; k < 100; ++k) schedule.push_back(Date(2010, 1, 4).add_days(7L * k));
    const DiscountCurve curve = oracle_curve();
    const std::vector<Instrument> bonds{{"Z12", Date(2022, 1, 4)}, {"Z20", Date(2030, 1, 4)}};
    const auto synth =
        synth_panel(G2Params{0.5, 1.2, 0.01, 0.015, 0.3}, &curve, schedule, bonds, StatePoint{}, 5).panel;
    const fs::path p = dir_ / "panel.csv";
    io::write_panel(p, synth);
    const PricePanel back = io::ingest_panel(p);
    ASSERT_EQ(back.size(), 100u);
    std::size_t rows = 0;
    for (std::size_t k = 0; k < back.size(); ++k) {
        EXPECT_EQ(back.observations()[k].date, synth.observations()[k].date);
        for (const auto& [id, v] : synth.observations()[k].prices) {
            const double w = back.observations()[k].prices.at(id);
            EXPECT_EQ(0, std::memcmp(&v, &w, sizeof v));
            ++rows;
        }
    }
    EXPECT_EQ(rows, 200u);
    const fs::path again = dir_ / "again.csv";
    io::write_panel(again, back);
    EXPECT_EQ(slurp(p), slurp(again));
}

TEST_F(IoTest, CurveRoundTrip) {
    const DiscountCurve c(std::vector<Pillar>{{0.25, 0.99}, {1.0, 0.96}, {5.0, 0.8}}, Date(2013, 1, 7));
    io::write_curve(dir_ / "curve.csv", c);
    const DiscountCurve back = io::read_curve(dir_ / "curve.csv");
    EXPECT_EQ(back.asof(), c.asof());
    ASSERT_EQ(back.pillars().size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(back.pillars()[i].maturity, c.pillars()[i].maturity);
        EXPECT_EQ(back.pillars()[i].discount, c.pillars()[i].discount);
    }
    EXPECT_THROW(io::read_curve(write("bad.csv", "asof,maturity_years,discount_factor\n2013-01-07,1,1.2\n")), Error);
}

TEST_F(IoTest, ParamsRoundTrip) {
    const std::vector<ModelParams> all{VasicekParams{1.7051, 0.0937, 0.3721}, G2Params{0.13, 0.3526, 0.2062, 0.4892, -0.99},
                                       HoLeeParams{0.3071}, HullWhiteParams{0.0813, 0.0215}};
    for (const auto& p : all) {
        io::write_params(dir_ / "p.txt", p);
        const auto back = io::read_params(dir_ / "p.txt");
        EXPECT_EQ(kind_of(back), kind_of(p));
        EXPECT_EQ(named_values(back), named_values(p));
    }
    const auto commented = io::read_params(write("c.txt", "# fitted\nmodel=hullwhite\n\na=0.1\nsigma = 0.02\n"));
    EXPECT_EQ(std::get<HullWhiteParams>(commented).sigma, 0.02);
    EXPECT_THROW(io::read_params(write("m.txt", "model=hullwhite\na=0.1\n")), Error);
    EXPECT_THROW(io::read_params(write("u.txt", "model=cir\na=0.1\n")), Error);
}

TEST_F(IoTest, StatesRoundTrip) {
    const StateSeries one{1, {{Date(2013, 1, 7), 0.0, 0.03, 0.0}, {Date(2013, 1, 14), 7.0 / 365, 0.031, 0.0}}};
    const StateSeries two{2, {{Date(2013, 1, 7), 0.5, 0.01, -0.02}}};
    for (const auto& s : {one, two}) {
        io::write_states(dir_ / "s.csv", s);
        const auto back = io::read_states(dir_ / "s.csv");
        EXPECT_EQ(back.factors, s.factors);
        ASSERT_EQ(back.points.size(), s.points.size());
        for (std::size_t k = 0; k < s.points.size(); ++k) {
            EXPECT_EQ(back.points[k].date, s.points[k].date);
            EXPECT_EQ(back.points[k].t, s.points[k].t);
            EXPECT_EQ(back.points[k].x, s.points[k].x);
            EXPECT_EQ(back.points[k].y, s.points[k].y);
        }
    }
}

TEST_F(IoTest, SurfaceRoundTripKeepsEmptyCells) {
    PriceSurface s;
    const auto& grid = standard_tenor_grid();
    s.tenors.assign(grid.begin(), grid.end());
    s.dates = {Date(2013, 1, 7), Date(2013, 1, 14)};
    s.times = {0.0, 7.0 / 365};
    for (int k = 0; k < 2; ++k) {
        std::vector<std::optional<double>> row;
        for (std::size_t j = 0; j < 14; ++j) row.push_back(std::exp(-0.03 * grid[j].tenor) - 0.001 * k);
        s.values.push_back(row);
    }
    s.values[1][13] = std::nullopt;
    io::write_surface(dir_ / "surface.csv", s);
    const std::string text = slurp(dir_ / "surface.csv");
    EXPECT_EQ(text.substr(0, text.find('\n')),
              "date,P_1m,P_2m,P_3m,P_6m,P_9m,P_1y,P_2y,P_3y,P_5y,P_7y,P_10y,P_15y,P_20y,P_25y");
    const auto back = io::read_surface(dir_ / "surface.csv");
    ASSERT_EQ(back.values.size(), 2u);
    EXPECT_FALSE(back.values[1][13].has_value());
    EXPECT_EQ(*back.values[1][12], *s.values[1][12]);
    EXPECT_EQ(back.dates, s.dates);
}

TEST_F(IoTest, ViolationsRoundTrip) {
    ArbitrageReport r;
    r.violations = {{1.0, 2.0, 0.9, 0.95}, {3.25, 7.5, 0.5, 0.51}};
    r.derivative_sign_changes = {4.5};
    io::write_violations(dir_ / "v.csv", r);
    const auto back = io::read_violations(dir_ / "v.csv");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].tau_high, 7.5);
    EXPECT_EQ(back[1].p_high, 0.51);
    const std::string text = io::format_report_text(r);
    EXPECT_NE(text.find("2 price inversion"), std::string::npos) << text;
    io::write_violations(dir_ / "e.csv", ArbitrageReport{});
    EXPECT_EQ(slurp(dir_ / "e.csv"), "tau_low,tau_high,p_low,p_high\n");
    EXPECT_TRUE(io::read_violations(dir_ / "e.csv").empty());
}

TEST_F(IoTest, CrossSectionsGroupedByDate) {
    const auto p = write("xs.csv",
                         "date,maturity_years,zero_price,short_rate\n"
                         "2013-01-14,5,0.85,0.021\n"
                         "2013-01-07,2,0.95,0.02\n"
                         "2013-01-07,1,0.98,0.02\n"
                         "2013-01-14,1,0.979,0.021\n");
    const auto xs = io::read_cross_sections(p);
    ASSERT_EQ(xs.size(), 2u);
    EXPECT_EQ(xs[0].asof, Date(2013, 1, 7));
    EXPECT_EQ(xs[0].quotes[0].maturity, 1.0);
    EXPECT_EQ(xs[0].quotes[1].maturity, 2.0);
    EXPECT_EQ(*xs[1].short_rate, 0.021);
    const auto plain = io::read_cross_sections(write("plain.csv", "date,maturity_years,zero_price\n2013-01-07,1,0.98\n"));
    EXPECT_FALSE(plain[0].short_rate.has_value());
    EXPECT_THROW(io::read_cross_sections(write("bad.csv", "date,maturity_years,zero_price\n2013-01-07,1,0\n")), Error);
}

TEST_F(IoTest, CalibrationOutputsRoundTrip) {
    CalibrationSeries s;
    s.model = ModelKind::HullWhite;
    s.records.push_back({Date(2013, 1, 7), CalibrationResult{HullWhiteParams{0.08, 0.02}, 1e-12, 100, true, false}, {}});
    s.records.push_back({Date(2013, 1, 14), std::nullopt, "failed"});
    s.summary = summarize(s.model, s.records);
    io::write_calibration_series(dir_ / "cal.csv", s);
    const auto rows = io::read_calibration_rows(dir_ / "cal.csv");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].param_name, "a");
    EXPECT_EQ(rows[1].value, 0.02);
    EXPECT_TRUE(std::isnan(rows[2].value));
    EXPECT_FALSE(rows[2].converged);

    io::write_calibration_summary(dir_ / "sum.csv", s.summary);
    const auto sum = io::read_calibration_summary(dir_ / "sum.csv");
    ASSERT_EQ(sum.size(), 2u);
    EXPECT_EQ(sum[0].mean, 0.08);
    EXPECT_FALSE(sum[0].sd.has_value());
    EXPECT_EQ(sum[0].count, 1u);
}

TEST_F(IoTest, BondQuotes) {
    const auto bonds = io::read_bonds(write("bonds.csv", "id,face,coupon_rate,frequency,maturity,first_coupon\n"
                                                         "B1,100,0.05,1,2016-01-07,2014-01-07\n"));
    const auto quotes = io::read_bond_quotes(write("q.csv", "id,settlement,price\nB1,2013-01-07,101.5\n"), bonds);
    ASSERT_EQ(quotes.size(), 1u);
    EXPECT_EQ(quotes[0].bond.id, "B1");
    EXPECT_EQ(quotes[0].price, 101.5);
    EXPECT_THROW(io::read_bond_quotes(write("u.csv", "id,settlement,price\nB9,2013-01-07,99\n"), bonds), Error);
    EXPECT_THROW(io::read_bonds(write("f.csv", "id,face,coupon_rate,frequency,maturity,first_coupon\n"
                                               "B1,100,0.05,1.5,2016-01-07,2014-01-07\n")),
                 Error);
}

TEST_F(IoTest, AtomicWriteLeavesNoTemporary) {
    io::write_atomic(dir_ / "out.txt", "hello\n");
    EXPECT_EQ(slurp(dir_ / "out.txt"), "hello\n");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir_)) ++files;
    EXPECT_EQ(files, 1u);
}
