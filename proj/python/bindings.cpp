#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "curveforge/calibration.hpp"
#include "curveforge/cli.hpp"
#include "curveforge/diagnostics.hpp"
#include "curveforge/error.hpp"
#include "curveforge/estimation.hpp"
#include "curveforge/io.hpp"
#include "curveforge/model.hpp"
#include "curveforge/montecarlo.hpp"

namespace py = pybind11;
using namespace curveforge;

namespace {

std::vector<Pillar> to_pillars(const std::vector<std::pair<double, double>>& points) {
    std::vector<Pillar> out;
    out.reserve(points.size());
    for (const auto& [t, p] : points) out.push_back({t, p});
    return out;
}

std::vector<std::pair<double, double>> from_pillars(const std::vector<Pillar>& pillars) {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : pillars) out.emplace_back(p.maturity, p.discount);
    return out;
}

HullWhiteDamping parse_damping(const std::string& s) {
    if (s == "standard") return HullWhiteDamping::Standard;
    if (s == "printed") return HullWhiteDamping::Printed;
    throw Error(ErrorKind::Domain, "damping must be 'standard' or 'printed'");
}

StatePoint state_at(Time t, double x, double y) { return StatePoint{Date(), t, x, y}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Zero-coupon term-structure models";

    static py::exception<Error> error(m, "CurveforgeError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object instance = py::handle(error.ptr())(e.what());
            instance.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(error.ptr(), instance.ptr());
        }
    });

    py::class_<VasicekParams>(m, "VasicekParams")
        .def(py::init([](double a, double b, double sigma) {
                 VasicekParams p{a, b, sigma};
                 p.validate();
                 return p;
             }),
             py::arg("a"), py::arg("b"), py::arg("sigma"))
        .def_readonly("a", &VasicekParams::a)
        .def_readonly("b", &VasicekParams::b)
        .def_readonly("sigma", &VasicekParams::sigma)
        .def("__repr__", [](const VasicekParams& p) { return io::format_params(p); });

    py::class_<G2Params>(m, "G2Params")
        .def(py::init([](double a, double b, double sigma, double eta, double rho) {
                 G2Params p{a, b, sigma, eta, rho};
                 p.validate();
                 return p;
             }),
             py::arg("a"), py::arg("b"), py::arg("sigma"), py::arg("eta"), py::arg("rho"))
        .def_readonly("a", &G2Params::a)
        .def_readonly("b", &G2Params::b)
        .def_readonly("sigma", &G2Params::sigma)
        .def_readonly("eta", &G2Params::eta)
        .def_readonly("rho", &G2Params::rho)
        .def("__repr__", [](const G2Params& p) { return io::format_params(p); });

    py::class_<HoLeeParams>(m, "HoLeeParams")
        .def(py::init([](double sigma) {
                 HoLeeParams p{sigma};
                 p.validate();
                 return p;
             }),
             py::arg("sigma"))
        .def_readonly("sigma", &HoLeeParams::sigma)
        .def("__repr__", [](const HoLeeParams& p) { return io::format_params(p); });

    py::class_<HullWhiteParams>(m, "HullWhiteParams")
        .def(py::init([](double a, double sigma) {
                 HullWhiteParams p{a, sigma};
                 p.validate();
                 return p;
             }),
             py::arg("a"), py::arg("sigma"))
        .def_readonly("a", &HullWhiteParams::a)
        .def_readonly("sigma", &HullWhiteParams::sigma)
        .def("__repr__", [](const HullWhiteParams& p) { return io::format_params(p); });

    py::class_<DiscountCurve>(m, "DiscountCurve")
        .def(py::init([](const std::vector<std::pair<double, double>>& pillars) { return DiscountCurve(to_pillars(pillars)); }),
             py::arg("pillars"), "Pillars as (maturity in years, discount factor) pairs.")
        .def_static("read", [](const std::filesystem::path& p) { return io::read_curve(p); })
        .def_static("oracle", &oracle_curve)
        .def("discount", &DiscountCurve::discount, py::arg("t"))
        .def("forward", &DiscountCurve::forward, py::arg("t"))
        .def_property_readonly("pillars", [](const DiscountCurve& c) { return from_pillars(c.pillars()); });

    m.def(
        "price",
        [](const ModelParams& params, double T, double t, double x, double y, const DiscountCurve* curve,
           const std::string& damping) { return model_price(params, curve, state_at(t, x, y), T, parse_damping(damping)); },
        py::arg("params"), py::arg("maturity"), py::arg("t") = 0.0, py::arg("x") = 0.0, py::arg("y") = 0.0,
        py::arg("curve") = nullptr, py::arg("damping") = "standard",
        "Zero price P(t, maturity). One-factor models read the short rate from x.");

    m.def(
        "mc_zero_price",
        [](const ModelParams& params, double T, double t, double x, double y, const DiscountCurve* curve,
           std::size_t paths, double step, std::uint64_t seed) {
            SimConfig cfg;
            cfg.n_paths = paths;
            cfg.step = step;
            cfg.seed = seed;
            const McEstimate e = mc_zero_price(params, curve, state_at(t, x, y), T, cfg);
            return py::make_tuple(e.value, e.std_error);
        },
        py::arg("params"), py::arg("maturity"), py::arg("t") = 0.0, py::arg("x") = 0.0, py::arg("y") = 0.0,
        py::arg("curve") = nullptr, py::arg("paths") = 100000, py::arg("step") = 1.0 / 252.0, py::arg("seed") = 42,
        "Monte-Carlo estimate and standard error of the zero price.");

    m.def(
        "g2pp_dpdt",
        [](const G2Params& p, const DiscountCurve& curve, double x, double y, double t, double T) {
            return g2pp_dpdt(p, curve, G2State{x, y, t}, T);
        },
        py::arg("params"), py::arg("curve"), py::arg("x"), py::arg("y"), py::arg("t"), py::arg("maturity"));

    m.def(
        "check_monotone",
        [](const std::vector<std::pair<double, double>>& prices) {
            const auto pillars = to_pillars(prices);
            std::vector<py::tuple> out;
            for (const auto& v : check_monotone(pillars).violations)
                out.push_back(py::make_tuple(v.tau_low, v.tau_high, v.p_low, v.p_high));
            return out;
        },
        py::arg("prices"), "Pairs tau_i < tau_j with P(tau_i) < P(tau_j).");

    m.def(
        "search_g2pp_arbitrage",
        [](const G2Params& p, const DiscountCurve& curve, double t) -> py::object {
            const auto w = search_g2pp_arbitrage(p, curve, t);
            if (!w) return py::none();
            py::dict d;
            d["x"] = w->state.x;
            d["y"] = w->state.y;
            d["maturity"] = w->maturity;
            d["dpdt"] = w->derivative;
            return d;
        },
        py::arg("params"), py::arg("curve"), py::arg("t"));

    m.def(
        "fit_ml_panel",
        [](const std::string& model, const std::filesystem::path& panel, const DiscountCurve* curve, int restarts,
           std::uint64_t seed) {
            FitConfig cfg;
            cfg.restarts = restarts;
            cfg.seed = seed;
            const FitResult r = fit_ml(parse_model_kind(model), io::ingest_panel(panel), curve, cfg);
            py::dict d;
            d["params"] = r.params;
            d["loglik"] = r.loglik;
            d["converged"] = r.report.converged;
            d["at_boundary"] = r.report.at_boundary;
            return d;
        },
        py::arg("model"), py::arg("panel"), py::arg("curve") = nullptr, py::arg("restarts") = 16, py::arg("seed") = 1);

    m.def(
        "calibrate",
        [](const std::string& model, const std::vector<std::pair<double, double>>& quotes, double short_rate,
           const DiscountCurve& curve, double t, std::uint64_t seed) {
            CrossSection xs;
            xs.t = t;
            xs.short_rate = short_rate;
            xs.curve = curve;
            for (const auto& [tau, p] : quotes) xs.quotes.push_back({tau, p});
            CalibrationConfig cfg;
            cfg.seed = seed;
            const auto r = calibrate(parse_model_kind(model), xs, cfg);
            py::dict d;
            d["params"] = r.params;
            d["objective"] = r.objective;
            d["converged"] = r.converged;
            d["at_boundary"] = r.at_boundary;
            return d;
        },
        py::arg("model"), py::arg("quotes"), py::arg("short_rate"), py::arg("curve"), py::arg("t") = 0.0,
        py::arg("seed") = 7, "Least-squares fit of Ho-Lee or Hull-White to (time to maturity, price) quotes.");

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run a command-line invocation in-process; returns (exit code, stdout, stderr).");
}
