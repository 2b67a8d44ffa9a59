import math

import pytest

import curveforge as cf


def test_vasicek_price_matches_closed_form():
    p = cf.VasicekParams(1.7051, 0.0937, 0.3721)
    a, b, s, tau, r = p.a, p.b, p.sigma, 5.0, 0.05
    B = (1 - math.exp(-a * tau)) / a
    logA = (B - tau) * (b - s * s / (2 * a * a)) - s * s * B * B / (4 * a)
    assert cf.price(p, tau, x=r) == pytest.approx(math.exp(logA - B * r), rel=1e-12)


def test_initial_curve_reproduced():
    curve = cf.DiscountCurve([(1.0, 0.97), (2.0, 0.94), (5.0, 0.85), (10.0, 0.7)])
    r0 = curve.forward(0.0)
    for tau, disc in curve.pillars:
        assert cf.price(cf.HullWhiteParams(0.0813, 0.0215), tau, x=r0, curve=curve) == pytest.approx(disc, abs=1e-12)
        assert cf.price(cf.G2Params(0.13, 0.3526, 0.2062, 0.4892, -0.99), tau, curve=curve) == pytest.approx(
            disc, abs=1e-12
        )


def test_monte_carlo_agrees():
    p = cf.VasicekParams(1.7051, 0.0937, 0.3721)
    value, err = cf.mc_zero_price(p, 2.0, x=0.05, paths=4000, step=0.01, seed=3)
    assert abs(value - cf.price(p, 2.0, x=0.05)) < 4 * err
    assert cf.mc_zero_price(p, 2.0, x=0.05, paths=4000, step=0.01, seed=3) == (value, err)


def test_arbitrage_diagnostics():
    assert cf.check_monotone([(1.0, 0.95), (2.0, 0.9)]) == []
    assert cf.check_monotone([(1.0, 0.9), (2.0, 0.95)]) == [(1.0, 2.0, 0.9, 0.95)]
    w = cf.search_g2pp_arbitrage(cf.G2Params(0.13, 0.3526, 0.2062, 0.4892, -0.99), cf.DiscountCurve.oracle(), 2.5)
    assert w is not None and w["dpdt"] > 0


def test_calibration_recovers_hull_white():
    curve = cf.DiscountCurve([(float(k), math.exp(-0.03 * k)) for k in range(1, 41)])
    truth = cf.HullWhiteParams(0.0813, 0.0215)
    quotes = [(tau, cf.price(truth, 0.5 + tau, t=0.5, x=0.03, curve=curve)) for tau in (1, 2, 5, 10, 20)]
    fit = cf.calibrate("hullwhite", quotes, 0.03, curve, t=0.5)
    assert fit["params"].a == pytest.approx(0.0813, abs=1e-4)
    assert fit["params"].sigma == pytest.approx(0.0215, abs=1e-4)


def test_errors_carry_kind():
    with pytest.raises(cf.CurveforgeError) as info:
        cf.G2Params(0.1, 0.2, 0.01, -0.01, 0.5)
    assert info.value.kind == "domain error"


def test_cli_in_process(tmp_path):
    code, out, _ = cf.run_cli(["--help"])
    assert code == 0 and "fit-ml" in out
    assert cf.run_cli(["nonsense"])[0] == 2
    params = tmp_path / "truth.txt"
    params.write_text("model=vasicek\na=1.7\nb=0.09\nsigma=0.37\n")
    code, _, err = cf.run_cli(["synth", "--params", str(params), "--count", "60", "--out", str(tmp_path / "s")])
    assert code == 0, err
    fit = cf.fit_ml_panel("vasicek", tmp_path / "s" / "panel.csv", restarts=2)
    assert math.isfinite(fit["loglik"])
