"""Zero-coupon term-structure models: pricing, estimation, calibration, diagnostics."""

from ._core import (
    CurveforgeError,
    DiscountCurve,
    G2Params,
    HoLeeParams,
    HullWhiteParams,
    VasicekParams,
    calibrate,
    check_monotone,
    fit_ml_panel,
    g2pp_dpdt,
    mc_zero_price,
    price,
    run_cli,
    search_g2pp_arbitrage,
)

__all__ = [
    "CurveforgeError",
    "DiscountCurve",
    "G2Params",
    "HoLeeParams",
    "HullWhiteParams",
    "VasicekParams",
    "calibrate",
    "check_monotone",
    "fit_ml_panel",
    "g2pp_dpdt",
    "mc_zero_price",
    "price",
    "run_cli",
    "search_g2pp_arbitrage",
]
