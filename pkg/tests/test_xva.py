import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import trapezoid

from ccva.core.cds import CdsQuote, extend_curve_P, extend_curve_slowest_uniform, extend_curve_Xi
from ccva.core.exposure import FvaMode, SwapSpec, exposure_profile
from ccva.core.sigmoid import SigmoidParams
from ccva.core.termstructures import DiscountCurve, HazardCurve
from ccva.core.xva import (
    MarketEnvironment,
    XvaInputs,
    XvaReport,
    _check_fva_sign,
    ccva_report,
    cva,
    fva,
    report_percentage_changes,
    xva_report,
)
from ccva.exceptions import ComputeError, ParameterError

DISCOUNT = DiscountCurve(0.02)


def _inputs(curve, maturity=20.0, **kwargs):
    exposure = exposure_profile(SwapSpec(maturity=maturity), DISCOUNT, 0.0020)
    options = dict(lgd=0.6, funding_spread=0.01)
    options.update(kwargs)
    return XvaInputs(exposure=exposure, hazard=curve, discount=DISCOUNT, **options)


def _brute_force(inputs, with_hazard, n=100_000):
    """在强度节点处分段的稠密梯形积分，段右端取 λ 的左极限"""
    maturity = inputs.exposure.maturity
    edges = np.unique(np.concatenate([[0.0, maturity], inputs.hazard.breakpoints(0.0, maturity)]))
    total = 0.0
    for start, end in zip(edges[:-1], edges[1:]):
        grid = np.linspace(start, end, max(int(n * (end - start) / maturity), 8) + 1)
        integrand = inputs.exposure.interpolate(grid) * inputs.hazard.survival(grid) * DISCOUNT.discount(grid)
        if with_hazard:
            hazard = inputs.hazard.hazard_at(grid)
            hazard[-1] = inputs.hazard.hazard_left(end)
            integrand = integrand * hazard
        total += float(trapezoid(integrand, grid))
    return total


@pytest.mark.parametrize("case", ["endpoint_40y", "flat_30y", "jump_inside_cell"])
def test_cva_and_fva_match_brute_force(case, quote, endpoint_params):
    if case == "endpoint_40y":
        inputs = _inputs(extend_curve_P(quote, endpoint_params), maturity=40.0)
    elif case == "flat_30y":
        inputs = _inputs(extend_curve_Xi(quote), maturity=30.0)
    else:
        # 跳跃点 10.1 不在敞口网格上，积分节点必须包含它；λ=0.2 段生存概率衰减快，需要更细的剖分
        curve = HazardCurve.from_nodes([(0, 0.01), (10.1, 0.01), (10.1, 0.2), (20, 0.2)])
        inputs = _inputs(curve, quadrature_substeps=64)
    assert cva(inputs) == pytest.approx(0.6 * _brute_force(inputs, True), rel=1e-6)
    assert fva(inputs) == pytest.approx(0.01 * _brute_force(inputs, False), rel=1e-6)


def test_flat_curve_cva_is_proportional_to_fva(quote):
    # 平坦强度下 CVA/FVA = LGD·λ / s_F
    inputs = _inputs(extend_curve_Xi(quote))
    assert cva(inputs) / fva(inputs) == pytest.approx(0.6 * quote.flat_hazard / 0.01, rel=1e-12)


def test_signed_fva_is_zero_for_atm_swap(quote):
    inputs = _inputs(extend_curve_Xi(quote), fva_mode=FvaMode.SIGNED)
    assert fva(inputs) == 0.0
    assert cva(inputs) > 0


def test_substep_refinement_converges(quote):
    curve = extend_curve_slowest_uniform(quote, 80.0, 0.25)
    values = [cva(_inputs(curve, maturity=30.0, quadrature_substeps=n)) for n in (4, 8, 16, 32)]
    diffs = [abs(b - a) for a, b in zip(values[:-1], values[1:])]
    assert diffs[1] < diffs[0]
    assert diffs[2] < diffs[1]
    assert diffs[1] < 1e-5 * values[-1]


def test_invalid_inputs_rejected(quote):
    curve = extend_curve_Xi(quote)
    with pytest.raises(ParameterError):
        _inputs(curve, lgd=0.0)
    with pytest.raises(ParameterError):
        _inputs(curve, funding_spread=-0.01)
    with pytest.raises(ParameterError):
        _inputs(curve, quadrature_substeps=0)
    with pytest.raises(ValueError):
        _inputs(curve, fva_mode="gross")


def test_report_identities(quote, endpoint_params):
    report = ccva_report(quote, endpoint_params, SwapSpec(maturity=30))
    assert report.cd_cva == pytest.approx(report.cva_cc - report.cva_mp)
    assert report.cd_fva == pytest.approx(report.fva_cc - report.fva_mp)
    assert report.ccva == pytest.approx(report.cd_cva + report.cd_fva)
    assert report.cd_cva_pct == pytest.approx(100 * report.cd_cva / report.cva_mp)
    assert report.ccva_pct == pytest.approx(100 * report.ccva / (report.cva_mp + report.fva_mp))


def test_headline_scenario():
    quote = CdsQuote()
    p_curve = extend_curve_slowest_uniform(quote, 80.0, 0.25)
    report = ccva_report(quote, p_curve, SwapSpec(maturity=20))
    assert 18 <= report.cd_cva_pct <= 28
    assert 8 <= report.ccva_pct <= 16
    assert report.cd_fva_pct < 0


def test_identical_curves_give_zero_ccva():
    quote = CdsQuote(maturity=10, spread=0.01, recovery=0.5)
    p_curve = extend_curve_slowest_uniform(quote, 80.0, 0.02)
    report = ccva_report(quote, p_curve, SwapSpec(maturity=40))
    assert abs(report.cd_cva) < 1e-12
    assert abs(report.cd_fva) < 1e-12
    assert abs(report.ccva) < 1e-12


def test_beneficial_scenario_gives_negative_ccva(quote, market):
    xi_curve = extend_curve_Xi(quote)
    p_curve = HazardCurve.concatenate(xi_curve, HazardCurve.flat(0.005), quote.maturity)
    report = xva_report(xi_curve, p_curve, market.exposure(SwapSpec(maturity=20)), market, quote.lgd)
    assert report.cd_cva < 0
    assert report.cd_fva > 0
    assert report.ccva < 0


def test_short_swap_is_not_affected(quote, endpoint_params):
    # 互换在 P 段开始前到期，两条曲线在 [0, T] 上相同
    report = ccva_report(quote, endpoint_params, SwapSpec(maturity=10))
    assert abs(report.ccva) < 1e-12


def test_zero_denominator_percentages_are_none(quote, endpoint_params):
    market = MarketEnvironment(fva_mode=FvaMode.SIGNED)
    report = ccva_report(quote, endpoint_params, SwapSpec(maturity=30), market)
    assert report.fva_mp == 0.0
    assert report.cd_fva_pct is None
    row = report_percentage_changes(report)
    assert row["cd_fva_pct"] is None
    assert row["ccva_pct"] == pytest.approx(100 * report.ccva / report.cva_mp)


def test_percentage_row_uses_market_values():
    report = XvaReport.from_values(cva_mp=2.0, fva_mp=0.0, cva_cc=3.0, fva_cc=0.0)
    row = report_percentage_changes(report)
    assert row["cd_cva_pct"] == pytest.approx(50.0)
    assert row["cd_fva_pct"] is None
    assert row["ccva_pct"] == pytest.approx(50.0)
    assert list(row) == [
        "cva_mp", "fva_mp", "cva_cc", "fva_cc", "cd_cva", "cd_fva", "ccva",
        "cd_cva_pct", "cd_fva_pct", "ccva_pct",
    ]


def test_unsupported_p_segment_type(quote):
    with pytest.raises(ParameterError):
        ccva_report(quote, 0.25, SwapSpec(maturity=20))


@given(
    h_max=st.floats(0.02, 0.5),
    width=st.floats(5.0, 70.0),
    maturity=st.sampled_from([15.0, 20.0, 30.0, 50.0]),
)
@settings(max_examples=30, deadline=None)
def test_stress_never_increases_fva(h_max, width, maturity):
    quote = CdsQuote()
    p_curve = extend_curve_slowest_uniform(quote, 10.0 + width, h_max)
    report = ccva_report(quote, p_curve, SwapSpec(maturity=maturity))
    assert report.cd_fva <= 1e-15
    assert report.cva_cc >= 0 and report.cva_mp > 0
    assert math.isfinite(report.ccva)


def test_explicit_h_start_changes_ccva(quote):
    implicit = SigmoidParams(False, 10.0, None, 40.0, 20.0, 0.10, 80.0, 0.25)
    explicit = implicit.with_h_start(0.05)
    spec = SwapSpec(maturity=30)

    curve = extend_curve_P(quote, explicit)
    assert curve.hazard_left(10.0) == pytest.approx(quote.flat_hazard)
    assert curve.hazard_at(10.0) == pytest.approx(0.05)
    assert curve.dominates(extend_curve_P(quote, implicit), 80.0)

    base = ccva_report(quote, implicit, spec)
    raised = ccva_report(quote, explicit, spec)
    assert raised.cva_mp == pytest.approx(base.cva_mp, rel=1e-12)
    assert raised.fva_mp == pytest.approx(base.fva_mp, rel=1e-12)
    assert raised.cd_cva > base.cd_cva > 0
    assert raised.cd_fva < base.cd_fva < 0
    assert raised.ccva != pytest.approx(base.ccva, rel=1e-3)


def test_fva_sign_contradicting_curve_order_is_rejected(quote):
    xi_curve = extend_curve_Xi(quote)
    stressed = HazardCurve.concatenate(xi_curve, HazardCurve.flat(0.05), quote.maturity)
    relieved = HazardCurve.concatenate(xi_curve, HazardCurve.flat(0.005), quote.maturity)
    fva_up = XvaReport.from_values(cva_mp=1.0, fva_mp=1.0, cva_cc=2.0, fva_cc=1.5)
    fva_down = XvaReport.from_values(cva_mp=1.0, fva_mp=1.0, cva_cc=2.0, fva_cc=0.5)

    with pytest.raises(ComputeError):
        _check_fva_sign(xi_curve, stressed, 20.0, FvaMode.FCA, fva_up)
    with pytest.raises(ComputeError):
        _check_fva_sign(xi_curve, relieved, 20.0, FvaMode.FCA, fva_down)
    _check_fva_sign(xi_curve, stressed, 20.0, FvaMode.FCA, fva_down)
    _check_fva_sign(xi_curve, relieved, 20.0, FvaMode.FCA, fva_up)
    # signed 口径下 EE 可正可负，不做符号检查
    _check_fva_sign(xi_curve, stressed, 20.0, FvaMode.SIGNED, fva_up)
