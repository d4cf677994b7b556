import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccva.core.cds import (
    CdsQuote,
    ExtrapolationPolicy,
    bootstrap_flat_hazard,
    extend_curve,
    extend_curve_P,
    extend_curve_slowest_uniform,
    extend_curve_Xi,
    par_spread,
    protection_leg,
    risky_annuity,
)
from ccva.core.termstructures import DiscountCurve, HazardCurve
from ccva.exceptions import ComputeError, ParameterError

DISCOUNT = DiscountCurve(0.02)


def test_flat_hazard_from_quote(quote):
    assert quote.flat_hazard == pytest.approx(0.0100 / 0.60)
    assert quote.lgd == pytest.approx(0.60)
    curve = extend_curve_Xi(quote)
    assert curve.hazard_at(50.0) == pytest.approx(quote.flat_hazard)


@given(
    spread=st.floats(0.0005, 0.05),
    recovery=st.floats(0.0, 0.9),
    maturity=st.floats(1.0, 30.0),
)
@settings(max_examples=50, deadline=None)
def test_par_spread_reprices_quote(spread, recovery, maturity):
    quote = CdsQuote(maturity=maturity, spread=spread, recovery=recovery)
    curve = bootstrap_flat_hazard(quote)
    assert par_spread(curve, DISCOUNT, maturity, recovery) == pytest.approx(spread, abs=1e-10)


def test_flat_curve_spread_is_flat_across_maturities(quote):
    curve = extend_curve_Xi(quote)
    for maturity in (10, 20, 40, 80):
        assert par_spread(curve, DISCOUNT, maturity, quote.recovery) == pytest.approx(quote.spread, abs=1e-10)


def test_protection_leg_closed_form_for_flat_curve():
    rate = 0.02
    curve = HazardCurve.flat(rate)
    expected = 0.6 * rate * (1 - math.exp(-(rate + 0.02) * 10)) / (rate + 0.02)
    assert protection_leg(curve, DISCOUNT, 10, 0.4) == pytest.approx(expected, rel=1e-10)
    annuity = (1 - math.exp(-(rate + 0.02) * 10)) / (rate + 0.02)
    assert risky_annuity(curve, DISCOUNT, 10) == pytest.approx(annuity, rel=1e-10)


def test_slowest_uniform_spreads(quote):
    curve = extend_curve_slowest_uniform(quote, 80.0, 0.25)
    reference = {20: 138, 30: 180, 40: 203, 50: 212, 60: 214, 70: 215, 80: 215}
    for maturity, bps in reference.items():
        assert 1e4 * par_spread(curve, DISCOUNT, maturity, quote.recovery) == pytest.approx(bps, abs=3)


def test_slowest_uniform_spreads_saturate(quote):
    # 70 年后几乎没有存活，再延长期限利差基本不变
    curve = extend_curve_slowest_uniform(quote, 80.0, 0.25)
    s70 = par_spread(curve, DISCOUNT, 70, quote.recovery)
    s80 = par_spread(curve, DISCOUNT, 80, quote.recovery)
    assert abs(s80 - s70) * 1e4 < 1.0


def test_endpoint_spreads_match_reference_table(quote, endpoint_params):
    curve = extend_curve_P(quote, endpoint_params)
    reference = {10: 100, 20: 114, 30: 132, 40: 163, 50: 180, 60: 183, 70: 183, 80: 183}
    for maturity, bps in reference.items():
        assert 1e4 * par_spread(curve, DISCOUNT, maturity, quote.recovery) == pytest.approx(bps, abs=3)


def test_transient_spread_matches_reference(quote, transient_params):
    curve = extend_curve_P(quote, transient_params)
    assert 1e4 * par_spread(curve, DISCOUNT, 40, quote.recovery) == pytest.approx(178, abs=3)


def test_stressed_spreads_increase_with_maturity(quote):
    curve = extend_curve_slowest_uniform(quote, 80.0, 0.25)
    spreads = [par_spread(curve, DISCOUNT, t, quote.recovery) for t in (10, 20, 30, 40, 50)]
    assert spreads[0] == pytest.approx(quote.spread, abs=1e-10)
    assert all(b > a for a, b in zip(spreads[:-1], spreads[1:]))


def test_discrete_premium_bootstrap_reprices_quote(quote):
    curve = bootstrap_flat_hazard(quote, DISCOUNT, premium_frequency=4)
    rate = curve.hazard_at(0.0)
    assert par_spread(curve, DISCOUNT, quote.maturity, quote.recovery, premium_frequency=4) == pytest.approx(
        quote.spread, abs=1e-10
    )
    # 含违约时应计费用，离散约定与连续约定的强度很接近
    assert rate == pytest.approx(quote.flat_hazard, rel=0.01)


def test_zero_spread_gives_zero_hazard():
    curve = bootstrap_flat_hazard(CdsQuote(spread=0.0), DISCOUNT, premium_frequency=4)
    assert curve.hazard_at(5.0) == 0.0


def test_degenerate_annuity_raises():
    curve = HazardCurve.flat(1e16)
    with pytest.raises(ComputeError):
        par_spread(curve, DISCOUNT, 10, 0.4)


@pytest.mark.parametrize("kwargs", [
    dict(maturity=0.0),
    dict(spread=-0.01),
    dict(recovery=1.0),
    dict(recovery=-0.1),
    dict(spread=math.inf),
])
def test_invalid_quotes_rejected(kwargs):
    with pytest.raises(ParameterError):
        CdsQuote(**kwargs)


def test_invalid_par_spread_arguments(quote):
    curve = extend_curve_Xi(quote)
    with pytest.raises(ParameterError):
        par_spread(curve, DISCOUNT, 0.0, 0.4)
    with pytest.raises(ParameterError):
        par_spread(curve, DISCOUNT, 10.0, 1.0)
    with pytest.raises(ParameterError):
        risky_annuity(curve, DISCOUNT, 10.0, premium_frequency=0)


def test_extrapolation_policy(quote):
    assert extend_curve(quote, "flat").hazard_at(30.0) == pytest.approx(quote.flat_hazard)
    with pytest.raises(ValueError):
        extend_curve(quote, "linear")
    assert ExtrapolationPolicy("flat") is ExtrapolationPolicy.FLAT
