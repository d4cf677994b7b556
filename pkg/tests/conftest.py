import pytest

from ccva.core.cds import CdsQuote
from ccva.core.sigmoid import SigmoidParams
from ccva.core.xva import MarketEnvironment


@pytest.fixture
def quote():
    """10 年期 CDS 100bps、回收率 40%"""
    return CdsQuote(maturity=10.0, spread=0.0100, recovery=0.40)


@pytest.fixture
def market():
    return MarketEnvironment()


@pytest.fixture
def endpoint_params(quote):
    return SigmoidParams(False, 10.0, quote.flat_hazard, 40.0, 20.0, 0.10, 80.0, 0.25)


@pytest.fixture
def transient_params(quote):
    return SigmoidParams(True, 10.0, quote.flat_hazard, 40.0, 20.0, 0.10, 80.0, 0.25)
