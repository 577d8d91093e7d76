import numpy as np
import pytest
from hypothesis import strategies as st

from mmwave.params import CosseratParams, MaterialParams

UNIT = MaterialParams(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
COSSERAT_COUNTER = CosseratParams(1.0, 0.0, -0.5, 1.0, 1.0, 1.0)


@pytest.fixture
def unit():
    return UNIT


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def positive_material(rng, n=None):
    """Strictly positive-definite relaxed parameters with O(1) magnitudes."""
    def one():
        mu_e, mu_m, mu_c = rng.uniform(0.2, 4.0, 3)
        k_e, k_m = rng.uniform(0.2, 4.0, 2)
        L_c, rho, eta = rng.uniform(0.2, 2.0, 3)
        return MaterialParams.from_bulk(mu_e, k_e, mu_m, k_m, mu_c, L_c, rho, eta)

    return one() if n is None else [one() for _ in range(n)]


moduli = st.floats(-2.0, 4.0, allow_nan=False, allow_subnormal=False)
positive = st.floats(0.05, 4.0, allow_nan=False, allow_subnormal=False)


@st.composite
def materials(draw, positive_only=False):
    m = positive if positive_only else moduli
    return MaterialParams(
        draw(m), draw(m), draw(m), draw(m), draw(m),
        draw(st.floats(0.05, 2.0)), draw(st.floats(0.1, 3.0)), draw(st.floats(0.1, 3.0)),
    )
