import os
import sys

import pytest
from hypothesis import HealthCheck, assume, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from danielewski.ring import DefiningPoly, Ring, simple_zero_check  # noqa: E402

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

SMOOTH_P = ["z", "z^2 - 1", "z^3 - z", "z^4 - 1", "z^3 + 2*z + 1", "z^5 - 3*z^2 + 1/2"]


def ring_of(text, params=("t", "s")):
    return Ring(DefiningPoly.parse(text), params)


@pytest.fixture(params=SMOOTH_P)
def smooth_ring(request):
    return ring_of(request.param)


@st.composite
def ring_elems(draw, ring, max_deg=3, max_terms=4):
    """Random normal-form elements with small integer coefficients."""
    out = ring.zero
    for _ in range(draw(st.integers(0, max_terms))):
        h = draw(st.integers(-max_deg, max_deg))
        k = tuple(draw(st.integers(0, max_deg)) for _ in range(ring.N))
        c = draw(st.integers(-5, 5))
        out = out + ring.monomial(max(h, 0), max(-h, 0), k, coeff=c)
    return out


@st.composite
def squarefree_polys(draw, min_deg=1, max_deg=6):
    """Random univariate p with simple zeros (rejection on the gcd test)."""
    deg = draw(st.integers(min_deg, max_deg))
    coeffs = [draw(st.integers(-4, 4)) for _ in range(deg)] + [draw(st.sampled_from([1, -1, 2, 3]))]
    terms = [f"({c})*z^{e}" for e, c in enumerate(coeffs) if c]
    p = DefiningPoly.parse(" + ".join(terms))
    assume(simple_zero_check(p))
    return p
