import pytest
from hypothesis import HealthCheck, settings, strategies as st

from cliquepart.core import WeightedInstance, num_pairs

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def triangle():
    """w01 = w12 = 1, w02 = -1: the smallest instance where P's constraints bind."""
    return WeightedInstance.from_dict(3, {(0, 1): 1, (1, 2): 1, (0, 2): -1})


@st.composite
def instances(draw, min_n=3, max_n=6, lo=-3, hi=3):
    n = draw(st.integers(min_n, max_n))
    w = draw(st.lists(st.integers(lo, hi), min_size=num_pairs(n), max_size=num_pairs(n)))
    return WeightedInstance(n, tuple(w))


@st.composite
def edge_vectors(draw, min_n=1, max_n=7):
    from cliquepart.core import EdgeVector

    n = draw(st.integers(min_n, max_n))
    bits = draw(st.lists(st.integers(0, 1), min_size=num_pairs(n), max_size=num_pairs(n)))
    return EdgeVector(n, tuple(bits))
