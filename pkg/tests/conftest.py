import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lcembed.measure import PositiveMeasure

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def atomic_halfplane(draw, max_atoms=8, on_axis=False):
    n = draw(st.integers(1, max_atoms))
    xs = draw(st.lists(st.floats(0.0, 6.0), min_size=n, max_size=n))
    if on_axis:
        ys = [0.0] * n
    else:
        ys = draw(st.lists(st.floats(-6.0, 6.0), min_size=n, max_size=n))
    ms = draw(st.lists(st.floats(0.01, 5.0), min_size=n, max_size=n))
    locs = [complex(x, y) for x, y in zip(xs, ys)]
    if on_axis:
        return PositiveMeasure("axis", [(x, m) for x, m in zip(xs, ms)])
    return PositiveMeasure("half-plane", list(zip(locs, ms)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
