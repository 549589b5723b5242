import numpy as np
import pytest
from hypothesis import strategies as st

from qaoa1 import IsingModel, generate_erdos_renyi


def random_int_model(rng, n, p=0.5, fields=True, lo=-5, hi=5):
    """ER graph with nonzero integer couplings (and fields) drawn from [lo, hi]."""
    couplings = {}
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                w = 0
                while w == 0:
                    w = int(rng.integers(lo, hi + 1))
                couplings[(u, v)] = w
    h = rng.integers(lo, hi + 1, size=n) if fields else np.zeros(n)
    return IsingModel(n, couplings, h.astype(float))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def single_edge():
    return IsingModel(2, {(0, 1): 1.0})


@pytest.fixture
def triangle():
    return IsingModel(3, {(0, 1): 1.0, (0, 2): 1.0, (1, 2): 1.0})


@st.composite
def small_models(draw, max_n=6, fields=None):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    w = st.integers(-5, 5).filter(lambda x: x != 0)
    couplings = {e: float(draw(w)) for e in chosen}
    with_fields = draw(st.booleans()) if fields is None else fields
    h = [float(draw(st.integers(-5, 5))) for _ in range(n)] if with_fields else [0.0] * n
    return IsingModel(n, couplings, h)


def er(n, p, seed, weights="pm1", fields=None):
    return generate_erdos_renyi(n, p, weights, seed, fields)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
