import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from rsr.grid import Connectivity, GridMap

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

CONNS = (Connectivity.FOUR, Connectivity.EIGHT)

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES = []


def random_grid(w, h, density, seed, conn=Connectivity.EIGHT):
    rng = np.random.default_rng(seed)
    blocked = rng.random((h, w)) < density
    chars = np.where(blocked, ord("@"), ord(".")).astype(np.uint8)
    return GridMap(w, h, chars.tobytes(), conn)


@st.composite
def grids(draw, max_side=12, conn=None, densities=(0.0, 0.1, 0.25, 0.4)):
    w = draw(st.integers(1, max_side))
    h = draw(st.integers(1, max_side))
    density = draw(st.sampled_from(densities))
    seed = draw(st.integers(0, 2**32 - 1))
    c = conn if conn is not None else draw(st.sampled_from(CONNS))
    return random_grid(w, h, density, seed, c)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
