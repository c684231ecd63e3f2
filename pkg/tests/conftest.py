import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from netprice.core import Instance  # noqa: E402

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

quarter = st.integers(min_value=0, max_value=16).map(lambda k: Fraction(k, 4))


@st.composite
def instances(draw, min_n=1, max_n=4, nonneg=True):
    """Small instances with quarter-unit data."""
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    a, b = [], []
    for _ in range(n):
        lo = draw(st.integers(min_value=0, max_value=12))
        hi = draw(st.integers(min_value=lo + 1, max_value=16))
        a.append(Fraction(lo, 4))
        b.append(Fraction(hi, 4))
    low = 0 if nonneg else -8
    T = [
        [Fraction(0) if i == j else Fraction(draw(st.integers(min_value=low, max_value=8)), 4) for i in range(n)]
        for j in range(n)
    ]
    return Instance(a, b, T)


@pytest.fixture
def tmp_instance_file(tmp_path):
    def write(text, name="inst.np"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        status, title = results[number]
        terminalreporter.write_line(f"criterion {number:2d} {status}: {title}")
