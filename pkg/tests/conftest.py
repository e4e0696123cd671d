from fractions import Fraction

import pytest

from lfrcache.model import SystemConfig


@pytest.fixture
def k6_config():
    """K=6, mu=47/72, lambda=1/12 at the smallest valid F over GF(7)."""
    return SystemConfig.from_fractions(6, Fraction(47, 72), Fraction(1, 12), 7, 72)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            for name, value in getattr(rep, "user_properties", []):
                if name == "acceptance":
                    lines.append((value[0], f"criterion {value[0]}: {'PASS' if rep.passed else 'FAIL'}  {value[1]}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, text in sorted(lines):
            terminalreporter.write_line(text)
