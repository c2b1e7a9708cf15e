from __future__ import annotations

from fractions import Fraction

import pytest

from modctrl.layout import build_template
from modctrl.pauli import PauliWord, SkewOperator
from modctrl.system import ControlSystem, instantiate_parameters


def op(n: int, terms: dict) -> SkewOperator:
    return SkewOperator(n, {PauliWord.from_string(w): Fraction(c) for w, c in terms.items()})


def system(n: int, drift: dict, *controls: dict) -> ControlSystem:
    return ControlSystem(n, op(n, drift), tuple(op(n, c) for c in controls))


class _ClosureCache:
    """Template closures are the slow part of the suite; compute each once."""

    def __init__(self):
        self._store = {}

    def template(self, kind: str, seed: int):
        """Direct certificate of template ``kind`` instantiated with ``seed``."""
        from modctrl.certify import certify_direct

        key = (kind, seed)
        if key not in self._store:
            self._store[key] = certify_direct(instantiate_parameters(build_template(kind), seed))
        return self._store[key]


@pytest.fixture(scope="session")
def closures() -> _ClosureCache:
    return _ClosureCache()


@pytest.fixture(scope="session")
def leaf_cache() -> dict:
    """Shared leaf-certificate cache for certify_layout (keyed by system fingerprint)."""
    return {}


@pytest.fixture(scope="session")
def double_run(leaf_cache):
    from modctrl.certify import certify_layout
    from modctrl.layout import bundled_layout

    return certify_layout(bundled_layout("double_t10"), 0, cache=leaf_cache)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
