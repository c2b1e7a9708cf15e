"""Control systems ``H(t) = H_0 + sum_j u_j(t) H_j`` in skew-operator form.

Only the operator set matters for controllability, so the control amplitudes
``u_j(t)`` never appear here: a system is its drift ``i H_0``, its control
operators ``i H_j`` and the qubit count.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction

from .pauli import PauliWord, SkewOperator, SizeMismatchError

__all__ = ["ControlSystem", "ParametricSystem", "ParametricTerm", "instantiate_parameters"]


@dataclass(frozen=True)
class ControlSystem:
    n: int
    drift: SkewOperator
    controls: tuple[SkewOperator, ...] = ()
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "controls", tuple(self.controls))
        object.__setattr__(self, "labels", tuple(self.labels))
        for op in (self.drift, *self.controls):
            if op.n != self.n:
                raise SizeMismatchError(f"operator on {op.n} qubits in a {self.n}-qubit system")
        if self.labels and len(self.labels) != len(self.controls):
            raise ValueError("one label per control operator")

    @property
    def generators(self) -> list[SkewOperator]:
        """Drift first, then the controls in order."""
        return [self.drift, *self.controls]

    def to_text(self) -> str:
        lines = [f"n {self.n}", f"drift {self.drift.to_text()}"]
        for j, op in enumerate(self.controls):
            label = self.labels[j] if self.labels else f"u{j}"
            lines.append(f"control {label} {op.to_text()}")
        return "\n".join(lines)

    def fingerprint(self) -> str:
        """SHA-256 of the canonical rendering; stable across runs."""
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ParametricTerm:
    """``scale * value(symbol) * (i word)``; ``symbol=None`` means a constant term."""

    word: PauliWord
    symbol: str | None
    scale: Fraction = Fraction(1)


@dataclass(frozen=True)
class ParametricSystem:
    """A control system whose drift coefficients are named placeholders.

    Frequencies and coupling strengths (``omega_j``, ``J_k_l``) are left as
    symbols until :func:`instantiate_parameters` draws concrete values.
    """

    n: int
    drift_terms: tuple[ParametricTerm, ...]
    controls: tuple[SkewOperator, ...] = ()
    labels: tuple[str, ...] = ()
    name: str = ""

    @property
    def symbols(self) -> list[str]:
        seen: dict[str, None] = {}
        for t in self.drift_terms:
            if t.symbol is not None:
                seen.setdefault(t.symbol)
        return list(seen)


def sample_distinct_rationals(rng: random.Random, count: int,
                              max_numerator: int = 60, max_denominator: int = 7) -> list[Fraction]:
    """``count`` pairwise distinct positive rationals with small terms."""
    values: list[Fraction] = []
    seen: set[Fraction] = set()
    while len(values) < count:
        v = Fraction(rng.randint(1, max_numerator), rng.randint(1, max_denominator))
        if v in seen:
            continue
        seen.add(v)
        values.append(v)
    return values


def instantiate_parameters(system: ParametricSystem, seed: int | random.Random) -> ControlSystem:
    """Substitute seeded, pairwise distinct random rationals for every symbol.

    Args:
        system: the parameterized system.
        seed: integer seed or an existing :class:`random.Random` to draw from.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    symbols = system.symbols
    values = dict(zip(symbols, sample_distinct_rationals(rng, len(symbols))))
    terms: dict[PauliWord, Fraction] = {}
    for t in system.drift_terms:
        v = t.scale * (values[t.symbol] if t.symbol is not None else 1)
        terms[t.word] = terms.get(t.word, Fraction(0)) + v
    drift = SkewOperator(system.n, terms)
    return ControlSystem(system.n, drift, system.controls, system.labels)


def parameters_of(system: ParametricSystem, seed: int) -> dict[str, Fraction]:
    """The symbol values :func:`instantiate_parameters` would use for ``seed``."""
    rng = random.Random(seed)
    symbols = system.symbols
    return dict(zip(symbols, sample_distinct_rationals(rng, len(symbols))))
