"""Small named control systems (up to three qubits) used for cross-checks.

The set mixes controllable and non-controllable systems so that closure
engines can be compared on both outcomes.
"""

from __future__ import annotations

from fractions import Fraction

from .pauli import PauliWord, SkewOperator
from .system import ControlSystem

__all__ = ["CATALOG", "catalog_system", "catalog_names"]


def _op(n: int, terms: dict[str, object]) -> SkewOperator:
    return SkewOperator(n, {PauliWord.from_string(w): Fraction(c) for w, c in terms.items()})


def _sys(n: int, drift: dict[str, object], *controls: dict[str, object]) -> ControlSystem:
    return ControlSystem(n, _op(n, drift), tuple(_op(n, c) for c in controls),
                         tuple(f"u{j}" for j in range(len(controls))))


_H = Fraction(1, 2)

CATALOG: dict[str, ControlSystem] = {
    "qubit_drift_only": _sys(1, {"Z": 1}),
    "qubit_z_x": _sys(1, {"Z": -_H}, {"X": 1}),
    "qubit_commuting": _sys(1, {"Z": 1}, {"Z": 3}),
    "pair_uncoupled": _sys(2, {"ZI": -_H, "IZ": Fraction(-3, 4)}, {"XI": 1}, {"IX": 1}),
    "pair_xxyy_one_control": _sys(2, {"ZI": -1, "IZ": Fraction(-3, 2), "XX": 1, "YY": 1}, {"XI": 1}),
    "pair_xxyy_two_controls": _sys(2, {"ZI": -1, "IZ": Fraction(-3, 2), "XX": 1, "YY": 1}, {"XI": 1}, {"IX": 1}),
    "pair_zz_two_controls": _sys(2, {"ZI": -1, "IZ": Fraction(-3, 2), "ZZ": 1}, {"XI": 1}, {"IX": 1}),
    "pair_heisenberg": _sys(2, {"XX": 1, "YY": 1, "ZZ": 1}, {"ZI": 1}),
    "pair_zz_x_single": _sys(2, {"ZZ": 1}, {"XI": 1}),
    "chain3_one_control": _sys(3, {"ZII": -_H, "IZI": -1, "IIZ": Fraction(-7, 4),
                                   "XXI": 1, "YYI": 1, "IXX": 2, "IYY": 2}, {"XII": 1}),
    "chain3_two_controls": _sys(3, {"ZII": -_H, "IZI": -1, "IIZ": Fraction(-7, 4),
                                    "XXI": 1, "YYI": 1, "IXX": 2, "IYY": 2}, {"XII": 1}, {"IXI": 1}),
    "chain3_zz_ends": _sys(3, {"ZZI": 1, "IZZ": 1}, {"XII": 1}, {"IIX": 1}),
    "triple_local_only": _sys(3, {"ZII": 1, "IZI": 2, "IIZ": 3}, {"XII": 1}, {"IXI": 1}, {"IIX": 1}),
}


def catalog_names() -> list[str]:
    return sorted(CATALOG)


def catalog_system(name: str) -> ControlSystem:
    return CATALOG[name]
