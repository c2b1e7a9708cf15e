"""Dense-matrix closure used as an independent check of the sparse engine.

Operators are expanded into explicit ``2**n x 2**n`` matrices with exact
Gaussian-rational entries (separate real and imaginary object arrays of
:class:`~fractions.Fraction`), bracketed with matrix products, and ranked by
plain Gaussian elimination on the flattened real vectors. Nothing here goes
through the Pauli multiplication table.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .pauli import SkewOperator
from .system import ControlSystem

__all__ = ["ORACLE_QUBIT_LIMIT", "to_matrix", "matrix_commutator", "dense_closure_oracle"]

ORACLE_QUBIT_LIMIT = 4

_F0, _F1 = Fraction(0), Fraction(1)
# (real part, imaginary part) of the single-qubit Paulis
_PAULI = {
    "I": (np.array([[_F1, _F0], [_F0, _F1]], dtype=object), np.zeros((2, 2), dtype=object) + _F0),
    "X": (np.array([[_F0, _F1], [_F1, _F0]], dtype=object), np.zeros((2, 2), dtype=object) + _F0),
    "Y": (np.zeros((2, 2), dtype=object) + _F0, np.array([[_F0, -_F1], [_F1, _F0]], dtype=object)),
    "Z": (np.array([[_F1, _F0], [_F0, -_F1]], dtype=object), np.zeros((2, 2), dtype=object) + _F0),
}


def _cmul(a, b):
    ar, ai = a
    br, bi = b
    return (ar @ br - ai @ bi, ar @ bi + ai @ br)


def _ckron(a, b):
    ar, ai = a
    br, bi = b
    return (np.kron(ar, br) - np.kron(ai, bi), np.kron(ar, bi) + np.kron(ai, br))


def word_matrix(letters: str):
    """Dense ``(real, imag)`` pair for a Pauli word, qubit 0 leftmost in the Kronecker product."""
    m = _PAULI[letters[0]]
    for ch in letters[1:]:
        m = _ckron(m, _PAULI[ch])
    return m


def to_matrix(op: SkewOperator):
    """``sum_w c_w (i w)`` as a dense ``(real, imag)`` pair of object arrays."""
    dim = 2**op.n
    re = np.zeros((dim, dim), dtype=object) + _F0
    im = np.zeros((dim, dim), dtype=object) + _F0
    for word, c in op.terms.items():
        pr, pi = word_matrix(str(word))
        c = Fraction(c)
        # i (pr + i pi) = -pi + i pr
        re = re - c * pi
        im = im + c * pr
    return re, im


def to_complex(op: SkewOperator) -> np.ndarray:
    re, im = to_matrix(op)
    return re.astype(float) + 1j * im.astype(float)


def matrix_commutator(a, b):
    ab = _cmul(a, b)
    ba = _cmul(b, a)
    return (ab[0] - ba[0], ab[1] - ba[1])


def _flatten(m) -> list[Fraction]:
    return list(m[0].ravel()) + list(m[1].ravel())


class _Echelon:
    def __init__(self):
        self.rows: list[tuple[int, list[Fraction]]] = []

    def add(self, vec: list[Fraction]) -> bool:
        v = list(vec)
        for p, row in self.rows:
            c = v[p]
            if c:
                v = [x - c * y for x, y in zip(v, row)]
        pivot = next((i for i, x in enumerate(v) if x), None)
        if pivot is None:
            return False
        inv = 1 / v[pivot]
        v = [x * inv for x in v]
        reduced = []
        for p, row in self.rows:
            c = row[pivot]
            if c:
                row = [x - c * y for x, y in zip(row, v)]
            reduced.append((p, row))
        reduced.append((pivot, v))
        self.rows = reduced
        return True

    def __len__(self) -> int:
        return len(self.rows)


def dense_closure_oracle(system: ControlSystem) -> int:
    """Dimension of the dynamical Lie algebra by the depth loop on dense matrices.

    Raises:
        ValueError: for more than ``ORACLE_QUBIT_LIMIT`` qubits.
    """
    if system.n > ORACLE_QUBIT_LIMIT:
        raise ValueError(f"dense oracle refuses {system.n} qubits (limit {ORACLE_QUBIT_LIMIT})")
    full = 4**system.n - 1
    ech = _Echelon()
    level0 = []
    for g in system.generators:
        m = to_matrix(g)
        if ech.add(_flatten(m)):
            level0.append(m)
    frontier = list(level0)
    while frontier and len(ech) < full:
        new = []
        for a in level0:
            for b in frontier:
                c = matrix_commutator(b, a)
                if ech.add(_flatten(c)):
                    new.append(c)
        frontier = new
    return len(ech)
