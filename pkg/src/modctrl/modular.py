"""Dense closure over a prime field, a fast one-sided controllability test.

Elements are dense coefficient vectors indexed by packed Pauli key, with
entries in GF(p) for ``p = PRIME < 2**20``. Products of two residues stay
below ``2**40``, so float64 BLAS products over a few thousand columns are
exact and ``numpy.mod`` brings them back into range.

Every vector produced here is the reduction mod p of a genuine (p-integral)
rational element of the dynamical Lie algebra, and vectors independent mod p
lift to vectors independent over the rationals. Hence the dimension found
is a lower bound on the rational dimension, and reaching ``4**n - 1`` proves
controllability. A smaller value is inconclusive on its own; callers fall
back to the rational engine.
"""

from __future__ import annotations

import time
from fractions import Fraction

import numpy as np

from .closure import ClosureCaps, ClosureReport, full_dimension
from .pauli import SkewOperator
from .system import ControlSystem

__all__ = ["PRIME", "MODULAR_QUBIT_LIMIT", "modular_closure"]

PRIME = 1048573
MODULAR_QUBIT_LIMIT = 6
_CHUNK = 128


def _residue(c) -> int:
    c = Fraction(c)
    if c.denominator % PRIME == 0:
        raise ZeroDivisionError(f"coefficient {c} has a denominator divisible by {PRIME}")
    return c.numerator * pow(c.denominator, -1, PRIME) % PRIME


def _dense(op: SkewOperator, size: int) -> np.ndarray:
    v = np.zeros(size)
    for w, c in op.terms.items():
        v[w.key] = _residue(c)
    return v


class _BracketTable:
    """For each word ``w``: signs ``s(k, w)`` with ``[i P_k, i w] = s * i P_{k^w}``."""

    def __init__(self, n: int):
        size = 4**n
        self.n = n
        self.keys = np.arange(size, dtype=np.int64)
        mask = (1 << n) - 1
        self.x, self.z = self.keys & mask, self.keys >> n
        self._cache: dict[int, np.ndarray] = {}

    def signs(self, w: int) -> np.ndarray:
        s = self._cache.get(w)
        if s is None:
            n = self.n
            wx, wz = w & ((1 << n) - 1), w >> n
            x, z = self.x, self.z
            bc = np.bitwise_count
            anti = (bc((x & wz) ^ (z & wx)) & 1).astype(bool)
            e = (bc(x & z).astype(np.int64) + int(bc(np.int64(wx & wz))) + 2 * bc(z & wx)
                 - bc((x ^ wx) & (z ^ wz))) % 4
            s = np.where(anti, np.where(e == 1, -2.0, 2.0), 0.0)
            self._cache[w] = s
        return s

    def bracket_rows(self, frontier: np.ndarray, element: tuple[np.ndarray, np.ndarray]) -> np.ndarray:
        """Rows ``[f, a]`` for every row ``f`` of ``frontier``, reduced mod p."""
        out = np.zeros_like(frontier)
        for w, a in zip(*element):
            src = self.keys ^ int(w)
            # target t receives f[t ^ w] * s(t ^ w, w)
            out += frontier[:, src] * np.mod(self.signs(int(w))[src] * a, PRIME)
        return np.mod(out, PRIME)


def _eliminate(block: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``block`` mod p, keeping rows in input order.

    Pivot of each accepted row is its largest nonzero column.
    """
    rows = block.copy()
    accepted: list[int] = []
    pivots: list[int] = []
    for i in range(rows.shape[0]):
        nz = np.flatnonzero(rows[i])
        if nz.size == 0:
            continue
        p = int(nz[-1])
        rows[i] = np.mod(rows[i] * pow(int(rows[i, p]), -1, PRIME), PRIME)
        col = rows[:, p].copy()
        col[i] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            rows[hit] = np.mod(rows[hit] - np.outer(col[hit], rows[i]), PRIME)
        accepted.append(i)
        pivots.append(p)
    return rows[accepted], pivots


class _Span:
    """RREF basis mod p split into a settled part and the current depth's part.

    During a depth, candidates are reduced against the settled rows once and
    then live on the settled non-pivot columns only. Depth rows are kept in
    those coordinates, in RREF among themselves.
    """

    def __init__(self, size: int):
        self.size = size
        self.rows = np.zeros((0, size))
        self.pivots: list[int] = []
        self._begin()

    def _begin(self) -> None:
        taken = np.zeros(self.size, dtype=bool)
        taken[self.pivots] = True
        self.free = np.flatnonzero(~taken)
        self.rows_free = self.rows[:, self.free]
        self.depth_rows = np.zeros((0, self.free.size))
        self.depth_pivots: list[int] = []  # positions within ``free``

    def __len__(self) -> int:
        return len(self.pivots) + len(self.depth_pivots)

    def absorb(self, block: np.ndarray) -> int:
        free = block[:, self.free]
        if self.pivots:
            free = np.mod(free - np.mod(block[:, self.pivots] @ self.rows_free, PRIME), PRIME)
        if self.depth_pivots:
            free = np.mod(free - np.mod(free[:, self.depth_pivots] @ self.depth_rows, PRIME), PRIME)
        free = free[np.any(free != 0, axis=1)]
        if free.shape[0] == 0:
            return 0
        new, piv = _eliminate(free)
        if self.depth_pivots:
            d = self.depth_rows
            d = np.mod(d - np.mod(d[:, piv] @ new, PRIME), PRIME)
            self.depth_rows = np.vstack([d, new])
        else:
            self.depth_rows = new
        self.depth_pivots += piv
        return len(piv)

    def settle(self) -> np.ndarray:
        """Fold the depth rows into the settled rows; returns them in full coordinates."""
        new = np.zeros((len(self.depth_pivots), self.size))
        new[:, self.free] = self.depth_rows
        if self.depth_pivots:
            piv = [int(self.free[i]) for i in self.depth_pivots]
            if self.pivots:
                r = self.rows
                self.rows = np.vstack([np.mod(r - np.mod(r[:, piv] @ new, PRIME), PRIME), new])
            else:
                self.rows = new
            self.pivots = self.pivots + piv
        self._begin()
        return new


def modular_closure(system: ControlSystem, caps: ClosureCaps | None = None) -> ClosureReport:
    """Closure dimension mod ``PRIME`` with the same depth schedule as the exact engine.

    The report's ``arithmetic_mode`` is ``"modular"``. ``controllable`` is a
    proof when true; when false the dimension is only a lower bound.

    Raises:
        ValueError: more than ``MODULAR_QUBIT_LIMIT`` qubits (dense vectors
            of length ``4**n`` would not fit comfortably in memory).
    """
    n = system.n
    if n > MODULAR_QUBIT_LIMIT:
        raise ValueError(f"modular closure is dense; limited to {MODULAR_QUBIT_LIMIT} qubits, got {n}")
    caps = caps or ClosureCaps()
    start = time.perf_counter()
    size = 4**n
    full = full_dimension(n)
    table = _BracketTable(n)
    span = _Span(size)
    gens = [g for g in system.generators if not g.is_zero]
    if gens:
        span.absorb(np.array([_dense(g, size) for g in gens]))
    level0_rows = span.settle()
    level0 = [(np.flatnonzero(r), r[np.flatnonzero(r)]) for r in level0_rows]
    profile = [len(span)]
    frontier = level0_rows
    brackets = 0
    depth = 0
    truncated, reason = False, ""
    while frontier.shape[0] and len(span) < full:
        if caps.max_depth is not None and depth >= caps.max_depth:
            truncated, reason = True, "max_depth"
            break
        depth += 1
        for element in level0:
            for lo in range(0, frontier.shape[0], _CHUNK):
                span.absorb(table.bracket_rows(frontier[lo:lo + _CHUNK], element))
                brackets += min(_CHUNK, frontier.shape[0] - lo)
                if len(span) >= full:
                    break
            if len(span) >= full:
                break
        frontier = span.settle()
        if frontier.shape[0]:
            profile.append(frontier.shape[0])
        if caps.max_dim is not None and len(span) >= caps.max_dim and len(span) < full:
            truncated, reason = True, "max_dim"
            break
    dim = len(span)
    return ClosureReport(
        n=n, dimension=dim, full_dimension=full, controllable=dim == full and not truncated,
        max_depth=len(profile) - 1, brackets_evaluated=brackets, arithmetic_mode="modular",
        truncated=truncated, depth_profile=tuple(profile), seconds=time.perf_counter() - start,
        reason=reason,
    )
