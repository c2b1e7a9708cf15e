"""Dynamical Lie algebra closure by depth, with exact sparse elimination.

The generators (drift and controls) form depth 0. At depth ``p`` every depth-0
element is bracketed with every depth ``p-1`` element; candidates that are
independent of everything found so far become the depth ``p`` elements. The
loop stops when a depth contributes nothing, when the span is all of
su(2^n), or when a resource cap trips.

Linear independence is decided by elimination in the Pauli-word coordinates.
The reducer keeps its rows in reduced echelon form (pivot coefficient 1, no
other pivot word present in any row), so reducing a candidate is one pass
over the pivot words it contains.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2

from .pauli import PauliWord, SkewOperator, SizeMismatchError, bracket_packed
from .system import ControlSystem

__all__ = [
    "ClosureCaps",
    "ClosureGuardError",
    "ClosureReport",
    "LieBasis",
    "DIRECT_QUBIT_LIMIT",
    "FLOAT_PIVOT_TOL",
    "full_dimension",
    "reduce_against",
    "lie_closure",
    "is_controllable",
]

DIRECT_QUBIT_LIMIT = 8
FLOAT_PIVOT_TOL = 1e-10


class ClosureGuardError(RuntimeError):
    """Direct closure refused because the system is too large."""


def full_dimension(n: int) -> int:
    return 4**n - 1


@dataclass(frozen=True)
class ClosureCaps:
    """Resource caps; ``None`` means unlimited."""

    max_dim: int | None = None
    max_depth: int | None = None
    max_brackets: int | None = None


class _Reducer:
    def __init__(self, exact: bool, tol: float = FLOAT_PIVOT_TOL):
        self.exact = exact
        self.tol = tol
        self.rows: dict[int, dict[int, object]] = {}
        self.rowmax: dict[int, float] = {}

    def reduce(self, vec: dict, scale: float = 0.0) -> dict:
        """Eliminate all pivots from ``vec``.

        In float mode ``scale`` is the magnitude the candidate had before any
        cancellation (for a bracket, the product of the operand magnitudes);
        residual entries at or below ``FLOAT_PIVOT_TOL`` times the largest
        magnitude seen are treated as zero.
        """
        rows = self.rows
        r = dict(vec)
        if not self.exact:
            scale = max(scale, max((abs(c) for c in r.values()), default=0.0))
        for p in [k for k in r if k in rows]:
            c = r.get(p)
            if not c:
                continue
            if not self.exact:
                scale = max(scale, abs(c) * self.rowmax[p])
            for k, v in rows[p].items():
                nv = r.get(k, 0) - c * v
                if nv == 0:
                    r.pop(k, None)
                else:
                    r[k] = nv
        if not self.exact:
            tol = self.tol * scale
            r = {k: v for k, v in r.items() if abs(v) > tol}
        return r

    def insert(self, residual: dict) -> int:
        if self.exact:
            pivot = max(residual)
        else:
            # largest magnitude for stability; ties by key
            pivot = max(residual, key=lambda k: (abs(residual[k]), k))
        inv = 1 / residual[pivot]
        row = {k: v * inv for k, v in residual.items()}
        row[pivot] = gmpy2.mpq(1) if self.exact else 1.0
        for other in self.rows.values():
            c = other.get(pivot)
            if c is None:
                continue
            for k, v in row.items():
                nv = other.get(k, 0) - c * v
                if nv == 0:
                    other.pop(k, None)
                else:
                    other[k] = nv
            other.pop(pivot, None)
        self.rows[pivot] = row
        if not self.exact:
            for p, other in self.rows.items():
                self.rowmax[p] = max(abs(v) for v in other.values())
        return pivot


@dataclass
class LieBasis:
    """Linearly independent elements of a Lie algebra with their depths.

    ``pivot_index`` maps each element's pivot word to the element position.
    ``elements[i]`` is the residual that was accepted at depth ``depths[i]``.
    """

    n: int
    exact: bool = True
    elements: list[SkewOperator] = field(default_factory=list)
    depths: list[int] = field(default_factory=list)
    pivot_index: dict[PauliWord, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._reducer = _Reducer(self.exact)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def dimension(self) -> int:
        return len(self.elements)

    def depth_profile(self) -> list[int]:
        """Number of elements found at each depth."""
        if not self.depths:
            return []
        profile = [0] * (max(self.depths) + 1)
        for d in self.depths:
            profile[d] += 1
        return profile

    def _reduce_packed(self, vec: dict, scale: float = 0.0) -> dict:
        return self._reducer.reduce(vec, scale)

    def _add_packed(self, residual: dict, depth: int) -> SkewOperator:
        pivot = self._reducer.insert(residual)
        op = SkewOperator._from_packed(self.n, _to_public(residual))
        self.pivot_index[PauliWord.from_key(self.n, pivot)] = len(self.elements)
        self.elements.append(op)
        self.depths.append(depth)
        return op

    def add(self, candidate: SkewOperator, depth: int) -> SkewOperator | None:
        """Reduce ``candidate`` and append the residual if it is nonzero."""
        r = reduce_against(self, candidate)
        if r.is_zero:
            return None
        return self._add_packed(_to_engine(r, self.exact), depth)

    def contains(self, op: SkewOperator) -> bool:
        return reduce_against(self, op).is_zero


def reduce_against(basis: LieBasis, candidate: SkewOperator) -> SkewOperator:
    """Residual of ``candidate`` after eliminating every pivot of ``basis``.

    A zero result means ``candidate`` lies in the span of the basis.
    """
    if candidate.n != basis.n:
        raise SizeMismatchError(f"candidate on {candidate.n} qubits, basis on {basis.n}")
    vec = _to_engine(candidate, basis.exact)
    return SkewOperator._from_packed(basis.n, _to_public(basis._reduce_packed(vec)))


@dataclass(frozen=True)
class ClosureReport:
    n: int
    dimension: int
    full_dimension: int
    controllable: bool
    max_depth: int
    brackets_evaluated: int
    arithmetic_mode: str
    truncated: bool
    depth_profile: tuple[int, ...] = ()
    seconds: float = field(default=0.0, compare=False)
    reason: str = ""

    def as_record(self, timing: bool = False) -> dict:
        rec = {
            "n": self.n,
            "dimension": self.dimension,
            "full_dimension": self.full_dimension,
            "controllable": self.controllable,
            "max_depth": self.max_depth,
            "brackets_evaluated": self.brackets_evaluated,
            "arithmetic_mode": self.arithmetic_mode,
            "truncated": self.truncated,
            "depth_profile": list(self.depth_profile),
        }
        if self.reason:
            rec["reason"] = self.reason
        if timing:
            rec["seconds"] = round(self.seconds, 3)
        return rec


def _magnitude(vec: dict) -> float:
    return max((abs(c) for c in vec.values()), default=0.0)


def _to_engine(op: SkewOperator, exact: bool) -> dict:
    """Packed terms in the engine's number type (``mpq`` or ``float``)."""
    if exact:
        return {k: gmpy2.mpq(c.numerator, c.denominator) if isinstance(c, Fraction) else gmpy2.mpq(c)
                for k, c in op._terms.items()}
    return {k: float(c) for k, c in op._terms.items()}


def _to_public(vec: dict) -> dict:
    return {k: Fraction(int(c.numerator), int(c.denominator)) if isinstance(c, _MPQ) else c
            for k, c in vec.items()}


_MPQ = type(gmpy2.mpq(0))


def lie_closure(
    system: ControlSystem,
    caps: ClosureCaps | None = None,
    *,
    arithmetic: str = "exact",
    force: bool = False,
    bracket_all_depths: bool = False,
    tol: float = FLOAT_PIVOT_TOL,
) -> tuple[LieBasis, ClosureReport]:
    """Compute a basis of the dynamical Lie algebra of ``system``.

    Args:
        system: drift and control operators.
        caps: optional resource caps. Hitting one marks the report truncated.
        arithmetic: ``"exact"`` (rational elimination) or ``"float"``
            (pivots accepted above ``FLOAT_PIVOT_TOL`` times the largest
            coefficient of the candidate).
        force: allow more than ``DIRECT_QUBIT_LIMIT`` qubits.
        bracket_all_depths: bracket new candidates against every earlier
            element instead of depth-0 elements only.
        tol: relative pivot tolerance for float mode (ignored when exact).

    Raises:
        ClosureGuardError: ``system.n`` exceeds the direct limit without ``force``.
    """
    if arithmetic not in ("exact", "float"):
        raise ValueError(f"unknown arithmetic mode {arithmetic!r}")
    if system.n > DIRECT_QUBIT_LIMIT and not force:
        raise ClosureGuardError(
            f"direct closure refused for {system.n} qubits (limit {DIRECT_QUBIT_LIMIT}); "
            "certify compositionally or pass force"
        )
    caps = caps or ClosureCaps()
    exact = arithmetic == "exact"
    n = system.n
    full = full_dimension(n)
    basis = LieBasis(n, exact=exact)
    basis._reducer.tol = tol
    start = time.perf_counter()

    def packed(op: SkewOperator) -> dict:
        return _to_engine(op, exact)

    truncated = False
    reason = ""
    for g in system.generators:
        r = basis._reduce_packed(packed(g))
        if r:
            basis._add_packed(r, 0)
    level0 = [packed(e) for e in basis.elements]
    engine_elements = list(level0)
    frontier = list(level0)
    brackets = 0
    depth = 0

    def cap_hit() -> str:
        if caps.max_dim is not None and len(basis) >= caps.max_dim:
            return "max_dim"
        if caps.max_brackets is not None and brackets >= caps.max_brackets:
            return "max_brackets"
        return ""

    while frontier and len(basis) < full:
        if caps.max_depth is not None and depth >= caps.max_depth:
            truncated, reason = True, "max_depth"
            break
        depth += 1
        partners = list(engine_elements) if bracket_all_depths else level0
        new: list[dict] = []
        done = False
        for a in partners:
            for b in frontier:
                hit = cap_hit()
                if hit:
                    truncated, reason, done = True, hit, True
                    break
                brackets += 1
                c = bracket_packed(n, b, a)
                if not c:
                    continue
                r = basis._reduce_packed(c, 0.0 if exact else 2 * _magnitude(a) * _magnitude(b))
                if r:
                    basis._add_packed(r, depth)
                    new.append(r)
                    engine_elements.append(r)
                    if len(basis) >= full:
                        done = True
                        break
            if done:
                break
        if done:
            break
        frontier = new

    dim = len(basis)
    if dim >= full:
        truncated, reason = False, ""
    report = ClosureReport(
        n=n,
        dimension=dim,
        full_dimension=full,
        controllable=(dim == full and not truncated),
        max_depth=max(basis.depths, default=0),
        brackets_evaluated=brackets,
        arithmetic_mode=arithmetic,
        truncated=truncated,
        depth_profile=tuple(basis.depth_profile()),
        seconds=time.perf_counter() - start,
        reason=reason,
    )
    return basis, report


def is_controllable(system: ControlSystem, caps: ClosureCaps | None = None, **kwargs) -> ClosureReport:
    """Closure report for ``system``; ``controllable`` iff the span is su(2^n)."""
    return lie_closure(system, caps, **kwargs)[1]
