"""Commutator gadgets that rewrite one Pauli letter at a time.

Pauli indices are 1 = X, 2 = Y, 3 = Z with cyclic arithmetic (``4 -> 1``).
Each move is defined as a (nested) commutator with local operators, and the
functions here evaluate exactly that commutator:

* ``f_cyc``: ``-1/2 [i s_{j+2}^(n), op]`` advances the letter at ``n``
  (X -> Y -> Z -> X).
* ``f_gen``: ``-1/4 [i s_{k+1}^(m), [i s_j^(n) s_{k+1}^(m), op]]`` installs
  ``s_j`` on an identity position ``n``, using the letter ``s_k`` at ``m``.
* ``f_rem``: the same nested bracket with ``s_j`` equal to the letter at ``n``
  turns that position back into the identity.

All three keep the coefficient of a single-term operator unchanged. They are
only applied to single-term operators; a multi-term operator is rejected.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .pauli import LETTERS, PauliWord, SkewOperator, commutator, scale_add

__all__ = [
    "MoveError",
    "LocalTargetError",
    "ZeroCoefficientError",
    "IndexMove",
    "DerivationPath",
    "AuditReport",
    "f_cyc",
    "f_gen",
    "f_rem",
    "f_cyc_closed_form",
    "f_gen_closed_form",
    "f_rem_closed_form",
    "coupling_matrix",
    "isolate_coupling_term",
    "plan_derivation",
    "sample_basis_audit",
]


class MoveError(ValueError):
    """A move's preconditions do not hold for the operator."""


class LocalTargetError(ValueError):
    """The target word acts on one partition only."""


class ZeroCoefficientError(ValueError):
    """The requested coupling coefficient is zero."""

    def __init__(self, message: str, nonzero: Sequence[tuple[int, int]]):
        super().__init__(message)
        self.nonzero = list(nonzero)


def _cyc(j: int, step: int) -> int:
    return (j - 1 + step) % 3 + 1


def _letter(index: int) -> str:
    return LETTERS[index]


def _index(letter: str) -> int:
    return LETTERS.index(letter)


def _single_term(op: SkewOperator) -> tuple[PauliWord, Fraction]:
    if len(op) != 1:
        raise MoveError(f"moves apply to single-term operators, got {len(op)} terms")
    ((word, coeff),) = op.terms.items()
    return word, coeff


def _local(n: int, letters: dict[int, int]) -> SkewOperator:
    word = PauliWord.identity(n)
    for q, idx in letters.items():
        word = word.with_letter(q, _letter(idx))
    return SkewOperator.from_word(word)


def _check_position(op: SkewOperator, q: int) -> None:
    if not 0 <= q < op.n:
        raise MoveError(f"position {q} out of range for {op.n} qubits")


def f_cyc(op: SkewOperator, position: int) -> SkewOperator:
    """Advance the letter at ``position`` cyclically, via ``-1/2 [i s_{j+2}, op]``."""
    word, _ = _single_term(op)
    _check_position(op, position)
    j = _index(word.letter(position))
    if j == 0:
        raise MoveError(f"f_cyc needs a non-identity letter at position {position}")
    gadget = _local(op.n, {position: _cyc(j, 2)})
    return scale_add([(Fraction(-1, 2), commutator(gadget, op))])


def _nested(op: SkewOperator, n: int, m: int, j: int, k: int) -> SkewOperator:
    outer = _local(op.n, {m: _cyc(k, 1)})
    inner = _local(op.n, {n: j, m: _cyc(k, 1)})
    return scale_add([(Fraction(-1, 4), commutator(outer, commutator(inner, op)))])


def _check_pair(op: SkewOperator, n: int, m: int) -> tuple[PauliWord, int]:
    word, _ = _single_term(op)
    _check_position(op, n)
    _check_position(op, m)
    if n == m:
        raise MoveError("the two positions of a move must differ")
    k = _index(word.letter(m))
    if k == 0:
        raise MoveError(f"needs a non-identity letter at anchor position {m}")
    return word, k


def f_gen(op: SkewOperator, position_n: int, position_m: int, new_index: int) -> SkewOperator:
    """Install ``s_{new_index}`` on the identity position ``position_n``.

    The letter at ``position_m`` (index ``k``) is the anchor the nested
    bracket needs; it is left untouched.
    """
    word, k = _check_pair(op, position_n, position_m)
    if word.letter(position_n) != "I":
        raise MoveError(f"f_gen needs an identity letter at position {position_n}")
    if new_index not in (1, 2, 3):
        raise MoveError(f"new index must be 1, 2 or 3, got {new_index}")
    return _nested(op, position_n, position_m, new_index, k)


def f_rem(op: SkewOperator, position_n: int, position_m: int) -> SkewOperator:
    """Turn the letter at ``position_n`` into the identity, anchored at ``position_m``."""
    word, k = _check_pair(op, position_n, position_m)
    j = _index(word.letter(position_n))
    if j == 0:
        raise MoveError(f"f_rem needs a non-identity letter at position {position_n}")
    return _nested(op, position_n, position_m, j, k)


def f_cyc_closed_form(op: SkewOperator, position: int) -> SkewOperator:
    word, c = _single_term(op)
    j = _index(word.letter(position))
    if j == 0:
        raise MoveError(f"f_cyc needs a non-identity letter at position {position}")
    return SkewOperator(op.n, {word.with_letter(position, _letter(_cyc(j, 1))): c})


def f_gen_closed_form(op: SkewOperator, position_n: int, position_m: int, new_index: int) -> SkewOperator:
    word, _ = _check_pair(op, position_n, position_m)
    if word.letter(position_n) != "I":
        raise MoveError(f"f_gen needs an identity letter at position {position_n}")
    _, c = _single_term(op)
    return SkewOperator(op.n, {word.with_letter(position_n, _letter(new_index)): c})


def f_rem_closed_form(op: SkewOperator, position_n: int, position_m: int) -> SkewOperator:
    word, _ = _check_pair(op, position_n, position_m)
    if word.letter(position_n) == "I":
        raise MoveError(f"f_rem needs a non-identity letter at position {position_n}")
    _, c = _single_term(op)
    return SkewOperator(op.n, {word.with_letter(position_n, "I"): c})


# --- entangling coupling isolation -----------------------------------------


def coupling_matrix(coupling: SkewOperator, qubit_a: int, qubit_b: int) -> list[list[Fraction]]:
    """The 3x3 matrix ``c[alpha-1][j-1]`` of a two-qubit coupling operator.

    Raises:
        ValueError: if a term is not of the form ``s_alpha^(a) s_j^(b)``.
    """
    c = [[Fraction(0)] * 3 for _ in range(3)]
    for word, coeff in coupling.terms.items():
        if set(word.support) != {qubit_a, qubit_b}:
            raise ValueError(f"term {word} is not a two-qubit term on ({qubit_a}, {qubit_b})")
        c[_index(word.letter(qubit_a)) - 1][_index(word.letter(qubit_b)) - 1] = coeff
    return c


def isolate_coupling_term(coupling: SkewOperator, qubit_a: int, qubit_b: int,
                          alpha: int = 3, j: int = 3) -> SkewOperator:
    """Single cross term extracted from a two-qubit coupling by local brackets.

    First ``[i s_alpha^(a), [i s_{alpha+1}^(a), .]]`` keeps only the terms with
    index ``alpha`` on qubit ``a``; then the same pattern on qubit ``b`` keeps
    index ``j``. The result is ``16 c_{alpha,j} i s_{alpha+1}^(a) s_{j+1}^(b)``;
    for ``alpha = j = 3`` that is ``16 c_33 i X^(a) X^(b)``.

    Raises:
        ZeroCoefficientError: ``c_{alpha,j}`` is zero. ``err.nonzero`` lists
            the index pairs that could be targeted instead.
    """
    c = coupling_matrix(coupling, qubit_a, qubit_b)
    if c[alpha - 1][j - 1] == 0:
        nonzero = [(a + 1, b + 1) for a in range(3) for b in range(3) if c[a][b] != 0]
        raise ZeroCoefficientError(
            f"coefficient c_{alpha},{j} is zero; nonzero entries: {nonzero}", nonzero
        )
    n = coupling.n
    op = commutator(_local(n, {qubit_a: _cyc(alpha, 1)}), coupling)
    op = commutator(_local(n, {qubit_a: alpha}), op)
    op = commutator(_local(n, {qubit_b: _cyc(j, 1)}), op)
    op = commutator(_local(n, {qubit_b: j}), op)
    return op


# --- derivation planning ----------------------------------------------------


@dataclass(frozen=True)
class IndexMove:
    """One f-operation.

    ``positions`` is ``(n,)`` for ``cyc`` and ``(n, m)`` otherwise;
    ``indices`` holds the Pauli index at each position before the move,
    except for ``gen`` where the first entry is the index being installed.
    """

    kind: str
    partition: str
    positions: tuple[int, ...]
    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind not in ("cyc", "gen", "rem"):
            raise ValueError(f"unknown move kind {self.kind!r}")
        if self.partition not in ("A", "B"):
            raise ValueError(f"partition must be A or B, got {self.partition!r}")
        want = 1 if self.kind == "cyc" else 2
        if len(self.positions) != want or len(self.indices) != want:
            raise ValueError(f"{self.kind} moves take {want} position(s) and index(es)")
        if want == 2 and self.positions[0] == self.positions[1]:
            raise ValueError("gen and rem moves need two distinct positions")
        if any(i not in (1, 2, 3) for i in self.indices):
            raise ValueError("move indices must lie in {1, 2, 3}")

    def apply(self, op: SkewOperator) -> SkewOperator:
        word, _ = _single_term(op)
        actual = [_index(word.letter(q)) for q in self.positions]
        if self.kind == "gen":
            actual[0] = self.indices[0] if actual[0] == 0 else -1
        if tuple(actual) != self.indices:
            raise MoveError(f"move {self.to_text()} does not match operator word {word}")
        if self.kind == "cyc":
            return f_cyc(op, self.positions[0])
        if self.kind == "gen":
            return f_gen(op, self.positions[0], self.positions[1], self.indices[0])
        return f_rem(op, self.positions[0], self.positions[1])

    def to_text(self) -> str:
        pos = ",".join(map(str, self.positions))
        idx = ",".join(map(str, self.indices))
        return f"MOVE {self.kind} {self.partition} {pos} {idx}"

    @classmethod
    def from_text(cls, line: str) -> "IndexMove":
        parts = line.split()
        if len(parts) != 5 or parts[0] != "MOVE":
            raise ValueError(f"malformed move line {line!r}")
        return cls(parts[1], parts[2],
                   tuple(int(p) for p in parts[3].split(",")),
                   tuple(int(i) for i in parts[4].split(",")))


@dataclass(frozen=True)
class DerivationPath:
    seed: SkewOperator
    moves: tuple[IndexMove, ...]
    target: PauliWord

    def replay(self) -> SkewOperator:
        op = self.seed
        for move in self.moves:
            op = move.apply(op)
        return op

    def check(self) -> bool:
        """True iff replay ends on a nonzero multiple of ``i target``."""
        try:
            op = self.replay()
        except MoveError:
            return False
        return len(op) == 1 and op.coefficient(self.target) != 0

    def to_text(self) -> str:
        (word, coeff), = self.seed.terms.items()
        lines = [f"SEED {coeff} {word}", f"TARGET {self.target}"]
        lines += [m.to_text() for m in self.moves]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DerivationPath":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        tag, coeff, word = lines[0].split()
        if tag != "SEED":
            raise ValueError("trace must start with a SEED line")
        tag, target = lines[1].split()
        if tag != "TARGET":
            raise ValueError("second trace line must be TARGET")
        seed = SkewOperator.from_word(word, Fraction(coeff))
        moves = tuple(IndexMove.from_text(ln) for ln in lines[2:])
        return cls(seed, moves, PauliWord.from_string(target))


def _partition_sets(n: int, partition_a: Iterable[int]) -> tuple[list[int], list[int]]:
    a = sorted(set(partition_a))
    if not a or any(not 0 <= q < n for q in a):
        raise ValueError("partition A must be a non-empty set of valid qubits")
    b = [q for q in range(n) if q not in set(a)]
    if not b:
        raise ValueError("partition B is empty")
    return a, b


def plan_derivation(seed: SkewOperator | PauliWord, target: PauliWord,
                    partition_a: Iterable[int]) -> DerivationPath:
    """Moves turning a cross-partition seed term into ``target``.

    The seed must carry exactly one non-identity letter in each partition and
    the target at least one. Letters are installed with ``gen`` moves
    (partition A first, ascending qubits), then seed positions the target does
    not use are cleared with ``rem`` moves, then ``cyc`` moves fix the
    remaining letters.

    Raises:
        LocalTargetError: the target acts on one partition only.
    """
    if isinstance(seed, PauliWord):
        seed = SkewOperator.from_word(seed)
    word, _ = _single_term(seed)
    if target.n != word.n:
        raise ValueError("seed and target act on different qubit counts")
    part_a, part_b = _partition_sets(word.n, partition_a)
    parts = (("A", part_a), ("B", part_b))
    for name, qubits in parts:
        if sum(word.letter(q) != "I" for q in qubits) != 1:
            raise ValueError(f"seed must have exactly one non-identity letter in partition {name}")
        if all(target.letter(q) == "I" for q in qubits):
            raise LocalTargetError(
                f"target {target} is local (identity on partition {name}); "
                "it lies in the other module's own algebra"
            )

    moves: list[IndexMove] = []
    current = word
    for name, qubits in parts:
        held = [q for q in qubits if current.letter(q) != "I"]
        wanted = [q for q in qubits if target.letter(q) != "I"]
        for q in wanted:
            if current.letter(q) == "I":
                m = held[0]
                move = IndexMove("gen", name, (q, m), (_index(target.letter(q)), _index(current.letter(m))))
                moves.append(move)
                current = current.with_letter(q, target.letter(q))
        for q in held:
            if q not in wanted:
                m = wanted[0]
                move = IndexMove("rem", name, (q, m), (_index(current.letter(q)), _index(current.letter(m))))
                moves.append(move)
                current = current.with_letter(q, "I")
    for name, qubits in parts:
        for q in qubits:
            while current.letter(q) != target.letter(q):
                j = _index(current.letter(q))
                moves.append(IndexMove("cyc", name, (q,), (j,)))
                current = current.with_letter(q, _letter(_cyc(j, 1)))
    return DerivationPath(seed, tuple(moves), target)


@dataclass
class AuditReport:
    samples: int = 0
    passed: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.samples and not self.failures

    def as_record(self) -> dict:
        return {"samples": self.samples, "passed": self.passed,
                "failed": self.samples - self.passed, "ok": self.ok}


def cross_partition_words(n: int, partition_a: Iterable[int]) -> Iterable[PauliWord]:
    """Every word with a non-identity letter in both partitions."""
    part_a, part_b = _partition_sets(n, partition_a)
    local_a = [c for c in itertools.product("IXYZ", repeat=len(part_a)) if any(ch != "I" for ch in c)]
    local_b = [c for c in itertools.product("IXYZ", repeat=len(part_b)) if any(ch != "I" for ch in c)]
    for la in local_a:
        for lb in local_b:
            letters = ["I"] * n
            for q, ch in zip(part_a, la):
                letters[q] = ch
            for q, ch in zip(part_b, lb):
                letters[q] = ch
            yield PauliWord.from_string("".join(letters))


def _random_cross_word(rng: random.Random, n: int, part_a: list[int], part_b: list[int]) -> PauliWord:
    letters = ["I"] * n
    for qubits in (part_a, part_b):
        while True:
            local = [rng.choice("IXYZ") for _ in qubits]
            if any(ch != "I" for ch in local):
                break
        for q, ch in zip(qubits, local):
            letters[q] = ch
    return PauliWord.from_string("".join(letters))


def sample_basis_audit(seed: SkewOperator | PauliWord, partition_a: Iterable[int],
                       sample_count: int | None, rng_seed: int = 0) -> AuditReport:
    """Plan and replay derivations to random cross-partition words.

    ``sample_count=None`` audits every cross-partition word instead of sampling.
    """
    if isinstance(seed, PauliWord):
        seed = SkewOperator.from_word(seed)
    n = seed.n
    part_a, part_b = _partition_sets(n, partition_a)
    if sample_count is None:
        targets: Iterable[PauliWord] = cross_partition_words(n, part_a)
    else:
        rng = random.Random(rng_seed)
        targets = [_random_cross_word(rng, n, part_a, part_b) for _ in range(sample_count)]
    report = AuditReport()
    for target in targets:
        report.samples += 1
        path = plan_derivation(seed, target, part_a)
        if path.check():
            report.passed += 1
        else:
            report.failures.append(str(target))
    return report
