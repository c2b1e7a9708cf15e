"""Exact symbolic algebra of n-qubit Pauli words and skew-Hermitian Pauli sums.

A Pauli word is stored as a pair of bit masks (``x``, ``z``); bit ``q`` of each
mask belongs to qubit ``q``. The single-qubit letters are encoded as

    I = (0, 0), X = (1, 0), Y = (1, 1), Z = (0, 1)

so that ``Y = i X Z``. Internally words are packed into one integer key
``x | z << n`` which is what the closure engine works with.

A :class:`SkewOperator` is a real linear combination ``sum_w c_w (i w)`` of
Pauli words, i.e. an element of su(2^n) written in the Pauli basis.
Coefficients are :class:`fractions.Fraction` (exact mode) or ``float``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from numbers import Rational, Real
from typing import Iterable, Iterator, Mapping, Union

__all__ = [
    "SizeMismatchError",
    "PauliWord",
    "PhasedWord",
    "SkewOperator",
    "word_multiply",
    "words_commute",
    "commutator",
    "scale_add",
    "embed",
    "LETTERS",
]

LETTERS = "IXYZ"
_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
# (x, z) -> letter code in canonical order I < X < Y < Z
_CODE = {(0, 0): 0, (1, 0): 1, (1, 1): 2, (0, 1): 3}

Coefficient = Union[Fraction, float]
_PHASES = (1, 1j, -1, -1j)


class SizeMismatchError(ValueError):
    """Operands act on different numbers of qubits."""


def _check_n(n1: int, n2: int) -> None:
    if n1 != n2:
        raise SizeMismatchError(f"qubit counts differ: {n1} != {n2}")


@total_ordering
@dataclass(frozen=True)
class PauliWord:
    """Tensor product of ``n`` single-qubit Pauli letters.

    Words order first by ``n`` and then lexicographically by letters
    (qubit 0 first) under ``I < X < Y < Z``.
    """

    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("a Pauli word needs at least one qubit")
        limit = 1 << self.n
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError("bit masks exceed the qubit count")

    @classmethod
    def from_string(cls, letters: str) -> "PauliWord":
        x = z = 0
        for q, ch in enumerate(letters):
            try:
                bx, bz = _LETTER_BITS[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli letter {ch!r} in {letters!r}") from None
            x |= bx << q
            z |= bz << q
        return cls(len(letters), x, z)

    @classmethod
    def identity(cls, n: int) -> "PauliWord":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliWord":
        """Word with ``letter`` on ``qubit`` and identity elsewhere."""
        if not 0 <= qubit < n:
            raise ValueError(f"qubit {qubit} out of range for {n} qubits")
        bx, bz = _LETTER_BITS[letter]
        return cls(n, bx << qubit, bz << qubit)

    @classmethod
    def from_key(cls, n: int, key: int) -> "PauliWord":
        mask = (1 << n) - 1
        return cls(n, key & mask, key >> n)

    @property
    def key(self) -> int:
        return self.x | (self.z << self.n)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q in range(self.n) if ((self.x | self.z) >> q) & 1)

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def letter(self, qubit: int) -> str:
        return _letter_at(self.x, self.z, qubit)

    def with_letter(self, qubit: int, letter: str) -> "PauliWord":
        bx, bz = _LETTER_BITS[letter]
        bit = 1 << qubit
        x = (self.x & ~bit) | (bx << qubit)
        z = (self.z & ~bit) | (bz << qubit)
        return PauliWord(self.n, x, z)

    def sort_key(self) -> tuple[int, int]:
        return (self.n, _canonical_rank(self.x, self.z, self.n))

    def __lt__(self, other: "PauliWord") -> bool:
        if not isinstance(other, PauliWord):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return "".join(_letter_at(self.x, self.z, q) for q in range(self.n))


def _letter_at(x: int, z: int, q: int) -> str:
    return LETTERS[_CODE[((x >> q) & 1, (z >> q) & 1)]]


def _canonical_rank(x: int, z: int, n: int) -> int:
    rank = 0
    for q in range(n):
        rank = rank * 4 + _CODE[((x >> q) & 1, (z >> q) & 1)]
    return rank


def key_sort_rank(n: int, key: int) -> int:
    mask = (1 << n) - 1
    return _canonical_rank(key & mask, key >> n, n)


@dataclass(frozen=True)
class PhasedWord:
    """``phase * word`` with ``phase`` one of +1, -1, +i, -i."""

    word: PauliWord
    phase: complex

    def __neg__(self) -> "PhasedWord":
        return PhasedWord(self.word, -self.phase)


def _product_exponent(xa: int, za: int, xb: int, zb: int) -> int:
    """Power of ``i`` in ``P_a P_b = i**e P_{a xor b}`` (mod 4)."""
    x3 = xa ^ xb
    z3 = za ^ zb
    return (
        (xa & za).bit_count()
        + (xb & zb).bit_count()
        + 2 * (za & xb).bit_count()
        - (x3 & z3).bit_count()
    ) & 3


def word_multiply(a: PauliWord, b: PauliWord) -> PhasedWord:
    """Product of two Pauli words as a phase times a word.

    >>> word_multiply(PauliWord.from_string("X"), PauliWord.from_string("Y"))
    PhasedWord(word=PauliWord(n=1, x=0, z=1), phase=1j)
    """
    _check_n(a.n, b.n)
    e = _product_exponent(a.x, a.z, b.x, b.z)
    return PhasedWord(PauliWord(a.n, a.x ^ b.x, a.z ^ b.z), _PHASES[e])


def words_commute(a: PauliWord, b: PauliWord) -> bool:
    _check_n(a.n, b.n)
    return ((a.x & b.z) ^ (a.z & b.x)).bit_count() % 2 == 0


def _to_coefficient(value, exact: bool | None = None) -> Coefficient:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, Real):
        return float(value)
    raise TypeError(f"unsupported coefficient type {type(value).__name__}")


class SkewOperator:
    """Real combination of skew-Hermitian Pauli terms ``sum_w c_w (i w)``.

    Zero coefficients are pruned and the identity word is dropped on
    construction (``dropped_identity`` records that it happened), so every
    instance is a traceless element of su(2^n). Instances are immutable.

    Args:
        n: number of qubits.
        terms: mapping from :class:`PauliWord` (or letter string) to a real
            coefficient. Integers, strings and fractions become exact
            :class:`~fractions.Fraction` values; floats stay floats.
    """

    __slots__ = ("n", "_terms", "dropped_identity", "_hash")

    def __init__(self, n: int, terms: Mapping | Iterable = (), *, warn: bool = True):
        if n < 1:
            raise ValueError("an operator needs at least one qubit")
        items = terms.items() if isinstance(terms, Mapping) else terms
        packed: dict[int, Coefficient] = {}
        dropped = False
        for word, coeff in items:
            if isinstance(word, str):
                word = PauliWord.from_string(word)
            _check_n(word.n, n)
            c = _to_coefficient(coeff)
            if word.is_identity:
                if c != 0:
                    dropped = True
                continue
            k = word.key
            total = packed.get(k, 0) + c
            if total == 0:
                packed.pop(k, None)
            else:
                packed[k] = total
        if dropped and warn:
            warnings.warn("identity component dropped (operators are traceless)", stacklevel=2)
        self.n = n
        self._terms = packed
        self.dropped_identity = dropped
        self._hash = None

    @classmethod
    def _from_packed(cls, n: int, packed: dict[int, Coefficient]) -> "SkewOperator":
        op = cls.__new__(cls)
        op.n = n
        op._terms = packed
        op.dropped_identity = False
        op._hash = None
        return op

    @classmethod
    def zero(cls, n: int) -> "SkewOperator":
        return cls._from_packed(n, {})

    @classmethod
    def from_word(cls, word: PauliWord | str, coeff=1) -> "SkewOperator":
        if isinstance(word, str):
            word = PauliWord.from_string(word)
        return cls(word.n, {word: coeff})

    @classmethod
    def single(cls, n: int, qubit: int, letter: str, coeff=1) -> "SkewOperator":
        return cls(n, {PauliWord.single(n, qubit, letter): coeff})

    @property
    def terms(self) -> dict[PauliWord, Coefficient]:
        """Terms in canonical word order."""
        return {w: self._terms[w.key] for w in self.words()}

    def words(self) -> list[PauliWord]:
        return sorted(PauliWord.from_key(self.n, k) for k in self._terms)

    def coefficient(self, word: PauliWord | str) -> Coefficient:
        if isinstance(word, str):
            word = PauliWord.from_string(word)
        return self._terms.get(word.key, Fraction(0))

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self._terms.values())

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[PauliWord, Coefficient]]:
        return iter(self.terms.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SkewOperator):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    def __neg__(self) -> "SkewOperator":
        return SkewOperator._from_packed(self.n, {k: -c for k, c in self._terms.items()})

    def __add__(self, other: "SkewOperator") -> "SkewOperator":
        return scale_add([(1, self), (1, other)])

    def __sub__(self, other: "SkewOperator") -> "SkewOperator":
        return scale_add([(1, self), (-1, other)])

    def __mul__(self, scalar) -> "SkewOperator":
        return scale_add([(scalar, self)])

    __rmul__ = __mul__

    def to_text(self) -> str:
        """Canonical rendering, one ``coeff * i·WORD`` per term joined by ``+``."""
        if not self._terms:
            return "0"
        return " + ".join(f"{_fmt(c)} * i·{w}" for w, c in self.terms.items())

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"SkewOperator({self.n}, {self.to_text()!r})"


def _fmt(c: Coefficient) -> str:
    if isinstance(c, Fraction):
        return str(c)
    return repr(c)


def bracket_packed(n: int, a: Mapping[int, Coefficient], b: Mapping[int, Coefficient]) -> dict[int, Coefficient]:
    """``[a, b]`` on packed term dicts.

    For anticommuting words ``[iP, iQ] = -2 P Q`` and ``P Q = i**e W`` with odd
    ``e``, giving ``-2 i**(e-1) (iW)``.
    """
    mask = (1 << n) - 1
    bl = [(kb & mask, kb >> n, cb) for kb, cb in b.items()]
    bl = [(xb, zb, (xb & zb).bit_count(), cb) for xb, zb, cb in bl]
    out: dict[int, Coefficient] = {}
    get = out.get
    for ka, ca in a.items():
        xa = ka & mask
        za = ka >> n
        ya = (xa & za).bit_count()
        for xb, zb, yb, cb in bl:
            if not ((xa & zb) ^ (za & xb)).bit_count() & 1:
                continue
            x3 = xa ^ xb
            z3 = za ^ zb
            e = (ya + yb + 2 * (za & xb).bit_count() - (x3 & z3).bit_count()) & 3
            c = ca * cb
            c = -2 * c if e == 1 else 2 * c
            k = x3 | (z3 << n)
            out[k] = get(k, 0) + c
    return {k: c for k, c in out.items() if c != 0}


def commutator(a: SkewOperator, b: SkewOperator) -> SkewOperator:
    """Lie bracket ``[a, b] = ab - ba`` of two skew operators.

    >>> str(commutator(SkewOperator.from_word("X"), SkewOperator.from_word("Y")))
    '-2 * i·Z'
    """
    _check_n(a.n, b.n)
    return SkewOperator._from_packed(a.n, bracket_packed(a.n, a._terms, b._terms))


def scale_add(ops: Iterable[tuple[Real, SkewOperator]]) -> SkewOperator:
    """Exact linear combination ``sum_k s_k op_k`` with zero pruning."""
    out: dict[int, Coefficient] = {}
    n = None
    for scalar, op in ops:
        if n is None:
            n = op.n
        _check_n(n, op.n)
        s = _to_coefficient(scalar)
        if s == 0:
            continue
        for k, c in op._terms.items():
            if k == 0:
                raise ValueError("identity term in a skew operator")
            out[k] = out.get(k, 0) + s * c
    if n is None:
        raise ValueError("scale_add needs at least one operator")
    return SkewOperator._from_packed(n, {k: c for k, c in out.items() if c != 0})


def embed(op: SkewOperator, total_n: int, offset: int) -> SkewOperator:
    """Place ``op`` on qubits ``offset .. offset + op.n - 1`` of ``total_n``."""
    if offset < 0 or offset + op.n > total_n:
        raise ValueError(f"cannot place {op.n} qubits at offset {offset} in {total_n}")
    return embed_at(op, total_n, range(offset, offset + op.n))


def embed_at(op: SkewOperator, total_n: int, qubits: Iterable[int]) -> SkewOperator:
    """Place ``op`` so that its local qubit ``q`` lands on ``qubits[q]``."""
    qubits = list(qubits)
    if len(qubits) != op.n or len(set(qubits)) != op.n:
        raise ValueError("need one distinct target qubit per operator qubit")
    if any(not 0 <= q < total_n for q in qubits):
        raise ValueError(f"target qubit out of range for {total_n} qubits")
    mask = (1 << op.n) - 1
    out = {}
    for k, c in op._terms.items():
        x, z = k & mask, k >> op.n
        gx = gz = 0
        for local, glob in enumerate(qubits):
            gx |= ((x >> local) & 1) << glob
            gz |= ((z >> local) & 1) << glob
        out[gx | (gz << total_n)] = c
    return SkewOperator._from_packed(total_n, out)
