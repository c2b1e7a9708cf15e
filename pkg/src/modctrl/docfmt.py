"""Canonical structured-text documents shared by certificates and reports.

Documents are JSON objects written with sorted keys, two-space indentation
and a trailing newline, so equal records always produce identical bytes.
Exact numbers travel as strings (``"-3/2"``).
"""

from __future__ import annotations

import json
from fractions import Fraction

from .pauli import PauliWord, SkewOperator

__all__ = ["dump_document", "load_document", "operator_record", "operator_from_record",
           "number_text", "number_from_text"]


def dump_document(record: dict) -> str:
    return json.dumps(record, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_document(text: str) -> dict:
    record = json.loads(text)
    if not isinstance(record, dict):
        raise ValueError("document root must be an object")
    return record


def number_text(value) -> str | float:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return float(value)


def number_from_text(value) -> Fraction | float:
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    if isinstance(value, float):
        return value
    raise ValueError(f"not a number: {value!r}")


def operator_record(op: SkewOperator) -> list[list]:
    return [[str(w), number_text(c)] for w, c in op.terms.items()]


def operator_from_record(n: int, terms: list) -> SkewOperator:
    return SkewOperator(n, {PauliWord.from_string(w): number_from_text(c) for w, c in terms})
