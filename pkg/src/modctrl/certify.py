"""Controllability certificates: direct closure leaves and modular composites.

A :class:`DirectCertificate` records one closure run. A
:class:`CompositeCertificate` joins two certified modules with one
entangling two-qubit coupling; if both children are controllable the
composite is controllable, so no closure over the joint space is needed and
composites can themselves be composed again.

Verdicts are ``valid``, ``invalid`` or ``indeterminate``. A truncated or
guarded closure is indeterminate (no proof either way) and makes every
ancestor indeterminate too.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .closure import FLOAT_PIVOT_TOL, ClosureCaps, ClosureGuardError, ClosureReport, full_dimension, lie_closure
from .constructive import isolate_coupling_term, sample_basis_audit
from .docfmt import (dump_document, load_document, number_from_text, number_text,
                     operator_from_record, operator_record)
from .layout import DeviceLayout, link_operator, module_system
from .modular import MODULAR_QUBIT_LIMIT, modular_closure
from .pauli import SkewOperator, embed_at
from .system import ControlSystem

__all__ = [
    "CertificateError",
    "EntanglingCoupling",
    "DirectCertificate",
    "CompositeCertificate",
    "Certificate",
    "LayoutCertification",
    "VerificationReport",
    "certify_direct",
    "compose",
    "assemble",
    "certify_layout",
    "verify",
    "resource_count",
    "drift_separation_check",
    "dumps_certificate",
    "loads_certificate",
]

VALID, INVALID, INDETERMINATE = "valid", "invalid", "indeterminate"


class CertificateError(ValueError):
    """A certificate cannot be built from the given parts."""


@dataclass(frozen=True)
class EntanglingCoupling:
    """Tunable link ``sum c[alpha][j] s_alpha^(qubit_a) s_j^(qubit_b)``."""

    qubit_a: int
    qubit_b: int
    coefficients: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(Fraction(v) if not isinstance(v, float) else v for v in row)
                     for row in self.coefficients)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise CertificateError("coupling coefficients must form a 3x3 matrix")
        if all(v == 0 for r in rows for v in r):
            raise CertificateError("coupling matrix is all zero; at least one coefficient must be nonzero")
        if self.qubit_a == self.qubit_b:
            raise CertificateError("a coupling joins two distinct qubits")
        object.__setattr__(self, "coefficients", rows)

    @classmethod
    def single(cls, qubit_a: int, qubit_b: int, alpha: int, j: int, value=1) -> "EntanglingCoupling":
        """Coupling with only ``c[alpha][j]`` nonzero (indices 1..3)."""
        c = [[Fraction(0)] * 3 for _ in range(3)]
        c[alpha - 1][j - 1] = Fraction(value)
        return cls(qubit_a, qubit_b, tuple(map(tuple, c)))

    def operator(self, n: int) -> SkewOperator:
        return link_operator(n, self.qubit_a, self.qubit_b, self.coefficients)

    def first_nonzero(self) -> tuple[int, int]:
        for a in range(3):
            for j in range(3):
                if self.coefficients[a][j] != 0:
                    return a + 1, j + 1
        raise AssertionError("unreachable: coupling is nonzero")

    def as_record(self) -> dict:
        return {"qubit_a": self.qubit_a, "qubit_b": self.qubit_b,
                "c": [[number_text(v) for v in row] for row in self.coefficients]}

    @classmethod
    def from_record(cls, rec: dict) -> "EntanglingCoupling":
        return cls(rec["qubit_a"], rec["qubit_b"],
                   tuple(tuple(number_from_text(v) for v in row) for row in rec["c"]))

    def text(self) -> str:
        return f"{self.qubit_a},{self.qubit_b}:" + " ".join(str(v) for r in self.coefficients for v in r)


def _verdict_of(report: ClosureReport) -> str:
    if report.truncated:
        return INDETERMINATE
    return VALID if report.dimension == report.full_dimension else INVALID


def _report_from_record(n: int, rec: dict) -> ClosureReport:
    return ClosureReport(
        n=n,
        dimension=rec["dimension"],
        full_dimension=rec["full_dimension"],
        controllable=rec["controllable"],
        max_depth=rec["max_depth"],
        brackets_evaluated=rec["brackets_evaluated"],
        arithmetic_mode=rec["arithmetic_mode"],
        truncated=rec["truncated"],
        depth_profile=tuple(rec.get("depth_profile", ())),
        reason=rec.get("reason", ""),
    )


@dataclass(frozen=True)
class DirectCertificate:
    n: int
    system: ControlSystem
    report: ClosureReport
    verdict: str
    system_hash: str
    label: str = ""
    kind: str = field(default="direct", init=False)

    @property
    def valid(self) -> bool:
        return self.verdict == VALID

    @property
    def reason(self) -> str:
        return self.report.reason

    @property
    def dimension(self) -> int:
        return self.report.dimension


@dataclass(frozen=True)
class CompositeCertificate:
    n: int
    children: tuple["Certificate", "Certificate"]
    coupling: EntanglingCoupling
    map_a: tuple[int, ...]
    map_b: tuple[int, ...]
    verdict: str
    system_hash: str
    reason: str = ""
    label: str = ""
    redundant: tuple[EntanglingCoupling, ...] = ()
    kind: str = field(default="composite", init=False)

    @property
    def valid(self) -> bool:
        return self.verdict == VALID

    @property
    def dimension(self) -> int | None:
        return full_dimension(self.n) if self.valid else None


Certificate = Union[DirectCertificate, CompositeCertificate]


def _closure_report(system, caps, arithmetic, force, tol) -> ClosureReport:
    if arithmetic != "modular":
        return lie_closure(system, caps, arithmetic=arithmetic, force=force, tol=tol)[1]
    if system.n <= MODULAR_QUBIT_LIMIT:
        report = modular_closure(system, caps)
        if report.controllable:
            return report
    return lie_closure(system, caps, arithmetic="exact", force=force)[1]


def certify_direct(system: ControlSystem, caps: ClosureCaps | None = None, *,
                   arithmetic: str = "exact", force: bool = False, label: str = "",
                   tol: float = FLOAT_PIVOT_TOL) -> DirectCertificate:
    """Close ``system`` and certify it. Guarded or truncated runs are indeterminate.

    ``arithmetic="modular"`` tries the dense prime-field closure first (up to
    ``MODULAR_QUBIT_LIMIT`` qubits). Full rank there is conclusive; anything
    else is rerun with exact rationals.
    """
    try:
        report = _closure_report(system, caps, arithmetic, force, tol)
    except ClosureGuardError as err:
        report = ClosureReport(n=system.n, dimension=0, full_dimension=full_dimension(system.n),
                               controllable=False, max_depth=0, brackets_evaluated=0,
                               arithmetic_mode=arithmetic, truncated=True, reason=f"guard: {err}")
    return DirectCertificate(system.n, system, report, _verdict_of(report), system.fingerprint(), label)


def _composite_hash(a: Certificate, b: Certificate, coupling: EntanglingCoupling,
                    map_a: Sequence[int], map_b: Sequence[int]) -> str:
    text = "|".join([a.system_hash, b.system_hash, coupling.text(),
                     ",".join(map(str, map_a)), ",".join(map(str, map_b))])
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _combine(a: str, b: str) -> str:
    if INVALID in (a, b):
        return INVALID
    if INDETERMINATE in (a, b):
        return INDETERMINATE
    return VALID


def _check_maps(na: int, nb: int, map_a: Sequence[int], map_b: Sequence[int]) -> None:
    if len(map_a) != na or len(map_b) != nb:
        raise CertificateError("each qubit map needs one entry per child qubit")
    if sorted([*map_a, *map_b]) != list(range(na + nb)):
        raise CertificateError("child qubit maps must be disjoint and cover the composite")


def compose(cert_a: Certificate, cert_b: Certificate, coupling: EntanglingCoupling,
            map_a: Sequence[int] | None = None, map_b: Sequence[int] | None = None, *,
            label: str = "", redundant: Iterable[EntanglingCoupling] = ()) -> CompositeCertificate:
    """Join two certified modules by one entangling coupling.

    ``map_a``/``map_b`` send each child's qubits to composite qubits (default:
    A first, then B). ``coupling`` uses composite numbering with
    ``qubit_a`` in A and ``qubit_b`` in B. No closure is computed.

    Raises:
        CertificateError: an invalid child, a malformed map, or a coupling
            that does not cross the two partitions.
    """
    for name, child in (("A", cert_a), ("B", cert_b)):
        if child.verdict == INVALID:
            raise CertificateError(f"child {name} is not controllable; nothing to compose")
    na, nb = cert_a.n, cert_b.n
    map_a = tuple(range(na)) if map_a is None else tuple(map_a)
    map_b = tuple(range(na, na + nb)) if map_b is None else tuple(map_b)
    _check_maps(na, nb, map_a, map_b)
    if coupling.qubit_a not in map_a or coupling.qubit_b not in map_b:
        raise CertificateError(
            f"coupling ({coupling.qubit_a}, {coupling.qubit_b}) must join a qubit of A to a qubit of B"
        )
    verdict = _combine(cert_a.verdict, cert_b.verdict)
    reason = "" if verdict == VALID else "indeterminate child"
    return CompositeCertificate(
        n=na + nb, children=(cert_a, cert_b), coupling=coupling, map_a=map_a, map_b=map_b,
        verdict=verdict, system_hash=_composite_hash(cert_a, cert_b, coupling, map_a, map_b),
        reason=reason, label=label, redundant=tuple(redundant),
    )


def assemble(cert: Certificate) -> ControlSystem:
    """Joint control system described by a certificate.

    Drifts are embedded and summed into one drift; controls of A, then of B,
    then the coupling as one more control.
    """
    if isinstance(cert, DirectCertificate):
        return cert.system
    sa, sb = assemble(cert.children[0]), assemble(cert.children[1])
    n = cert.n
    drift = embed_at(sa.drift, n, cert.map_a) + embed_at(sb.drift, n, cert.map_b)
    controls = [embed_at(op, n, cert.map_a) for op in sa.controls]
    controls += [embed_at(op, n, cert.map_b) for op in sb.controls]
    la = sa.labels or tuple(f"u{j}" for j in range(len(sa.controls)))
    lb = sb.labels or tuple(f"u{j}" for j in range(len(sb.controls)))
    labels = [f"A.{x}" for x in la] + [f"B.{x}" for x in lb]
    controls.append(cert.coupling.operator(n))
    labels.append(f"link.{cert.coupling.qubit_a}.{cert.coupling.qubit_b}")
    return ControlSystem(n, drift, tuple(controls), tuple(labels))


# --- layouts -------------------------------------------------------------------


@dataclass
class LayoutCertification:
    certificate: Certificate | None
    leaves: dict[str, DirectCertificate]
    leaf_closures: int
    leaf_seconds: float
    compose_seconds: float
    components: int
    verdict: str
    reason: str = ""


def certify_layout(layout: DeviceLayout, seed: int, caps: ClosureCaps | None = None, *,
                   arithmetic: str = "exact", independent_modules: bool = False, tol: float = FLOAT_PIVOT_TOL,
                   cache: dict[str, DirectCertificate] | None = None) -> LayoutCertification:
    """Certify every module directly, then compose along the links.

    Leaf closures are shared between modules whose systems have the same
    fingerprint. Links that join modules already connected are kept on the
    root certificate as redundant.
    """
    cache = {} if cache is None else cache
    leaves: dict[str, DirectCertificate] = {}
    closures = 0
    t0 = time.perf_counter()
    for m in layout.modules:
        system = module_system(layout, m.id, seed, independent_modules=independent_modules)
        h = system.fingerprint()
        if h not in cache:
            cache[h] = certify_direct(system, caps, arithmetic=arithmetic, label=m.template, tol=tol)
            closures += 1
        leaves[m.id] = cache[h]
    t1 = time.perf_counter()

    # component id -> (certificate, global qubits in certificate order)
    comps: dict[str, tuple[Certificate, list[int]]] = {}
    where: dict[str, str] = {}
    for m in layout.modules:
        comps[m.id] = (leaves[m.id], list(m.qubits))
        where[m.id] = m.id
    redundant: list[EntanglingCoupling] = []
    failure = ""
    for link in layout.links:
        ga = layout.global_qubit(link.module_a, link.qubit_a)
        gb = layout.global_qubit(link.module_b, link.qubit_b)
        ca, cb = where[link.module_a], where[link.module_b]
        if ca == cb:
            redundant.append(EntanglingCoupling(ga, gb, link.coefficients))
            continue
        (cert_a, qa), (cert_b, qb) = comps.pop(ca), comps.pop(cb)
        union = sorted(qa + qb)
        pos = {q: i for i, q in enumerate(union)}
        coupling = EntanglingCoupling(pos[ga], pos[gb], link.coefficients)
        try:
            joined = compose(cert_a, cert_b, coupling, [pos[q] for q in qa], [pos[q] for q in qb])
        except CertificateError as err:
            failure = str(err)
            comps[ca] = (cert_a, qa)
            comps[cb] = (cert_b, qb)
            break
        comps[ca] = (joined, union)
        for mid, c in where.items():
            if c == cb:
                where[mid] = ca
    for link in layout.redundant_links:
        redundant.append(EntanglingCoupling(layout.global_qubit(link.module_a, link.qubit_a),
                                            layout.global_qubit(link.module_b, link.qubit_b),
                                            link.coefficients))
    t2 = time.perf_counter()

    root = None
    if len(comps) == 1 and not failure:
        root, _ = next(iter(comps.values()))
        if redundant and isinstance(root, CompositeCertificate):
            root = CompositeCertificate(**{**_fields(root), "redundant": tuple(redundant)})
        verdict, reason = root.verdict, getattr(root, "reason", "")
    elif failure:
        verdict, reason = INVALID, failure
    else:
        verdict, reason = INVALID, f"module-link graph has {len(comps)} disconnected components"
    return LayoutCertification(root, leaves, closures, t1 - t0, t2 - t1, len(comps), verdict, reason)


def _fields(cert: CompositeCertificate) -> dict:
    return {
        "n": cert.n, "children": cert.children, "coupling": cert.coupling,
        "map_a": cert.map_a, "map_b": cert.map_b, "verdict": cert.verdict,
        "system_hash": cert.system_hash, "reason": cert.reason, "label": cert.label,
        "redundant": cert.redundant,
    }


# --- resources -------------------------------------------------------------------


def _static_pairs(op: SkewOperator) -> int:
    pairs = {w.support for w in op.terms if w.weight == 2}
    return len(pairs)


def resource_count(obj: Certificate | DeviceLayout | ControlSystem) -> dict[str, int]:
    """Local controls, static couplings and tunable couplings.

    Static couplings of a bare system are the distinct qubit pairs carrying a
    two-qubit drift term; every composite link counts as one tunable coupling.
    """
    if isinstance(obj, DeviceLayout):
        return obj.resource_count()
    if isinstance(obj, ControlSystem):
        return {"local_controls": len(obj.controls), "static_couplings": _static_pairs(obj.drift),
                "tunable_couplings": 0}
    if isinstance(obj, DirectCertificate):
        return resource_count(obj.system)
    a, b = (resource_count(c) for c in obj.children)
    return {
        "local_controls": a["local_controls"] + b["local_controls"],
        "static_couplings": a["static_couplings"] + b["static_couplings"],
        "tunable_couplings": a["tunable_couplings"] + b["tunable_couplings"] + 1,
    }


# --- drift separation ------------------------------------------------------------


def drift_separation_check(system_a: ControlSystem, system_b: ControlSystem) -> tuple[int, int]:
    """Dimension of ``Lie[A0 x 1 + 1 x B0, {A_r x 1}]`` and the value it must take.

    For a controllable ``A`` and a nonzero ``B0`` the joint drift splits:
    the algebra is su(2^M) (x) 1 plus the single extra direction ``1 (x) B0``,
    so the expected dimension is ``4**M`` (``4**M - 1`` when ``B0 = 0``).
    """
    m, nb = system_a.n, system_b.n
    n = m + nb
    qa, qb = range(m), range(m, n)
    drift = embed_at(system_a.drift, n, qa) + embed_at(system_b.drift, n, qb)
    controls = [embed_at(op, n, qa) for op in system_a.controls]
    _, report = lie_closure(ControlSystem(n, drift, tuple(controls)), force=True)
    expected = 4**m - (1 if system_b.drift.is_zero else 0)
    return report.dimension, expected


# --- verification -------------------------------------------------------------------


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class VerificationReport:
    effort: str
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def mismatches(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append(Check(name, ok, detail))

    def as_record(self) -> dict:
        return {
            "effort": self.effort,
            "ok": self.ok,
            "checks": len(self.checks),
            "mismatches": [{"name": c.name, "detail": c.detail} for c in self.mismatches],
        }


def _structural(cert: Certificate, path: str, out: VerificationReport) -> str | None:
    """Check one subtree; returns the recomputed verdict, or None when broken."""
    if isinstance(cert, DirectCertificate):
        ok = True
        if cert.system.n != cert.n or cert.report.n != cert.n:
            out.add(f"{path}:size", False, "qubit counts disagree")
            ok = False
        if cert.system.fingerprint() != cert.system_hash:
            out.add(f"{path}:hash", False, "system hash does not match the embedded system")
            ok = False
        if cert.report.full_dimension != full_dimension(cert.n):
            out.add(f"{path}:full_dimension", False, "wrong full dimension")
            ok = False
        derived = _verdict_of(cert.report)
        if derived != cert.verdict:
            out.add(f"{path}:verdict", False, f"recorded {cert.verdict}, closure data says {derived}")
            ok = False
        return derived if ok else None
    va = _structural(cert.children[0], path + ".a", out)
    vb = _structural(cert.children[1], path + ".b", out)
    ok = va is not None and vb is not None
    na, nb = cert.children[0].n, cert.children[1].n
    try:
        if cert.n != na + nb:
            raise CertificateError("composite size is not the sum of its children")
        _check_maps(na, nb, cert.map_a, cert.map_b)
        if cert.coupling.qubit_a not in cert.map_a or cert.coupling.qubit_b not in cert.map_b:
            raise CertificateError("coupling does not cross the partitions")
    except CertificateError as err:
        out.add(f"{path}:structure", False, str(err))
        ok = False
    expected_hash = _composite_hash(cert.children[0], cert.children[1], cert.coupling, cert.map_a, cert.map_b)
    if expected_hash != cert.system_hash:
        out.add(f"{path}:hash", False, "composite hash does not match its parts")
        ok = False
    if not ok:
        return None
    derived = _combine(va, vb)
    if INVALID in (va, vb):
        out.add(f"{path}:children", False, "composite built on a non-controllable child")
        return None
    if derived != cert.verdict:
        out.add(f"{path}:verdict", False, f"recorded {cert.verdict}, children give {derived}")
        return None
    return derived


def _walk(cert: Certificate, path: str = "root"):
    yield path, cert
    if isinstance(cert, CompositeCertificate):
        yield from _walk(cert.children[0], path + ".a")
        yield from _walk(cert.children[1], path + ".b")


def verify(cert: Certificate, effort: str = "none", *, samples: int = 20, rng_seed: int = 0,
           spot_qubit_limit: int = 5, exhaustive_qubit_limit: int = 6) -> VerificationReport:
    """Re-check a certificate.

    ``none`` checks structure, hashes and verdict bookkeeping only. ``spot``
    also re-closes leaves up to ``spot_qubit_limit`` qubits and replays
    sampled cross-partition derivations at every joint. ``exhaustive``
    re-closes every leaf, audits every cross-partition word on small joints,
    and for small totals closes the assembled system and compares verdicts.
    Mismatches are reported, never raised.
    """
    if effort not in ("none", "spot", "exhaustive"):
        raise ValueError(f"unknown effort {effort!r}")
    out = VerificationReport(effort)
    verdict = _structural(cert, "root", out)
    out.add("root:structure", verdict is not None)
    if effort == "none" or verdict is None:
        return out

    closed: dict[str, ClosureReport] = {}
    for path, node in _walk(cert):
        if isinstance(node, DirectCertificate):
            if effort == "spot" and node.n > spot_qubit_limit:
                continue
            if node.system_hash not in closed:
                closed[node.system_hash] = _closure_report(node.system, None, node.report.arithmetic_mode,
                                                           True, FLOAT_PIVOT_TOL)
            rerun = closed[node.system_hash]
            if node.report.truncated:
                out.add(f"{path}:reclose", True, "recorded run was truncated; nothing to compare")
                continue
            out.add(f"{path}:reclose", rerun.dimension == node.report.dimension,
                    f"recorded {node.report.dimension}, recomputed {rerun.dimension}")
            continue
        op = node.coupling.operator(node.n)
        alpha, j = node.coupling.first_nonzero()
        iso = isolate_coupling_term(op, node.coupling.qubit_a, node.coupling.qubit_b, alpha, j)
        factor = 16 * node.coupling.coefficients[alpha - 1][j - 1]
        out.add(f"{path}:isolate", len(iso) == 1 and next(iter(iso.terms.values())) == factor,
                f"isolated {iso.to_text()}")
        full_audit = effort == "exhaustive" and node.n <= exhaustive_qubit_limit
        audit = sample_basis_audit(iso, node.map_a, None if full_audit else samples, rng_seed)
        out.add(f"{path}:audit", audit.ok, f"{audit.passed}/{audit.samples} derivations replayed")

    if effort == "exhaustive" and cert.n <= exhaustive_qubit_limit:
        joint = _closure_report(assemble(cert), None, "modular", True, FLOAT_PIVOT_TOL)
        direct = _verdict_of(joint)
        out.add("root:assembled", direct == cert.verdict or cert.verdict == INDETERMINATE,
                f"certificate says {cert.verdict}, assembled closure dimension {joint.dimension} "
                f"of {joint.full_dimension}")
    return out


# --- serialization --------------------------------------------------------------------


def certificate_record(cert: Certificate) -> dict:
    rec: dict = {"kind": cert.kind, "n": cert.n, "verdict": cert.verdict,
                 "system_hash": cert.system_hash, "dimension": cert.dimension}
    if cert.label:
        rec["label"] = cert.label
    if cert.reason:
        rec["reason"] = cert.reason
    if isinstance(cert, DirectCertificate):
        rec["report"] = cert.report.as_record()
        s = cert.system
        rec["system"] = {
            "drift": operator_record(s.drift),
            "controls": [operator_record(c) for c in s.controls],
            "labels": list(s.labels),
        }
        return rec
    rec["coupling"] = cert.coupling.as_record()
    rec["maps"] = {"a": list(cert.map_a), "b": list(cert.map_b)}
    rec["children"] = [certificate_record(c) for c in cert.children]
    if cert.redundant:
        rec["redundant"] = [c.as_record() for c in cert.redundant]
    return rec


def certificate_from_record(rec: dict) -> Certificate:
    n = rec["n"]
    if rec["kind"] == "direct":
        s = rec["system"]
        system = ControlSystem(n, operator_from_record(n, s["drift"]),
                               tuple(operator_from_record(n, c) for c in s["controls"]),
                               tuple(s.get("labels", ())))
        return DirectCertificate(n, system, _report_from_record(n, rec["report"]), rec["verdict"],
                                 rec["system_hash"], rec.get("label", ""))
    if rec["kind"] == "composite":
        children = tuple(certificate_from_record(c) for c in rec["children"])
        if len(children) != 2:
            raise ValueError("a composite certificate has exactly two children")
        return CompositeCertificate(
            n=n, children=children, coupling=EntanglingCoupling.from_record(rec["coupling"]),
            map_a=tuple(rec["maps"]["a"]), map_b=tuple(rec["maps"]["b"]),
            verdict=rec["verdict"], system_hash=rec["system_hash"], reason=rec.get("reason", ""),
            label=rec.get("label", ""),
            redundant=tuple(EntanglingCoupling.from_record(r) for r in rec.get("redundant", ())),
        )
    raise ValueError(f"unknown certificate kind {rec['kind']!r}")


def dumps_certificate(cert: Certificate) -> str:
    return dump_document({"certificate": certificate_record(cert)})


def loads_certificate(text: str) -> Certificate:
    doc = load_document(text)
    try:
        return certificate_from_record(doc["certificate"])
    except (KeyError, TypeError) as err:
        raise ValueError(f"malformed certificate: missing or bad field {err}") from None
