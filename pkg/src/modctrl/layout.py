"""Device layouts: module templates, the ``.layout`` text format, generators.

A layout partitions the qubits ``0 .. N-1`` into modules. Each module is a
small array with static ``XX + YY`` couplings, single-qubit drift terms
``-(omega_j / 2) Z`` on every qubit, and a few local controls. Modules are
joined by tunable two-qubit links ``sum c_{alpha,j} s_alpha s_j``.

Grammar (one record per line, ``#`` starts a comment)::

    device <name> qubits <N>
    module <id> template <T5|L5|L4> at <q0,q1,...>
    module <id> custom at <q0,...> controls <q:axis,...|-> static <(a,b):XXYY, ...|->
    link <idA>:<qa> <idB>:<qb> [c <9 reals, row-major>]
    redundant <idA>:<qa> <idB>:<qb> [c <9 reals>]

Qubit numbers after ``controls``, ``static`` and in ``<id>:<q>`` are local to
the module (positions in its ``at`` list). A link without ``c`` is pure XX.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Sequence

from .pauli import PauliWord, SkewOperator, embed_at
from .system import ControlSystem, ParametricSystem, ParametricTerm, instantiate_parameters

__all__ = [
    "TEMPLATES",
    "LayoutError",
    "Module",
    "Link",
    "DeviceLayout",
    "build_template",
    "module_parametric",
    "parse_layout",
    "emit_layout",
    "load_layout",
    "bundled_layout",
    "generate_composite",
    "layout_to_system",
    "module_system",
    "module_seed",
    "link_operator",
    "PURE_XX",
    "CompositeSpec",
    "eagle127_spec",
]

PURE_XX: tuple[tuple[Fraction, ...], ...] = (
    (Fraction(1), Fraction(0), Fraction(0)),
    (Fraction(0), Fraction(0), Fraction(0)),
    (Fraction(0), Fraction(0), Fraction(0)),
)

# template -> (qubit count, control qubits, static couplings)
TEMPLATES: dict[str, tuple[int, tuple[int, ...], tuple[tuple[int, int], ...]]] = {
    "T5": (5, (1, 3), ((0, 1), (1, 2), (1, 3), (3, 4))),
    "L5": (5, (1, 2), ((0, 1), (1, 2), (2, 3), (3, 4))),
    # four-qubit line; a (3, 4) coupling cannot exist on qubits 0..3
    "L4": (4, (1, 2), ((0, 1), (1, 2), (2, 3))),
}

_AXES = ("X", "Y", "Z")


class LayoutError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Module:
    """One module. ``controls`` and ``static`` use local qubit numbers."""

    id: str
    template: str
    qubits: tuple[int, ...]
    controls: tuple[tuple[int, str], ...] = ()
    static: tuple[tuple[int, int, str], ...] = ()

    @classmethod
    def from_template(cls, id: str, template: str, qubits: Sequence[int]) -> "Module":
        if template not in TEMPLATES:
            raise LayoutError(f"unknown template {template!r}")
        size, ctrl, couplings = TEMPLATES[template]
        if len(qubits) != size:
            raise LayoutError(f"template {template} needs {size} qubits, got {len(qubits)}")
        return cls(id, template, tuple(qubits),
                   tuple((q, "X") for q in ctrl),
                   tuple((a, b, "XXYY") for a, b in couplings))

    @property
    def size(self) -> int:
        return len(self.qubits)


@dataclass(frozen=True)
class Link:
    module_a: str
    qubit_a: int
    module_b: str
    qubit_b: int
    coefficients: tuple[tuple[Fraction, ...], ...] = PURE_XX


@dataclass(frozen=True)
class DeviceLayout:
    name: str
    qubit_count: int
    modules: tuple[Module, ...]
    links: tuple[Link, ...] = ()
    redundant_links: tuple[Link, ...] = ()

    def module(self, module_id: str) -> Module:
        for m in self.modules:
            if m.id == module_id:
                return m
        raise KeyError(module_id)

    def global_qubit(self, module_id: str, local: int) -> int:
        return self.module(module_id).qubits[local]

    def resource_count(self) -> dict[str, int]:
        return {
            "local_controls": sum(len(m.controls) for m in self.modules),
            "static_couplings": sum(len(m.static) for m in self.modules),
            "tunable_couplings": len(self.links),
        }

    def is_connected(self) -> bool:
        if not self.modules:
            return True
        adj: dict[str, set[str]] = {m.id: set() for m in self.modules}
        for ln in self.links:
            adj[ln.module_a].add(ln.module_b)
            adj[ln.module_b].add(ln.module_a)
        start = self.modules[0].id
        seen = {start}
        stack = [start]
        while stack:
            for nxt in adj[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return len(seen) == len(self.modules)


# --- templates and systems ---------------------------------------------------


def module_parametric(module: Module) -> ParametricSystem:
    """Parameterized local system of a module (local qubit numbering)."""
    n = module.size
    terms = [ParametricTerm(PauliWord.single(n, j, "Z"), f"omega_{j}", Fraction(-1, 2)) for j in range(n)]
    for a, b, kind in module.static:
        if kind != "XXYY":
            raise LayoutError(f"unsupported static coupling kind {kind!r}")
        for letter in ("X", "Y"):
            word = PauliWord.single(n, a, letter).with_letter(b, letter)
            terms.append(ParametricTerm(word, f"J_{a}_{b}"))
    controls = tuple(SkewOperator.single(n, q, axis) for q, axis in module.controls)
    labels = tuple(f"{axis}{q}" for q, axis in module.controls)
    return ParametricSystem(n, tuple(terms), controls, labels, name=module.template)


def build_template(kind: str) -> ParametricSystem:
    """Parameterized system of a bundled module template (T5, L5 or L4)."""
    if kind not in TEMPLATES:
        raise LayoutError(f"unknown template {kind!r}")
    return module_parametric(Module.from_template(kind, kind, range(TEMPLATES[kind][0])))


def module_seed(seed: int, layout_index: int, module: Module, independent: bool = True) -> str:
    """String seed for a module's parameter stream.

    Independent modules get ``"<seed>/module/<index>"``; shared ones get
    ``"<seed>/template/<kind>"`` so equal templates draw equal parameters.
    """
    if independent:
        return f"{seed}/module/{layout_index}"
    key = module.template if module.template in TEMPLATES else f"custom/{module.id}"
    return f"{seed}/template/{key}"


def module_system(layout: DeviceLayout, module_id: str, seed: int, *,
                  independent_modules: bool = True) -> ControlSystem:
    """Instantiated local system of one module.

    With ``independent_modules`` every module draws its own parameters;
    otherwise modules of the same template share them, so identical
    templates yield identical systems (and one closure serves them all).
    """
    for index, m in enumerate(layout.modules):
        if m.id == module_id:
            return instantiate_parameters(module_parametric(m),
                                          random.Random(module_seed(seed, index, m, independent_modules)))
    raise KeyError(module_id)


def link_operator(n: int, qubit_a: int, qubit_b: int, coefficients) -> SkewOperator:
    """``i sum_{alpha,j} c_{alpha,j} s_alpha^(a) s_j^(b)`` on ``n`` qubits."""
    terms = {}
    for alpha in range(3):
        for j in range(3):
            c = coefficients[alpha][j]
            if c != 0:
                word = PauliWord.single(n, qubit_a, _AXES[alpha]).with_letter(qubit_b, _AXES[j])
                terms[word] = c
    return SkewOperator(n, terms)


def layout_to_system(layout: DeviceLayout, seed: int, *, include_redundant: bool = False,
                     independent_modules: bool = True) -> ControlSystem:
    """Joint control system of a whole layout.

    Module drifts are summed into one drift; module controls come first (in
    module order), then one control per link.
    """
    n = layout.qubit_count
    drift = SkewOperator.zero(n)
    controls: list[SkewOperator] = []
    labels: list[str] = []
    for m in layout.modules:
        local = module_system(layout, m.id, seed, independent_modules=independent_modules)
        drift = drift + embed_at(local.drift, n, m.qubits)
        for op, label in zip(local.controls, local.labels):
            controls.append(embed_at(op, n, m.qubits))
            labels.append(f"{m.id}.{label}")
    links = list(layout.links) + (list(layout.redundant_links) if include_redundant else [])
    for ln in links:
        qa = layout.global_qubit(ln.module_a, ln.qubit_a)
        qb = layout.global_qubit(ln.module_b, ln.qubit_b)
        controls.append(link_operator(n, qa, qb, ln.coefficients))
        labels.append(f"link.{qa}.{qb}")
    return ControlSystem(n, drift, tuple(controls), tuple(labels))


# --- text format -------------------------------------------------------------

_ID = r"[A-Za-z_][A-Za-z0-9_.\-]*"
_RE_DEVICE = re.compile(r"^device\s+(\S+)\s+qubits\s+(\d+)$")
_RE_TEMPLATE = re.compile(rf"^module\s+({_ID})\s+template\s+(\S+)\s+at\s+(\S+)$")
_RE_CUSTOM = re.compile(rf"^module\s+({_ID})\s+custom\s+at\s+(\S+)\s+controls\s+(\S+)\s+static\s+(.+)$")
_RE_LINK = re.compile(rf"^(link|redundant)\s+({_ID}):(\d+)\s+({_ID}):(\d+)(?:\s+c\s+(.+))?$")
_RE_STATIC = re.compile(r"^\((\d+),(\d+)\):(\S+)$")


def _int_list(text: str, line: int) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise LayoutError(f"bad qubit list {text!r}", line) from None


def _parse_matrix(text: str, line: int) -> tuple[tuple[Fraction, ...], ...]:
    parts = text.split()
    if len(parts) != 9:
        raise LayoutError(f"coupling matrix needs 9 entries, got {len(parts)}", line)
    try:
        vals = [Fraction(p) for p in parts]
    except (ValueError, ZeroDivisionError):
        raise LayoutError(f"bad coupling matrix entry in {text!r}", line) from None
    if all(v == 0 for v in vals):
        raise LayoutError("zero coupling matrix (at least one coefficient must be nonzero)", line)
    return tuple(tuple(vals[3 * r:3 * r + 3]) for r in range(3))


def parse_layout(text: str) -> DeviceLayout:
    """Parse and validate a ``.layout`` document.

    Raises:
        LayoutError: with the offending line number.
    """
    name = None
    qubit_count = 0
    modules: list[Module] = []
    module_lines: dict[str, int] = {}
    pending_links: list[tuple[str, int, Link]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("device"):
            m = _RE_DEVICE.match(line)
            if not m:
                raise LayoutError("malformed device line", lineno)
            if name is not None:
                raise LayoutError("duplicate device line", lineno)
            name, qubit_count = m.group(1), int(m.group(2))
            continue
        if name is None:
            raise LayoutError("the first record must be a device line", lineno)
        if line.startswith("module"):
            mt = _RE_TEMPLATE.match(line)
            mc = _RE_CUSTOM.match(line)
            if mt:
                mid, template, at = mt.groups()
                if template not in TEMPLATES:
                    raise LayoutError(f"unknown template {template!r}", lineno)
                qubits = _int_list(at, lineno)
                try:
                    module = Module.from_template(mid, template, qubits)
                except LayoutError as err:
                    raise LayoutError(str(err), lineno) from None
            elif mc:
                mid, at, ctrl, static = mc.groups()
                qubits = _int_list(at, lineno)
                module = Module(mid, "custom", qubits,
                                _parse_controls(ctrl, len(qubits), lineno),
                                _parse_static(static, len(qubits), lineno))
            else:
                raise LayoutError("malformed module line", lineno)
            if mid in module_lines:
                raise LayoutError(f"duplicate module id {mid!r} (first on line {module_lines[mid]})", lineno)
            module_lines[mid] = lineno
            modules.append(module)
            continue
        m = _RE_LINK.match(line)
        if m:
            kind, ida, qa, idb, qb, coeffs = m.groups()
            matrix = _parse_matrix(coeffs, lineno) if coeffs else PURE_XX
            pending_links.append((kind, lineno, Link(ida, int(qa), idb, int(qb), matrix)))
            continue
        raise LayoutError(f"unknown record {line.split()[0]!r}", lineno)
    if name is None:
        raise LayoutError("missing device line")

    owner: dict[int, str] = {}
    for module in modules:
        ln = module_lines[module.id]
        if len(set(module.qubits)) != len(module.qubits):
            raise LayoutError(f"module {module.id!r} lists a qubit twice", ln)
        for q in module.qubits:
            if not 0 <= q < qubit_count:
                raise LayoutError(f"qubit {q} outside 0..{qubit_count - 1}", ln)
            if q in owner:
                raise LayoutError(f"overlapping qubit sets: qubit {q} in {owner[q]!r} and {module.id!r}", ln)
            owner[q] = module.id
    missing = sorted(set(range(qubit_count)) - set(owner))
    if missing:
        raise LayoutError(f"qubits not covered by any module: {missing}")

    by_id = {m.id: m for m in modules}
    links: list[Link] = []
    redundant: list[Link] = []
    for kind, lineno, link in pending_links:
        for mid, q in ((link.module_a, link.qubit_a), (link.module_b, link.qubit_b)):
            if mid not in by_id:
                raise LayoutError(f"dangling link: unknown module {mid!r}", lineno)
            if not 0 <= q < by_id[mid].size:
                raise LayoutError(f"dangling link: module {mid!r} has no local qubit {q}", lineno)
        if link.module_a == link.module_b:
            raise LayoutError("intra-module link (both ends in the same module)", lineno)
        (links if kind == "link" else redundant).append(link)
    return DeviceLayout(name, qubit_count, tuple(modules), tuple(links), tuple(redundant))


def _parse_controls(text: str, size: int, line: int) -> tuple[tuple[int, str], ...]:
    if text == "-":
        return ()
    out = []
    for item in text.split(","):
        try:
            q, axis = item.split(":")
            q = int(q)
        except ValueError:
            raise LayoutError(f"bad control {item!r}", line) from None
        if axis not in _AXES or not 0 <= q < size:
            raise LayoutError(f"bad control {item!r}", line)
        out.append((q, axis))
    return tuple(out)


def _parse_static(text: str, size: int, line: int) -> tuple[tuple[int, int, str], ...]:
    text = text.strip()
    if text == "-":
        return ()
    out = []
    for item in text.split(", "):
        m = _RE_STATIC.match(item.strip())
        if not m:
            raise LayoutError(f"bad static coupling {item!r}", line)
        a, b, kind = int(m.group(1)), int(m.group(2)), m.group(3)
        if kind != "XXYY":
            raise LayoutError(f"unsupported static coupling kind {kind!r}", line)
        if a == b or not (0 <= a < size and 0 <= b < size):
            raise LayoutError(f"bad static coupling {item!r}", line)
        out.append((a, b, kind))
    return tuple(out)


def _emit_link(kind: str, link: Link) -> str:
    s = f"{kind} {link.module_a}:{link.qubit_a} {link.module_b}:{link.qubit_b}"
    if link.coefficients != PURE_XX:
        s += " c " + " ".join(str(v) for row in link.coefficients for v in row)
    return s


def emit_layout(layout: DeviceLayout) -> str:
    """Canonical text; ``parse_layout(emit_layout(x)) == x``."""
    lines = [f"device {layout.name} qubits {layout.qubit_count}"]
    for m in layout.modules:
        at = ",".join(map(str, m.qubits))
        if m.template in TEMPLATES:
            lines.append(f"module {m.id} template {m.template} at {at}")
        else:
            ctrl = ",".join(f"{q}:{a}" for q, a in m.controls) or "-"
            static = ", ".join(f"({a},{b}):{k}" for a, b, k in m.static) or "-"
            lines.append(f"module {m.id} custom at {at} controls {ctrl} static {static}")
    lines += [_emit_link("link", ln) for ln in layout.links]
    lines += [_emit_link("redundant", ln) for ln in layout.redundant_links]
    return "\n".join(lines) + "\n"


def load_layout(path) -> DeviceLayout:
    with open(path, encoding="utf-8") as fh:
        return parse_layout(fh.read())


def bundled_layout(name: str) -> DeviceLayout:
    """One of the layouts shipped with the package (``t5``, ``double_t10``, ``eagle127``, ...)."""
    filename = name if name.endswith(".layout") else f"{name}.layout"
    text = resources.files("modctrl").joinpath("data", filename).read_text(encoding="utf-8")
    return parse_layout(text)


# --- generation --------------------------------------------------------------


@dataclass
class CompositeSpec:
    """Input to :func:`generate_composite`.

    ``templates`` lists one template name per module, in numbering order.
    Each entry of ``links`` is ``(i, j)`` (module indices; the link then joins
    the last local qubit of ``i`` to local qubit 0 of ``j``) or
    ``(i, qa, j, qb)`` with explicit local qubits.
    """

    name: str
    templates: Sequence[str]
    links: Sequence[tuple[int, ...]] = ()
    redundant: Sequence[tuple[int, ...]] = ()
    ids: Sequence[str] | None = None


def _expand_link(entry: tuple[int, ...], modules: list[Module]) -> tuple[int, int, int, int]:
    if len(entry) == 2:
        i, j = entry
        return i, modules[i].size - 1, j, 0
    if len(entry) == 4:
        return tuple(entry)  # type: ignore[return-value]
    raise LayoutError(f"link entry {entry!r} must have 2 or 4 items")


def generate_composite(spec: CompositeSpec) -> DeviceLayout:
    """Layout of modules numbered in declaration order, joined along a tree.

    Raises:
        LayoutError: if the links do not form a spanning tree of the modules.
    """
    modules: list[Module] = []
    offset = 0
    ids = list(spec.ids) if spec.ids is not None else [f"m{i}" for i in range(len(spec.templates))]
    for mid, template in zip(ids, spec.templates):
        if template not in TEMPLATES:
            raise LayoutError(f"unknown template {template!r}")
        size = TEMPLATES[template][0]
        modules.append(Module.from_template(mid, template, range(offset, offset + size)))
        offset += size
    k = len(modules)
    if len(spec.links) != k - 1:
        raise LayoutError(f"a tree over {k} modules needs {k - 1} links, got {len(spec.links)}")
    parent = list(range(k))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    links = []
    for entry in spec.links:
        i, qa, j, qb = _expand_link(entry, modules)
        if not (0 <= i < k and 0 <= j < k) or i == j:
            raise LayoutError(f"link {entry!r} must join two distinct modules")
        ri, rj = find(i), find(j)
        if ri == rj:
            raise LayoutError(f"link {entry!r} closes a cycle")
        parent[ri] = rj
        links.append(Link(modules[i].id, qa, modules[j].id, qb))
    redundant = []
    for entry in spec.redundant:
        i, qa, j, qb = _expand_link(entry, modules)
        redundant.append(Link(modules[i].id, qa, modules[j].id, qb))
    layout = DeviceLayout(spec.name, offset, tuple(modules), tuple(links), tuple(redundant))
    # round-trip through the validator so generated layouts obey every file invariant
    return parse_layout(emit_layout(layout))


def eagle127_spec() -> CompositeSpec:
    """Spec of the bundled 127-qubit device: 23 five-qubit modules and 3 four-qubit lines.

    Five rows of modules (6, 5, 5, 5, 5). Within a row the modules alternate
    T5 and L5 and are chained end to end; rows 0, 2 and 4 end in an L4.
    Row starts are joined vertically, giving 25 tree links. The 18 redundant
    links between neighbouring rows are illustrative placements only; the
    counts match the target device, the geometry does not.
    """
    rows = [6, 5, 5, 5, 5]
    templates: list[str] = []
    starts: list[int] = []
    links: list[tuple[int, ...]] = []
    for r, length in enumerate(rows):
        start = len(templates)
        starts.append(start)
        for k in range(length):
            last = k == length - 1 and r % 2 == 0
            templates.append("L4" if last else ("T5" if k % 2 == 0 else "L5"))
            if k:
                links.append((start + k - 1, start + k))
        if r:
            links.append((starts[r - 1], 2, start, 0))
    redundant: list[tuple[int, ...]] = []
    for r in range(len(rows) - 1):
        for k in range(1, 5):
            redundant.append((starts[r] + k, 2, starts[r + 1] + k, 2))
    redundant += [(starts[0] + 5, 1, starts[1] + 4, 1), (starts[2] + 4, 1, starts[3] + 4, 1)]
    return CompositeSpec("eagle127", templates, links, redundant)
