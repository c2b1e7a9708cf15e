import random
from fractions import Fraction
from importlib import resources

import pytest

from modctrl.layout import (PURE_XX, TEMPLATES, CompositeSpec, LayoutError, bundled_layout, build_template,
                            eagle127_spec, emit_layout, generate_composite, layout_to_system, module_seed,
                            parse_layout)
from modctrl.pauli import PauliWord
from modctrl.system import instantiate_parameters

BUNDLED = ("t5", "double_t10", "eagle127")

CUSTOM = """\
# two toy modules
device toy qubits 4
module a custom at 0,1 controls 0:X,1:X static (0,1):XXYY
module b custom at 2,3 controls 0:Y static -
link a:1 b:0 c 0 0 0 0 0 0 0 0 -3/2
"""


def _couplings(ps):
    return sorted({w.support for w in (t.word for t in ps.drift_terms) if w.weight == 2})


def test_template_contents():
    t5 = build_template("T5")
    assert _couplings(t5) == [(0, 1), (1, 2), (1, 3), (3, 4)]
    assert t5.labels == ("X1", "X3")
    l5 = build_template("L5")
    assert [c.words()[0].support for c in l5.controls] == [(1,), (2,)]
    assert _couplings(l5) == [(0, 1), (1, 2), (2, 3), (3, 4)]
    l4 = build_template("L4")
    assert l4.n == 4 and _couplings(l4) == [(0, 1), (1, 2), (2, 3)]


def test_template_drift_has_z_on_every_qubit():
    for kind, (size, _, _) in TEMPLATES.items():
        s = instantiate_parameters(build_template(kind), 0)
        z = {w.support for w in s.drift.terms if w.weight == 1}
        assert z == {(q,) for q in range(size)}


def test_unknown_template():
    with pytest.raises(LayoutError):
        build_template("H7")


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_round_trip(name):
    text = resources.files("modctrl").joinpath("data", f"{name}.layout").read_text()
    layout = parse_layout(text)
    assert parse_layout(emit_layout(layout)) == layout
    assert emit_layout(layout) == text


def test_bundled_shapes():
    t5 = bundled_layout("t5")
    assert len(t5.modules) == 1 and not t5.links
    d = bundled_layout("double_t10")
    assert [m.template for m in d.modules] == ["T5", "T5"] and len(d.links) == 1
    link = d.links[0]
    assert (d.global_qubit(link.module_a, link.qubit_a), d.global_qubit(link.module_b, link.qubit_b)) == (4, 7)
    assert link.coefficients == PURE_XX


def test_eagle_file_matches_generator():
    assert bundled_layout("eagle127") == generate_composite(eagle127_spec())


def test_eagle_counts():
    e = bundled_layout("eagle127")
    assert e.qubit_count == 127
    kinds = [m.template for m in e.modules]
    assert kinds.count("L4") == 3 and len(kinds) - 3 == 23
    assert e.resource_count() == {"local_controls": 52, "static_couplings": 101, "tunable_couplings": 25}
    assert len(e.redundant_links) == 18 and e.is_connected()


def test_custom_module_round_trip():
    layout = parse_layout(CUSTOM)
    assert layout.modules[1].controls == ((0, "Y"),)
    assert layout.links[0].coefficients[2][2] == Fraction(-3, 2)
    again = emit_layout(layout)
    assert parse_layout(again) == layout and emit_layout(parse_layout(again)) == again


@pytest.mark.parametrize("text, needle, line", [
    ("device d qubits 5\nmodule a template T9 at 0,1,2,3,4\n", "unknown template", 2),
    ("device d qubits 5\nmodule a template T5 at 0,1,2,3,4\nmodule a template L4 at 0,1,2,3\n",
     "duplicate module id", 3),
    ("device d qubits 8\nmodule a template T5 at 0,1,2,3,4\nmodule b template L4 at 4,5,6,7\n",
     "overlapping", 3),
    ("device d qubits 10\nmodule a template T5 at 0,1,2,3,4\nmodule b template T5 at 5,6,7,8,9\nlink a:4 c:0\n",
     "dangling link", 4),
    ("device d qubits 10\nmodule a template T5 at 0,1,2,3,4\nmodule b template T5 at 5,6,7,8,9\nlink a:4 b:7\n",
     "dangling link", 4),
    ("device d qubits 10\nmodule a template T5 at 0,1,2,3,4\nmodule b template T5 at 5,6,7,8,9\n"
     "link a:4 b:0 c 0 0 0 0 0 0 0 0 0\n", "zero", 4),
    ("device d qubits 10\nmodule a template T5 at 0,1,2,3,4\nmodule b template T5 at 5,6,7,8,9\nlink a:4 a:0\n",
     "intra-module link", 4),
    ("module a template T5 at 0,1,2,3,4\n", "device", 1),
    ("device d qubits 5\nmodule a template T5 at 0,1,2,3\n", "needs 5 qubits", 2),
    ("device d qubits 5\nwire a b\n", "unknown record", 2),
])
def test_parse_errors(text, needle, line):
    with pytest.raises(LayoutError) as err:
        parse_layout(text)
    assert needle in str(err.value) and err.value.line == line


def test_uncovered_qubits():
    with pytest.raises(LayoutError, match="not covered"):
        parse_layout("device d qubits 6\nmodule a template T5 at 0,1,2,3,4\n")


def test_generate_double_matches_bundled():
    g = generate_composite(CompositeSpec("double_t10", ["T5", "T5"], [(0, 4, 1, 2)]))
    assert g == bundled_layout("double_t10")


def test_generate_rejects_non_trees():
    with pytest.raises(LayoutError, match="needs 2 links"):
        generate_composite(CompositeSpec("x", ["T5", "T5", "L4"], [(0, 1)]))
    with pytest.raises(LayoutError, match="cycle"):
        generate_composite(CompositeSpec("x", ["T5", "T5", "L4"], [(0, 1), (1, 0)]))


def test_single_module_generation():
    g = generate_composite(CompositeSpec("one", ["L4"]))
    assert g.resource_count() == {"local_controls": 2, "static_couplings": 3, "tunable_couplings": 0}


def test_generated_counts_are_additive():
    spec = CompositeSpec("chain", ["T5", "L5", "L4", "T5"], [(0, 1), (1, 2), (2, 3)])
    g = generate_composite(spec)
    assert len(g.links) == 3
    assert g.resource_count() == {"local_controls": 8, "static_couplings": 15, "tunable_couplings": 3}


def test_t5_layout_system_equals_template():
    layout = bundled_layout("t5")
    s = layout_to_system(layout, 3)
    template = instantiate_parameters(build_template("T5"), random.Random(module_seed(3, 0, layout.modules[0])))
    assert s.drift == template.drift and s.controls == template.controls
    assert s.labels == ("m0.X1", "m0.X3")


def test_layout_system_is_deterministic():
    layout = bundled_layout("double_t10")
    assert layout_to_system(layout, 5).fingerprint() == layout_to_system(layout, 5).fingerprint()
    assert layout_to_system(layout, 5).fingerprint() != layout_to_system(layout, 6).fingerprint()


def test_double_layout_system():
    layout = bundled_layout("double_t10")
    s = layout_to_system(layout, 0)
    assert s.n == 10 and len(s.controls) == 5
    assert s.labels[-1] == "link.4.7"
    assert s.controls[-1].words() == [PauliWord.from_string("IIIIXIIXII")]
    z0 = s.drift.coefficient(PauliWord.single(10, 0, "Z"))
    z5 = s.drift.coefficient(PauliWord.single(10, 5, "Z"))
    assert z0 != z5  # modules draw independent parameters
    shared = layout_to_system(layout, 0, independent_modules=False)
    assert shared.drift.coefficient(PauliWord.single(10, 0, "Z")) == shared.drift.coefficient(
        PauliWord.single(10, 5, "Z"))


def test_redundant_links_flag():
    e = bundled_layout("eagle127")
    assert len(layout_to_system(e, 0).controls) == 52 + 25
    assert len(layout_to_system(e, 0, include_redundant=True).controls) == 52 + 25 + 18
