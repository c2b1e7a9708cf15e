"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""

import itertools
import random
import subprocess
import sys
from fractions import Fraction
from importlib import resources


from modctrl.catalog import CATALOG
from modctrl.certify import (EntanglingCoupling, assemble, certify_direct, certify_layout, compose,
                             dumps_certificate, loads_certificate, resource_count)
from modctrl.closure import ClosureGuardError, full_dimension, lie_closure
from modctrl.constructive import (f_cyc, f_cyc_closed_form, f_gen, f_gen_closed_form, f_rem, f_rem_closed_form,
                                  isolate_coupling_term, sample_basis_audit)
from modctrl.layout import bundled_layout, layout_to_system
from modctrl.oracle import dense_closure_oracle
from modctrl.pauli import PauliWord, SkewOperator

from conftest import ACCEPTANCE_LINES, op

DATA = resources.files("modctrl").joinpath("data")


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] AC{number} {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_ac1_t5_full_rank_three_seeds(closures):
    dims = {seed: closures.template("T5", seed).dimension for seed in (0, 1, 2)}
    ok = all(d == 1023 for d in dims.values())
    record(1, "T5 closure, exact, 3 seeds", ok, f"dimensions {dims} (expected 1023)")


def _random_dense(rng: random.Random):
    while True:
        m = tuple(tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(3)) for _ in range(3))
        if any(v for row in m for v in row):
            return m


def test_ac2_composites_up_to_six_qubits():
    modules = {1: CATALOG["qubit_z_x"], 2: CATALOG["pair_xxyy_two_controls"], 3: CATALOG["chain3_two_controls"]}
    certs = {k: certify_direct(s) for k, s in modules.items()}
    assert all(c.valid for c in certs.values())
    rng = random.Random(2024)
    failures, cases = [], 0
    for na, nb in ((1, 1), (1, 2), (2, 2), (2, 3), (3, 3)):
        qa, qb = na - 1, na
        couplings = [EntanglingCoupling.single(qa, qb, a, j) for a, j in itertools.product((1, 2, 3), repeat=2)]
        couplings += [EntanglingCoupling(qa, qb, _random_dense(rng)) for _ in range(3)]
        for coupling in couplings:
            cert = compose(certs[na], certs[nb], coupling)
            dim = certify_direct(assemble(cert), arithmetic="modular").dimension
            cases += 1
            if not (cert.valid and dim == full_dimension(na + nb)):
                failures.append((na, nb, coupling.text(), dim))
    record(2, "composite soundness n<=6", not failures, f"{cases} cases, failures {failures}")


def test_ac3_f_operation_identities():
    checked = 0
    bad = []
    for n in (1, 2, 3):
        for letters in itertools.product("IXYZ", repeat=n):
            w = PauliWord.from_string("".join(letters))
            if w.is_identity:
                continue
            s = SkewOperator.from_word(w, Fraction(5, 3))
            for q in w.support:
                checked += 1
                if f_cyc(s, q) != f_cyc_closed_form(s, q):
                    bad.append(("cyc", str(w), q))
            for m in w.support:
                for q in range(n):
                    if q == m:
                        continue
                    if w.letter(q) == "I":
                        for j in (1, 2, 3):
                            checked += 1
                            if f_gen(s, q, m, j) != f_gen_closed_form(s, q, m, j):
                                bad.append(("gen", str(w), q, m, j))
                    else:
                        checked += 1
                        if f_rem(s, q, m) != f_rem_closed_form(s, q, m):
                            bad.append(("rem", str(w), q, m))
    record(3, "f_cyc/f_gen/f_rem identities n<=3", not bad, f"{checked} exact comparisons, mismatches {bad[:3]}")


def test_ac4_isolation_factor():
    results = {}
    for c in (Fraction(1), Fraction(-7, 5), Fraction(3)):
        results[str(c)] = isolate_coupling_term(op(2, {"ZZ": c}), 0, 1) == op(2, {"XX": 16 * c})
    record(4, "isolation of c*ZZ gives 16c*i*XX", all(results.values()), f"{results}")


def test_ac5_ten_qubit_composite(closures):
    t5a, t5b = closures.template("T5", 0), closures.template("T5", 1)
    cert = compose(t5a, t5b, EntanglingCoupling.single(4, 7, 1, 1))
    counts = resource_count(cert)
    text = dumps_certificate(cert)
    again = dumps_certificate(loads_certificate(text))
    joint = assemble(cert)
    ok = (cert.valid and counts == {"local_controls": 4, "static_couplings": 8, "tunable_couplings": 1}
          and again == text and joint.n == 10 and len(joint.controls) == 5
          and joint.controls[-1].words() == [PauliWord.from_string("IIIIXIIXII")])
    record(5, "10-qubit composite from two T5 with X4X7", ok,
           f"verdict {cert.verdict}, counts {counts}, round-trip {'exact' if again == text else 'differs'}")


def test_ac6_eagle127(leaf_cache):
    layout = bundled_layout("eagle127")
    run = certify_layout(layout, 0, cache={})
    counts = resource_count(layout)
    cert_counts = resource_count(run.certificate)
    try:
        lie_closure(layout_to_system(layout, 0))
        guarded = False
    except ClosureGuardError:
        guarded = True
    ok = (counts == cert_counts == {"local_controls": 52, "static_couplings": 101, "tunable_couplings": 25}
          and run.verdict == "valid" and run.leaf_closures == 3 and run.compose_seconds < 1.0 and guarded)
    record(6, "127-qubit composite", ok,
           f"counts {cert_counts}, verdict {run.verdict}, leaf closures {run.leaf_closures}, "
           f"compose {run.compose_seconds:.4f}s, direct guarded {guarded}")


def test_ac7_oracle_equivalence():
    rows = {name: (lie_closure(s)[1].dimension, dense_closure_oracle(s)) for name, s in CATALOG.items()}
    kinds = {lie_closure(s)[1].controllable for s in CATALOG.values()}
    ok = len(rows) >= 10 and all(a == b for a, b in rows.values()) and kinds == {True, False}
    record(7, "sparse vs dense closure on bundled n<=3 systems", ok,
           f"{len(rows)} systems, mismatches {[k for k, (a, b) in rows.items() if a != b]}")


def test_ac8_derivation_audit(closures):
    pair = certify_direct(CATALOG["pair_xxyy_two_controls"])
    small = compose(pair, pair, EntanglingCoupling.single(1, 2, 1, 1))
    seed = isolate_coupling_term(small.coupling.operator(4), 1, 2, 1, 1)
    full = sample_basis_audit(seed, small.map_a, None)
    t5 = closures.template("T5", 0)
    big = compose(t5, t5, EntanglingCoupling.single(4, 7, 1, 1))
    seed10 = isolate_coupling_term(big.coupling.operator(10), 4, 7, 1, 1)
    sampled = sample_basis_audit(seed10, big.map_a, 200, rng_seed=0)
    ok = full.ok and full.samples == 225 and sampled.ok and sampled.samples == 200
    record(8, "derivation replay", ok,
           f"2+2 exhaustive {full.passed}/{full.samples}, 10-qubit sampled {sampled.passed}/{sampled.samples}")


def test_ac9_cli_determinism(tmp_path):
    layout = str(DATA / "double_t10.layout")
    cert = tmp_path / "double.cert"
    argv = [sys.executable, "-m", "modctrl.cli", "check", layout, "--mode", "compose", "--seed", "3",
            "--format", "machine", "--certificate-out", str(cert)]
    outs, certs = [], []
    for _ in range(2):
        proc = subprocess.run(argv, capture_output=True, check=False)
        outs.append((proc.returncode, proc.stdout))
        certs.append(cert.read_bytes())
    ok = outs[0] == outs[1] and certs[0] == certs[1] and outs[0][0] == 0
    record(9, "byte-identical machine reports and certificates", ok,
           f"exit codes {[o[0] for o in outs]}, report bytes {len(outs[0][1])}, certificate bytes {len(certs[0])}")
