from fractions import Fraction

import pytest

from modctrl.catalog import CATALOG, catalog_names
from modctrl.closure import (ClosureCaps, ClosureGuardError, LieBasis, full_dimension, is_controllable,
                             lie_closure, reduce_against)
from modctrl.oracle import ORACLE_QUBIT_LIMIT, dense_closure_oracle
from modctrl.system import ControlSystem

from conftest import op, system


def test_full_dimension():
    assert [full_dimension(n) for n in (1, 2, 5)] == [3, 15, 1023]


def test_single_qubit_z_x_is_full():
    _, rep = lie_closure(system(1, {"Z": Fraction(-1, 2)}, {"X": 1}))
    assert rep.dimension == 3 and rep.controllable and rep.depth_profile == (2, 1)


def test_drift_only_qubit():
    _, rep = lie_closure(system(1, {"Z": 1}))
    assert rep.dimension == 1 and not rep.controllable


def test_zero_drift_is_skipped():
    s = ControlSystem(1, op(1, {}), (op(1, {"X": 1}), op(1, {"Y": 1})))
    _, rep = lie_closure(s)
    assert rep.dimension == 3


def test_depth_profile_sums_to_dimension():
    basis, rep = lie_closure(CATALOG["chain3_two_controls"])
    assert sum(rep.depth_profile) == rep.dimension == len(basis) == 63
    assert rep.max_depth == len(rep.depth_profile) - 1


@pytest.mark.parametrize("name", catalog_names())
def test_sparse_matches_dense_oracle(name):
    s = CATALOG[name]
    assert lie_closure(s)[1].dimension == dense_closure_oracle(s)


def test_oracle_refuses_large_systems():
    s = system(ORACLE_QUBIT_LIMIT + 1, {"Z" * (ORACLE_QUBIT_LIMIT + 1): 1})
    with pytest.raises(ValueError):
        dense_closure_oracle(s)


def test_guard_and_force():
    s = system(9, {"Z" + "I" * 8: 1}, {"X" + "I" * 8: 1})
    with pytest.raises(ClosureGuardError):
        lie_closure(s)
    _, rep = lie_closure(s, force=True)
    assert rep.dimension == 3


def test_caps_truncate():
    _, rep = lie_closure(CATALOG["chain3_two_controls"], ClosureCaps(max_depth=2))
    assert rep.truncated and rep.reason == "max_depth" and not rep.controllable
    _, rep = lie_closure(CATALOG["chain3_two_controls"], ClosureCaps(max_dim=10))
    assert rep.truncated and rep.dimension >= 10


def test_float_matches_exact_on_small_systems():
    for name in catalog_names():
        s = CATALOG[name]
        assert lie_closure(s, arithmetic="float")[1].dimension == lie_closure(s)[1].dimension


def test_bracket_all_depths_agrees():
    for name in ("chain3_one_control", "pair_heisenberg", "chain3_two_controls"):
        s = CATALOG[name]
        a = lie_closure(s)[1].dimension
        b = lie_closure(s, bracket_all_depths=True)[1].dimension
        assert a == b


def test_reduce_against_and_contains():
    basis, _ = lie_closure(CATALOG["pair_heisenberg"])
    drift = CATALOG["pair_heisenberg"].drift
    assert basis.contains(drift)
    assert reduce_against(basis, drift * 3).is_zero
    outside = op(2, {"XI": 1})
    assert not basis.contains(outside)
    assert not reduce_against(basis, outside).is_zero


def test_basis_add_is_idempotent():
    b = LieBasis(1)
    assert b.add(op(1, {"X": 2}), 0) is not None
    assert b.add(op(1, {"X": 5}), 1) is None
    assert len(b) == 1


def test_unknown_arithmetic():
    with pytest.raises(ValueError):
        lie_closure(CATALOG["qubit_z_x"], arithmetic="interval")


def test_is_controllable_and_record():
    rep = is_controllable(CATALOG["pair_zz_two_controls"])
    assert rep.controllable
    rec = rep.as_record()
    assert "seconds" not in rec and rec["dimension"] == 15
    assert "seconds" in rep.as_record(timing=True)


def test_catalog_has_mixed_outcomes():
    outcomes = {lie_closure(s)[1].controllable for s in CATALOG.values()}
    assert outcomes == {True, False} and len(CATALOG) >= 10
