from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from flopkit.fdrep import (ar_quiver, bricks, brute_force_indecomposables, decompose,
                           enumerate_indecomposables, format_table, gamma_con, hom_dim, hom_table,
                           is_indecomposable, is_isomorphic, label_module, lambda_con,
                           orthogonality_report, same_structure, standard_modules, tau,
                           truncated_two_cycle)
from flopkit.linalg import Field, QQ

GOLDEN = Path(__file__).resolve().parents[1] / "src" / "flopkit" / "data" / "homtable_k1.txt"
FIELDS = [QQ, Field(2), Field(3), Field(5)]


@pytest.mark.parametrize("F", FIELDS)
@pytest.mark.parametrize("k", range(1, 7))
def test_dimension_formulas(k, F):
    assert lambda_con(k, F).dim == 2 + 4 * k
    assert gamma_con(k, F).dim == k + 5


def test_bad_k():
    for make in (lambda_con, gamma_con, truncated_two_cycle):
        with pytest.raises(ValueError):
            make(0)


def test_hom_table_golden():
    golden = "".join(l for l in GOLDEN.read_text().splitlines(keepends=True) if not l.startswith("#"))
    assert format_table(hom_table(lambda_con(1))) == golden


@pytest.mark.parametrize("F", [Field(2), Field(3)])
def test_hom_table_field_independent(F):
    assert hom_table(lambda_con(1, F)) == hom_table(lambda_con(1))


@pytest.mark.parametrize("k", range(1, 6))
def test_truncated_two_cycle_is_lambda_con(k):
    assert same_structure(truncated_two_cycle(k), lambda_con(k))


def test_same_structure_detects_difference():
    assert not same_structure(gamma_con(2), lambda_con(2))


@pytest.mark.parametrize("make", [lambda_con, gamma_con])
@pytest.mark.parametrize("k", range(1, 5))
def test_four_bricks(make, k):
    found = bricks(make(k))
    assert sorted(b.dim_vector for b in found) == [(0, 1), (1, 0), (1, 1), (1, 1)]


@pytest.mark.parametrize("k", range(1, 5))
def test_indecomposable_count(k):
    assert len(enumerate_indecomposables(lambda_con(k))) == 4 * k + 2


@pytest.mark.parametrize("make", [lambda_con, gamma_con])
@pytest.mark.parametrize("k", range(1, 5))
def test_knitting_agrees_with_brute_force(make, k):
    # the loop at vertex 2 makes the gamma_con search much larger
    A, top = make(k, Field(2)), (4 if make is lambda_con else 3)
    knitted = [X for X in enumerate_indecomposables(A) if X.dim <= top]
    brute = brute_force_indecomposables(A, top)
    assert len(knitted) == len(brute)
    for X in brute:
        assert sum(1 for Y in knitted if Y.dim_vector == X.dim_vector and is_isomorphic(X, Y)) == 1


@pytest.mark.parametrize("make", [lambda_con, gamma_con])
@pytest.mark.parametrize("k", range(1, 5))
def test_orthogonality(make, k):
    assert orthogonality_report(make(k))["ok"]


@pytest.mark.parametrize("make", [lambda_con, gamma_con])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_ar_quiver_mesh_and_periodicity(make, k):
    Q = ar_quiver(make(k))
    ok, bad = Q.mesh_report()
    assert ok, bad
    assert Q.is_cylinder()


def test_ar_dot_six_nodes():
    dot = ar_quiver(lambda_con(1)).to_dot()
    assert dot.startswith("digraph")
    assert sum(1 for l in dot.splitlines() if "[label=" in l and "->" not in l) == 6


def test_standard_modules_k1():
    mods = standard_modules(lambda_con(1))
    assert {n: m.dim_vector for n, m in mods.items()} == {
        "Q1": (2, 1), "Q2": (1, 2), "M1": (1, 1), "M2": (1, 1), "S1": (1, 0), "S2": (0, 1)}
    assert all(is_indecomposable(m) for m in mods.values())
    assert [label_module(mods[n]) for n in ("M1", "M2", "S1", "S2")] == ["M1", "M2", "S1", "S2"]
    assert not is_isomorphic(mods["M1"], mods["M2"])


def test_tau_swaps_k1():
    mods = standard_modules(lambda_con(1))
    assert is_isomorphic(tau(mods["S1"]), mods["S2"])
    assert is_isomorphic(tau(mods["M1"]), mods["M2"])


_A = lambda_con(2, Field(3))
_IND = enumerate_indecomposables(_A)


@given(st.lists(st.integers(0, len(_IND) - 1), min_size=1, max_size=3))
@settings(max_examples=30, deadline=None)
def test_decompose_recovers_summands(idx):
    X = _IND[idx[0]]
    for i in idx[1:]:
        X = X.direct_sum(_IND[i])
    parts = decompose(X)
    assert len(parts) == len(idx)
    for i in set(idx):
        assert sum(1 for P in parts if is_isomorphic(P, _IND[i])) == idx.count(i)


@given(st.integers(0, len(_IND) - 1), st.integers(0, len(_IND) - 1), st.integers(0, len(_IND) - 1))
@settings(max_examples=30, deadline=None)
def test_hom_additive(a, b, c):
    X, Y, Z = _IND[a], _IND[b], _IND[c]
    assert hom_dim(X.direct_sum(Y), Z) == hom_dim(X, Z) + hom_dim(Y, Z)
    assert hom_dim(Z, X.direct_sum(Y)) == hom_dim(Z, X) + hom_dim(Z, Y)


@given(st.integers(0, len(_IND) - 1))
@settings(max_examples=20, deadline=None)
def test_hom_from_projective_is_evaluation(a):
    X = _IND[a]
    for v in _A.vertices:
        assert hom_dim(_A.projective(v), X) == X.dims[v]
