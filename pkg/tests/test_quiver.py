import pytest
from hypothesis import given, settings, strategies as st

from flopkit.linalg import Field, QQ
from flopkit.nccr import lambda_n
from flopkit.quiver import (Grading, GradedAlgebraHandle, Quiver, Relation, check_homogeneous,
                            enumerate_paths, from_text, parse_combination)


def two_cycle():
    return Quiver([1, 2], [("a", 1, 2), ("b", 2, 1)])


def test_quiver_validation():
    with pytest.raises(ValueError):
        Quiver([1, 1], [])
    with pytest.raises(ValueError):
        Quiver([1, 2], [("a", 1, 3)])
    with pytest.raises(ValueError):
        Quiver([1, 2], [("a", 1, 2), ("a", 2, 1)])
    with pytest.raises(ValueError):
        Grading({"a": 0})


def test_paths():
    q = two_cycle()
    assert q.path("a", "b", "a") == (1, 2, ("a", "b", "a"))
    assert q.path(at=2) == (2, 2, ())
    with pytest.raises(ValueError):
        q.path("a", "a")


@pytest.mark.parametrize("d", range(7))
def test_two_cycle_path_counts(d):
    q, g = two_cycle(), Grading.unit(two_cycle())
    for i in (1, 2):
        for j in (1, 2):
            expected = 1 if (d % 2 == 0) == (i == j) else 0
            assert len(enumerate_paths(q, g, d, i, j)) == expected


def test_parse_powers_and_units():
    q = two_cycle()
    assert parse_combination(q, "(a*b)^2") == [(1, (1, 1, ("a", "b", "a", "b")))]
    assert parse_combination(q, "a*b - 2*1_1") == [(1, (1, 1, ("a", "b"))), (-2, (1, 1, ()))]


def test_inhomogeneous_relations_rejected():
    q = two_cycle()
    bad = Relation(parse_combination(q, "a*b - 1_1"))
    ok, report = check_homogeneous([bad], Grading.unit(q))
    assert not ok and report
    with pytest.raises(ValueError):
        GradedAlgebraHandle(q, Grading.unit(q), [bad])


@pytest.mark.parametrize("n", [0, 1, 2])
@pytest.mark.parametrize("F", [QQ, Field(2), Field(3)])
def test_components_match_brute_force(n, F):
    top = 5 if F == QQ else 8
    h = lambda_n(n, F, max_degree=top)
    for d in range(top + 1):
        for i in h.quiver.vertices:
            for j in h.quiver.vertices:
                assert h.dimension(d, i, j) == h.brute_force_dimension(d, i, j)[0], (d, i, j)


def test_text_round_trip():
    h = lambda_n(1)
    q, g, rels, name = from_text(h.to_text())
    h2 = GradedAlgebraHandle(q, g, rels, QQ, 8, name)
    assert name == h.name
    for d in range(9):
        for i in q.vertices:
            for j in q.vertices:
                assert h2.dimension(d, i, j) == h.dimension(d, i, j)


def test_from_text_rejects_garbage():
    with pytest.raises(ValueError):
        from_text("vertices: 1 2\nbogus: x\n")


@st.composite
def basis_elements(draw, h, max_d=5):
    """A random homogeneous element from i to j."""
    vs = h.quiver.vertices
    i, j = draw(st.sampled_from(vs)), draw(st.sampled_from(vs))
    d = draw(st.integers(0, max_d))
    basis = h.component(d, i, j).basis
    terms = [(draw(st.integers(-2, 2)), p) for p in basis]
    return h.element(terms, d, i, j) if basis else h.zero(d, i, j)


_H = lambda_n(1, Field(5), max_degree=16)


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_multiplication_associative(data):
    x = data.draw(basis_elements(_H))
    y = data.draw(basis_elements(_H).filter(lambda e: e.i == x.j))
    z = data.draw(basis_elements(_H).filter(lambda e: e.i == y.j))
    assert _H.multiply(_H.multiply(x, y), z) == _H.multiply(x, _H.multiply(y, z))


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_units_are_identities(data):
    x = data.draw(basis_elements(_H))
    assert _H.multiply(_H.unit(x.i), x) == x
    assert _H.multiply(x, _H.unit(x.j)) == x


def test_relations_vanish():
    for r in _H.relations:
        assert _H.element(r.terms).is_zero()
