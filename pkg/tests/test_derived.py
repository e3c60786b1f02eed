import random

import pytest
from hypothesis import given, settings, strategies as st

from flopkit import derived as D
from flopkit.derived import CObject, GroupoidWord, act, cohomology, mutation, quasi_iso_equal
from flopkit.fdrep import standard_modules
from flopkit.linalg import Field

F5 = Field(5)
NAMES = ("Q1", "Q2", "M1", "M2", "S1", "S2")


def obj(name, degree=0, F=F5):
    return CObject.module(standard_modules(D.contraction_algebra(F))[name], degree, name)


def labels(x):
    return D.cohomology_labels(x)


# mutation ----------------------------------------------------------------------

@pytest.mark.parametrize("i, src, expected", [
    (1, "S1", {1: ("S1",)}), (2, "S2", {1: ("S2",)}),
    (1, "S2", {0: ("M1",)}), (1, "M2", {0: ("S2",)}),
    (2, "S1", {0: ("M2",)}), (2, "M1", {0: ("S1",)}),
    (1, "M1", {0: ("M1",), 1: ("S1",)}), (2, "M2", {0: ("M2",), 1: ("S2",)}),
])
def test_mutation_on_modules(i, src, expected):
    assert labels(mutation(i, obj(src))) == expected


@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("i", [1, 2])
def test_mutation_inverse(name, i):
    x = obj(name)
    assert quasi_iso_equal(mutation(i, mutation(i, x, 1), -1), x)
    assert quasi_iso_equal(mutation(i, mutation(i, x, -1), 1), x)


@pytest.mark.parametrize("name", NAMES)
def test_braid_relation(name):
    x = obj(name)
    assert quasi_iso_equal(act(GroupoidWord.parse("P1 P2 P1"), x), act(GroupoidWord.parse("P2 P1 P2"), x))


def test_around_the_hexagon_is_a_shift():
    y = act(GroupoidWord.parse("P1 P2 P1"), obj("S1"))
    assert labels(y) == {1: ("S2",)}


def test_mutation_commutes_with_shift():
    x = obj("M1")
    assert quasi_iso_equal(mutation(2, x.shift(3)), mutation(2, x).shift(3))


def test_mutation_rejects_bad_index():
    with pytest.raises(ValueError):
        mutation(3, obj("S1"))


# complexes and minimal models ---------------------------------------------------------

def test_shift_convention():
    assert sorted(cohomology(obj("S1").shift(1))) == [-1]


def test_minimalize_keeps_cohomology():
    x = act(GroupoidWord.parse("P1 P2 P2 P1^-1"), obj("M1"))
    m = D.minimalize(x)
    assert quasi_iso_equal(m, x)
    assert m.size <= x.size


def test_cone_of_identity_is_acyclic():
    y = act(GroupoidWord.parse("P1 P1"), obj("S2"))
    assert not D.is_acyclic(y)
    assert D.homological_length(y) == 1


# RHom and twists ----------------------------------------------------------------------

@pytest.mark.parametrize("probe, name, expected", [
    ("S1", "S1", {0: 1, 3: 1}), ("S1", "S2", {1: 1, 2: 1}), ("M1", "M1", {0: 1, 3: 1}),
])
def test_rhom_spherical(probe, name, expected):
    assert D.rhom_dims(probe, obj(name)) == expected


def test_rhom_shift():
    # S1 placed in degree -2 is S1[2]: Ext^{n+2}(S1, S1)
    assert D.rhom_dims("S1", obj("S1", degree=-2)) == {-2: 1, 1: 1}


@pytest.mark.parametrize("name", ["S1", "S2", "M1", "M2"])
def test_dual_is_an_involution(name):
    x = obj(name)
    assert quasi_iso_equal(D.dual(D.dual(x)), x)


def test_dual_swaps_m1_m2():
    assert labels(D.dual(obj("M1"))) == {0: ("M2",)}
    assert labels(D.dual(obj("S2"))) == {0: ("S2",)}


def test_twist_matches_phi_squared_on_s2():
    x = obj("S2")
    t = D.twist(2, x, 1)
    assert D.fingerprint(t) == D.fingerprint(act(GroupoidWord.parse("P2 P2"), x))


# words -------------------------------------------------------------------------------

def test_word_parse_and_errors():
    w = GroupoidWord.parse("P1, P2- [1]")
    assert w.letters == ("P1", "P2^-1", "[1]")
    with pytest.raises(ValueError):
        GroupoidWord.parse("P3")


def test_chambers_and_closing():
    w = GroupoidWord.parse("P1 P2 P1 P2 P1 P2")
    assert w.chambers() == [0, 1, 2, 3, 4, 5, 0]
    assert w.closes()
    assert not GroupoidWord.parse("P1").closes()
    assert GroupoidWord.parse("P1 P1").closes()


def test_braid_spelling():
    assert GroupoidWord.parse("P1 P1 P2 P2").braid_string() == "a^2 b^2"
    assert GroupoidWord.parse("P2^-1 P2^-1").braid_string() == "b^-2"
    assert GroupoidWord.parse("P1").braid_string() is None
    assert GroupoidWord().braid_string() == "id"


@given(st.integers(0, 2 ** 32), st.integers(0, 8))
def test_inverse_word_returns(seed, n):
    w = D.random_word(random.Random(seed), n)
    inv = w.inverse()
    assert inv.start == w.end and inv.end == w.start
    assert inv.inverse() == w


def test_words_compose_only_at_matching_chambers():
    with pytest.raises(ValueError):
        GroupoidWord.parse("P1") + GroupoidWord.parse("P1")
    w = GroupoidWord.parse("P1") + GroupoidWord(("P1",), 1)
    assert w.closes()


# reduction and classification --------------------------------------------------------

@given(st.integers(0, 10 ** 6), st.integers(0, 5), st.sampled_from(["S1", "S2", "M1"]))
@settings(max_examples=25, deadline=None)
def test_reduce_round_trip(seed, n, name):
    x = act(D.random_word(random.Random(seed), n), obj(name))
    word, term, trace = D.reduce(x)
    assert trace.strictly_decreasing()
    assert D.homological_length(term) == 0
    assert min(cohomology(term)) == 0
    assert quasi_iso_equal(act(word.inverse(), term), x)


def test_reduce_ends_on_a_simple():
    word, term, trace = D.reduce(obj("M2"))
    assert word.letters[-1] == "P1"
    assert labels(term) == {0: ("S2",)}


def test_reduce_rejects_negative_self_ext():
    x = obj("S1").direct_sum(obj("M1", degree=1)).direct_sum(obj("S2", degree=2))
    with pytest.raises(D.ReductionError):
        D.reduce(x)


def test_classify_shifted_brick():
    c = D.classify_spherical(act(GroupoidWord.parse("P1 P2 P1^-1 P2"), obj("S1")))
    assert (c.normal_form, c.shift, c.simple) == ("S2", -1, "S2")


def test_classify_m1_seed():
    c = D.classify_spherical(obj("M1"))
    assert c.normal_form == "M1" and c.simple == "S1"
    assert c.to_simple.letters == ("P2",)
    assert len(c.word) == 0


def test_classify_rejects_non_brick():
    with pytest.raises(D.NotABrick):
        D.classify_spherical(obj("Q1"))


# combinatorial shadow ------------------------------------------------------------------

def test_shadow_rules_k1_agree_with_chain_level():
    """Shadow dimensions equal the chain-level ones whenever the shadow is determined."""
    rng = random.Random(7)
    compared = 0
    for _ in range(40):
        x = act(D.random_word(rng, rng.randint(0, 4)), obj(rng.choice(["S1", "S2", "M1"])))
        sh = D.ShadowObject.from_labels(1, {p: [s for s in v] for p, v in labels(x).items()})
        i, d = rng.choice([1, 2]), rng.choice([1, -1])
        try:
            y = D.shadow_apply(i, d, sh)
        except D.Ambiguous:
            continue
        chain = {p: H.dim_vector for p, H in cohomology(mutation(i, x, d)).items()}
        assert {p: dd.dims for p, dd in y.degrees.items() if dd.dims != (0, 0)} == chain
        compared += 1
    assert compared >= 10


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_shadow_reduce_single_simple(k):
    word, term, steps = D.shadow_reduce(k, D.ShadowObject.from_labels(k, {0: ["M2"]}))
    assert word.letters == ("P1",)
    assert term.support() == [0] and str(term.degrees[0]) == "S2"


def test_shadow_flags_extensions():
    x = D.ShadowObject.from_labels(3, {0: ["S1"], 1: ["S2"]})
    word, term, steps = D.shadow_reduce(3, x)
    assert steps[0].flag == "AMBIGUOUS"
    assert steps[0].bounds


def test_shadow_unknown_label():
    with pytest.raises(ValueError):
        D.ShadowObject.from_labels(2, {0: ["Q1"]})
