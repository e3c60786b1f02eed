import pytest

from flopkit.linalg import Field, QQ
from flopkit.nccr import (NCCRContext, ac_weight, boundary, ext_groups, ext_hilbert, identity,
                          lambda_n, verify_massey_prep, verify_resolution)


def test_bad_n():
    with pytest.raises(ValueError):
        lambda_n(-1)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_ac_weight_positive(n):
    assert ac_weight(n) >= 1


@pytest.mark.parametrize("F", [QQ, Field(3)])
@pytest.mark.parametrize("n", [0, 1, 2])
def test_resolutions_exact(n, F):
    ctx = NCCRContext(n, F)
    for i in (1, 2):
        rep = verify_resolution(ctx.P[i], i, 4 * n + 8)
        assert rep["ok"], rep["failures"]


def test_resolution_degree_budget():
    ctx = NCCRContext(1, Field(3), max_degree=10)
    with pytest.raises(ValueError):
        verify_resolution(ctx.P[1], 1, 11)


def test_resolution_check_is_not_vacuous():
    # pairing the resolution of S1 with the wrong simple must fail
    ctx = NCCRContext(1, Field(3))
    assert not verify_resolution(ctx.P[1], 2, 6)["ok"]


@pytest.mark.parametrize("F", [QQ, Field(2), Field(3), Field(5)])
@pytest.mark.parametrize("n", [1, 2])
def test_massey_prep(n, F):
    rep = verify_massey_prep(NCCRContext(n, F))
    bad = [c["identity"] for c in rep["checks"] if not c["ok"]]
    assert not bad
    parts = {c["part"] for c in rep["checks"]}
    assert {"1", "2", "pairing", "chain map"} <= parts


def test_massey_part3_t_range():
    rep = verify_massey_prep(NCCRContext(3, Field(5)))
    part3 = [c for c in rep["checks"] if c["part"] == "3"]
    assert len(part3) == 4
    assert all(c["ok"] for c in part3)


def test_standard_maps_are_chain_maps():
    ctx = NCCRContext(1, Field(3))
    for name, f in ctx.maps().items():
        if name.startswith(("xi", "zeta")):
            assert boundary(f).is_zero(), name
    assert boundary(identity(ctx.P[1])).is_zero()


@pytest.mark.parametrize("F", [QQ, Field(3)])
@pytest.mark.parametrize("n", [1, 2])
def test_ext_hilbert(n, F):
    assert ext_hilbert(NCCRContext(n, F)) == [2, 2, 2, 2]


def test_ext_between_distinct_simples():
    groups = ext_groups(NCCRContext(1, Field(5)), 1, 2)
    assert sorted(groups) == [1, 2]
    assert all(sum(g.values()) == 1 for g in groups.values())
