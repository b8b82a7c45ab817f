import numpy as np
import pytest

from coxdecomp.coxeter import (
    CoxeterSystem,
    affine_type,
    build_group,
    disjoint_union,
    finite_catalog,
    finite_type,
    recognize,
)
from coxdecomp.decomp import (
    EXCEPTIONAL_SPLIT,
    cross_validate,
    decompose,
    factor_center_split,
    splits_off_center,
)
from coxdecomp.errors import ValidationError
from coxdecomp.grouptheory import abelian, cyclic, dihedral, direct_product, symmetric


def factor_orders(fac):
    return sorted(f.order for f in fac.factors)


@pytest.mark.parametrize(
    "cs,orders",
    [
        (finite_type("B", 3), [2, 24]),
        (finite_type("H", 3), [2, 60]),
        (finite_type("I2", 6), [2, 6]),
        (finite_type("I2", 10), [2, 10]),
        (finite_type("D", 4), [192]),
        (finite_type("F", 4), [1152]),
        (finite_type("A", 2), [6]),
    ],
)
def test_decompose_orders(cs, orders):
    fac = decompose(cs)
    assert factor_orders(fac) == orders
    assert fac.order() == build_group(cs).order


def test_decompose_exceptional_markers():
    fac = decompose(finite_type("B", 3))
    central = [f for f in fac.factors if f.central]
    assert len(central) == 1 and central[0].order == 2
    assert {f.rule for f in fac.factors} == {EXCEPTIONAL_SPLIT}
    assert str(central[0].label) == "C2"


def test_decompose_infinite_and_empty():
    fac = decompose(affine_type("A", 1))
    assert len(fac.factors) == 1 and fac.factors[0].order is None
    assert fac.to_json()["factors"][0]["order"] == "infinite"
    assert not fac.is_finite
    empty = decompose(CoxeterSystem([]))
    assert empty.factors == [] and empty.order() == 1


def test_rule_only_provenance():
    fac = decompose(finite_type("E", 7))
    assert [f.provenance for f in fac.factors] == ["rule-only", "rule-only"]
    assert factor_orders(fac) == [2, 1451520]
    assert {f.provenance for f in decompose(finite_type("B", 3)).factors} == {"rule"}


def test_split_predicate_on_corpus():
    # among rank <= 4 finite types and I2(m), m <= 30, exactly I2(4k+2), B3, H3 split
    for cs in finite_catalog(4, 30):
        name = recognize(cs)
        expected = name in ("B3", "H3") or (name.startswith("I2(") and int(name[3:-1]) % 4 == 2)
        assert splits_off_center(name) == expected, name
    assert splits_off_center("E7") and splits_off_center("B5") and not splits_off_center("B4")


def test_decompose_relabeling_and_union():
    cs = disjoint_union(finite_type("B", 3), affine_type("A", 2), finite_type("I2", 10))
    base = decompose(cs)
    rng = np.random.default_rng(11)
    for _ in range(3):
        perm = [int(x) for x in rng.permutation(cs.n)]
        assert decompose(cs.relabel(perm)).labels() == base.labels()
    parts = [decompose(finite_type("B", 3)), decompose(affine_type("A", 2)), decompose(finite_type("I2", 10))]
    assert sorted(lbl for p in parts for lbl in p.labels()) == base.labels()


@pytest.mark.parametrize(
    "cs,oracle",
    [
        (finite_type("A", 2), ["Sym3"]),
        (finite_type("H", 3), ["Alt5", "C2"]),
        (finite_type("B", 3), ["C2", "Sym4"]),
        (finite_type("I2", 6), ["C2", "Sym3"]),
        (finite_type("I2", 10), ["C2", "D10"]),
    ],
)
def test_cross_validate_labels(cs, oracle):
    res = cross_validate(cs)
    assert sorted(res.oracle_labels) == sorted(oracle)
    assert res.to_json()["match"] is True


def test_cross_validate_d4_and_products():
    res = cross_validate(finite_type("D", 4))
    assert res.order == 192 and len(res.pairs) == 1
    res = cross_validate(disjoint_union(finite_type("A", 1), finite_type("B", 3)))
    assert sorted(o for _, _, o in res.pairs) == [2, 2, 24]


def test_cross_validate_rejects_infinite():
    with pytest.raises(ValidationError):
        cross_validate(affine_type("A", 1))


def test_factor_center_split_examples():
    W = build_group(finite_type("H", 3)).cayley_group()
    Z, M = factor_center_split(W)
    assert Z.order == 2 and M.order == 60
    assert factor_center_split(dihedral(8)) is None
    assert factor_center_split(cyclic(4)) is None
    Z, M = factor_center_split(direct_product(cyclic(2), symmetric(3)))
    assert M.order == 6
    with pytest.raises(ValidationError):
        factor_center_split(abelian([2, 2]))
