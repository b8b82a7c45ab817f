import math

import numpy as np
import pytest

from coxdecomp.coxeter import build_group, finite_type
from coxdecomp.errors import BudgetExceeded, ValidationError
from coxdecomp.grouptheory import (
    CayleyGroup,
    Subgroup,
    abelian,
    alternating,
    center,
    centralizer,
    cyclic,
    dihedral,
    direct_product,
    hypercenter,
    is_isomorphic,
    normal_subgroups,
    quaternion,
    quotient,
    symmetric,
)
from coxdecomp.grouptheory.invariants import (
    KNOWN_GROUP_COUNTS,
    FreeGroupSpec,
    kn,
    kn_free,
    qm_bound,
    small_group_catalog,
)
from coxdecomp.grouptheory.iso import abelian_invariants, automorphisms, fingerprint, isomorphism
from coxdecomp.grouptheory.remak import (
    FactorMultiset,
    all_decompositions,
    direct_factor_pairs,
    identify,
    image_law_holds,
    is_indecomposable,
    remak_decompose,
)
from coxdecomp.grouptheory.cayley import axiom_violation


def orders(subgroups):
    return sorted(H.order for H in subgroups)


def test_axiom_violations_are_named():
    assert axiom_violation(cyclic(5).table) is None
    # Latin square with identity 0 that is not associative (order 5 loop)
    loop = np.array([[0, 1, 2, 3, 4],
                     [1, 0, 3, 4, 2],
                     [2, 4, 0, 1, 3],
                     [3, 2, 4, 0, 1],
                     [4, 3, 1, 2, 0]])
    assert axiom_violation(loop).startswith("associativity fails at (")
    bad = cyclic(3).table.copy()
    bad[1, 1] = 1
    assert axiom_violation(bad).startswith("inverses fail")
    with pytest.raises(ValidationError):
        CayleyGroup(bad)


def test_normal_subgroups_examples():
    assert orders(normal_subgroups(symmetric(3))) == [1, 3, 6]
    assert orders(normal_subgroups(cyclic(6))) == [1, 2, 3, 6]
    assert orders(normal_subgroups(quaternion())) == [1, 2, 4, 4, 4, 8]
    with pytest.raises(BudgetExceeded):
        normal_subgroups(abelian([2] * 6), limit=5)


def test_remak_examples():
    assert remak_decompose(cyclic(6)).multiset().orders() == [2, 3]
    assert remak_decompose(symmetric(3)).multiset().orders() == [6]
    assert remak_decompose(cyclic(4)).multiset().orders() == [4]
    res = remak_decompose(direct_product(symmetric(3), abelian([2, 2])))
    assert res.multiset().orders() == [2, 2, 6]


def test_isomorphism_examples():
    assert is_isomorphic(cyclic(6), direct_product(cyclic(2), cyclic(3)))
    assert not is_isomorphic(cyclic(4), abelian([2, 2]))
    W = build_group(finite_type("B", 3)).cayley_group()
    Q, _ = quotient(W, center(W))
    phi = isomorphism(Q, symmetric(4))
    assert phi is not None
    assert np.array_equal(symmetric(4).table[phi[:, None], phi[None, :]], phi[Q.table])


def test_automorphism_counts():
    # |Aut(C2^2)| = 6, |Aut(S3)| = 6, |Aut(Q8)| = 24, |Aut(D8)| = 8
    assert len(automorphisms(abelian([2, 2]))) == 6
    assert len(automorphisms(symmetric(3))) == 6
    assert len(automorphisms(quaternion())) == 24
    assert len(automorphisms(dihedral(8))) == 8


def test_center_and_centralizer():
    assert center(symmetric(3)).order == 1
    assert center(quaternion()).order == 2
    A, B = symmetric(3), dihedral(8)
    G = direct_product(A, B)
    nB = B.order
    A_in_G = Subgroup(G, [a * nB for a in range(A.order)])
    C = centralizer(G, A_in_G)
    # C_G(A) = Z(A) x B
    assert C.order == center(A).order * B.order


def test_hypercenter_examples():
    assert hypercenter(dihedral(8)).order == 8
    assert hypercenter(symmetric(3)).order == 1
    G = direct_product(cyclic(2), symmetric(3))
    Z = hypercenter(G)
    assert Z.order == 2
    Q, _ = quotient(G, Z)
    assert center(Q).order == 1


def test_quotient_and_product():
    assert direct_product(cyclic(2), cyclic(3)).order == 6
    S3 = symmetric(3)
    A3 = next(N for N in normal_subgroups(S3) if N.order == 3)
    Q, coset = quotient(S3, A3)
    assert is_isomorphic(Q, cyclic(2))
    assert coset[0] == 0
    Q1, _ = quotient(S3, Subgroup(S3, [0]))
    assert is_isomorphic(Q1, S3)
    T = [H for H in _order2_subgroups(S3)]
    with pytest.raises(ValidationError):
        quotient(S3, T[0])


def _order2_subgroups(G):
    return [Subgroup(G, [x]) for x in range(1, G.order) if G.element_orders[x] == 2]


def test_identify_labels():
    assert str(identify(cyclic(7))) == "C7"
    assert str(identify(symmetric(4))) == "Sym4"
    assert str(identify(alternating(5))) == "Alt5"
    assert str(identify(abelian([2, 4]))) == "C2xC4"
    assert identify(dihedral(10)).family == "dihedral"


def test_factor_multiset_matching():
    a = FactorMultiset([(identify(g), g) for g in (cyclic(2), symmetric(3))])
    b = FactorMultiset([(identify(g), g) for g in (dihedral(6), cyclic(2))])
    assert a == b
    c = FactorMultiset([(identify(g), g) for g in (cyclic(2), cyclic(6))])
    assert a != c


def test_direct_factor_pairs_and_uniqueness():
    G = direct_product(symmetric(3), symmetric(3))
    pairs = direct_factor_pairs(G)
    # unordered nontrivial pairs: the two Sym3 coordinates
    assert [(A.order, B.order) for A, B in pairs] == [(6, 6)]
    decs = all_decompositions(G)
    assert len(decs) == 1
    for A, B in pairs:
        assert image_law_holds(G, A, B)


def test_abelian_invariants():
    assert abelian_invariants(symmetric(4)) == (2,)
    assert abelian_invariants(abelian([4, 6])) == (2, 3, 4)  # prime-power form
    assert fingerprint(cyclic(4)) != fingerprint(abelian([2, 2]))


def test_indecomposable():
    assert is_indecomposable(quaternion())
    assert is_indecomposable(dihedral(8))
    assert not is_indecomposable(dihedral(12))


# -- k_n ---------------------------------------------------------------------


def test_kn_examples():
    assert kn(abelian([2, 2]), 2)[1] == 4
    assert kn(symmetric(3), 3)[1] == 2
    for G in (symmetric(4), quaternion(), cyclic(9)):
        assert kn(G, 1)[1] == 1
    # finite shadow of k_n(Z^m) = n^m
    assert kn(abelian([3, 3, 3]), 3)[1] == 27


def test_small_group_catalog():
    cat = small_group_catalog()
    counts = [sum(1 for G in cat if G.order == k) for k in range(1, 9)]
    assert tuple(counts) == KNOWN_GROUP_COUNTS


def _kn_free_formula(g, n):
    # every group of order <= 5 is abelian, so for n <= 5 the quotient F_g/K_n
    # is the largest abelian quotient in which each kernel has index <= n:
    # prod_p (C_{p^e})^g with p^e the largest power of p not exceeding n
    out = 1
    for p in (2, 3, 5, 7):
        if p > n:
            break
        e = int(math.floor(math.log(n, p) + 1e-12))
        out *= (p ** e) ** g
    return out


@pytest.mark.parametrize("g,n,expected", [(2, 2, 4), (2, 3, 36), (1, 2, 2), (1, 5, 60), (3, 3, 216),
                                          (2, 4, 144), (2, 5, 3600)])
def test_kn_free_frozen(g, n, expected):
    assert kn_free(FreeGroupSpec(g, n)) == expected
    assert _kn_free_formula(g, n) == expected


def test_kn_free_cyclic_is_lcm():
    for n in range(2, 9):
        assert kn_free(FreeGroupSpec(1, n)) == math.lcm(*range(1, n + 1))


def test_kn_free_validation_and_budget():
    with pytest.raises(ValidationError):
        FreeGroupSpec(0, 2)
    with pytest.raises(ValidationError):
        FreeGroupSpec(2, 1)
    with pytest.raises(BudgetExceeded) as info:
        kn_free(FreeGroupSpec(2, 5), budget=50)
    assert "kernels" in info.value.partial


def test_qm_bound_examples():
    assert qm_bound(cyclic(2)) == 2
    assert qm_bound(symmetric(3)) == 3
    assert qm_bound(alternating(5)) == 60
