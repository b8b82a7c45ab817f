import json

import numpy as np
import pytest
from flint import fmpq_mat

from coxdecomp.errors import ValidationError
from coxdecomp.liealg import (
    CertifiedIndecomposable,
    Inconclusive,
    LieAlgebra,
    OfSignature,
    Split,
    center,
    centroid,
    decompose_ideals,
    derived,
    is_ideal,
    is_perfect,
    is_solvable,
    match_summands,
    nilradical_codim_check,
    of_algebra,
    of_dimension,
    random_basis_change,
    verdict_to_json,
    verify_split,
)


def so3():
    # [x0,x1]=x2, [x1,x2]=x0, [x2,x0]=x1
    return LieAlgebra(3, {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1},
                          (1, 0): {2: -1}, (2, 1): {0: -1}, (0, 2): {1: -1}})


def direct_sum(a: LieAlgebra, b: LieAlgebra) -> LieAlgebra:
    d = a.dim + b.dim
    br = {}
    for L, off in ((a, 0), (b, a.dim)):
        for i in range(L.dim):
            for j in range(L.dim):
                col = {k + off: L.const(i, j, k) for k in range(L.dim) if L.const(i, j, k)}
                if col:
                    br[(i + off, j + off)] = col
    return LieAlgebra(d, br)


def test_construction_checks_jacobi():
    with pytest.raises(ValidationError):
        # antisymmetric but violates Jacobi
        LieAlgebra(3, {(0, 1): {0: 1}, (1, 0): {0: -1}, (1, 2): {1: 1}, (2, 1): {1: -1}})
    with pytest.raises(ValidationError):
        LieAlgebra(2, {(0, 1): {0: 1}})  # not antisymmetric
    with pytest.raises(ValidationError):
        OfSignature(0, 0, 0)


@pytest.mark.parametrize("sig,dim", [((3, 0, 0), 3), ((2, 0, 1), 3), ((4, 0, 0), 6), ((3, 0, 2), 9)])
def test_of_dimensions(sig, dim):
    assert of_algebra(sig).dim == dim == of_dimension(*sig)


def test_structure_predicates():
    L = of_algebra((3, 0, 1))
    assert is_perfect(L)
    L = of_algebra((2, 0, 1))
    assert is_solvable(L) and not is_perfect(L)
    assert len(derived(L)) == L.dim - 1
    assert center(L) == []
    assert nilradical_codim_check(L)


def test_centroid_dimensions():
    assert len(centroid(so3())) == 1
    assert len(centroid(direct_sum(so3(), so3()))) == 2
    for d in (1, 2, 3):
        assert len(centroid(LieAlgebra(d, {}))) == d * d
    # identity always belongs to the centroid
    L = of_algebra((3, 1, 0))
    d = L.dim
    C = centroid(L)

    def rank_of(mats):
        return fmpq_mat(len(mats), d * d, [M[a, b] for M in mats for a in range(d) for b in range(d)]).rank()

    ident = fmpq_mat(d, d, [int(i == j) for i in range(d) for j in range(d)])
    assert rank_of(C) == rank_of(C + [ident]) == len(C)


def test_centroid_methods_agree():
    for sig in [(3, 0, 1), (2, 2, 0), (2, 0, 2)]:
        L = of_algebra(sig)
        assert len(centroid(L, "generators")) == len(centroid(L, "full"))


@pytest.mark.parametrize("sig", [(4, 0, 0), (2, 2, 0), (0, 4, 0)])
def test_exceptional_splits(sig):
    L = of_algebra(sig)
    v = decompose_ideals(L)
    assert isinstance(v, Split) and v.dims() == [3, 3]
    verify_split(L, v.ideals)
    for I in v.ideals:
        assert is_ideal(L, I)


def test_of_301_certified():
    v = decompose_ideals(of_algebra((3, 0, 1)))
    assert isinstance(v, CertifiedIndecomposable)
    # the centroid contains a nilpotent map so(3) -> R^3 besides the identity
    assert v.centroid_dim == 2 and v.certificate == "centroid-local"


def test_dim1_certificates():
    for sig in [(3, 0, 0), (2, 1, 0), (2, 0, 1), (5, 0, 0), (4, 0, 1), (3, 1, 1)]:
        v = decompose_ideals(of_algebra(sig))
        assert isinstance(v, CertifiedIndecomposable) and v.certificate == "centroid-dim-1", sig


def test_center_rejected():
    with pytest.raises(ValidationError):
        decompose_ideals(of_algebra((2, 0, 0)))


def test_basis_change_invariance():
    rng = np.random.default_rng(5)
    L = of_algebra((2, 2, 0))
    base = decompose_ideals(L)
    for _ in range(5):
        P = random_basis_change(L.dim, rng)
        L2 = L.change_basis(P)
        v = decompose_ideals(L2)
        assert v.dims() == base.dims()
        assert match_summands(L, base, L2, P, v) is not None
    L = of_algebra((3, 0, 1))
    for _ in range(3):
        v = decompose_ideals(L.change_basis(random_basis_change(L.dim, rng)))
        assert isinstance(v, CertifiedIndecomposable)


def test_json_round_trip():
    L = of_algebra((3, 1, 1))
    obj = json.loads(json.dumps(L.to_json()))
    assert all(isinstance(c, str) and "/" in c for *_, c in obj["brackets"])
    L2 = LieAlgebra.from_json(obj)
    assert L2.dim == L.dim and all(L2.ad[i] == L.ad[i] for i in range(L.dim))


def test_verdict_json():
    out = verdict_to_json(decompose_ideals(of_algebra((4, 0, 0))))
    assert out["verdict"] == "Split" and out["dims"] == [3, 3]
    out = verdict_to_json(Inconclusive("x", 3))
    assert out == {"verdict": "Inconclusive", "reason": "x", "centroid_dim": 3}
