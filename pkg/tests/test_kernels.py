"""The numba and numpy kernel backends must agree exactly."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coxdecomp.grouptheory import kernels
from coxdecomp.grouptheory.cayley import abelian, dicyclic, dihedral, direct_product, symmetric

pytestmark = pytest.mark.skipif(kernels.numba_impl is None, reason="numba not importable")

GROUPS = [symmetric(4), dihedral(12), dicyclic(12), abelian([2, 4, 3]), direct_product(symmetric(3), abelian([2, 2]))]


def _both(name, *args):
    a = getattr(kernels.numpy_impl, name)(*args)
    b = getattr(kernels.numba_impl, name)(*args)
    return np.asarray(a), np.asarray(b)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(range(len(GROUPS))), st.data())
def test_kernel_parity(gi, data):
    G = GROUPS[gi]
    t = G.table
    n = G.order
    idx = st.lists(st.integers(0, n - 1), min_size=0, max_size=4)
    gens = np.asarray(data.draw(idx), dtype=np.int64)
    members = np.unique(np.asarray(data.draw(idx) + [0], dtype=np.int64))
    for name, args in [
        ("closure", (t, gens)),
        ("conjugacy_labels", (t, G.inverse)),
        ("element_orders", (t,)),
        ("centralizer_mask", (t, members)),
        ("product_mask", (t, members, gens if gens.size else members)),
        ("is_latin", (t,)),
        ("associativity_witness", (t, gens)),
    ]:
        a, b = _both(name, *args)
        assert np.array_equal(a, b), name


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(range(len(GROUPS))), st.data())
def test_extend_hom_parity(gi, data):
    G = GROUPS[gi]
    gens = np.asarray(data.draw(st.lists(st.integers(0, G.order - 1), min_size=1, max_size=3)), dtype=np.int64)
    images = np.asarray(data.draw(st.lists(st.integers(0, G.order - 1), min_size=len(gens),
                                           max_size=len(gens))), dtype=np.int64)
    a, b = _both("extend_hom", G.table, gens, G.table, images)
    assert np.array_equal(a, b)
    # the identity assignment always extends
    a, b = _both("extend_hom", G.table, gens, G.table, gens)
    assert np.array_equal(a, b) and (a[a >= 0] == np.flatnonzero(a >= 0)).all()


def test_nonassociative_witness_parity():
    loop = np.array([[0, 1, 2, 3, 4],
                     [1, 0, 3, 4, 2],
                     [2, 4, 0, 1, 3],
                     [3, 2, 4, 0, 1],
                     [4, 3, 1, 2, 0]], dtype=np.int64)
    gens = np.arange(5, dtype=np.int64)
    a, b = _both("associativity_witness", loop, gens)
    assert np.array_equal(a, b) and a[0] >= 0


def test_env_flag_selects_numpy():
    code = "from coxdecomp.grouptheory import kernels; print(kernels.active.name)"
    env = dict(os.environ, COXDECOMP_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    env["COXDECOMP_DISABLE_NUMBA"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numba"
