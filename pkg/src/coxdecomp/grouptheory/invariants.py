"""Low-index normal subgroup invariants: K_n, k_n, free-group k_n and QM bounds."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import BudgetExceeded, ValidationError
from . import kernels
from .cayley import (
    DEFAULT_ORDER_BOUND,
    DEFAULT_SUBGROUP_BOUND,
    CayleyGroup,
    Subgroup,
    abelian,
    all_subgroups,
    cyclic,
    dicyclic,
    dihedral,
    normal_subgroups,
)
from .iso import automorphisms, is_isomorphic

DEFAULT_FREE_BUDGET = 1_000_000


def kn(G: CayleyGroup, n: int, bound: int = DEFAULT_ORDER_BOUND) -> tuple[Subgroup, int]:
    """Intersection K of all normal subgroups of index at most n, and its index."""
    if n < 1:
        raise ValidationError("n must be at least 1")
    mask = np.ones(G.order, dtype=np.bool_)
    for N in normal_subgroups(G, bound=bound):
        if N.order * n >= G.order:
            mask &= N.mask
    K = Subgroup._from_mask(G, mask)
    return K, G.order // K.order


# ---------------------------------------------------------------------------
# free groups
# ---------------------------------------------------------------------------

# number of isomorphism classes of groups of order 1..8
KNOWN_GROUP_COUNTS = (1, 1, 1, 2, 1, 2, 1, 5)


@dataclass(frozen=True)
class FreeGroupSpec:
    g: int
    n: int

    def __post_init__(self):
        if self.g < 1 or self.n < 2:
            raise ValidationError("free group spec needs g >= 1 and n >= 2")


@lru_cache(maxsize=1)
def small_group_catalog() -> tuple[CayleyGroup, ...]:
    """One representative of every group of order at most 8, validated."""
    groups = [cyclic(k) for k in range(1, 9)]
    groups += [abelian([2, 2]), dihedral(6), abelian([4, 2]), abelian([2, 2, 2]),
               dihedral(8), dicyclic(8)]
    groups.sort(key=lambda G: G.order)
    counts = Counter(G.order for G in groups)
    if tuple(counts[k] for k in range(1, 9)) != KNOWN_GROUP_COUNTS:
        raise AssertionError("small group catalog has wrong counts")
    for A, B in itertools.combinations(groups, 2):
        if A.order == B.order and is_isomorphic(A, B):
            raise AssertionError(f"catalog entries {A.name} and {B.name} are isomorphic")
    return tuple(groups)


def surjection_kernels(Q: CayleyGroup, g: int) -> list[tuple[int, ...]]:
    """One generating g-tuple of Q per kernel, i.e. per Aut(Q)-orbit of surjections."""
    auts = np.asarray(automorphisms(Q))
    reps = []
    seen: set[tuple[int, ...]] = set()
    for tup in itertools.product(range(Q.order), repeat=g):
        if tup in seen:
            continue
        if not kernels.closure(Q.table, np.asarray(tup, dtype=np.int64)).all():
            continue
        orbit = {tuple(int(x) for x in row) for row in auts[:, list(tup)]}
        seen |= orbit
        reps.append(tup)
    return reps


def kn_free(spec: FreeGroupSpec, budget: int = DEFAULT_FREE_BUDGET) -> int:
    """k_n of the free group of rank g, for n <= 8.

    F_g / K_n embeds in the product of one quotient per normal subgroup of
    index at most n; its order is that of the subgroup generated by the
    images of the g free generators.
    """
    g, n = spec.g, spec.n
    if n > 8:
        raise ValidationError("kn_free supports n <= 8")
    if g > 3:
        raise ValidationError("kn_free supports g <= 3")
    if g == 1:
        return math.lcm(*range(1, n + 1))
    factors: list[tuple[CayleyGroup, tuple[int, ...]]] = []
    for Q in small_group_catalog():
        if 1 < Q.order <= n:
            factors += [(Q, t) for t in surjection_kernels(Q, g)]
    return _product_closure(factors, g, budget)


def _product_closure(factors, g: int, budget: int) -> int:
    k = len(factors)
    if k == 0:
        return 1
    m = max(Q.order for Q, _ in factors)
    tables = np.zeros((k, m, m), dtype=np.int64)
    for i, (Q, _) in enumerate(factors):
        tables[i, : Q.order, : Q.order] = Q.table
    gens = np.asarray([[t[j] for _, t in factors] for j in range(g)], dtype=np.int64)
    dtype = np.uint8 if m < 256 else np.int64
    rows = np.arange(k)
    start = np.zeros(k, dtype=np.int64)
    seen = {start.astype(dtype).tobytes()}
    frontier = start[None, :]
    while frontier.size:
        nxt = []
        for j in range(g):
            cand = tables[rows[None, :], frontier, gens[j][None, :]]
            for vec in cand:
                key = vec.astype(dtype).tobytes()
                if key not in seen:
                    seen.add(key)
                    nxt.append(vec)
                    if len(seen) > budget:
                        raise BudgetExceeded(
                            f"closure exceeded {budget} elements",
                            {"kernels": k, "elements": len(seen)},
                        )
        frontier = np.asarray(nxt, dtype=np.int64).reshape(-1, k)
    return len(seen)


# ---------------------------------------------------------------------------
# QM
# ---------------------------------------------------------------------------


def min_normal_index(D: CayleyGroup) -> int:
    """Least index of a proper normal subgroup of a nontrivial group."""
    best = max(N.order for N in normal_subgroups(D) if N.order < D.order)
    return D.order // best


def qm_bound(G: CayleyGroup, bound: int = DEFAULT_SUBGROUP_BOUND) -> int:
    """Least n such that every nontrivial subgroup has a proper normal subgroup of index <= n."""
    worst = 1
    for S in all_subgroups(G, bound=bound):
        if S.order > 1 and S.order > worst:
            worst = max(worst, min_normal_index(G.subtable(S)))
    return worst


__all__ = [
    "FreeGroupSpec",
    "KNOWN_GROUP_COUNTS",
    "kn",
    "kn_free",
    "min_normal_index",
    "qm_bound",
    "small_group_catalog",
    "surjection_kernels",
]
