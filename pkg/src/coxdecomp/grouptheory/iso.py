"""Isomorphism testing for Cayley groups.

Cheap invariants reject most non-isomorphic pairs; the rest is a backtracking
search over images of a small generating set, pruned by element orders,
class sizes, orders of pairwise products and partial-homomorphism
consistency. A returned isomorphism is always an explicit, checked bijection.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterator

import numpy as np

from .._util import prime_factors
from . import kernels
from .cayley import CayleyGroup, commutator_subgroup, quotient


def abelian_group_invariants(A: CayleyGroup) -> tuple[int, ...]:
    """Prime-power invariants of an abelian group, from element-order counts."""
    if A.order == 1:
        return ()
    orders = A.element_orders
    invariants: list[int] = []
    for p in prime_factors(A.order):
        ranks = []
        prev = 1
        k = 1
        while True:
            c = int(np.count_nonzero((p ** k) % orders == 0))
            ratio = c // prev
            r = 0
            while ratio > 1:
                ratio //= p
                r += 1
            if r == 0:
                break
            ranks.append(r)
            prev = c
            k += 1
        # ranks[k-1] counts cyclic factors of order >= p^k
        for k, rk in enumerate(ranks, start=1):
            nxt = ranks[k] if k < len(ranks) else 0
            invariants.extend([p ** k] * (rk - nxt))
    return tuple(sorted(invariants))


def abelian_invariants(G: CayleyGroup) -> tuple[int, ...]:
    """Invariants of the abelianization ``G/[G,G]``."""
    cache = G.__dict__.get("_abelian_invariants")
    if cache is None:
        Q, _ = quotient(G, commutator_subgroup(G))
        cache = abelian_group_invariants(Q)
        G.__dict__["_abelian_invariants"] = cache
    return cache


def fingerprint(G: CayleyGroup) -> tuple:
    """(order, element-order histogram, class-size histogram, abelianization invariants)."""
    cache = G.__dict__.get("_fingerprint")
    if cache is None:
        order_hist = tuple(sorted(Counter(G.element_orders.tolist()).items()))
        class_hist = tuple(sorted(Counter(len(c) for c in G.conjugacy_classes).items()))
        cache = (G.order, order_hist, class_hist, abelian_invariants(G))
        G.__dict__["_fingerprint"] = cache
    return cache


def _search(G: CayleyGroup, H: CayleyGroup, up_to_conjugacy: bool) -> Iterator[np.ndarray]:
    gens = G.small_generating_set()
    if not gens:
        yield np.zeros(1, dtype=np.int64)
        return
    oG, oH = G.element_orders, H.element_orders
    cG, cH = G.class_sizes, H.class_sizes
    cands = [np.flatnonzero((oH == oG[g]) & (cH == cG[g])) for g in gens]
    if up_to_conjugacy:
        # composing with an inner automorphism of H moves the first image anywhere in its class
        _, first = np.unique(H.class_labels[cands[0]], return_index=True)
        cands[0] = cands[0][np.sort(first)]
    gens_arr = np.asarray(gens, dtype=np.int64)
    k = len(gens)
    images = np.zeros(k, dtype=np.int64)
    prod_orders = [[int(oG[G.table[gens[j], gens[i]]]) for j in range(i)] for i in range(k)]

    def rec(i: int):
        if i == k:
            phi = kernels.extend_hom(G.table, gens_arr, H.table, images)
            if phi[0] < 0 or np.any(phi < 0):
                return
            if np.count_nonzero(phi == 0) != 1:
                return
            yield phi
            return
        for h in cands[i]:
            if any(oH[H.table[images[j], h]] != prod_orders[i][j] for j in range(i)):
                continue
            images[i] = h
            if i + 1 < k:
                part = kernels.extend_hom(G.table, gens_arr[: i + 1], H.table, images[: i + 1])
                if part[0] == -2:
                    continue
                dom = part >= 0
                if np.count_nonzero(part[dom] == 0) != 1:
                    continue
            yield from rec(i + 1)

    yield from rec(0)


def isomorphism(G: CayleyGroup, H: CayleyGroup) -> np.ndarray | None:
    """An explicit isomorphism ``phi`` (``phi[g]`` is the image of g), or None."""
    if G.order != H.order:
        return None
    if G.order == 1:
        return np.zeros(1, dtype=np.int64)
    if fingerprint(G) != fingerprint(H):
        return None
    for phi in _search(G, H, up_to_conjugacy=True):
        return phi
    return None


def is_isomorphic(G: CayleyGroup, H: CayleyGroup) -> bool:
    return isomorphism(G, H) is not None


def all_isomorphisms(G: CayleyGroup, H: CayleyGroup) -> list[np.ndarray]:
    if G.order != H.order or fingerprint(G) != fingerprint(H):
        return []
    if G.order == 1:
        return [np.zeros(1, dtype=np.int64)]
    return list(_search(G, H, up_to_conjugacy=False))


def automorphisms(G: CayleyGroup) -> list[np.ndarray]:
    return all_isomorphisms(G, G)


def is_homomorphism(G: CayleyGroup, H: CayleyGroup, phi: np.ndarray) -> bool:
    """Check ``phi(xy) = phi(x) phi(y)`` on the whole table."""
    return bool(np.array_equal(phi[G.table], H.table[np.ix_(phi, phi)]))
