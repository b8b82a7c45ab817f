"""Reproducible corpora of small finite groups for oracle sweeps."""

from __future__ import annotations

import itertools

import numpy as np

from .._util import prime_factors
from .cayley import (
    CayleyGroup,
    abelian,
    alternating,
    cyclic,
    dicyclic,
    dihedral,
    direct_product,
    quaternion,
    symmetric,
)


def _partitions(k: int, largest: int | None = None):
    largest = k if largest is None else largest
    if k == 0:
        yield ()
        return
    for first in range(min(k, largest), 0, -1):
        for rest in _partitions(k - first, first):
            yield (first,) + rest


def abelian_groups_of_order(n: int) -> list[CayleyGroup]:
    """One group per isomorphism class, given by prime-power invariants."""
    per_prime = []
    for p in prime_factors(n):
        e, m = 0, n
        while m % p == 0:
            m //= p
            e += 1
        per_prime.append([tuple(p ** a for a in part) for part in _partitions(e)])
    out = []
    for choice in itertools.product(*per_prime):
        invariants = sorted(x for part in choice for x in part)
        out.append(abelian(invariants) if invariants else cyclic(1))
    return out


def base_groups() -> list[CayleyGroup]:
    """Building blocks for random products: small nonabelian and cyclic groups."""
    return [cyclic(2), cyclic(3), cyclic(4), cyclic(5), symmetric(3), dihedral(8),
            quaternion(), alternating(4), dihedral(10), dicyclic(12), symmetric(4),
            abelian([2, 2])]


def random_products(count: int, max_order: int, rng: np.random.Generator) -> list[CayleyGroup]:
    blocks = base_groups()
    out: list[CayleyGroup] = []
    while len(out) < count:
        k = int(rng.integers(2, 4))
        picks = [blocks[int(i)] for i in rng.integers(0, len(blocks), size=k)]
        if np.prod([G.order for G in picks]) > max_order:
            continue
        G = picks[0]
        for H in picks[1:]:
            G = direct_product(G, H)
        G.name = " x ".join(H.name for H in picks)
        out.append(G)
    return out


def uniqueness_corpus(seed: int = 0, random_count: int = 20, max_order: int = 200) -> list[CayleyGroup]:
    """Abelian groups of order <= 64, dihedral and dicyclic families,
    symmetric groups up to Sym5, Alt4, Alt5 and seeded random direct products."""
    groups: list[CayleyGroup] = []
    for n in range(1, 65):
        groups += abelian_groups_of_order(n)
    groups += [dihedral(2 * k) for k in range(3, 31)]
    groups += [dicyclic(4 * k) for k in range(2, 9)]
    groups += [symmetric(k) for k in range(1, 6)]
    groups += [alternating(4), alternating(5)]
    groups += random_products(random_count, max_order, np.random.default_rng(seed))
    return groups


def centerless_corpus() -> list[CayleyGroup]:
    """Direct products of centerless groups (so the products are centerless too)."""
    s3, s4, a4, a5, d10 = symmetric(3), symmetric(4), alternating(4), alternating(5), dihedral(10)
    pairs = [(s3, s3), (s3, s4), (s3, a4), (a4, a4), (s3, d10), (d10, d10), (a4, d10),
             (s3, a5), (s4, s4), (a4, s4), (dihedral(14), s3)]
    out = [direct_product(a, b) for a, b in pairs]
    out.append(direct_product(direct_product(s3, s3), s3))
    for G, (a, b) in zip(out, pairs + [(s3, s3)]):
        G.name = G.name or f"{a.name} x {b.name}"
    out[-1].name = "Sym3 x Sym3 x Sym3"
    return out
