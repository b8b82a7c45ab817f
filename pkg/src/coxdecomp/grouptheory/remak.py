"""Direct-product (Remak) decompositions of finite groups.

A split ``H = N x M`` is searched among normal subgroups N of order at most
``sqrt(|H|)`` (one side of every split is that small), enumerated lazily as
joins of normal closures of conjugacy classes. For a candidate N a normal
complement must lie in the centralizer C of N; when N is centerless it is C
itself, otherwise it is the kernel of a retraction ``C -> Z(N)`` found by
backtracking over generator images.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

from ..errors import ValidationError
from . import kernels
from .cayley import (
    DEFAULT_ORDER_BOUND,
    CayleyGroup,
    Subgroup,
    _class_closures,
    alternating,
    centralizer,
    commutator_subgroup,
    dicyclic,
    dihedral,
    hypercenter,
    is_internal_direct_product,
    normal_subgroups,
    quotient,
    symmetric,
)
from .iso import abelian_group_invariants, fingerprint, isomorphism


# ---------------------------------------------------------------------------
# split search
# ---------------------------------------------------------------------------


def _candidates(H: CayleyGroup, max_order: int, rng) -> Iterator[Subgroup]:
    """Normal subgroups N with 1 < |N| <= max_order, smallest joins first."""
    closures = _class_closures(H)
    if rng is not None:
        closures = [closures[i] for i in rng.permutation(len(closures))]
    closures = [C for C in closures if C.order <= max_order]
    seen: set[bytes] = set()
    queue: list[Subgroup] = []
    for C in closures:
        if C.key not in seen:
            seen.add(C.key)
            queue.append(C)
            yield C
    head = 0
    while head < len(queue):
        N = queue[head]
        head += 1
        for C in closures:
            if C <= N:
                continue
            J = Subgroup._from_mask(H, kernels.product_mask(H.table, N.members_array, C.members_array))
            if J.order > max_order or J.key in seen:
                continue
            seen.add(J.key)
            queue.append(J)
            yield J


def normal_complement(H: CayleyGroup, N: Subgroup) -> Subgroup | None:
    """A normal subgroup M with ``H = N x M``, or None if N is not a direct factor."""
    C = centralizer(H, N)
    Z = N & C
    if N.order * C.order != H.order * Z.order:
        return None
    if Z.order == 1:
        return C
    # Z = Z(N) is central in H = NC; any complement is the kernel of an
    # H-invariant retraction C -> Z, which must kill [H, C]
    if (commutator_subgroup(H, H.whole(), C) & Z).order > 1:
        return None
    return _retraction_kernel(H, C, Z)


def _retraction_kernel(H: CayleyGroup, C: Subgroup, Z: Subgroup) -> Subgroup | None:
    Ct = C.table()
    cm = C.members_array
    pos = np.full(H.order, -1, dtype=np.int64)
    pos[cm] = np.arange(cm.size)
    zc = pos[Z.members_array]
    z_sub = Subgroup(Ct, zc)
    z_gens = Ct.small_generating_set(within=z_sub)
    span = kernels.closure(Ct.table, np.asarray(z_gens, dtype=np.int64))
    extra: list[int] = []
    while not span.all():
        # greedy: the candidate enlarging the span the most
        best, best_mask = -1, None
        for x in np.flatnonzero(~span)[:64]:
            m = kernels.closure(Ct.table, np.asarray(z_gens + extra + [int(x)], dtype=np.int64))
            if best_mask is None or m.sum() > best_mask.sum():
                best, best_mask = int(x), m
        extra.append(best)
        span = best_mask
    gens = np.asarray(z_gens + extra, dtype=np.int64)
    images = np.asarray(z_gens + [0] * len(extra), dtype=np.int64)
    nz = len(z_gens)
    h_gens = H.small_generating_set()
    inv = H.inverse

    def rec(i: int):
        if i == len(gens):
            phi = kernels.extend_hom(Ct.table, gens, Ct.table, images)
            if phi[0] == -2:
                return None
            kernel = cm[phi == 0]
            kmask = np.zeros(H.order, dtype=np.bool_)
            kmask[kernel] = True
            for h in h_gens:
                if not kmask[H.table[H.table[h, kernel], inv[h]]].all():
                    return None
            return Subgroup._from_mask(H, kmask)
        for z in zc:
            images[i] = z
            part = kernels.extend_hom(Ct.table, gens[: i + 1], Ct.table, images[: i + 1])
            if part[0] == -2:
                continue
            found = rec(i + 1)
            if found is not None:
                return found
        return None

    return rec(nz)


def find_split(H: CayleyGroup, rng=None) -> tuple[Subgroup, Subgroup] | None:
    """Some nontrivial ``H = N x M`` (N the smaller side), or None if H is indecomposable."""
    if H.order < 4:
        return None
    limit = math.isqrt(H.order)
    for N in _candidates(H, limit, rng):
        M = normal_complement(H, N)
        if M is not None:
            return N, M
    return None


def is_indecomposable(G: CayleyGroup) -> bool:
    return G.order > 1 and find_split(G) is None


# ---------------------------------------------------------------------------
# labels and multisets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FactorLabel:
    """Isomorphism-class descriptor of a factor.

    ``family`` is one of cyclic, dihedral, symmetric, alternating, dicyclic,
    abelian, coxeter or fingerprint; named families are only assigned after
    an explicit isomorphism has been found.
    """

    family: str
    param: object
    order: int | None

    def __str__(self):
        f, p = self.family, self.param
        if f == "cyclic":
            return f"C{p}"
        if f == "dihedral":
            return f"D{p}"
        if f == "symmetric":
            return f"Sym{p}"
        if f == "alternating":
            return f"Alt{p}"
        if f == "dicyclic":
            return f"Q{p}" if p & (p - 1) == 0 else f"Dic{p}"
        if f == "abelian":
            return "x".join(f"C{k}" for k in p)
        if f == "coxeter":
            return str(p)
        return f"G{self.order}[{p}]"


@lru_cache(maxsize=64)
def _named(family: str, param: int) -> CayleyGroup:
    return {"dihedral": dihedral, "symmetric": symmetric, "alternating": alternating,
            "dicyclic": dicyclic}[family](param)


def _short_fingerprint(G: CayleyGroup) -> str:
    fp = fingerprint(G)
    orders = ",".join(f"{o}^{c}" for o, c in fp[1])
    ab = ".".join(str(k) for k in fp[3]) or "1"
    return f"orders:{orders};classes:{len(G.conjugacy_classes)};ab:{ab}"


def identify(G: CayleyGroup) -> FactorLabel:
    """Name G when it matches a known family (verified by isomorphism), else fingerprint it."""
    n = G.order
    if n == 1:
        return FactorLabel("cyclic", 1, 1)
    if int(G.element_orders.max()) == n:
        return FactorLabel("cyclic", n, n)
    if G.is_abelian():
        return FactorLabel("abelian", abelian_group_invariants(G), n)
    tries: list[tuple[str, int]] = []
    top = int(G.element_orders.max())
    k, f = 1, 1
    while f < n:
        k += 1
        f *= k
    # Sym3 is also dihedral of order 6; the symmetric name wins
    if f == n and k >= 3:
        tries.append(("symmetric", k))
    if n % 2 == 0 and n >= 6 and 2 * top == n:
        tries.append(("dihedral", n))
    if f == 2 * n and k >= 4:
        tries.append(("alternating", k))
    if n % 4 == 0 and n >= 8 and 2 * top == n:
        tries.append(("dicyclic", n))
    for family, param in tries:
        ref = _named(family, param)
        if fingerprint(ref) == fingerprint(G) and isomorphism(G, ref) is not None:
            return FactorLabel(family, param, n)
    return FactorLabel("fingerprint", _short_fingerprint(G), n)


@dataclass
class FactorMultiset:
    """Factors as (label, group table) pairs; equality is isomorphism-matching."""

    items: list[tuple[FactorLabel, CayleyGroup | None]] = field(default_factory=list)

    def labels(self) -> list[str]:
        return sorted(str(lbl) for lbl, _ in self.items)

    def orders(self) -> list[int]:
        return sorted(lbl.order for lbl, _ in self.items if lbl.order is not None)

    def __len__(self):
        return len(self.items)

    def match(self, other: "FactorMultiset") -> list[tuple[int, int]] | None:
        """Pairs (i, j) matching isomorphic factors, or None if the multisets differ."""
        if len(self.items) != len(other.items):
            return None
        unused = list(range(len(other.items)))
        pairs = []
        for i, (la, ga) in enumerate(self.items):
            hit = None
            for j in unused:
                lb, gb = other.items[j]
                if ga is None or gb is None:
                    if ga is None and gb is None and la == lb:
                        hit = j
                        break
                    continue
                if ga.order == gb.order and isomorphism(ga, gb) is not None:
                    hit = j
                    break
            if hit is None:
                return None
            unused.remove(hit)
            pairs.append((i, hit))
        return pairs

    def __eq__(self, other):
        return isinstance(other, FactorMultiset) and self.match(other) is not None


# ---------------------------------------------------------------------------
# decompositions
# ---------------------------------------------------------------------------


@dataclass
class RemakNode:
    members: tuple[int, ...]
    children: list["RemakNode"] = field(default_factory=list)

    def leaves(self) -> list["RemakNode"]:
        if not self.children:
            return [self]
        return [leaf for c in self.children for leaf in c.leaves()]

    def as_dict(self) -> dict:
        return {"order": len(self.members), "children": [c.as_dict() for c in self.children]}


@dataclass
class RemakDecomposition:
    group: CayleyGroup
    tree: RemakNode | None
    factors: list[Subgroup]
    factor_groups: list[CayleyGroup]
    labels: list[FactorLabel]

    def multiset(self) -> FactorMultiset:
        return FactorMultiset(list(zip(self.labels, self.factor_groups)))


def remak_decompose(G: CayleyGroup, rng=None, bound: int = DEFAULT_ORDER_BOUND,
                    label: bool = True) -> RemakDecomposition:
    """Decompose G into indecomposable internal direct factors.

    ``rng`` (a numpy Generator) shuffles the search order; by uniqueness of
    the decomposition the resulting factor multiset never depends on it.
    """
    if G.order > bound:
        raise ValidationError(f"group order {G.order} exceeds bound {bound}")
    if G.order == 1:
        return RemakDecomposition(G, None, [], [], [])
    tree = _decompose(G, np.arange(G.order), rng)
    leaves = tree.leaves()
    factors = [Subgroup(G, leaf.members) for leaf in leaves]
    tables = [G.subtable(F) for F in factors]
    labels = [identify(T) if label else FactorLabel("fingerprint", "", T.order) for T in tables]
    return RemakDecomposition(G, tree, factors, tables, labels)


def _decompose(H: CayleyGroup, members: np.ndarray, rng) -> RemakNode:
    split = find_split(H, rng)
    node = RemakNode(tuple(int(x) for x in members))
    if split is None:
        return node
    for part in split:
        node.children.append(_decompose(H.subtable(part), members[part.members_array], rng))
    return node


def direct_factor_pairs(G: CayleyGroup) -> list[tuple[Subgroup, Subgroup]]:
    """Every unordered pair {N, M} of nontrivial normal subgroups with G = N x M."""
    lattice = normal_subgroups(G)
    by_order: dict[int, list[Subgroup]] = {}
    for S in lattice:
        by_order.setdefault(S.order, []).append(S)
    pairs = []
    for N in lattice:
        if N.order == 1 or N.order == G.order or N.order * N.order > G.order:
            continue
        cmask = kernels.centralizer_mask(G.table, N.members_array)
        for M in by_order.get(G.order // N.order, []):
            if N.order == M.order and M.key <= N.key:
                continue
            if (N & M).order == 1 and cmask[M.members_array].all():
                pairs.append((N, M))
    return pairs


def all_decompositions(G: CayleyGroup) -> list[frozenset[tuple[int, ...]]]:
    """All decompositions into indecomposable internal factors, exhaustively.

    Each decomposition is the frozenset of its factors' member tuples.
    """
    memo: dict[tuple[int, ...], set[frozenset]] = {}

    def rec(sub_members: tuple[int, ...]) -> set[frozenset]:
        if sub_members in memo:
            return memo[sub_members]
        S = Subgroup(G, sub_members)
        T = G.subtable(S)
        arr = np.asarray(sub_members, dtype=np.int64)
        out: set[frozenset] = set()
        for N, M in direct_factor_pairs(T):
            left = rec(tuple(int(x) for x in arr[N.members_array]))
            right = rec(tuple(int(x) for x in arr[M.members_array]))
            for a in left:
                for b in right:
                    out.add(a | b)
        if not out:
            out = {frozenset([sub_members])}
        memo[sub_members] = out
        return out

    if G.order == 1:
        return [frozenset()]
    return sorted(rec(tuple(range(G.order))), key=lambda d: sorted(d))


def image_law_holds(G: CayleyGroup, A: Subgroup, B: Subgroup) -> bool:
    """For ``G = A x B``: is ``G/hypercenter`` the internal direct product of the images?"""
    Zs = hypercenter(G)
    Hq, coset = quotient(G, Zs)
    pa = Subgroup(Hq, np.unique(coset[A.members_array]))
    pb = Subgroup(Hq, np.unique(coset[B.members_array]))
    return is_internal_direct_product(Hq, [pa, pb])


__all__ = [
    "FactorLabel",
    "FactorMultiset",
    "RemakDecomposition",
    "RemakNode",
    "all_decompositions",
    "direct_factor_pairs",
    "find_split",
    "identify",
    "image_law_holds",
    "is_indecomposable",
    "normal_complement",
    "remak_decompose",
]
