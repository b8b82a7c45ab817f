"""Finite groups given by multiplication tables."""

from __future__ import annotations

import itertools
import math
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from ..errors import BudgetExceeded, ValidationError
from . import kernels

DEFAULT_ORDER_BOUND = 2000
DEFAULT_SUBGROUP_BOUND = 400
DEFAULT_LATTICE_LIMIT = 200_000


class CayleyGroup:
    """A finite group as an ``n x n`` table of element indices.

    Index 0 is the identity. The group axioms are verified on construction
    unless ``check=False`` (used internally for tables derived from an
    already-validated group).
    """

    def __init__(self, table, *, name: str | None = None, check: bool = True):
        table = np.ascontiguousarray(np.asarray(table, dtype=np.int64))
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
            raise ValidationError("Cayley table must be a non-empty square array")
        self.table = table
        self.name = name
        if check:
            problem = axiom_violation(table)
            if problem:
                raise ValidationError(problem)

    def __len__(self):
        return self.table.shape[0]

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<CayleyGroup{label} of order {self.order}>"

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.argmin(self.table, axis=1).astype(np.int64)

    @cached_property
    def element_orders(self) -> np.ndarray:
        return kernels.element_orders(self.table)

    @cached_property
    def class_labels(self) -> np.ndarray:
        return kernels.conjugacy_labels(self.table, self.inverse)

    @cached_property
    def conjugacy_classes(self) -> list[np.ndarray]:
        labels = self.class_labels
        return [np.flatnonzero(labels == c) for c in range(int(labels.max()) + 1)]

    @cached_property
    def class_sizes(self) -> np.ndarray:
        return np.bincount(self.class_labels)[self.class_labels]

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def conjugate(self, g: int, x) -> np.ndarray:
        """``g x g^-1`` for an element or an array of elements x."""
        return self.table[self.table[g, x], self.inverse[g]]

    # -- subgroup constructors ----------------------------------------------

    def subgroup(self, members: Iterable[int]) -> "Subgroup":
        return Subgroup(self, members)

    def whole(self) -> "Subgroup":
        return Subgroup._from_mask(self, np.ones(self.order, dtype=np.bool_))

    def trivial(self) -> "Subgroup":
        return Subgroup(self, [0])

    def generated(self, gens: Iterable[int]) -> "Subgroup":
        gens = np.asarray(list(gens), dtype=np.int64)
        return Subgroup._from_mask(self, kernels.closure(self.table, gens))

    def normal_closure(self, elements: Iterable[int]) -> "Subgroup":
        labels = self.class_labels
        wanted = np.unique(labels[np.asarray(list(elements), dtype=np.int64)])
        gens = np.flatnonzero(np.isin(labels, wanted))
        return self.generated(gens)

    def small_generating_set(self, within: "Subgroup | None" = None) -> list[int]:
        """Greedy generating set: repeatedly add the candidate that enlarges the span most.

        Candidates are conjugacy-class representatives (at most 48) plus the
        first few elements outside the current span; deterministic.
        """
        target = within.mask if within is not None else np.ones(self.order, dtype=np.bool_)
        target_size = int(target.sum())
        gens: list[int] = []
        cur = np.zeros(self.order, dtype=np.bool_)
        cur[0] = True
        reps = [int(c[0]) for c in self.conjugacy_classes]
        while int(cur.sum()) < target_size:
            best, best_mask, best_size = -1, None, -1
            pool = [x for x in reps if target[x] and not cur[x]][:48]
            pool += [int(x) for x in np.flatnonzero(target & ~cur)[:16]]
            for x in dict.fromkeys(pool):
                m = kernels.closure(self.table, np.asarray(gens + [x], dtype=np.int64))
                s = int(m.sum())
                if s > best_size:
                    best, best_mask, best_size = x, m, s
            gens.append(best)
            cur = best_mask
        return gens

    def subtable(self, sub: "Subgroup") -> "CayleyGroup":
        """The subgroup as a standalone group; element i is ``sub.members[i]``."""
        members = sub.members_array
        pos = np.full(self.order, -1, dtype=np.int64)
        pos[members] = np.arange(len(members))
        return CayleyGroup(pos[self.table[np.ix_(members, members)]], check=False)


class Subgroup:
    """A subgroup of a :class:`CayleyGroup`, stored as a sorted index set."""

    __slots__ = ("parent", "mask", "__dict__")

    def __init__(self, parent: CayleyGroup, members: Iterable[int]):
        mask = np.zeros(parent.order, dtype=np.bool_)
        idx = np.asarray(list(members), dtype=np.int64)
        mask[idx] = True
        mask[0] = True
        self.parent = parent
        self.mask = mask

    @classmethod
    def _from_mask(cls, parent: CayleyGroup, mask: np.ndarray) -> "Subgroup":
        obj = cls.__new__(cls)
        obj.parent = parent
        obj.mask = mask
        return obj

    @cached_property
    def members_array(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self.members_array)

    @property
    def order(self) -> int:
        return int(self.members_array.size)

    def __len__(self):
        return self.order

    def __contains__(self, x) -> bool:
        return bool(self.mask[x])

    @cached_property
    def key(self) -> bytes:
        return np.packbits(self.mask).tobytes()

    def __eq__(self, other):
        return isinstance(other, Subgroup) and other.parent is self.parent and other.key == self.key

    def __hash__(self):
        return hash(self.key)

    def __le__(self, other: "Subgroup") -> bool:
        return not np.any(self.mask & ~other.mask)

    def __and__(self, other: "Subgroup") -> "Subgroup":
        return Subgroup._from_mask(self.parent, self.mask & other.mask)

    def __repr__(self):
        return f"<Subgroup of order {self.order} in {self.parent!r}>"

    def is_closed(self) -> bool:
        m = self.members_array
        return bool(self.mask[self.parent.table[np.ix_(m, m)]].all())

    def is_normal(self) -> bool:
        labels = self.parent.class_labels
        inside = np.unique(labels[self.members_array])
        return bool(np.isin(labels, inside).sum() == self.order)

    def table(self) -> CayleyGroup:
        return self.parent.subtable(self)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def axiom_violation(table: np.ndarray) -> str | None:
    """Name the first violated group axiom, or return None for a valid group table."""
    n = table.shape[0]
    if table.min() < 0 or table.max() >= n:
        return "closure fails: entry out of range"
    ident = np.arange(n)
    if not (np.array_equal(table[0], ident) and np.array_equal(table[:, 0], ident)):
        return "identity fails: index 0 is not a two-sided identity"
    if not kernels.is_latin(table):
        for i in range(n):
            if len(np.unique(table[i])) != n:
                return f"inverses fail: row {i} is not a permutation"
        for j in range(n):
            if len(np.unique(table[:, j])) != n:
                return f"inverses fail: column {j} is not a permutation"
    # Light's test: associativity on a magma generating set suffices
    gens = _magma_generators(table)
    x, a, y = kernels.associativity_witness(table, gens)
    if x >= 0:
        return f"associativity fails at ({x},{a},{y})"
    return None


def _magma_generators(table: np.ndarray) -> np.ndarray:
    n = table.shape[0]
    gens: list[int] = []
    reached = np.zeros(n, dtype=np.bool_)
    reached[0] = True
    while not reached.all():
        g = int(np.flatnonzero(~reached)[0])
        gens.append(g)
        reached = kernels.closure(table, np.asarray(gens, dtype=np.int64))
    return np.asarray(gens, dtype=np.int64)


# ---------------------------------------------------------------------------
# standard operations
# ---------------------------------------------------------------------------


def center(G: CayleyGroup) -> Subgroup:
    return Subgroup._from_mask(G, kernels.centralizer_mask(G.table, np.arange(G.order)))


def centralizer(G: CayleyGroup, S: Subgroup | Iterable[int]) -> Subgroup:
    members = S.members_array if isinstance(S, Subgroup) else np.asarray(list(S), dtype=np.int64)
    return Subgroup._from_mask(G, kernels.centralizer_mask(G.table, members))


def commutator_subgroup(G: CayleyGroup, A: Subgroup | None = None, B: Subgroup | None = None) -> Subgroup:
    """``[A, B]``, the subgroup generated by commutators (defaults to ``[G, G]``)."""
    a = A.members_array if A is not None else np.arange(G.order)
    b = B.members_array if B is not None else np.arange(G.order)
    t, inv = G.table, G.inverse
    # [x, y] = x y x^-1 y^-1
    comm = t[t[t[np.ix_(a, b)], inv[a][:, None]], inv[b][None, :]]
    return G.generated(np.unique(comm))


def quotient(G: CayleyGroup, N: Subgroup) -> tuple[CayleyGroup, np.ndarray]:
    """``G/N`` with cosets ordered by their smallest element; returns (table, coset index per element)."""
    if not N.is_normal():
        raise ValidationError("quotient requires a normal subgroup")
    n = G.order
    coset = np.full(n, -1, dtype=np.int64)
    reps = []
    nm = N.members_array
    for x in range(n):
        if coset[x] < 0:
            coset[G.table[x, nm]] = len(reps)
            reps.append(x)
    reps_arr = np.asarray(reps, dtype=np.int64)
    table = coset[G.table[np.ix_(reps_arr, reps_arr)]]
    return CayleyGroup(table, check=False), coset


def direct_product(G: CayleyGroup, H: CayleyGroup) -> CayleyGroup:
    """``G x H`` with ``(g, h)`` stored at index ``g * |H| + h``."""
    m = H.order
    gt = G.table[:, None, :, None]
    ht = H.table[None, :, None, :]
    table = (gt * m + ht).reshape(G.order * m, G.order * m)
    name = f"{G.name} x {H.name}" if G.name and H.name else None
    return CayleyGroup(table, name=name, check=False)


def direct_power(G: CayleyGroup, k: int) -> CayleyGroup:
    out = cyclic(1)
    for _ in range(k):
        out = direct_product(out, G)
    return out


def hypercenter(G: CayleyGroup) -> Subgroup:
    """Limit of the ascending central series (terminates for finite G)."""
    current = G.trivial()
    while True:
        Q, coset = quotient(G, current)
        zq = center(Q)
        nxt = Subgroup._from_mask(G, zq.mask[coset])
        if nxt.order == current.order:
            return current
        current = nxt


def upper_central_series(G: CayleyGroup) -> list[Subgroup]:
    series = [G.trivial()]
    while True:
        Q, coset = quotient(G, series[-1])
        nxt = Subgroup._from_mask(G, center(Q).mask[coset])
        if nxt.order == series[-1].order:
            return series
        series.append(nxt)


def normal_subgroups(G: CayleyGroup, bound: int = DEFAULT_ORDER_BOUND,
                     limit: int = DEFAULT_LATTICE_LIMIT) -> list[Subgroup]:
    """All normal subgroups, as joins of normal closures of conjugacy classes.

    Sorted by (order, member indices). ``bound`` caps |G|; ``limit`` caps the
    number of normal subgroups explored.
    """
    if G.order > bound:
        raise ValidationError(f"group order {G.order} exceeds bound {bound}")
    cache = G.__dict__.get("_normal_lattice")
    if cache is not None:
        return list(cache)
    closures = _class_closures(G)
    found: dict[bytes, Subgroup] = {}
    triv = G.trivial()
    found[triv.key] = triv
    queue = []
    for N in closures:
        if N.key not in found:
            found[N.key] = N
            queue.append(N)
    head = 0
    while head < len(queue):
        N = queue[head]
        head += 1
        for C in closures:
            if C <= N:
                continue
            J = Subgroup._from_mask(G, kernels.product_mask(G.table, N.members_array, C.members_array))
            if J.key not in found:
                found[J.key] = J
                queue.append(J)
                if len(found) > limit:
                    raise BudgetExceeded(
                        f"more than {limit} normal subgroups", {"normal_subgroups": len(found)}
                    )
    result = sorted(found.values(), key=lambda S: (S.order, S.members))
    G.__dict__["_normal_lattice"] = tuple(result)
    return result


def _class_closures(G: CayleyGroup) -> list[Subgroup]:
    cache = G.__dict__.get("_class_closures")
    if cache is None:
        cache = []
        seen = set()
        for cls in G.conjugacy_classes[1:]:
            N = G.generated(cls)
            if N.key not in seen:
                seen.add(N.key)
                cache.append(N)
        G.__dict__["_class_closures"] = cache
    return list(cache)


def all_subgroups(G: CayleyGroup, bound: int = DEFAULT_SUBGROUP_BOUND,
                  limit: int = DEFAULT_LATTICE_LIMIT) -> list[Subgroup]:
    """Every subgroup, as joins of cyclic subgroups; capped at order ``bound``."""
    if G.order > bound:
        raise ValidationError(f"group order {G.order} exceeds subgroup-enumeration bound {bound}")
    cyclics: dict[bytes, tuple[Subgroup, int]] = {}
    for x in range(1, G.order):
        C = G.generated([x])
        cyclics.setdefault(C.key, (C, x))
    found: dict[bytes, tuple[Subgroup, list[int]]] = {}
    triv = G.trivial()
    found[triv.key] = (triv, [])
    queue = []
    for C, x in cyclics.values():
        found[C.key] = (C, [x])
        queue.append(C.key)
    head = 0
    while head < len(queue):
        S, gens = found[queue[head]]
        head += 1
        for C, x in cyclics.values():
            if C <= S:
                continue
            J = G.generated(gens + [x])
            if J.key not in found:
                found[J.key] = (J, gens + [x])
                queue.append(J.key)
                if len(found) > limit:
                    raise BudgetExceeded(f"more than {limit} subgroups", {"subgroups": len(found)})
    return sorted((S for S, _ in found.values()), key=lambda S: (S.order, S.members))


def is_internal_direct_product(G: CayleyGroup, parts: Sequence[Subgroup]) -> bool:
    """True iff the subgroups are normal, pairwise commuting, independent and span G."""
    if any(not P.is_normal() for P in parts):
        return False
    if math.prod(P.order for P in parts) != G.order:
        return False
    for A, B in itertools.combinations(parts, 2):
        if not np.all(kernels.centralizer_mask(G.table, B.members_array)[A.members_array]):
            return False
    span = G.trivial()
    for P in parts:
        if (span & P).order != 1:
            return False
        span = Subgroup._from_mask(G, kernels.product_mask(G.table, span.members_array, P.members_array))
    return span.order == G.order


# ---------------------------------------------------------------------------
# named groups
# ---------------------------------------------------------------------------


def cyclic(n: int) -> CayleyGroup:
    r = np.arange(n)
    return CayleyGroup((r[:, None] + r[None, :]) % n, name=f"C{n}", check=False)


def abelian(invariants: Sequence[int]) -> CayleyGroup:
    G = cyclic(1)
    for k in invariants:
        G = direct_product(G, cyclic(k))
    G.name = "x".join(f"C{k}" for k in invariants) or "C1"
    return G


def from_permutations(gens: Sequence[Sequence[int]], name: str | None = None,
                      bound: int = 100_000) -> CayleyGroup:
    """Group generated by permutations (tuples of images); composition ``(ab)(x) = a(b(x))``."""
    gens_arr = np.asarray([tuple(g) for g in gens], dtype=np.int64)
    degree = gens_arr.shape[1] if len(gens_arr) else 0
    ident = np.arange(degree, dtype=np.int64)
    elements = [ident]
    index = {ident.tobytes(): 0}
    parent, via = [0], [-1]
    act: list[list[int]] = [[] for _ in range(len(gens_arr))]
    head = 0
    while head < len(elements):
        a = elements[head]
        for k, g in enumerate(gens_arr):
            c = g[a]  # g o a
            key = c.tobytes()
            j = index.get(key)
            if j is None:
                j = len(elements)
                index[key] = j
                elements.append(c)
                parent.append(head)
                via.append(k)
                if j + 1 > bound:
                    raise BudgetExceeded(f"permutation group larger than {bound}")
            act[k].append(j)
        head += 1
    n = len(elements)
    action = np.asarray(act, dtype=np.int64).reshape(len(gens_arr), n)
    table = np.empty((n, n), dtype=np.int64)
    table[0] = np.arange(n)
    for i in range(1, n):
        # a_i = g o a_parent, so a_i a_j = g o (a_parent a_j)
        table[i] = action[via[i]][table[parent[i]]]
    return CayleyGroup(table, name=name, check=False)


def symmetric(k: int) -> CayleyGroup:
    if k <= 1:
        return CayleyGroup([[0]], name=f"Sym{k}", check=False)
    gens = [tuple([1, 0] + list(range(2, k))), tuple(list(range(1, k)) + [0])]
    return from_permutations(gens, name=f"Sym{k}")


def alternating(k: int) -> CayleyGroup:
    if k <= 2:
        return CayleyGroup([[0]], name=f"Alt{k}", check=False)
    gens = [tuple([1, 2, 0] + list(range(3, k)))]
    for i in range(3, k):
        perm = list(range(k))
        perm[0], perm[1], perm[i] = 1, i, 0  # 3-cycle (0 1 i)
        gens.append(tuple(perm))
    return from_permutations(gens, name=f"Alt{k}")


def dihedral(order: int) -> CayleyGroup:
    """Dihedral group of the given (even) order, as symmetries of a polygon."""
    if order % 2 or order < 2:
        raise ValidationError("dihedral order must be even and positive")
    k = order // 2
    if k == 1:
        return cyclic(2)
    if k == 2:
        G = abelian([2, 2])
        G.name = "D4"
        return G
    rot = tuple((i + 1) % k for i in range(k))
    ref = tuple((-i) % k for i in range(k))
    return from_permutations([rot, ref], name=f"D{order}")


def dicyclic(order: int) -> CayleyGroup:
    """Dicyclic group of order 4m (generalized quaternion when order is a power of 2)."""
    if order % 4 or order < 4:
        raise ValidationError("dicyclic order must be a multiple of 4")
    m = order // 4
    # elements a^i x^j, i mod 2m, j in {0,1}; x^2 = a^m, x a x^-1 = a^-1
    n2 = 2 * m

    def mul(u, v):
        i, j = u
        k, l = v
        if j == 0:
            return ((i + k) % n2, l)
        if l == 0:
            return ((i - k) % n2, 1)
        return ((i - k + m) % n2, 0)

    elems = [(i, j) for j in (0, 1) for i in range(n2)]
    idx = {e: t for t, e in enumerate(elems)}
    table = [[idx[mul(u, v)] for v in elems] for u in elems]
    name = f"Q{order}" if order & (order - 1) == 0 else f"Dic{order}"
    return CayleyGroup(table, name=name)


def quaternion() -> CayleyGroup:
    return dicyclic(8)
