"""Canonical factorization of Coxeter groups into indecomposable direct factors.

Rules: an infinite irreducible component is one indecomposable factor; a
finite irreducible component is indecomposable except for the dihedral
groups of order 8k+4, type B_n with n odd and n >= 3, H3 and E7, each of
which is its center (of order 2) times the indecomposable quotient by it.
:func:`cross_validate` checks the rules against brute-force Remak
decomposition of the enumerated group.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .coxeter import (
    DEFAULT_CLOSURE_BUDGET,
    DEFAULT_TABLE_BOUND,
    FINITE,
    CoxeterClass,
    CoxeterSystem,
    build_group,
    classify,
    components,
    finite_order,
    graph_label,
)
from .errors import ConsistencyError, ValidationError
from .exact import DEFAULT_PRECISION_BITS
from .grouptheory.cayley import CayleyGroup, Subgroup, center, cyclic, quotient
from .grouptheory.iso import abelian_group_invariants
from .grouptheory.remak import FactorLabel, FactorMultiset, identify, remak_decompose

INFINITE_IRREDUCIBLE = "InfiniteIrreducible"
FINITE_INDECOMPOSABLE = "FiniteIndecomposable"
EXCEPTIONAL_SPLIT = "ExceptionalSplit"


def splits_off_center(type_name: str | None) -> bool:
    """Finite irreducible types whose group is center x indecomposable quotient."""
    if type_name is None:
        return False
    if type_name.startswith("I2("):
        m = int(type_name[3:-1])
        return m >= 6 and m % 4 == 2
    if type_name in ("H3", "E7"):
        return True
    if type_name[0] == "B" and type_name[1:].isdigit():
        n = int(type_name[1:])
        return n >= 3 and n % 2 == 1
    return False


@dataclass
class Factor:
    label: FactorLabel
    order: int | None  # None for infinite factors
    central: bool
    provenance: str  # rule | oracle | rule-only
    rule: str
    component: int  # index into CoxeterFactorization.components

    def to_json(self) -> dict:
        return {
            "label": str(self.label),
            "order": self.order if self.order is not None else "infinite",
            "central": self.central,
            "provenance": self.provenance,
            "rule": self.rule,
            "component": self.component,
        }


@dataclass
class CoxeterFactorization:
    system: CoxeterSystem
    components: list[tuple[tuple[int, ...], CoxeterSystem, CoxeterClass]]
    factors: list[Factor] = field(default_factory=list)

    @property
    def is_finite(self) -> bool:
        return all(f.order is not None for f in self.factors)

    def order(self) -> int | None:
        if not self.is_finite:
            return None
        out = 1
        for f in self.factors:
            out *= f.order
        return out

    def multiset(self) -> FactorMultiset:
        """Labels only; groups are attached by :func:`rule_factor_groups`."""
        return FactorMultiset([(f.label, None) for f in self.factors])

    def labels(self) -> list[str]:
        return sorted(str(f.label) for f in self.factors)

    def orders(self) -> list[int | None]:
        return sorted((f.order for f in self.factors), key=lambda o: (o is None, o or 0))

    def to_json(self) -> dict:
        return {
            "components": [
                {
                    "generators": list(idx),
                    "kind": cls.kind,
                    "signature": cls.signature.as_list(),
                    "type": cls.type_name,
                    "label": graph_label(sub),
                }
                for idx, sub, cls in self.components
            ],
            "factors": [f.to_json() for f in self.factors],
        }


def decompose(cs: CoxeterSystem, oracle_bound: int = DEFAULT_TABLE_BOUND,
              budget_bits: int = DEFAULT_PRECISION_BITS) -> CoxeterFactorization:
    """Apply the factorization rules component by component.

    Components whose group order exceeds ``oracle_bound`` cannot be checked by
    :func:`cross_validate`; their factors are marked ``rule-only``.
    """
    comps = []
    factors: list[Factor] = []
    for k, (idx, sub) in enumerate(components(cs)):
        cls = classify(sub, budget_bits)
        comps.append((idx, sub, cls))
        if cls.kind != FINITE:
            label = FactorLabel("coxeter", graph_label(sub), None)
            factors.append(Factor(label, None, False, "rule", INFINITE_IRREDUCIBLE, k))
            continue
        name = cls.type_name
        order = finite_order(name)
        prov = "rule" if order <= oracle_bound else "rule-only"
        if splits_off_center(name):
            factors.append(Factor(FactorLabel("cyclic", 2, 2), 2, True, prov, EXCEPTIONAL_SPLIT, k))
            factors.append(Factor(FactorLabel("coxeter", f"W({name})/Z", order // 2), order // 2,
                                  False, prov, EXCEPTIONAL_SPLIT, k))
        else:
            factors.append(Factor(FactorLabel("coxeter", f"W({name})", order), order, False, prov,
                                  FINITE_INDECOMPOSABLE, k))
    return CoxeterFactorization(cs, comps, factors)


# ---------------------------------------------------------------------------
# oracle side
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def _component_group(sub: CoxeterSystem, bound: int) -> CayleyGroup:
    return build_group(sub).cayley_group(bound)


@lru_cache(maxsize=256)
def _center_quotient(sub: CoxeterSystem, bound: int) -> CayleyGroup:
    W = _component_group(sub, bound)
    Q, _ = quotient(W, center(W))
    return Q


def rule_factor_groups(fac: CoxeterFactorization, bound: int = DEFAULT_TABLE_BOUND) -> FactorMultiset:
    """The rule-side factors as Cayley tables, built per component."""
    items = []
    for f in fac.factors:
        if f.order is None:
            raise ValidationError("infinite factors have no Cayley table")
        sub = fac.components[f.component][1]
        if f.rule == FINITE_INDECOMPOSABLE:
            G = _component_group(sub, bound)
        elif f.central:
            G = cyclic(2)
        else:
            G = _center_quotient(sub, bound)
        items.append((f.label, G))
    return FactorMultiset(items)


@dataclass
class CrossValidation:
    system: CoxeterSystem
    order: int
    rule_labels: list[str]
    oracle_labels: list[str]
    pairs: list[tuple[str, str, int]]

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "match": True,
            "pairs": [{"rule": a, "oracle": b, "order": o} for a, b, o in self.pairs],
        }


def cross_validate(cs: CoxeterSystem, budget: int = DEFAULT_CLOSURE_BUDGET,
                   bound: int = DEFAULT_TABLE_BOUND, rng=None) -> CrossValidation:
    """Compare the rule-side factors with Remak decomposition of the whole group."""
    fac = decompose(cs, oracle_bound=bound)
    if not fac.is_finite:
        raise ValidationError("cross-validation needs a finite Coxeter group")
    if fac.order() > bound:
        raise ValidationError(f"|W| = {fac.order()} exceeds the oracle bound {bound}")
    W = build_group(cs, budget=budget)
    if W.order != fac.order():
        raise ConsistencyError(f"closure found {W.order} elements, the rules predict {fac.order()}")
    G = W.cayley_group(bound)
    oracle = remak_decompose(G, rng=rng, bound=bound, label=False).multiset()
    rule = rule_factor_groups(fac, bound)
    match = rule.match(oracle)
    if match is None:
        raise ConsistencyError(
            f"factor mismatch for {graph_label(cs) if cs.n else 'empty system'}: rules give "
            f"{rule.orders()}, brute force gives {oracle.orders()}"
        )
    pairs = []
    for i, j in match:
        lbl, grp = rule.items[i]
        pairs.append((str(lbl), str(identify(oracle.items[j][1])), grp.order))
    return CrossValidation(cs, W.order, rule.labels(), [str(identify(g)) for _, g in oracle.items], pairs)


def factor_center_split(G: CayleyGroup) -> tuple[Subgroup, Subgroup] | None:
    """A normal complement to the subgroup generated by the central involution.

    The center must contain exactly one involution z (e.g. |Z(G)| = 2). A
    complement to <z> has index 2, so it contains every square; the search
    runs over index-2 subgroups containing the squares and missing z.
    Returns (<z>, complement) or None.
    """
    Zc = center(G)
    invol = [int(x) for x in Zc.members_array if G.element_orders[x] == 2]
    if len(invol) != 1:
        raise ValidationError(f"center has {len(invol)} involutions, expected exactly one")
    z = invol[0]
    Z = Subgroup(G, [z])
    squares = np.unique(G.table[np.arange(G.order), np.arange(G.order)])
    S = G.generated(squares)
    if z in S:
        return None
    Q, coset = quotient(G, S)
    # G/S is elementary abelian 2-group; index-2 subgroups of G above S
    # are kernels of nonzero characters of G/S
    if Q.order == 1:
        return None
    rank = len(abelian_group_invariants(Q))
    basis = _elementary_basis(Q, rank)
    zq = int(coset[z])
    coords = _coordinates(Q, basis)
    zvec = coords[zq]
    for mask in range(1, 2 ** rank):
        chi = np.array([(mask >> b) & 1 for b in range(rank)], dtype=np.int64)
        if int(chi @ zvec) % 2 == 0:
            continue
        keep = (coords @ chi) % 2 == 0
        members = np.flatnonzero(keep[coset])
        return Z, Subgroup(G, members)
    return None


def _elementary_basis(Q: CayleyGroup, rank: int) -> list[int]:
    basis: list[int] = []
    span = Q.generated([])
    for x in range(1, Q.order):
        if x not in span:
            basis.append(x)
            span = Q.generated(basis)
            if len(basis) == rank:
                break
    return basis


def _coordinates(Q: CayleyGroup, basis: list[int]) -> np.ndarray:
    coords = np.zeros((Q.order, len(basis)), dtype=np.int64)
    for bits in range(2 ** len(basis)):
        x = 0
        vec = []
        for b, g in enumerate(basis):
            bit = (bits >> b) & 1
            vec.append(bit)
            if bit:
                x = Q.mul(x, g)
        coords[x] = vec
    return coords


__all__ = [
    "CoxeterFactorization",
    "CrossValidation",
    "EXCEPTIONAL_SPLIT",
    "FINITE_INDECOMPOSABLE",
    "Factor",
    "INFINITE_IRREDUCIBLE",
    "cross_validate",
    "decompose",
    "factor_center_split",
    "rule_factor_groups",
    "splits_off_center",
]
