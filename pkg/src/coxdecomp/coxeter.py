"""Coxeter systems: Tits forms, classification and finite reflection groups."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, ConsistencyError, ValidationError
from .exact import (
    DEFAULT_PRECISION_BITS,
    INF,
    CycloNumber,
    Signature,
    SymMatrix,
    _power_residues,
    cyclo_cos_pi_over,
    euler_phi,
    signature,
)
from .grouptheory.cayley import CayleyGroup

DEFAULT_CLOSURE_BUDGET = 2_000_000
DEFAULT_TABLE_BOUND = 2000
_CHUNK = 4096

FINITE, AFFINE, INDEFINITE = "Finite", "Affine", "IndefiniteInfinite"


def _label(v) -> float | int:
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "infinity", "oo", "∞"):
            return INF
        v = int(v)
    if v == INF:
        return INF
    if isinstance(v, float) and not v.is_integer():
        raise ValidationError(f"label {v!r} is not an integer")
    return int(v)


def _label_str(m) -> str:
    return "inf" if m == INF else str(m)


class CoxeterSystem:
    """A Coxeter matrix: ``m[i][i] = 1`` and ``m[i][j] = m[j][i] >= 2`` (or infinity)."""

    __slots__ = ("m", "__dict__")

    def __init__(self, m: Sequence[Sequence]):
        rows = [[_label(v) for v in row] for row in m]
        n = len(rows)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValidationError(f"row {i} has {len(row)} entries, expected {n}")
        for i in range(n):
            if rows[i][i] != 1:
                raise ValidationError(f"diagonal entry ({i},{i}) must be 1")
            for j in range(n):
                if i != j:
                    if rows[i][j] != rows[j][i]:
                        raise ValidationError(f"labels at ({i},{j}) and ({j},{i}) differ")
                    if rows[i][j] != INF and rows[i][j] < 2:
                        raise ValidationError(f"off-diagonal label at ({i},{j}) must be >= 2")
        self.m = tuple(tuple(r) for r in rows)

    @property
    def n(self) -> int:
        return len(self.m)

    def __repr__(self):
        name = self.__dict__.get("name")
        if name:
            return f"CoxeterSystem({name})"
        return f"CoxeterSystem({[[_label_str(v) for v in r] for r in self.m]})"

    def __eq__(self, other):
        return isinstance(other, CoxeterSystem) and self.m == other.m

    def __hash__(self):
        return hash(self.m)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, object]], name: str | None = None):
        """Build from ``(i, j, label)`` triples; unlisted pairs commute (label 2)."""
        m = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
        for i, j, lab in edges:
            m[i][j] = m[j][i] = _label(lab)
        cs = cls(m)
        if name:
            cs.__dict__["name"] = name
        return cs

    def edges(self) -> list[tuple[int, int, float | int]]:
        """Coxeter-graph edges (pairs with label >= 3)."""
        return [(i, j, self.m[i][j]) for i in range(self.n) for j in range(i + 1, self.n)
                if self.m[i][j] == INF or self.m[i][j] >= 3]

    @cached_property
    def conductor(self) -> int:
        L = 2
        for i, j, lab in self.edges():
            if lab != INF:
                L = math.lcm(L, 2 * lab)
        return L

    def subsystem(self, indices: Sequence[int]) -> "CoxeterSystem":
        return CoxeterSystem([[self.m[i][j] for j in indices] for i in indices])

    def relabel(self, perm: Sequence[int]) -> "CoxeterSystem":
        """System whose generator k is generator ``perm[k]`` of this one."""
        return self.subsystem(perm)

    def is_connected(self) -> bool:
        return len(components(self)) <= 1

    def to_json(self) -> dict:
        return {"rank": self.n, "labels": [[_label_str(v) if v == INF else v for v in r] for r in self.m]}

    @classmethod
    def from_json(cls, obj: dict) -> "CoxeterSystem":
        cs = cls(obj["labels"])
        if int(obj.get("rank", cs.n)) != cs.n:
            raise ValidationError("rank does not match label matrix")
        return cs


def disjoint_union(*systems: CoxeterSystem) -> CoxeterSystem:
    n = sum(cs.n for cs in systems)
    m = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
    off = 0
    for cs in systems:
        for i in range(cs.n):
            for j in range(cs.n):
                m[off + i][off + j] = cs.m[i][j]
        off += cs.n
    return CoxeterSystem(m)


# ---------------------------------------------------------------------------
# standard diagrams
# ---------------------------------------------------------------------------


def _path(n: int, labels: Sequence | None = None) -> list[tuple[int, int, object]]:
    labels = labels if labels is not None else [3] * (n - 1)
    return [(i, i + 1, labels[i]) for i in range(n - 1)]


def finite_type(family: str, n: int | None = None) -> CoxeterSystem:
    """Irreducible finite Coxeter system: ``finite_type("B", 3)``, ``finite_type("I2", 7)``.

    For ``I2`` the second argument is the label m.
    """
    f = family.upper()
    if f == "I2":
        m = n
        if m is None or m < 2:
            raise ValidationError("I2(m) needs m >= 2")
        return CoxeterSystem.from_edges(2, [(0, 1, m)], name=f"I2({m})")
    if n is None or n < 1:
        raise ValidationError("rank must be positive")
    if f == "A":
        edges = _path(n)
    elif f == "B" and n >= 2:
        edges = _path(n, [4] + [3] * (n - 2))
    elif f == "D" and n >= 4:
        edges = _path(n - 1) + [(n - 3, n - 1, 3)]
    elif f == "E" and n in (6, 7, 8):
        edges = _path(n - 1) + [(2, n - 1, 3)]
    elif f == "F" and n == 4:
        edges = _path(4, [3, 4, 3])
    elif f == "H" and n in (3, 4):
        edges = _path(n, [5] + [3] * (n - 2))
    elif f == "G" and n == 2:
        edges = [(0, 1, 6)]
    else:
        raise ValidationError(f"no finite type {family}{n}")
    return CoxeterSystem.from_edges(n, edges, name=f"{f}{n}")


def affine_type(family: str, n: int) -> CoxeterSystem:
    """Irreducible affine Coxeter system of type ``~X_n`` (rank n + 1)."""
    f = family.upper()
    k = n + 1
    if f == "A" and n == 1:
        edges = [(0, 1, INF)]
    elif f == "A" and n >= 2:
        edges = _path(k) + [(n, 0, 3)]
    elif f == "B" and n >= 3:
        edges = _path(n, [3] * (n - 2) + [4]) + [(1, n, 3)]
    elif f == "C" and n >= 2:
        edges = _path(k, [4] + [3] * (n - 2) + [4])
    elif f == "D" and n >= 4:
        edges = _path(n - 1) + [(1, n - 1, 3), (n - 3, n, 3)]
    elif f == "E" and n == 6:
        edges = _path(5) + [(2, 5, 3), (5, 6, 3)]
    elif f == "E" and n == 7:
        edges = _path(7) + [(3, 7, 3)]
    elif f == "E" and n == 8:
        edges = _path(8) + [(2, 8, 3)]
    elif f == "F" and n == 4:
        edges = _path(5, [3, 3, 4, 3])
    elif f == "G" and n == 2:
        edges = _path(3, [6, 3])
    else:
        raise ValidationError(f"no affine type ~{family}{n}")
    return CoxeterSystem.from_edges(k, edges, name=f"~{f}{n}")


def finite_catalog(max_rank: int = 8, max_dihedral: int = 30) -> list[CoxeterSystem]:
    """All irreducible finite types up to the given rank, plus I2(m) for 3 <= m <= max_dihedral."""
    out = [finite_type("A", n) for n in range(1, max_rank + 1)]
    out += [finite_type("B", n) for n in range(3, max_rank + 1)]
    out += [finite_type("D", n) for n in range(4, max_rank + 1)]
    out += [finite_type("E", n) for n in (6, 7, 8) if n <= max_rank]
    if max_rank >= 3:
        out.append(finite_type("H", 3))
    if max_rank >= 4:
        out += [finite_type("F", 4), finite_type("H", 4)]
    out += [finite_type("I2", m) for m in range(3, max_dihedral + 1)]
    return out


def affine_catalog(max_rank: int = 9) -> list[CoxeterSystem]:
    """All irreducible affine types of rank (number of generators) at most max_rank."""
    top = max_rank - 1
    out = [affine_type("A", n) for n in range(1, top + 1)]
    out += [affine_type("B", n) for n in range(3, top + 1)]
    out += [affine_type("C", n) for n in range(2, top + 1)]
    out += [affine_type("D", n) for n in range(4, top + 1)]
    out += [affine_type("E", n) for n in (6, 7, 8) if n <= top]
    if top >= 4:
        out.append(affine_type("F", 4))
    if top >= 2:
        out.append(affine_type("G", 2))
    return out


def finite_order(type_name: str) -> int:
    """Order of the finite Coxeter group of a recognized type."""
    if type_name.startswith("I2("):
        return 2 * int(type_name[3:-1])
    f, n = type_name[0], int(type_name[1:])
    if f == "A":
        return math.factorial(n + 1)
    if f == "B":
        return 2 ** n * math.factorial(n)
    if f == "D":
        return 2 ** (n - 1) * math.factorial(n)
    fixed = {"E6": 51840, "E7": 2903040, "E8": 696729600, "F4": 1152, "H3": 120, "H4": 14400,
             "G2": 12}
    if type_name in fixed:
        return fixed[type_name]
    raise ValidationError(f"unknown finite type {type_name}")


# ---------------------------------------------------------------------------
# graph structure
# ---------------------------------------------------------------------------


def components(cs: CoxeterSystem) -> list[tuple[tuple[int, ...], CoxeterSystem]]:
    """Connected components of the Coxeter graph, ordered by smallest index."""
    n = cs.n
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j, _ in cs.edges():
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    comps = sorted(groups.values(), key=lambda g: g[0])
    return [(tuple(g), cs.subsystem(g)) for g in comps]


def tits_form(cs: CoxeterSystem) -> SymMatrix:
    """Matrix of B with ``B(e_s, e_t) = -cos(pi/m_st)`` in the system's conductor."""
    L = cs.conductor
    one = CycloNumber.rational(1, L)
    zero = CycloNumber.rational(0, L)
    rows = []
    for i in range(cs.n):
        row = []
        for j in range(cs.n):
            lab = cs.m[i][j]
            if i == j:
                row.append(one)
            elif lab == 2:
                row.append(zero)
            else:
                row.append(-cyclo_cos_pi_over(lab, L))
        rows.append(row)
    return SymMatrix(rows)


def _neighbors(cs: CoxeterSystem) -> list[dict[int, object]]:
    nb: list[dict[int, object]] = [{} for _ in range(cs.n)]
    for i, j, lab in cs.edges():
        nb[i][j] = lab
        nb[j][i] = lab
    return nb


def _arms(nb, center: int) -> list[list]:
    """Label sequences along each branch leaving a node of a tree."""
    arms = []
    for start, lab in nb[center].items():
        seq = [lab]
        prev, cur = center, start
        while len(nb[cur]) == 2:
            nxt = next(x for x in nb[cur] if x != prev)
            seq.append(nb[cur][nxt])
            prev, cur = cur, nxt
        arms.append(seq)
    return sorted(arms, key=lambda s: (len(s), s))


def recognize(cs: CoxeterSystem) -> str | None:
    """Name of a connected diagram from the finite or affine classification, else None.

    Affine names carry a leading ``~``. The result is a pure graph-shape
    verdict; :func:`classify` cross-checks it against the signature.
    """
    n = cs.n
    if n == 0:
        return None
    if n == 1:
        return "A1"
    nb = _neighbors(cs)
    edges = cs.edges()
    labels = [lab for _, _, lab in edges]
    if len(components(cs)) != 1:
        return None
    if n == 2:
        m = cs.m[0][1]
        if m == INF:
            return "~A1"
        return {3: "A2", 4: "B2"}.get(m, f"I2({m})")
    if INF in labels:
        return None
    degrees = sorted(len(x) for x in nb)
    if len(edges) == n:
        if degrees == [2] * n and all(lab == 3 for lab in labels):
            return f"~A{n - 1}"
        return None
    if len(edges) != n - 1:
        return None
    if degrees[-1] <= 2:
        end = next(i for i in range(n) if len(nb[i]) == 1)
        seq = _arms(nb, end)[0]
        seq = min(seq, seq[::-1])
        inner = seq[1:-1]
        if all(lab == 3 for lab in seq):
            return f"A{n}"
        if seq[-1] == 4 and all(lab == 3 for lab in seq[:-1]):
            return f"B{n}"
        if seq[0] == 4 and seq[-1] == 4 and all(lab == 3 for lab in inner):
            return f"~C{n - 1}"
        named = {(3, 4, 3): "F4", (3, 3, 4, 3): "~F4", (3, 5): "H3", (3, 3, 5): "H4", (3, 6): "~G2"}
        return named.get(tuple(seq))
    branch = [i for i in range(n) if len(nb[i]) >= 3]
    if len(branch) == 1 and len(nb[branch[0]]) == 3:
        arms = _arms(nb, branch[0])
        lens = tuple(len(a) for a in arms)
        if all(lab == 3 for lab in labels):
            if lens[:2] == (1, 1):
                return f"D{n}"
            return {(1, 2, 2): "E6", (1, 2, 3): "E7", (1, 2, 4): "E8",
                    (2, 2, 2): "~E6", (1, 3, 3): "~E7", (1, 2, 5): "~E8"}.get(lens)
        if labels.count(4) == 1 and all(lab in (3, 4) for lab in labels):
            longest = arms[-1]
            if lens[:2] == (1, 1) and longest[-1] == 4:
                return f"~B{n - 1}"
        return None
    if any(lab != 3 for lab in labels):
        return None
    if len(branch) == 1 and len(nb[branch[0]]) == 4 and n == 5:
        return "~D4"
    if len(branch) == 2 and all(len(nb[b]) == 3 for b in branch):
        leaves = [sum(1 for x in nb[b] if len(nb[x]) == 1) for b in branch]
        if leaves == [2, 2]:
            return f"~D{n - 1}"
    return None


def _type_kind(name: str | None) -> str | None:
    if name is None:
        return None
    return AFFINE if name.startswith("~") else FINITE


@dataclass(frozen=True)
class CoxeterClass:
    kind: str
    signature: Signature
    type_name: str | None

    def to_json(self) -> dict:
        return {"kind": self.kind, "signature": self.signature.as_list(), "type": self.type_name}


def kind_from_signature(sig: Signature) -> str:
    n = sig.n
    if sig.p == n:
        return FINITE
    if sig.p == n - 1 and sig.r == 1:
        return AFFINE
    return INDEFINITE


def classify(cs: CoxeterSystem, budget_bits: int = DEFAULT_PRECISION_BITS) -> CoxeterClass:
    """Classify a connected system by the signature of its Tits form.

    The diagram recognizer runs independently; if its verdict disagrees with
    the signature (including a finite/affine signature on an unrecognized
    diagram) a :class:`ConsistencyError` is raised.
    """
    return _classify(cs, budget_bits)


@lru_cache(maxsize=4096)
def _classify(cs: CoxeterSystem, budget_bits: int) -> CoxeterClass:
    if cs.n == 0:
        raise ValidationError("classify needs a nonempty system")
    if len(components(cs)) != 1:
        raise ValidationError("classify expects a connected Coxeter system")
    sig = signature(tits_form(cs), budget_bits)
    kind = kind_from_signature(sig)
    name = recognize(cs)
    rec_kind = _type_kind(name)
    if rec_kind is None and kind != INDEFINITE:
        raise ConsistencyError(f"signature {sig.as_list()} says {kind} but the diagram is not in the classification")
    if rec_kind is not None and rec_kind != kind:
        raise ConsistencyError(f"diagram {name} is {rec_kind} but signature {sig.as_list()} says {kind}")
    return CoxeterClass(kind, sig, name)


def signature_facts_check(cs: CoxeterSystem, budget_bits: int = DEFAULT_PRECISION_BITS) -> dict[str, bool]:
    """Evaluate the standard facts about the signature of an irreducible system.

    The two characterizations (finite, affine) are checked against the
    diagram recognizer as the independent source of finiteness.
    """
    if len(components(cs)) != 1:
        raise ValidationError("signature facts concern irreducible (connected) systems")
    sig = signature(tits_form(cs), budget_bits)
    p, q, r, n = sig.p, sig.q, sig.r, sig.n
    rec_kind = _type_kind(recognize(cs))
    return {
        "finite_iff_p_eq_n": (p == n) == (rec_kind == FINITE),
        "affine_iff_p_eq_n_minus_1_and_r_eq_1": (p == n - 1 and r == 1) == (rec_kind == AFFINE),
        "q_zero_implies_r_le_1": q != 0 or r <= 1,
        "n_le_4_implies_p_ge_n_minus_1": n > 4 or p >= n - 1,
        "n_ge_4_implies_p_ge_3": n < 4 or p >= 3,
    }


# ---------------------------------------------------------------------------
# canonical form and output
# ---------------------------------------------------------------------------


def _key(v) -> int:
    return 0 if v == INF else int(v)


def _canonical_connected(cs: CoxeterSystem, max_perms: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    n = cs.n
    colors = [tuple(sorted(_key(v) for v in row)) for row in cs.m]
    for _ in range(n):
        palette = {c: k for k, c in enumerate(sorted(set(colors)))}
        new = [(palette[colors[i]], tuple(sorted((_key(cs.m[i][j]), palette[colors[j]])
                                                 for j in range(n) if j != i))) for i in range(n)]
        stable = len(set(new)) == len(set(colors))
        colors = new
        if stable:
            break
    palette = {c: k for k, c in enumerate(sorted(set(colors)))}
    cells: dict[int, list[int]] = {}
    for i in range(n):
        cells.setdefault(palette[colors[i]], []).append(i)
    ordered = [cells[k] for k in sorted(cells)]
    count = math.prod(math.factorial(len(c)) for c in ordered)
    if count > max_perms:
        raise BudgetExceeded(f"canonical form needs {count} permutations", {"permutations": count})
    best, best_perm = None, ()
    for choice in itertools.product(*(itertools.permutations(c) for c in ordered)):
        perm = tuple(x for part in choice for x in part)
        mat = tuple(_key(cs.m[perm[i]][perm[j]]) for i in range(n) for j in range(i + 1, n))
        if best is None or mat < best:
            best, best_perm = mat, perm
    return best_perm, best or ()


def canonical_form(cs: CoxeterSystem, max_perms: int = 200_000) -> tuple[tuple[int, ...], CoxeterSystem]:
    """A relabeling that depends only on the isomorphism class of the labeled graph.

    Components are canonized separately and concatenated in sorted order.
    Inside a component, colour refinement orders the generators up to ties
    and ties are broken by minimizing the relabeled matrix over all
    permutations of tied cells.
    """
    parts = []
    for idx, sub in components(cs):
        perm, mat = _canonical_connected(sub, max_perms)
        parts.append(((sub.n, mat), tuple(idx[p] for p in perm)))
    parts.sort()
    perm = tuple(x for _, p in parts for x in p)
    return perm, cs.relabel(perm)


def graph_label(cs: CoxeterSystem) -> str:
    """Type names of the components when classical, otherwise a canonical labeled graph."""
    labels = []
    for _, sub in components(cs):
        name = recognize(sub)
        if name is None:
            _, canon = canonical_form(sub)
            edges = [f"{i}-{j}:{_label_str(lab)}" for i, j, lab in canon.edges()]
            name = f"graph({canon.n}; {', '.join(edges)})"
        labels.append(name)
    return " x ".join(sorted(labels)) if labels else "1"


def to_dot(cs: CoxeterSystem, name: str = "coxeter") -> str:
    """DOT text for the Coxeter graph; unlabeled edges mean 3."""
    lines = [f"graph {name} {{"]
    for i in range(cs.n):
        lines.append(f'  s{i} [label="s{i}"];')
    for i, j, lab in cs.edges():
        attr = "" if lab == 3 else f' [label="{_label_str(lab)}"]'
        lines.append(f"  s{i} -- s{j}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# geometric representation and closure
# ---------------------------------------------------------------------------


def _mult_matrix(L: int, value: CycloNumber) -> np.ndarray:
    """Integer matrix of multiplication by an algebraic integer on the power basis."""
    res = np.asarray(_power_residues(L), dtype=np.int64)
    d = euler_phi(L)
    out = np.zeros((d, d), dtype=np.int64)
    for j, c in enumerate(value.lift(L).coeffs):
        if c:
            if c.denominator != 1:
                raise ValidationError("value is not an algebraic integer in the power basis")
            for k in range(d):
                out[:, k] += int(c) * res[(j + k) % L]
    return out


def geometric_generators(cs: CoxeterSystem) -> list[list[list[CycloNumber]]]:
    """Matrices of ``sigma_s(v) = v - 2 B(e_s, v) e_s`` in the basis (e_s)."""
    B = tits_form(cs)
    n, L = cs.n, cs.conductor
    mats = []
    for s in range(n):
        M = [[CycloNumber.rational(1 if i == j else 0, L) for j in range(n)] for i in range(n)]
        for t in range(n):
            M[s][t] = M[s][t] - B[s, t] * 2
        mats.append(M)
    return mats


def _matmul(A, B, L):
    n = len(A)
    zero = CycloNumber.rational(0, L)
    return [[sum((A[i][k] * B[k][j] for k in range(n)), zero) for j in range(n)] for i in range(n)]


def _transpose(A):
    return [list(r) for r in zip(*A)]


def check_generators(cs: CoxeterSystem, gens=None) -> None:
    """Exact check that each generator is an involution preserving B."""
    gens = gens if gens is not None else geometric_generators(cs)
    L, n = cs.conductor, cs.n
    B = tits_form(cs).rows()
    ident = [[CycloNumber.rational(1 if i == j else 0, L) for j in range(n)] for i in range(n)]
    for s, g in enumerate(gens):
        if _matmul(g, g, L) != ident:
            raise ConsistencyError(f"generator {s} is not an involution")
        if _matmul(_matmul(_transpose(g), B, L), g, L) != B:
            raise ConsistencyError(f"generator {s} does not preserve the Tits form")


@dataclass
class ReflectionGroup:
    """A finite Coxeter group enumerated in its geometric representation.

    ``elements[i]`` holds the images ``w_i(e_t)`` as integer coordinates
    over the power basis of ``Z[zeta_L]`` (one column per generator t);
    this determines w_i since the representation is Q(zeta_L)-linear. ``action[s, i]`` is the index
    of ``s * w_i`` and ``parent[i]``, ``parent_gen[i]`` record the BFS tree
    (``w_i = s * w_parent``). Index order is BFS discovery order.
    """

    system: CoxeterSystem
    conductor: int
    generators: list
    elements: np.ndarray
    action: np.ndarray
    parent: np.ndarray
    parent_gen: np.ndarray

    @property
    def order(self) -> int:
        return int(self.elements.shape[0])

    @property
    def rank(self) -> int:
        return self.system.n

    def word(self, i: int) -> list[int]:
        """A reduced word for element i (BFS gives geodesics)."""
        out = []
        while i:
            out.append(int(self.parent_gen[i]))
            i = int(self.parent[i])
        return out

    def cayley_table(self) -> np.ndarray:
        n = self.order
        table = np.empty((n, n), dtype=np.int64)
        table[0] = np.arange(n)
        for i in range(1, n):
            # w_i w_j = s (w_parent w_j)
            table[i] = self.action[self.parent_gen[i]][table[self.parent[i]]]
        return table

    def cayley_group(self, bound: int = DEFAULT_TABLE_BOUND) -> CayleyGroup:
        if self.order > bound:
            raise BudgetExceeded(f"group order {self.order} exceeds table bound {bound}",
                                 {"order": self.order})
        return CayleyGroup(self.cayley_table(), name=f"W({graph_label(self.system)})", check=False)


def _scalars_restricted(M, L: int, scale: int = 1) -> np.ndarray:
    """Integer matrix of ``scale * M`` acting on Z[zeta_L]^n (restriction of scalars)."""
    n, d = len(M), euler_phi(L)
    out = np.zeros((n * d, n * d), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            out[i * d:(i + 1) * d, j * d:(j + 1) * d] = _mult_matrix(L, M[i][j] * scale)
    return out


def _block_transpose(A: np.ndarray, n: int, d: int) -> np.ndarray:
    return A.reshape(n, d, n, d).transpose(2, 1, 0, 3).reshape(n * d, n * d)


def _check_integer_generators(R: np.ndarray, B2: np.ndarray, n: int, d: int) -> None:
    """Exact involution and form-preservation checks on the integer images.

    Restriction of scalars is an injective ring map that commutes with the
    blockwise transpose, so these are equivalent to the checks over the field.
    """
    # float64 BLAS products are exact while every partial sum stays below 2**53
    size = (n * d) ** 2 * max(1, int(np.abs(R).max(initial=1))) ** 2 * max(1, int(np.abs(B2).max(initial=1)))
    if size >= 2 ** 52:
        raise ValidationError("generator matrices too large for the exact check")
    eye = np.eye(n * d)
    Bf = B2.astype(np.float64)
    for s in range(n):
        Rs = R[s].astype(np.float64)
        if not np.array_equal(Rs @ Rs, eye):
            raise ConsistencyError(f"generator {s} is not an involution")
        if not np.array_equal(_block_transpose(Rs, n, d) @ Bf @ Rs, Bf):
            raise ConsistencyError(f"generator {s} does not preserve the Tits form")


def build_group(cs: CoxeterSystem, budget: int = DEFAULT_CLOSURE_BUDGET,
                budget_bits: int = DEFAULT_PRECISION_BITS) -> ReflectionGroup:
    """Enumerate W by breadth-first closure of exact generator matrices."""
    for _, comp in components(cs):
        cls = classify(comp, budget_bits)
        if cls.kind != FINITE:
            raise ValidationError(f"component {graph_label(comp)} is {cls.kind}; closure would not terminate")
    n, L = cs.n, cs.conductor
    d = euler_phi(L)
    N = n * d
    gens = geometric_generators(cs)
    R = np.stack([_scalars_restricted(g, L) for g in gens]) if n else np.zeros((0, 0, 0), np.int64)
    _check_integer_generators(R, _scalars_restricted(tits_form(cs).rows(), L, scale=2), n, d)
    Rf = R.astype(np.float64)
    # w is determined by the images w(e_t); keep the zeta^0 column of each block
    cols = [t * d for t in range(n)]
    ident = np.eye(N, dtype=np.int64)[:, cols].astype(np.int16)
    elements = [ident]
    index = {ident.tobytes(): 0}
    parent, parent_gen = [0], [-1]
    action_rows: list[list[int]] = [[] for _ in range(n)]
    head = 0
    while head < len(elements):
        stop = min(len(elements), head + _CHUNK)
        batch = stop - head
        # columns of all frontier elements side by side: (N, batch * n)
        frontier = np.concatenate(elements[head:stop], axis=1)
        frontier_f = frontier.astype(np.float64)
        start = head
        head = stop
        for s in range(n):
            # a reflection only changes block row s; float64 products of these
            # small integers are exact, and BLAS is far faster than int64 matmul
            rows = Rf[s][s * d:(s + 1) * d] @ frontier_f
            if np.abs(rows).max() >= 2 ** 15:
                raise ConsistencyError("matrix entries outgrew int16; the input is not a finite group")
            wide = frontier.copy()
            wide[s * d:(s + 1) * d] = rows.astype(np.int16)
            images = wide.reshape(N, batch, n).transpose(1, 0, 2)
            for k in range(batch):
                Y = np.ascontiguousarray(images[k])
                key = Y.tobytes()
                j = index.get(key)
                if j is None:
                    j = len(elements)
                    index[key] = j
                    elements.append(Y)
                    parent.append(start + k)
                    parent_gen.append(s)
                    if j + 1 > budget:
                        raise BudgetExceeded(f"closure exceeded {budget} elements", {"elements": j + 1})
                action_rows[s].append(j)
    action = np.asarray(action_rows, dtype=np.int64).reshape(n, len(elements))
    return ReflectionGroup(cs, L, gens, np.stack(elements), action,
                           np.asarray(parent, dtype=np.int64), np.asarray(parent_gen, dtype=np.int64))


__all__ = [
    "AFFINE",
    "CoxeterClass",
    "CoxeterSystem",
    "FINITE",
    "INDEFINITE",
    "ReflectionGroup",
    "affine_catalog",
    "affine_type",
    "product_corpus",
    "build_group",
    "canonical_form",
    "check_generators",
    "classify",
    "components",
    "disjoint_union",
    "finite_catalog",
    "finite_order",
    "finite_type",
    "geometric_generators",
    "graph_label",
    "recognize",
    "signature_facts_check",
    "tits_form",
    "to_dot",
]


def product_corpus(max_order: int = 1152, max_dihedral: int = 30) -> list[CoxeterSystem]:
    """Every disjoint union of A1..A4, B2..B4, D4, H3, F4 and I2(m) (5 <= m <= max_dihedral)
    with |W| at most max_order, one system per multiset of components."""
    blocks = [finite_type("A", n) for n in range(1, 5)]
    blocks += [finite_type("B", n) for n in range(2, 5)]
    blocks += [finite_type("D", 4), finite_type("H", 3), finite_type("F", 4)]
    blocks += [finite_type("I2", m) for m in range(5, max_dihedral + 1)]
    orders = [finite_order(recognize(b)) for b in blocks]
    out: list[CoxeterSystem] = []

    def rec(start: int, chosen: list[int], order: int):
        if chosen:
            cs = disjoint_union(*(blocks[i] for i in chosen))
            cs.__dict__["name"] = " x ".join(blocks[i].__dict__["name"] for i in chosen)
            out.append(cs)
        for i in range(start, len(blocks)):
            if order * orders[i] <= max_order:
                rec(i, chosen + [i], order * orders[i])

    rec(0, [], 1)
    return out
