"""Inner loops over Cayley tables.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy version
with the same signature and results. The numba path is used when numba is
importable and ``COXDECOMP_DISABLE_NUMBA`` is unset (or "0"); otherwise the
numpy path is selected at import time. Both implementations stay importable
as :data:`numba_impl` and :data:`numpy_impl` for testing and benchmarking.

Tables are ``int64`` arrays with the identity at index 0.
"""

import os
from types import SimpleNamespace

import numpy as np

# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def _np_closure(table, gens):
    """Mask of the subgroup generated by ``gens`` (right-multiplication BFS)."""
    n = table.shape[0]
    mask = np.zeros(n, dtype=np.bool_)
    mask[0] = True
    if len(gens) == 0:
        return mask
    frontier = np.zeros(1, dtype=np.int64)
    while frontier.size:
        nxt = table[frontier][:, gens].ravel()
        nxt = np.unique(nxt[~mask[nxt]])
        mask[nxt] = True
        frontier = nxt
    return mask


def _np_conjugacy_labels(table, inv):
    n = table.shape[0]
    labels = np.full(n, -1, dtype=np.int64)
    rng = np.arange(n)
    c = 0
    for x in range(n):
        if labels[x] < 0:
            orbit = table[table[rng, x], inv]
            labels[orbit] = c
            c += 1
    return labels


def _np_element_orders(table):
    n = table.shape[0]
    rng = np.arange(n)
    orders = np.zeros(n, dtype=np.int64)
    cur = rng.copy()
    k = 1
    while True:
        done = (cur == 0) & (orders == 0)
        orders[done] = k
        if orders.all():
            return orders
        cur = table[cur, rng]
        k += 1


def _np_extend_hom(tab_g, gens, tab_h, images):
    """Extend generator images to a homomorphism on <gens>.

    Returns ``phi`` with ``phi[x] = -1`` outside the generated subgroup, or an
    array filled with -2 when the assignment is inconsistent.
    """
    n = tab_g.shape[0]
    phi = np.full(n, -1, dtype=np.int64)
    phi[0] = 0
    frontier = np.zeros(1, dtype=np.int64)
    while frontier.size:
        found = []
        for i in range(len(gens)):
            y = tab_g[frontier, gens[i]]
            v = tab_h[phi[frontier], images[i]]
            known = phi[y] >= 0
            if np.any(phi[y[known]] != v[known]):
                return np.full(n, -2, dtype=np.int64)
            yu = y[~known]
            vu = v[~known]
            phi[yu] = vu
            if np.any(phi[yu] != vu):
                return np.full(n, -2, dtype=np.int64)
            found.append(yu)
        frontier = np.unique(np.concatenate(found)) if found else np.zeros(0, np.int64)
    return phi


def _np_centralizer_mask(table, members):
    if len(members) == 0:
        return np.ones(table.shape[0], dtype=np.bool_)
    return np.all(table[:, members] == table[members, :].T, axis=1)


def _np_product_mask(table, a, b):
    mask = np.zeros(table.shape[0], dtype=np.bool_)
    mask[table[np.ix_(a, b)].ravel()] = True
    return mask


def _np_is_latin(table):
    n = table.shape[0]
    target = np.arange(n)
    rows_ok = np.all(np.sort(table, axis=1) == target)
    cols_ok = np.all(np.sort(table, axis=0) == target[:, None])
    return bool(rows_ok and cols_ok)


def _np_associativity_witness(table, gens):
    """First (x, a, y) with (xa)y != x(ay), a in gens; (-1,-1,-1) if none."""
    for a in gens:
        lhs = table[table[:, a], :]
        rhs = table[:, table[a, :]]
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            return int(bad[0, 0]), int(a), int(bad[0, 1])
    return -1, -1, -1


numpy_impl = SimpleNamespace(
    name="numpy",
    closure=_np_closure,
    conjugacy_labels=_np_conjugacy_labels,
    element_orders=_np_element_orders,
    extend_hom=_np_extend_hom,
    centralizer_mask=_np_centralizer_mask,
    product_mask=_np_product_mask,
    is_latin=_np_is_latin,
    associativity_witness=_np_associativity_witness,
)

# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

numba_impl = None
try:
    import numba
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

if numba is not None:

    @njit(cache=True)
    def _nb_closure(table, gens):
        n = table.shape[0]
        mask = np.zeros(n, dtype=np.bool_)
        mask[0] = True
        queue = np.empty(n, dtype=np.int64)
        queue[0] = 0
        head, tail = 0, 1
        while head < tail:
            x = queue[head]
            head += 1
            for g in gens:
                y = table[x, g]
                if not mask[y]:
                    mask[y] = True
                    queue[tail] = y
                    tail += 1
        return mask

    @njit(cache=True)
    def _nb_conjugacy_labels(table, inv):
        n = table.shape[0]
        labels = np.full(n, -1, dtype=np.int64)
        c = 0
        for x in range(n):
            if labels[x] < 0:
                for g in range(n):
                    labels[table[table[g, x], inv[g]]] = c
                c += 1
        return labels

    @njit(cache=True)
    def _nb_element_orders(table):
        n = table.shape[0]
        orders = np.zeros(n, dtype=np.int64)
        for x in range(n):
            k = 1
            y = x
            while y != 0:
                y = table[y, x]
                k += 1
            orders[x] = k
        return orders

    @njit(cache=True)
    def _nb_extend_hom(tab_g, gens, tab_h, images):
        n = tab_g.shape[0]
        phi = np.full(n, -1, dtype=np.int64)
        phi[0] = 0
        queue = np.empty(n, dtype=np.int64)
        queue[0] = 0
        head, tail = 0, 1
        while head < tail:
            x = queue[head]
            head += 1
            px = phi[x]
            for i in range(gens.shape[0]):
                y = tab_g[x, gens[i]]
                v = tab_h[px, images[i]]
                if phi[y] < 0:
                    phi[y] = v
                    queue[tail] = y
                    tail += 1
                elif phi[y] != v:
                    return np.full(n, -2, dtype=np.int64)
        return phi

    @njit(cache=True)
    def _nb_centralizer_mask(table, members):
        n = table.shape[0]
        mask = np.ones(n, dtype=np.bool_)
        for x in range(n):
            for m in members:
                if table[x, m] != table[m, x]:
                    mask[x] = False
                    break
        return mask

    @njit(cache=True)
    def _nb_product_mask(table, a, b):
        mask = np.zeros(table.shape[0], dtype=np.bool_)
        for x in a:
            for y in b:
                mask[table[x, y]] = True
        return mask

    @njit(cache=True)
    def _nb_is_latin(table):
        n = table.shape[0]
        seen = np.zeros(n, dtype=np.int64)
        stamp = 0
        for i in range(n):
            stamp += 1
            for j in range(n):
                v = table[i, j]
                if v < 0 or v >= n or seen[v] == stamp:
                    return False
                seen[v] = stamp
        for j in range(n):
            stamp += 1
            for i in range(n):
                v = table[i, j]
                if seen[v] == stamp:
                    return False
                seen[v] = stamp
        return True

    @njit(cache=True)
    def _nb_associativity_witness(table, gens):
        n = table.shape[0]
        for a in gens:
            for x in range(n):
                xa = table[x, a]
                for y in range(n):
                    if table[xa, y] != table[x, table[a, y]]:
                        return x, a, y
        return -1, -1, -1

    numba_impl = SimpleNamespace(
        name="numba",
        closure=_nb_closure,
        conjugacy_labels=_nb_conjugacy_labels,
        element_orders=_nb_element_orders,
        extend_hom=_nb_extend_hom,
        centralizer_mask=_nb_centralizer_mask,
        product_mask=_nb_product_mask,
        is_latin=_nb_is_latin,
        associativity_witness=_nb_associativity_witness,
    )


def _select():
    flag = os.environ.get("COXDECOMP_DISABLE_NUMBA", "").strip().lower()
    if numba_impl is None or flag not in ("", "0", "false", "no"):
        return numpy_impl
    return numba_impl


active = _select()

closure = active.closure
conjugacy_labels = active.conjugacy_labels
element_orders = active.element_orders
extend_hom = active.extend_hom
centralizer_mask = active.centralizer_mask
product_mask = active.product_mask
is_latin = active.is_latin
associativity_witness = active.associativity_witness
