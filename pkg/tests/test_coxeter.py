import json
import math
from fractions import Fraction

import numpy as np
import pytest

from coxdecomp.coxeter import (
    AFFINE,
    FINITE,
    INDEFINITE,
    CoxeterSystem,
    affine_catalog,
    affine_type,
    build_group,
    canonical_form,
    classify,
    components,
    disjoint_union,
    finite_catalog,
    finite_order,
    finite_type,
    graph_label,
    product_corpus,
    recognize,
    signature_facts_check,
    tits_form,
    to_dot,
)
from coxdecomp.errors import BudgetExceeded, ConsistencyError, ValidationError
from coxdecomp.exact import INF, CycloNumber, Signature, sign

A2 = CoxeterSystem([[1, 3], [3, 1]])
A2_TILDE = CoxeterSystem([[1, 3, 3], [3, 1, 3], [3, 3, 1]])
ALL_INF = CoxeterSystem([[1, INF, INF], [INF, 1, INF], [INF, INF, 1]])


def test_validation():
    with pytest.raises(ValidationError):
        CoxeterSystem([[1, 3], [4, 1]])
    with pytest.raises(ValidationError):
        CoxeterSystem([[2, 3], [3, 1]])
    with pytest.raises(ValidationError):
        CoxeterSystem([[1, 1], [1, 1]])
    assert CoxeterSystem([[1, "inf"], ["inf", 1]]).m[0][1] == INF


def test_tits_form_examples():
    B = tits_form(A2)
    assert B[0, 1] == CycloNumber.rational(Fraction(-1, 2))
    assert B[0, 0] == CycloNumber.rational(1)
    B = tits_form(CoxeterSystem([[1, INF], [INF, 1]]))
    assert B[0, 1] == CycloNumber.rational(-1)
    B = tits_form(CoxeterSystem([[1, 2], [2, 1]]))
    assert B[0, 1].is_zero()


@pytest.mark.parametrize("cs", finite_catalog(5, 12) + affine_catalog(6), ids=graph_label)
def test_tits_form_entries_in_unit_interval(cs):
    B = tits_form(cs)
    for i in range(cs.n):
        assert B[i, i] == CycloNumber.rational(1)
        for j in range(cs.n):
            assert B[i, j] == B[j, i]
            assert sign(B[i, j] + 1) >= 0 and sign(1 - B[i, j]) >= 0


def test_components_examples():
    cs = CoxeterSystem([[1, 2], [2, 1]])
    assert [idx for idx, _ in components(cs)] == [(0,), (1,)]
    assert [idx for idx, _ in components(A2)] == [(0, 1)]
    cs = CoxeterSystem.from_edges(4, [(0, 1, 3), (2, 3, INF)])
    assert [idx for idx, _ in components(cs)] == [(0, 1), (2, 3)]


def test_classify_examples():
    c = classify(finite_type("A", 3))
    assert (c.kind, c.signature, c.type_name) == (FINITE, Signature(3, 0, 0), "A3")
    c = classify(A2_TILDE)
    assert (c.kind, c.signature.as_list()) == (AFFINE, [2, 0, 1])
    c = classify(ALL_INF)
    assert (c.kind, c.signature.as_list()) == (INDEFINITE, [2, 1, 0])
    with pytest.raises(ValidationError):
        classify(CoxeterSystem([[1, 2], [2, 1]]))


def test_signature_facts_examples():
    for cs in (finite_type("E", 8), A2_TILDE, ALL_INF):
        assert all(signature_facts_check(cs).values())


@pytest.mark.parametrize("name", ["A5", "D6", "E7", "F4", "H4", "B8", "I2(13)"])
def test_classify_invariant_under_relabeling(name):
    fam = name[0] if not name.startswith("I2") else "I2"
    n = int(name[1:]) if fam != "I2" else int(name[3:-1])
    cs = finite_type(fam, n)
    rng = np.random.default_rng(7)
    perm = [int(x) for x in rng.permutation(cs.n)]
    relabeled = cs.relabel(perm)
    assert classify(relabeled) == classify(cs)
    assert recognize(relabeled) == name


def test_recognizer_names():
    assert recognize(affine_type("E", 8)) == "~E8"
    assert recognize(affine_type("A", 1)) == "~A1"
    assert recognize(affine_type("C", 3)) == "~C3"
    assert recognize(ALL_INF) is None


def test_finite_orders():
    assert finite_order("A3") == 24
    assert finite_order("B3") == 48
    assert finite_order("E8") == 696729600
    assert finite_order("I2(7)") == 14
    assert finite_order("H4") == 14400


@pytest.mark.parametrize(
    "cs,order",
    [
        (A2, 6),
        (finite_type("B", 3), 48),
        (finite_type("H", 3), 120),
        (finite_type("D", 4), 192),
        (finite_type("F", 4), 1152),
        (finite_type("I2", 7), 14),
        (disjoint_union(finite_type("A", 1), finite_type("I2", 5)), 20),
        (CoxeterSystem([]), 1),
    ],
)
def test_build_group_orders(cs, order):
    W = build_group(cs)
    assert W.order == order
    assert len({e.tobytes() for e in W.elements}) == order


def test_build_group_h4_order():
    # largest rank-4 finite type; checks the closure at conductor 10
    assert build_group(finite_type("H", 4)).order == 14400


def test_build_group_rejects_infinite_and_budget():
    with pytest.raises(ValidationError):
        build_group(A2_TILDE)
    with pytest.raises(BudgetExceeded) as info:
        build_group(finite_type("B", 3), budget=10)
    assert info.value.partial["elements"] == 11


def test_cayley_table_is_group_and_words_are_reduced():
    W = build_group(finite_type("B", 3))
    G = W.cayley_group()
    G2 = type(G)(G.table)  # full axiom check
    assert G2.order == 48
    # longest element of B3 has length 9 = number of positive roots
    assert max(len(W.word(i)) for i in range(W.order)) == 9
    # every generator is an involution in the table
    for s in range(3):
        g = int(W.action[s, 0])
        assert G.table[g, g] == 0


def test_json_round_trip():
    for cs in (A2, ALL_INF, finite_type("H", 3)):
        assert CoxeterSystem.from_json(json.loads(json.dumps(cs.to_json()))) == cs


def test_canonical_form_invariance():
    cs = disjoint_union(finite_type("D", 5), affine_type("A", 3), finite_type("A", 1))
    rng = np.random.default_rng(3)
    base = canonical_form(cs)[1]
    for _ in range(5):
        perm = [int(x) for x in rng.permutation(cs.n)]
        assert canonical_form(cs.relabel(perm))[1] == base
    assert graph_label(cs) == graph_label(cs.relabel(list(reversed(range(cs.n)))))


def test_graph_label_for_unclassified():
    assert graph_label(ALL_INF) == "graph(3; 0-1:inf, 0-2:inf, 1-2:inf)"
    assert graph_label(CoxeterSystem([])) == "1"


def test_dot_output():
    text = to_dot(finite_type("B", 3))
    assert text.startswith("graph coxeter {")
    assert 'label="4"' in text
    assert "s1 -- s2;" in text
    assert "inf" in to_dot(affine_type("A", 1))


def test_corpora_sizes():
    # A1-A8, B3-B8, D4-D8, E6-E8, H3, F4, H4, then I2(m) for m = 3..30
    assert len(finite_catalog(8, 30)) == 8 + 6 + 5 + 3 + 3 + 28
    assert len(affine_catalog(9)) > 20
    corpus = product_corpus()
    assert all(math.prod(finite_order(classify(s).type_name) for _, s in components(cs)) <= 1152
               for cs in corpus[:50])


def test_inconsistent_recognizer_is_hard_error(monkeypatch):
    import coxdecomp.coxeter as cx

    monkeypatch.setattr(cx, "recognize", lambda cs: "~A2")
    cx._classify.cache_clear()
    try:
        with pytest.raises(ConsistencyError):
            cx.classify(finite_type("A", 3))
    finally:
        cx._classify.cache_clear()
