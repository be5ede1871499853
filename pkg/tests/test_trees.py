import pytest

from diopkit.trees import (UNIT, DiTree, MalformedTree, canonicalize, contract_edge, corolla, decode,
                           encode, enumerate_trees, graft, is_reduced, level_functions, permutation_sign)

LIE = frozenset({(1, 2)})


def eq_2f(t: DiTree) -> bool:
    return sum(a + b - 2 for a, b in t.shapes()) == t.m + t.n - 2


def test_enumeration_examples():
    assert len(enumerate_trees(1, 2, LIE)) == 1
    assert len(enumerate_trees(1, 3, LIE)) == 3
    assert len(enumerate_trees(2, 2)) == 5
    assert len(enumerate_trees(1, 4, LIE)) == 15


@pytest.mark.parametrize("total", range(3, 7))
def test_2f_and_trivalent_counts(total):
    for m in range(1, total):
        n = total - m
        seen = set()
        for t in enumerate_trees(m, n):
            assert eq_2f(t)
            assert sum(1 for a, _ in t.shapes() if a == 2) == m - 1
            assert sum(1 for _, b in t.shapes() if b == 2) == n - 1
            assert t not in seen
            seen.add(t)
        for t in enumerate_trees(m, n, "reduced"):
            assert eq_2f(t) and is_reduced(t)
            assert 1 <= t.nverts <= m + n - 2


def test_unit_strand():
    assert UNIT.is_unit() and eq_2f(UNIT)
    t = enumerate_trees(1, 3, LIE)[0]
    assert graft(UNIT, 1, 1, t) == t
    for i in range(1, 4):
        assert graft(t, i, 1, UNIT) == t


def test_graft_two_brackets():
    c = corolla(1, 2)
    t = graft(c, 1, 1, c)
    assert (t.m, t.n, t.nverts, t.nedges) == (1, 3, 2, 1)
    top, _ = t.root_vertex(1)
    low1, _ = t.leaf_vertex(1)
    low2, _ = t.leaf_vertex(2)
    up3, _ = t.leaf_vertex(3)
    assert low1 == low2 != top and up3 == top
    e = t.edges()[0]
    assert e[0] == low1 and e[2] == top and t.verts[top][1][e[3]] == 0


def test_graft_range():
    with pytest.raises(IndexError):
        graft(corolla(1, 2), 3, 1, corolla(1, 2))


def test_canonicalize_signs():
    t = enumerate_trees(1, 4, LIE)[0]
    c, s = canonicalize(t)
    assert c == t and s == 1
    t3 = enumerate_trees(1, 5, LIE)[0]
    assert t3.nedges == 3
    assert canonicalize(t3, [1, 0, 2])[1] == -1
    assert canonicalize(t3, [1, 2, 0])[1] == 1
    with pytest.raises(MalformedTree):
        canonicalize(t3, [0, 1])


def test_permutation_sign():
    assert permutation_sign([0, 1, 2]) == 1
    assert permutation_sign([1, 0, 2]) == -1
    assert permutation_sign([1, 2, 0]) == 1


def test_contract_examples():
    t = enumerate_trees(1, 3, LIE)[0]
    c, v, _ = contract_edge(t, 0)
    assert c == corolla(1, 3) and v == 0
    for t in enumerate_trees(2, 2):
        if t.nverts == 2:
            assert contract_edge(t, 0)[0] == corolla(2, 2)
    with pytest.raises(MalformedTree):
        contract_edge(t, 5)


def test_level_function_examples():
    assert len(level_functions(corolla(2, 2), 1)) == 1
    # two unary vertices in a row: the only saturated 2-level map puts the root side at level 1
    two = DiTree(1, 1, (((-1,), (0,)), ((0,), (-1,))))
    sat = level_functions(two, 2, [True, True])
    assert len(sat) == 1
    top, _ = two.root_vertex(1)
    assert sat[0].level[top] == 1
    # with a leaf bypassing the lower vertex, level 2 is not saturated
    assert level_functions(enumerate_trees(1, 3, LIE)[0], 2, [True, True]) == []
    path = [t for t in enumerate_trees(1, 4, LIE) if all(
        sum(1 for x in ins if x >= 0) <= 1 for _, ins in t.verts)][0]
    assert len(level_functions(path, 2)) == 2


def test_encode_roundtrip():
    for t in enumerate_trees(2, 3):
        assert decode(encode(t)) == t
    assert decode(encode(UNIT)) == UNIT
