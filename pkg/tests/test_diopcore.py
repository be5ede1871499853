import math
import random
from fractions import Fraction

import pytest

from diopkit.ratlin import Mat
from diopkit.diopcore.algebra import AlgebraShapeError, check_algebra, evaluate_tree
from diopkit.diopcore.axioms import axiom_suite
from diopkit.diopcore.box import UNIT_TABLE, box_slice, opposite_table, tensor_table
from diopkit.diopcore.free import (ArityError, GeneratorSet, WeightBoundError, compose, free_slice, unit)
from diopkit.diopcore.ideal import (fixpoint_sweep, ideal_closure, quotient_compose, quotient_dims,
                                    quotient_slice)
from diopkit.diopcore.presentation import delete_relations, free_presentation, opposite, restrict
from diopkit.koszul.dual import relation_isomorphic
from diopkit.sbimod import sign, trivial
from diopkit.trees import corolla, enumerate_trees, graft

# [x,y] = x and delta(y) = x(x)y - y(x)x on V = Q^2, basis (x, y)
BRACKET = Mat(2, 4, {(0, 1): 1, (0, 2): -1})
COBRACKET = Mat(4, 2, {(1, 1): 1, (2, 1): -1})


def maps(l, d):
    return {((1, 2), 0): l, ((2, 1), 0): d}


def test_free_dims(bilie):
    E = bilie.E
    assert free_slice(E, 1, 1).dim == 1
    assert free_slice(E, 1, 3).dim == 3
    assert free_slice(E, 3, 1).dim == 3
    assert free_slice(E, 2, 2).dim == 5
    with pytest.raises(WeightBoundError):
        free_slice(E, 3, 3, max_weight=3)


def test_compose_examples(bilie):
    E = bilie.E
    l, d = E.generator((1, 2)), E.generator((2, 1))
    assert compose(E, unit(), 1, 1, l) == l
    assert compose(E, l, 2, 1, unit()) == l
    ll = compose(E, l, 1, 1, l)
    assert ll == {(graft(corolla(1, 2), 1, 1, corolla(1, 2)), (0, 0)): Fraction(1)}
    dl = compose(E, d, 1, 1, l)
    [(t, deco)] = dl
    # e-shaped: both roots on the cobracket, both leaves on the bracket
    assert t.root_vertex(1)[0] == t.root_vertex(2)[0] != t.leaf_vertex(1)[0] == t.leaf_vertex(2)[0]
    with pytest.raises(ArityError):
        compose(E, l, 3, 1, l)


def test_axiom_suite(bilie, seed):
    rep = axiom_suite(bilie.E, 500, seed)
    assert rep.cases >= 500 and rep.ok, rep.failures[:3]


def test_axiom_suite_higher_dimensional(seed):
    from diopkit.sbimod import from_generators
    E = GeneratorSet({(1, 2): from_generators(1, 2, [], [[[0, 1], [1, 0]]]),
                      (2, 1): trivial(2, 1), (2, 2): sign(2, 2)})
    rep = axiom_suite(E, 300, seed + 1)
    assert rep.ok, rep.failures[:3]


def test_ideal_examples(bilie):
    free = free_presentation("free", bilie.E)
    assert all(s.dim == 0 for s in ideal_closure(free, 3).values())
    cl = ideal_closure(bilie, 2)
    assert [cl[s].dim for s in ((1, 3), (3, 1), (2, 2))] == [1, 1, 1]
    assert quotient_slice(bilie, 1, 4).dim == 6
    assert quotient_slice(bilie, 2, 2).dim == 4
    for n in range(2, 6):
        assert quotient_slice(bilie, 1, n).dim == math.factorial(n - 1)
        assert quotient_slice(bilie, n, 1).dim == math.factorial(n - 1)


def test_dual_is_one_dimensional(bilie_dual):
    for (m, n), d in quotient_dims(bilie_dual, 4).items():
        assert d == 1, (m, n)


@pytest.mark.parametrize("arity", [(1, 4), (2, 3), (3, 2), (2, 4), (3, 3)])
def test_fixpoint_sweep(bilie, arity):
    assert fixpoint_sweep(bilie, *arity)


def test_quotient_compose_independent_of_representative(bilie, rng):
    E = bilie.E
    for (a, b) in [((1, 3), (2, 1)), ((2, 2), (1, 2)), ((1, 2), (2, 2)), ((3, 1), (1, 3))]:
        qa, qb = quotient_slice(bilie, *a), quotient_slice(bilie, *b)
        ideal_a = qa.ideal_subspace().vectors()
        for _ in range(4):
            x = {k: Fraction(rng.randint(-2, 2)) for k in range(qa.dim)}
            y = {k: Fraction(rng.randint(-2, 2)) for k in range(qb.dim)}
            i, j = rng.randint(1, a[1]), rng.randint(1, b[0])
            base = quotient_compose(bilie, x, a, i, j, y, b)
            lifted = qa.lift(x)
            if ideal_a:
                junk = qa.free.from_sparse(rng.choice(ideal_a))
                for key, c in junk.items():
                    lifted[key] = lifted.get(key, 0) + c
            m, n = a[0] + b[0] - 1, a[1] + b[1] - 1
            other = quotient_slice(bilie, m, n).project(compose(E, lifted, i, j, qb.lift(y)))
            assert {k: v for k, v in other.items() if v} == {k: v for k, v in base.items() if v}


def test_box_examples(bilie, lie, com, bilie_dual):
    lie_op = opposite(lie)
    assert box_slice(lie, lie_op, 2, 2).dim == 4 == quotient_slice(bilie, 2, 2).dim
    com_op = opposite(com)
    assert box_slice(com_op, com, 2, 2).dim == 1 == quotient_slice(bilie_dual, 2, 2).dim


@pytest.mark.parametrize("arity", [(1, 2), (1, 3), (2, 2), (1, 4), (2, 3), (3, 2)])
def test_box_unit_laws(bilie, arity):
    q = quotient_slice(bilie, *arity).dim
    assert box_slice(bilie, UNIT_TABLE, *arity).dim == q
    assert box_slice(UNIT_TABLE, bilie, *arity).dim == q


def test_box_matches_quotient_through_weight_3(bilie, lie):
    lie_op = opposite(lie)
    for (m, n), d in quotient_dims(bilie, 3).items():
        assert box_slice(lie, lie_op, m, n).dim == d


def test_opposite_and_tables(bilie, lie):
    assert relation_isomorphic(opposite(opposite(bilie)), bilie)
    op = opposite(lie)
    for m in range(2, 6):
        assert quotient_slice(op, m, 1).dim == math.factorial(m - 1)
    assert tensor_table({(2, 2): 4}, {(2, 2): 1}) == {(2, 2): 4}
    assert opposite_table(quotient_dims(lie, 3))[(4, 1)] == 6


def test_restrict_and_delete(bilie):
    a = restrict(bilie, (1, 2))
    assert a.E.shapes == frozenset({(1, 2)}) and a.relations[(1, 3)].dim == 1
    d = delete_relations(bilie, (2, 2))
    assert d.relations[(2, 2)].dim == 0 and quotient_slice(d, 2, 2).dim == 5


def test_algebra_examples(bilie):
    zero = maps(Mat.zero(2, 4), Mat.zero(4, 2))
    assert check_algebra(bilie, 2, zero).morphism
    assert check_algebra(bilie, 1, maps(Mat.zero(1, 1), Mat.zero(1, 1))).morphism
    v = check_algebra(bilie, 2, maps(BRACKET, COBRACKET))
    assert v.morphism and v.violated == [] and v.equivariant
    bad = Mat(4, 2, {(1, 1): 1, (2, 1): -1, (0, 0): 1})
    v = check_algebra(bilie, 2, maps(BRACKET, bad))
    assert not v.morphism and "cojacobi" in v.violated or "drinfeld" in v.violated
    with pytest.raises(AlgebraShapeError):
        check_algebra(bilie, 2, maps(Mat.zero(2, 2), COBRACKET))


def test_scalar_bilie_algebra(bilie):
    # on V = k the bracket must vanish by antisymmetry; nonzero scalars fail equivariance
    v = check_algebra(bilie, 1, maps(Mat(1, 1, {(0, 0): 1}), Mat.zero(1, 1)))
    assert not v.morphism and v.asymmetric == ["l"]


def test_evaluate_tree_matches_matrix_product(bilie):
    # m(m(x1,x2),x3) for a random product on Q^2
    rng = random.Random(0)
    from diopkit.sbimod import kron
    M = Mat(2, 4, {(r, c): rng.randint(-2, 2) for r in range(2) for c in range(4)})
    t = graft(corolla(1, 2), 1, 1, corolla(1, 2))
    got = evaluate_tree(t, (0, 0), {((1, 2), 0): M}, 2)
    assert got == M @ kron(M, Mat.identity(2))
