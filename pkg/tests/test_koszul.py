import random
from fractions import Fraction

import pytest

from diopkit.ratlin import euler
from diopkit.diopcore.free import free_slice
from diopkit.diopcore.ideal import quotient_slice
from diopkit.diopcore.presentation import QUADRATIC_SLOTS, delete_relations, opposite
from diopkit.koszul.cobar import cobar_slice, h0_check
from diopkit.koszul.dual import quadratic_dual, relation_isomorphic
from diopkit.koszul.kcomplex import koszul_slice
from diopkit.koszul.verdict import Decomposition, Exactness, distributive_check, koszulity_check
from conftest import random_presentation


def test_dual_examples(bilie, bilie_dual):
    d = quadratic_dual(bilie)
    assert d.name == "bilie!"
    assert all(sp.is_trivial() for sp in d.E.spaces.values())
    assert [d.relations[s].dim for s in QUADRATIC_SLOTS] == [2, 2, 4]
    assert relation_isomorphic(d, bilie_dual)
    assert relation_isomorphic(quadratic_dual(d), bilie)


def test_dual_of_free_kills_weight_two(bilie):
    free = delete_relations(delete_relations(delete_relations(bilie, (1, 3)), (3, 1)), (2, 2))
    d = quadratic_dual(free)
    for s in QUADRATIC_SLOTS:
        assert d.relations[s].dim == free_slice(d.E, *s).dim
        assert quotient_slice(d, *s).dim == 0


def test_orthogonal_dimensions(seed):
    rng = random.Random(seed)
    for k in range(25):
        p = random_presentation(rng, k)
        d = quadratic_dual(p)
        for s in QUADRATIC_SLOTS:
            assert p.relations[s].dim + d.relations[s].dim == free_slice(p.E, *s).dim
        assert relation_isomorphic(quadratic_dual(d), p)



def test_square_zero_on_random_presentations(seed):
    rng = random.Random(seed + 7)
    for k in range(100):
        p = random_presentation(rng, k)
        for m, n in [(1, 3), (2, 2), (3, 2), (2, 3), (1, 4)]:
            for sl in (koszul_slice(p, m, n), cobar_slice(p, m, n)):
                assert sl.complex.check_square_zero(), (p.name, m, n)
                assert sl.complex.euler_characteristic() == euler(sl.homology)


def test_cobar_examples(bilie, bilie_dual):
    for m, n in [(1, 2), (1, 3), (2, 2), (3, 2)]:
        cs = cobar_slice(bilie, m, n)
        assert all(v == 0 for k, v in cs.homology.items() if k != 0)
        assert cs.h0() == quotient_slice(bilie_dual, m, n).dim == 1
        assert h0_check(bilie, m, n, bilie_dual)


def test_koszul_complex_at_unit_is_ground_field(bilie):
    assert koszul_slice(bilie, 1, 1).homology == {0: 1}


@pytest.mark.parametrize("arity", [(1, 2), (2, 1), (2, 2), (1, 3), (2, 3)])
def test_koszul_complex_exact(bilie, arity):
    ks = koszul_slice(bilie, *arity)
    assert ks.is_exact(), ks.homology


def test_koszulity_invariant_under_opposite(bilie, com):
    for p in (bilie, com):
        a, b = koszulity_check(p, 3), koszulity_check(opposite(p), 3)
        assert a.koszul == b.koszul
        assert {(n, m): v for (m, n), v in a.rows.items()} == b.rows


def test_koszulity_verdicts(bilie, bilie_dual):
    v = koszulity_check(bilie, 3)
    assert v.koszul and not v.disagreements
    assert all(r is Exactness.EXACT for r in v.rows.values())
    assert koszulity_check(bilie_dual, 3).koszul


def test_distributive_examples(bilie, bilie_dual):
    v = distributive_check(bilie)
    assert v.passed and v.verdict is Decomposition.ROOT_12
    w = distributive_check(bilie_dual)
    assert w.passed and w.verdict is Decomposition.ROOT_21
    broken = distributive_check(delete_relations(bilie, (2, 2)))
    assert not broken.passed and broken.verdict is Decomposition.NEITHER
