import itertools
import random

import pytest

from diopkit.ratlin import Mat
from diopkit.sbimod import (ActionError, TwistKind, all_perms, check_double_vee, compose_perm,
                            decorated_space, format_cycles, from_generators, identity_perm, parse_cycles,
                            relabel_action, sign, trivial, twist)
from diopkit.trees import UNIT, enumerate_trees

SWAP = [[0, 1], [1, 0]]
# standard representation of S3 on the basis e1-e2, e2-e3
STD = [[[-1, 1], [0, 1]], [[1, 0], [1, -1]]]


def regular_12():
    return from_generators(1, 2, [], [SWAP], name="m")


def test_action_examples(bilie, bilie_dual):
    l = bilie.E[(1, 2)]
    assert l.action((0,), (0, 1)) == Mat.identity(1)
    assert l.action((0,), (1, 0)) == Mat.from_rows([[-1]])
    assert bilie_dual.E[(1, 2)].action((0,), (1, 0)) == Mat.from_rows([[1]])


def test_action_is_multiplicative():
    sp = from_generators(3, 2, STD, [[[1, 0], [0, 1]]])
    rng = random.Random(1)
    for _ in range(20):
        p1, p2 = rng.choice(all_perms(3)), rng.choice(all_perms(3))
        s1, s2 = rng.choice(all_perms(2)), rng.choice(all_perms(2))
        lhs = sp.action(compose_perm(p1, p2), compose_perm(s1, s2))
        assert lhs == sp.action(p1, s1) @ sp.action(p2, s2)


def test_bad_actions_rejected():
    with pytest.raises(ActionError):
        from_generators(1, 2, [], [[[2]]])
    with pytest.raises(ActionError):
        # s1 s2 s1 != s2 s1 s2
        from_generators(1, 3, [], [SWAP, [[1, 1], [0, -1]]])


def test_cycles_roundtrip():
    for p in all_perms(4):
        assert parse_cycles(format_cycles(p), 4) == p
    assert parse_cycles("(123)", 3) == parse_cycles("(1 2 3)", 3) == (1, 2, 0)
    with pytest.raises(ValueError):
        parse_cycles("(1 5)", 3)


def test_decorated_space_dims(bilie):
    assert decorated_space(bilie.E.spaces, UNIT).dim == 1
    for t in enumerate_trees(2, 2):
        if t.nverts == 2:
            assert decorated_space(bilie.E.spaces, t).dim == 1
    two = enumerate_trees(1, 3, frozenset({(1, 2)}))[0]
    assert decorated_space({(1, 2): regular_12()}, two).dim == 4


def _two_vertex_22(upper):
    for t in enumerate_trees(2, 2):
        if t.nverts == 2:
            top, _ = t.root_vertex(1)
            top2, _ = t.root_vertex(2)
            if (top == top2) == (upper == "d"):
                return t


def test_relabel_examples(bilie):
    E = bilie.E.spaces
    e_shape = _two_vertex_22("d")        # both roots on the cobracket
    d = decorated_space(E, e_shape)
    target, mat = relabel_action(E, d, (1, 0), (0, 1))
    assert target.tree == e_shape and mat == Mat.from_rows([[-1]])
    target, mat = relabel_action(E, d, (0, 1), (0, 1))
    assert mat == Mat.identity(1)
    t_shape = _two_vertex_22("l")
    target, mat = relabel_action(E, decorated_space(E, t_shape), (0, 1), (1, 0))
    assert target.tree != t_shape and mat == Mat.from_rows([[1]])


def test_relabel_functorial():
    E = {(1, 2): regular_12(), (2, 1): from_generators(2, 1, [[[0, 1], [1, 0]]], [])}
    rng = random.Random(7)
    for t in enumerate_trees(2, 3):
        d = decorated_space(E, t)
        for _ in range(3):
            p1, p2 = rng.choice(all_perms(2)), rng.choice(all_perms(2))
            s1, s2 = rng.choice(all_perms(3)), rng.choice(all_perms(3))
            mid, a = relabel_action(E, d, p2, s2)
            end, b = relabel_action(E, mid, p1, s1)
            end2, c = relabel_action(E, d, compose_perm(p1, p2), compose_perm(s1, s2))
            assert end2.tree == end.tree and c == b @ a


def test_twists():
    lam11 = twist(trivial(1, 1), TwistKind.LAMBDA)
    assert lam11.degree == 0 and lam11.is_trivial()
    lam21 = twist(trivial(2, 1), TwistKind.LAMBDA)
    assert lam21.degree == 1 and lam21.out_gens[0] == Mat.from_rows([[-1]])
    assert twist(sign(1, 2), TwistKind.VEE).is_trivial()
    for sp in (sign(1, 2), trivial(2, 1), regular_12(), from_generators(1, 3, [], STD)):
        assert check_double_vee(sp)
