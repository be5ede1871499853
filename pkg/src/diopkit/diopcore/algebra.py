"""Checking whether maps on a vector space V make V a P-algebra.

A decorated tree evaluates to a map V^{(x)n} -> V^{(x)m} by contracting the
generator maps along its edges: the tensor network is read directly off the
labels, so the result is the image of the tree under the morphism
F(E) -> End_V.  V is a P-algebra iff every relation evaluates to zero.

Matrix conventions: a generator of shape (a,b) is a (dim^a x dim^b) matrix;
the input basis index of x_{i1} (x) ... (x) x_{ib} is i1*dim^(b-1) + ... + ib,
and likewise for outputs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Sequence, Tuple

from ..ratlin import Mat
from ..sbimod import all_perms, identity_perm
from ..trees import DiTree, corolla
from .free import Vec, act
from .presentation import QUADRATIC_SLOTS, Presentation


class AlgebraShapeError(ValueError):
    pass


Maps = Mapping[Tuple[Tuple[int, int], int], Mat]


def _digits(x: int, base: int, width: int) -> Tuple[int, ...]:
    out = []
    for _ in range(width):
        out.append(x % base)
        x //= base
    return tuple(reversed(out))


def _index(digits: Sequence[int], base: int) -> int:
    x = 0
    for d in digits:
        x = x * base + d
    return x


def evaluate_tree(t: DiTree, deco: Sequence[int], maps: Maps, dim: int) -> Mat:
    """The map V^{(x)n} -> V^{(x)m} of a (possibly non-canonical) decorated tree."""
    if t.is_unit():
        return Mat.identity(dim)
    edges = t.edges()
    # leaves first: a vertex is ready once all its internal inputs are computed
    done, order = set(), []
    while len(order) < t.nverts:
        for v, (_, ins) in enumerate(t.verts):
            if v not in done and all(x < 0 or edges[x][0] in done for x in ins):
                done.add(v)
                order.append(v)
    cols = {(v, k): maps[(t.shape(v), deco[v])].col_dicts() for v, k in ((v, 0) for v in range(t.nverts))}
    ent: Dict[Tuple[int, int], Fraction] = {}
    for col in range(dim ** t.n):
        leaves = _digits(col, dim, t.n)
        states = {(): Fraction(1)}
        keys: Tuple[int, ...] = ()
        # a state assigns basis indices to the open edges and roots listed in ``keys``
        for v in order:
            outs, ins = t.verts[v]
            a = len(outs)
            vcols = cols[(v, 0)]
            new_states: Dict[tuple, Fraction] = {}
            pos = {x: i for i, x in enumerate(keys)}
            consumed = {x for x in ins if x >= 0}
            rest = [x for x in keys if x not in consumed]
            new_keys = tuple(rest) + tuple(x if x >= 0 else ("root", -x) for x in outs)
            for st, c in states.items():
                idx = [leaves[-x - 1] if x < 0 else st[pos[x]] for x in ins]
                for r, y in vcols[_index(idx, dim)].items():
                    nst = tuple(st[pos[x]] for x in rest) + _digits(r, dim, a)
                    new_states[nst] = new_states.get(nst, 0) + c * y
            states = {s: c for s, c in new_states.items() if c}
            keys = new_keys
        rpos = {x: i for i, x in enumerate(keys)}
        for st, c in states.items():
            row = _index([st[rpos[("root", k + 1)]] for k in range(t.m)], dim)
            ent[(row, col)] = ent.get((row, col), 0) + c
    return Mat(dim ** t.m, dim ** t.n, {k: v for k, v in ent.items() if v})


def evaluate(v: Mapping, maps: Maps, dim: int, arity: Tuple[int, int]) -> Mat:
    m, n = arity
    total = Mat.zero(dim ** m, dim ** n)
    for (t, d), c in v.items():
        total = total + evaluate_tree(t, d, maps, dim).scale(c)
    return total


@dataclass
class AlgebraVerdict:
    morphism: bool
    violated: List[str] = field(default_factory=list)
    equivariant: bool = True
    asymmetric: List[str] = field(default_factory=list)


def _check_shapes(p: Presentation, maps: Maps, dim: int) -> None:
    for shape, sp in p.E.spaces.items():
        for k in range(sp.dim):
            mat = maps.get((shape, k))
            if mat is None:
                raise AlgebraShapeError(f"no map for generator {p.E.names[shape][k]}")
            if mat.shape != (dim ** shape[0], dim ** shape[1]):
                raise AlgebraShapeError(f"map for {p.E.names[shape][k]} has shape {mat.shape}, "
                                        f"expected {(dim ** shape[0], dim ** shape[1])}")


def check_algebra(p: Presentation, dim: int, maps: Maps) -> AlgebraVerdict:
    """Evaluate every spanning relation of p on V = Q^dim."""
    _check_shapes(p, maps, dim)
    asym = []
    for shape, sp in p.E.spaces.items():
        for k in range(sp.dim):
            c = corolla(*shape)
            for pi in all_perms(shape[0]):
                for sg in all_perms(shape[1]):
                    rl = {i + 1: pi[i] + 1 for i in range(shape[0])}
                    ll = {i + 1: sg[i] + 1 for i in range(shape[1])}
                    raw = DiTree(shape[0], shape[1], ((tuple(-rl[-x] for x in c.verts[0][0]),
                                                       tuple(-ll[-x] for x in c.verts[0][1])),))
                    lhs = evaluate_tree(raw, (k,), maps, dim)
                    rhs = evaluate(act(p.E, pi, sg, {(c, (k,)): Fraction(1)}), maps, dim, shape)
                    if lhs != rhs:
                        asym.append(p.E.names[shape][k])
                        break
                else:
                    continue
                break
    violated = []
    if p.named:
        for r in p.named:
            if not evaluate(r.vec, maps, dim, r.slot).is_zero():
                violated.append(r.name)
    else:
        for slot in QUADRATIC_SLOTS:
            for k, v in enumerate(p.relation_vectors(slot)):
                if not evaluate(v, maps, dim, slot).is_zero():
                    violated.append(f"R{slot[0]}{slot[1]}[{k}]")
    return AlgebraVerdict(not violated and not asym, violated, not asym, sorted(set(asym)))


def bialgebra_maps(p: Presentation, dim: int, bracket: Mat, cobracket: Mat) -> Dict[Tuple[Tuple[int, int], int], Mat]:
    """Maps for a presentation with one generator in each of (1,2) and (2,1)."""
    out = {}
    if (1, 2) in p.E:
        out[((1, 2), 0)] = bracket
    if (2, 1) in p.E:
        out[((2, 1), 0)] = cobracket
    return out
