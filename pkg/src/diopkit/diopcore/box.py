"""The box product of S-bimodules, in the collapsed two-colour model.

A basis element of (P1 [] P2)(m,n) is a reduced (m,n)-tree, a colouring of its
vertices by 1 (root side, first factor) and 2 (leaf side, second factor) such
that no directed path meets two vertices of the same colour, and one basis
vector of the reduced part of P_c at every vertex of colour c.  Identity
vertices of a saturated levelled tree are left implicit; each path meets each
level at most once, so there is exactly one way to put them back.

Factors are either presentations (their quotient slices are used) or plain
dimension tables ``{(a, b): dim}`` with the unit at (1,1) implied.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Sequence, Tuple, Union

from ..ratlin import Mat, rank
from ..trees import DiTree, UNIT, enumerate_trees, level_functions
from .free import Vec, canon_decorated
from .ideal import quotient_slice
from .presentation import Presentation

Factor = Union[Presentation, Mapping[Tuple[int, int], int]]
BoxKey = Tuple[DiTree, Tuple[int, ...], Tuple[int, ...]]

UNIT_TABLE: Dict[Tuple[int, int], int] = {}


def factor_dim(f: Factor, a: int, b: int) -> int:
    """dim of the augmentation ideal of the factor at (a,b)."""
    if (a, b) == (1, 1):
        return 0
    if isinstance(f, Presentation):
        return quotient_slice(f, a, b).dim
    return int(f.get((a, b), 0))


def tensor_table(a: Mapping[Tuple[int, int], int], b: Mapping[Tuple[int, int], int]) -> Dict[Tuple[int, int], int]:
    """Arity-wise tensor product of two dimension tables."""
    return {s: a[s] * b[s] for s in sorted(set(a) & set(b))}


def opposite_table(a: Mapping[Tuple[int, int], int]) -> Dict[Tuple[int, int], int]:
    return {(n, m): d for (m, n), d in sorted(a.items())}


@functools.lru_cache(maxsize=None)
def colourings(t: DiTree) -> Tuple[Tuple[int, ...], ...]:
    """Admissible colourings: strict 2-level maps plus the constant ones on antichains."""
    out = [lf.level for lf in level_functions(t, 2, strict=True)]
    for lf in level_functions(t, 1, strict=True):
        out.append(lf.level)
        out.append(tuple(2 for _ in lf.level))
    return tuple(sorted(out))


@dataclass
class BoxSlice:
    m: int
    n: int
    basis: List[BoxKey]

    @property
    def dim(self) -> int:
        return len(self.basis)


def box_slice(p1: Factor, p2: Factor, m: int, n: int) -> BoxSlice:
    if (m, n) == (1, 1):
        return BoxSlice(1, 1, [(UNIT, (), ())])
    factors = (p1, p2)
    basis: List[BoxKey] = []
    for t in enumerate_trees(m, n, "reduced"):
        shapes = t.shapes()
        for col in colourings(t):
            dims = [factor_dim(factors[c - 1], *s) for c, s in zip(col, shapes)]
            if 0 in dims:
                continue
            for deco in _product(dims):
                basis.append((t, col, deco))
    return BoxSlice(m, n, basis)


def _product(dims: Sequence[int]):
    if not dims:
        yield ()
        return
    for k in range(dims[0]):
        for rest in _product(dims[1:]):
            yield (k,) + rest


def box_dims(p1: Factor, p2: Factor, W: int) -> Dict[Tuple[int, int], int]:
    out = {}
    for w in range(W + 1):
        for m in range(1, w + 2):
            out[(m, w + 2 - m)] = box_slice(p1, p2, m, w + 2 - m).dim
    return out


def substitute(E, t: DiTree, pieces: Sequence[Mapping]) -> Vec:
    """Replace every vertex of ``t`` by a free element of the matching shape.

    Root k of a piece is glued to output slot k of its vertex and leaf k to
    input slot k, as for the ideal contexts.
    """
    out: Vec = {}
    terms = [(list(), (), Fraction(1), t.nedges)]
    for v, piece in enumerate(pieces):
        vo, vi = t.verts[v]
        nxt = []
        for raw, deco, c, off in terms:
            for (s, ds), x in piece.items():
                add = []
                for so, si in s.verts:
                    add.append((tuple(vo[-y - 1] if y < 0 else y + off for y in so),
                                tuple(vi[-y - 1] if y < 0 else y + off for y in si)))
                nxt.append((raw + add, deco + tuple(ds), c * x, off + s.nedges))
        terms = nxt
    for raw, deco, c, _ in terms:
        canon_decorated(E, t.m, t.n, raw, deco, c, out)
    return out


def assembly_matrix(p: Presentation, first: Presentation, second: Presentation, m: int, n: int) -> Mat:
    """Matrix of the composition map (first [] second)(m,n) -> p(m,n).

    Both factors must be sub-presentations of ``p`` sharing its generator spaces.
    """
    target = quotient_slice(p, m, n)
    bx = box_slice(first, second, m, n)
    factors = (first, second)
    ent = {}
    for col, (t, colour, deco) in enumerate(bx.basis):
        if t.is_unit():
            vec = {(UNIT, ()): Fraction(1)}
        else:
            pieces = []
            for v, (c, k) in enumerate(zip(colour, deco)):
                q = quotient_slice(factors[c - 1], *t.shape(v))
                pieces.append(q.lift({k: Fraction(1)}))
            vec = substitute(p.E, t, pieces)
        for r, x in target.project(vec).items():
            ent[(r, col)] = x
    return Mat(target.dim, bx.dim, ent)


def assembly_is_iso(p: Presentation, first: Presentation, second: Presentation, m: int, n: int) -> bool:
    a = assembly_matrix(p, first, second, m, n)
    return a.rows == a.cols and rank(a) == a.rows
