"""Cobar dual complexes D P(m,n).

The term with k internal edges is the sum over reduced (m,n)-trees T of the
tensor product of the duals of the reduced quotient at the vertices, twisted by
the orientation line of the edges; it sits in degree 3-m-n+k.  The
differential is the transpose of edge contraction followed by composition in
P.  We build the contraction map ``partial`` in the normal-form bases and
transpose it.

Orientation: T carries the wedge of its internal edges in canonical order.
Contracting e sends e ^ (rest) to (rest), so the sign is (-1)^(position of e)
times the parity of the surviving edges in the contracted tree's order.  Leaf
and root edges come after the internal ones and are never moved, so the Det
and det lines give the same signs.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from ..ratlin import ChainComplex, Mat, homology_dims
from ..sbimod import inverse_perm
from ..trees import DiTree, canonical_form, enumerate_trees, permutation_sign
from ..diopcore.box import substitute
from ..diopcore.free import WeightBoundError, free_slice
from ..diopcore.ideal import quotient_slice
from ..diopcore.presentation import Presentation

CobarKey = Tuple[DiTree, Tuple[int, ...]]


@dataclass
class CobarComplexSlice:
    """Basis per edge count, the complex in cohomological degrees, and its homology."""

    m: int
    n: int
    bases: Dict[int, List[CobarKey]]
    complex: ChainComplex
    _homology: Optional[Dict[int, int]] = field(default=None, repr=False)

    def degree(self, k: int) -> int:
        return 3 - self.m - self.n + k

    @property
    def homology(self) -> Dict[int, int]:
        if self._homology is None:
            self._homology = homology_dims(self.complex)
        return self._homology

    def h0(self) -> int:
        return self.homology.get(0, 0)


def _vertex_dims(p: Presentation, t: DiTree) -> List[int]:
    return [quotient_slice(p, a, b).dim for a, b in t.shapes()]


def cobar_basis(p: Presentation, m: int, n: int) -> Dict[int, List[CobarKey]]:
    out: Dict[int, List[CobarKey]] = {k: [] for k in range(m + n - 2)}
    for t in enumerate_trees(m, n, "reduced"):
        dims = _vertex_dims(p, t)
        if 0 in dims:
            continue
        for deco in _product(dims):
            out[t.nedges].append((t, deco))
    return out


def _product(dims):
    if not dims:
        yield ()
        return
    for k in range(dims[0]):
        for rest in _product(dims[1:]):
            yield (k,) + rest


@dataclass(frozen=True)
class _Contraction:
    tree: DiTree                   # contracted, canonical
    sign: int
    merged: int                    # canonical index of the merged vertex
    local: DiTree                  # the two-vertex subtree, labels = merged slots
    local_src: Tuple[int, int]     # (target vertex, source vertex) of the old edge in T'
    others: Tuple[Tuple[int, int, Tuple[int, ...], Tuple[int, ...]], ...]
    # (old vertex, new vertex, out_perm, in_perm) for untouched vertices


@functools.lru_cache(maxsize=None)
def contraction(t: DiTree, e: int) -> _Contraction:
    edges = t.edges()
    s, _, g, _ = edges[e]
    so, si = t.verts[s]
    go, gi = t.verts[g]
    merged = (go + tuple(x for x in so if x != e), si + tuple(x for x in gi if x != e))
    rest = [v for v in range(t.nverts) if v not in (s, g)]
    raw = [merged] + [t.verts[v] for v in rest]
    c = canonical_form(t.m, t.n, raw)
    survivors = [c.emap[x] for x in sorted(edges) if x != e]
    sign = (-1) ** e * permutation_sign(survivors)
    # slot k of the merged vertex in the contracted tree is raw slot out_perm[0][k]
    mo = [merged[0][k] for k in c.out_perm[0]]
    mi = [merged[1][k] for k in c.in_perm[0]]
    opos = {x: -(k + 1) for k, x in enumerate(mo)}
    ipos = {x: -(k + 1) for k, x in enumerate(mi)}
    loc_g = (tuple(opos[x] for x in go), tuple(0 if x == e else ipos[x] for x in gi))
    loc_s = (tuple(0 if x == e else opos[x] for x in so), tuple(ipos[x] for x in si))
    local = DiTree(len(mo), len(mi), (loc_g, loc_s))
    others = tuple((v, c.vmap[k + 1], c.out_perm[k + 1], c.in_perm[k + 1]) for k, v in enumerate(rest))
    return _Contraction(c.tree, sign, c.vmap[0], local, (g, s), others)


class _Transport:
    """Per-presentation caches of vertex re-concretization and local composition."""

    def __init__(self, p: Presentation):
        self.p = p
        self._slot: Dict[tuple, List[Dict[int, Fraction]]] = {}
        self._comp: Dict[tuple, Dict[int, Fraction]] = {}

    def slot_columns(self, shape, op, ip):
        key = (shape, op, ip)
        hit = self._slot.get(key)
        if hit is None:
            q = quotient_slice(self.p, *shape)
            if list(op) == sorted(op) and list(ip) == sorted(ip):
                hit = [{k: Fraction(1)} for k in range(q.dim)]
            else:
                hit = q.space().action(inverse_perm(tuple(op)), inverse_perm(tuple(ip))).col_dicts()
            self._slot[key] = hit
        return hit

    def compose_local(self, local: DiTree, kg: int, ks: int) -> Dict[int, Fraction]:
        key = (local, kg, ks)
        hit = self._comp.get(key)
        if hit is None:
            p = self.p
            qg = quotient_slice(p, *local.shape(0))
            qs = quotient_slice(p, *local.shape(1))
            vec = substitute(p.E, local, [qg.lift({kg: Fraction(1)}), qs.lift({ks: Fraction(1)})])
            hit = quotient_slice(p, local.m, local.n).project(vec)
            self._comp[key] = hit
        return hit


def edge_sign(t: DiTree, e: int, c: _Contraction) -> int:
    return c.sign


def vertex_sign(t: DiTree, e: int, c: _Contraction) -> int:
    """Odd vertices: bring the edge's target then source to the front, the rest in contracted order."""
    g, s = c.local_src
    rest = [v for v, _, _, _ in sorted(c.others, key=lambda x: x[1])]
    return permutation_sign([g, s] + rest)


def contraction_matrix(p: Presentation, src: List[CobarKey], tgt: List[CobarKey], tr: Optional[_Transport] = None,
                       sign=edge_sign) -> Mat:
    """Matrix of the map from trees with k+1 edges to trees with k edges.

    ``sign(t, e, contraction)`` orients each term; the cobar complex uses edge
    orientations, the Koszul dual coalgebra uses the order of odd vertices.
    """
    tr = tr or _Transport(p)
    index = {key: r for r, key in enumerate(tgt)}
    ent: Dict[Tuple[int, int], Fraction] = {}
    for col, (t, deco) in enumerate(src):
        for e in range(t.nedges):
            c = contraction(t, e)
            g, s = c.local_src
            local = tr.compose_local(c.local, deco[g], deco[s])
            if not local:
                continue
            parts: List[List[Tuple[int, int, Fraction]]] = []
            for v, w, op, ip in c.others:
                col_v = tr.slot_columns(t.shape(v), op, ip)[deco[v]]
                parts.append([(w, r, x) for r, x in col_v.items()])
            parts.append([(c.merged, r, x) for r, x in local.items()])
            for combo in _combos(parts):
                new = [0] * c.tree.nverts
                coeff = Fraction(sign(t, e, c))
                for w, r, x in combo:
                    new[w] = r
                    coeff *= x
                row = index[(c.tree, tuple(new))]
                y = ent.get((row, col), 0) + coeff
                if y:
                    ent[(row, col)] = y
                else:
                    ent.pop((row, col), None)
    return Mat(len(tgt), len(src), ent)


def _combos(parts):
    if not parts:
        yield ()
        return
    for item in parts[0]:
        for rest in _combos(parts[1:]):
            yield (item,) + rest


def cobar_slice(p: Presentation, m: int, n: int, max_weight: Optional[int] = None) -> CobarComplexSlice:
    if max_weight is not None and m + n - 2 > max_weight:
        raise WeightBoundError(f"({m},{n}) has weight {m + n - 2} > bound {max_weight}")
    if m + n < 3:
        raise ValueError("the cobar complex is defined for m + n >= 3")
    key = ("cobar", m, n)
    hit = p._cache.get(key)
    if hit is not None:
        return hit
    bases = cobar_basis(p, m, n)
    tr = _Transport(p)
    base = 3 - m - n
    dims = {base + k: len(b) for k, b in bases.items()}
    diffs = {}
    for k in range(m + n - 3):
        part = contraction_matrix(p, bases[k + 1], bases[k], tr)
        diffs[base + k] = part.T
    cx = ChainComplex(dims, diffs)
    if not cx.check_square_zero():
        raise AssertionError(f"cobar differential does not square to zero at ({m},{n})")
    out = CobarComplexSlice(m, n, bases, cx)
    p._cache[key] = out
    return out


def h0_check(p: Presentation, m: int, n: int, dual: Optional[Presentation] = None) -> bool:
    """H^0 of the cobar dual equals the quadratic dual, and the degree-0 term is the free dual slice."""
    from .dual import quadratic_dual
    dual = dual or quadratic_dual(p)
    cs = cobar_slice(p, m, n)
    top = cs.complex.dims.get(0, 0)
    if top != free_slice(dual.E, m, n).dim:
        return False
    return cs.h0() == quotient_slice(dual, m, n).dim
