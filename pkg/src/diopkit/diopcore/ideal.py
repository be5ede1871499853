"""Ideals generated by quadratic relations, and quotient slices.

The ideal (R)(m,n) is spanned by *contexts*: generator trees with one hole
vertex of a quadratic shape, into which a relation is plugged.  Since R is
bimodule-stable the way the hole's slots are numbered does not matter.
``fixpoint_sweep`` re-derives the same subspace by single grafts of
generators onto lower-weight ideal elements, as a cross-check.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from ..ratlin import Echelon, Mat, Subspace
from ..sbimod import SBimoduleSpace, from_action
from ..trees import DiTree, contract_edge, corolla, enumerate_trees
from .free import (GeneratorSet, Key, Vec, WeightBoundError, act, add_into, canon_decorated, compose,
                   free_slice)
from .presentation import QUADRATIC_SLOTS, Presentation


def hole_trees(E: GeneratorSet, m: int, n: int, hole: Tuple[int, int]) -> List[Tuple[DiTree, int]]:
    """Trees built from generator shapes plus exactly one vertex of shape ``hole``.

    Every such tree comes from a generator tree by contracting one internal
    edge (expand the hole into two generators), which is much cheaper than
    enumerating trees over the enlarged shape set.
    """
    return _hole_trees(E.shapes, m, n, hole)


@functools.lru_cache(maxsize=None)
def _hole_trees(shapes, m, n, hole):
    if (m, n) == hole:
        return [(corolla(m, n), 0)]
    seen = {}
    for t in enumerate_trees(m, n, shapes):
        for e in range(t.nedges):
            c, h, _ = contract_edge(t, e)
            if c.shape(h) == hole and (c, h) not in seen:
                seen[(c, h)] = None
    return sorted(seen, key=lambda x: (x[0].encode(), x[1]))


def plug(E: GeneratorSet, t: DiTree, h: int, deco: Tuple[int, ...], r: Mapping[Key, Fraction],
         out: Optional[Vec] = None) -> Vec:
    """Substitute the element ``r`` for vertex ``h`` of ``t``.

    ``deco`` decorates the other vertices (in order, skipping ``h``).  Root k
    of each tree of ``r`` is glued to output slot k of ``h``, leaf k to input slot k.
    """
    if out is None:
        out = {}
    hout, hin = t.verts[h]
    base = [vv for v, vv in enumerate(t.verts) if v != h]
    off = t.nedges
    for (s, ds), c in r.items():
        raw = list(base)
        for so, si in s.verts:
            raw.append((tuple(hout[-x - 1] if x < 0 else x + off for x in so),
                        tuple(hin[-x - 1] if x < 0 else x + off for x in si)))
        canon_decorated(E, t.m, t.n, raw, tuple(deco) + tuple(ds), c, out)
    return out


def context_vectors(p: Presentation, m: int, n: int):
    """Yield the spanning vectors of the ideal at (m,n) as sparse index rows."""
    E = p.E
    sl = free_slice(E, m, n)
    for hole in QUADRATIC_SLOTS:
        if hole[0] > m or hole[1] > n:
            continue
        rels = p.relation_vectors(hole)
        if not rels:
            continue
        for t, h in hole_trees(E, m, n, hole):
            dims = [E[s].dim for v, s in enumerate(t.shapes()) if v != h]
            for deco in itertools.product(*(range(d) for d in dims)):
                for r in rels:
                    v = plug(E, t, h, deco, r)
                    if v:
                        yield sl.to_sparse(v)


@dataclass
class QuotientSlice:
    """P(m,n) = F(E)(m,n) / (R)(m,n) with a normal-form basis.

    ``normal`` lists free-basis indices whose images form a basis of the
    quotient; ``project`` reduces a free vector to normal-form coordinates.
    """

    presentation: Presentation
    m: int
    n: int
    ideal: Echelon
    normal: List[int]
    _pos: Dict[int, int] = field(default_factory=dict, repr=False)
    _space: Optional[SBimoduleSpace] = field(default=None, repr=False)

    def __post_init__(self):
        self._pos = {c: k for k, c in enumerate(self.normal)}

    @property
    def free(self):
        return free_slice(self.presentation.E, self.m, self.n)

    @property
    def dim(self) -> int:
        return len(self.normal)

    @property
    def ideal_dim(self) -> int:
        return self.ideal.rank

    def basis_keys(self) -> List[Key]:
        keys = self.free.keys
        return [keys[c] for c in self.normal]

    def project_sparse(self, row: Mapping[int, Fraction]) -> Dict[int, Fraction]:
        rem = self.ideal.project(row)
        return {self._pos[c]: v for c, v in rem.items()}

    def project(self, v: Mapping[Key, Fraction]) -> Dict[int, Fraction]:
        """Normal-form coordinates of a free element."""
        return self.project_sparse(self.free.to_sparse(v))

    def lift(self, coords: Mapping[int, Fraction]) -> Vec:
        keys = self.free.keys
        return {keys[self.normal[k]]: Fraction(c) for k, c in coords.items() if c}

    def ideal_subspace(self) -> Subspace:
        return Subspace.from_rref(self.free.dim, self.ideal.rref_rows())

    def space(self) -> SBimoduleSpace:
        """The quotient as an (S_m, S_n)-bimodule in the normal-form basis."""
        if self._space is None:
            E = self.presentation.E

            def mat(pi, sigma):
                ent = {}
                for k, key in enumerate(self.basis_keys()):
                    for r, c in self.project(act(E, pi, sigma, {key: Fraction(1)})).items():
                        ent[(r, k)] = c
                return Mat(self.dim, self.dim, ent)

            self._space = from_action(self.m, self.n, self.dim, mat, name=f"{self.presentation.name}({self.m},{self.n})")
        return self._space


def quotient_slice(p: Presentation, m: int, n: int, max_weight: Optional[int] = None) -> QuotientSlice:
    if max_weight is not None and m + n - 2 > max_weight:
        raise WeightBoundError(f"({m},{n}) has weight {m + n - 2} > bound {max_weight}")
    key = ("quotient", m, n)
    hit = p._cache.get(key)
    if hit is not None:
        return hit
    sl = free_slice(p.E, m, n)
    ech = Echelon(sl.dim)
    if m + n - 2 >= 2:
        rows = list(context_vectors(p, m, n))
        rows.sort(key=lambda r: (len(r), sorted(r)))
        for row in rows:
            if len(ech) == sl.dim:
                break
            ech.add(row)
    piv = set(ech.pivot_row)
    normal = [c for c in range(sl.dim) if c not in piv]
    q = QuotientSlice(p, m, n, ech, normal)
    p._cache[key] = q
    return q


def ideal_slice(p: Presentation, m: int, n: int, max_weight: Optional[int] = None) -> Subspace:
    return quotient_slice(p, m, n, max_weight).ideal_subspace()


def ideal_closure(p: Presentation, W: int) -> Dict[Tuple[int, int], Subspace]:
    if W < 2:
        raise ValueError("weight bound must be at least 2")
    out = {}
    for w in range(0, W + 1):
        for m in range(1, w + 2):
            n = w + 2 - m
            out[(m, n)] = ideal_slice(p, m, n)
    return out


def quotient_dims(p: Presentation, W: int) -> Dict[Tuple[int, int], int]:
    out = {}
    for w in range(0, W + 1):
        for m in range(1, w + 2):
            n = w + 2 - m
            out[(m, n)] = quotient_slice(p, m, n).dim
    return out


def fixpoint_sweep(p: Presentation, m: int, n: int) -> bool:
    """Check that (R)(m,n) equals R plus all single generator grafts of lower ideal slices.

    Also checks bimodule stability of the computed slice.
    """
    E = p.E
    target = quotient_slice(p, m, n)
    sl = free_slice(E, m, n)
    built = Echelon(sl.dim)
    if (m, n) in QUADRATIC_SLOTS:
        for v in p.relation_vectors((m, n)):
            built.add(sl.to_sparse(v))
    gens = [(s, k) for s in E.shapes for k in range(E[s].dim)]
    for (a, b), k in gens:
        g = E.generator((a, b), k)
        # ideal element x of arity (m2, n2) with generator on the root side or the leaf side
        m2, n2 = m - a + 1, n - b + 1
        if m2 < 1 or n2 < 1 or m2 + n2 - 2 < 2:
            continue
        lower = quotient_slice(p, m2, n2)
        lsl = free_slice(E, m2, n2)
        for row in lower.ideal.pivot_row.values():
            x = lsl.from_sparse({c: Fraction(v) for c, v in row.items()})
            for i in range(1, b + 1):
                for j in range(1, m2 + 1):
                    built.add(sl.to_sparse(compose(E, g, i, j, x)))
            for i in range(1, n2 + 1):
                for j in range(1, a + 1):
                    built.add(sl.to_sparse(compose(E, x, i, j, g)))
    # close under the bimodule action
    from ..sbimod import identity_perm, transposition
    moves = [(transposition(m, i), identity_perm(n)) for i in range(m - 1)]
    moves += [(identity_perm(m), transposition(n, i)) for i in range(n - 1)]
    queue = list(built.pivot_row.values())
    while queue:
        row = queue.pop()
        x = sl.from_sparse({c: Fraction(v) for c, v in row.items()})
        for pi, sg in moves:
            y = sl.to_sparse(act(E, pi, sg, x))
            if built.add(y) is not None:
                queue.append(y)
    if built.rank != target.ideal.rank:
        return False
    if not all(target.ideal.contains(r) for r in built.pivot_row.values()):
        return False
    # the computed slice is itself bimodule-stable
    for row in target.ideal.pivot_row.values():
        x = sl.from_sparse({c: Fraction(v) for c, v in row.items()})
        for pi, sg in moves:
            if not target.ideal.contains(sl.to_sparse(act(E, pi, sg, x))):
                return False
    return True


def quotient_compose(p: Presentation, a: Mapping[int, Fraction], arity_a: Tuple[int, int], i: int, j: int,
                     b: Mapping[int, Fraction], arity_b: Tuple[int, int]) -> Dict[int, Fraction]:
    """Compose normal-form coordinate vectors and reduce the result."""
    qa = quotient_slice(p, *arity_a)
    qb = quotient_slice(p, *arity_b)
    c = compose(p.E, qa.lift(a), i, j, qb.lift(b))
    m, n = arity_a[0] + arity_b[0] - 1, arity_a[1] + arity_b[1] - 1
    return quotient_slice(p, m, n).project(c)
