"""Free dioperads on decorated trees.

An element of a free slice is a sparse vector ``{(tree, deco): coeff}`` where
``tree`` is a canonical DiTree and ``deco`` holds one basis index of the
generator space per vertex (in canonical vertex order, read in the stored
slot order of each vertex).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..ratlin import Mat
from ..sbimod import Perm, SBimoduleSpace, identity_perm, inverse_perm
from ..trees import Canon, DiTree, UNIT, Vertex, canonical_form, corolla, enumerate_trees, graft_raw, relabel

Key = Tuple[DiTree, Tuple[int, ...]]
Vec = Dict[Key, Fraction]


class WeightBoundError(ValueError):
    pass


class ArityError(IndexError):
    pass


class GeneratorSet:
    """Generator spaces by shape, with optional basis names.

    Shapes with a zero-dimensional space are treated as absent.  Instances are
    compared by identity; derived data is memoized on the instance.
    """

    def __init__(self, spaces: Mapping[Tuple[int, int], SBimoduleSpace],
                 names: Optional[Mapping[Tuple[int, int], Sequence[str]]] = None):
        self.spaces: Dict[Tuple[int, int], SBimoduleSpace] = {s: sp for s, sp in spaces.items() if sp.dim > 0}
        for s, sp in self.spaces.items():
            if s != sp.arity:
                raise ValueError(f"space {sp} filed under shape {s}")
            if s == (1, 1):
                raise ValueError("generators of shape (1,1) are not allowed")
        self.names = {s: tuple(names[s]) if names and s in names else
                      tuple(f"{sp.name or 'g'}{k}" for k in range(sp.dim)) for s, sp in self.spaces.items()}
        self._slot_cache: Dict[tuple, List[Dict[int, Fraction]]] = {}
        self._slices: Dict[Tuple[int, int], "FreeSlice"] = {}

    @property
    def shapes(self) -> frozenset:
        return frozenset(self.spaces)

    def get(self, shape, default=None):
        return self.spaces.get(shape, default)

    def __getitem__(self, shape):
        return self.spaces[shape]

    def __contains__(self, shape):
        return shape in self.spaces

    def slot_columns(self, shape: Tuple[int, int], out_perm: Sequence[int], in_perm: Sequence[int]) -> List[Dict[int, Fraction]]:
        """Columns of the matrix re-expressing a decoration after the vertex slots are permuted.

        ``out_perm[k]`` is the old slot now sitting at position ``k``.
        """
        key = (shape, tuple(out_perm), tuple(in_perm))
        hit = self._slot_cache.get(key)
        if hit is None:
            sp = self.spaces[shape]
            if list(out_perm) == sorted(out_perm) and list(in_perm) == sorted(in_perm):
                hit = [{k: Fraction(1)} for k in range(sp.dim)]
            else:
                hit = sp.action(inverse_perm(tuple(out_perm)), inverse_perm(tuple(in_perm))).col_dicts()
            self._slot_cache[key] = hit
        return hit

    def generator(self, shape: Tuple[int, int], k: int = 0) -> Vec:
        """The k-th basis generator of the given shape as a one-vertex element."""
        return {(corolla(*shape), (k,)): Fraction(1)}


@dataclass
class FreeSlice:
    m: int
    n: int
    keys: List[Key]
    index: Dict[Key, int]
    trees: List[DiTree]

    @property
    def dim(self) -> int:
        return len(self.keys)

    def to_sparse(self, v: Mapping[Key, Fraction]) -> Dict[int, Fraction]:
        return {self.index[k]: c for k, c in v.items() if c}

    def from_sparse(self, row: Mapping[int, Fraction]) -> Vec:
        return {self.keys[i]: Fraction(c) for i, c in row.items() if c}


def free_slice(E: GeneratorSet, m: int, n: int, max_weight: Optional[int] = None) -> FreeSlice:
    if max_weight is not None and m + n - 2 > max_weight:
        raise WeightBoundError(f"({m},{n}) has weight {m + n - 2} > bound {max_weight}")
    hit = E._slices.get((m, n))
    if hit is not None:
        return hit
    if (m, n) == (1, 1):
        trees = [UNIT]
    elif not E.shapes:
        trees = []
    else:
        trees = enumerate_trees(m, n, E.shapes)
    keys: List[Key] = []
    for t in trees:
        dims = [E[s].dim for s in t.shapes()]
        for deco in itertools.product(*(range(d) for d in dims)):
            keys.append((t, deco))
    sl = FreeSlice(m, n, keys, {k: i for i, k in enumerate(keys)}, trees)
    E._slices[(m, n)] = sl
    return sl


def arity_of(v: Mapping[Key, Fraction]) -> Optional[Tuple[int, int]]:
    for (t, _) in v:
        return (t.m, t.n)
    return None


# ---------------------------------------------------------------------------
# canonicalizing decorated raw trees


def transport_deco(E: GeneratorSet, c: Canon, raw: Sequence[Vertex], deco: Sequence[int],
                   coeff: Fraction, out: Vec) -> None:
    """Add ``coeff`` times the canonical image of a raw decorated tree to ``out``."""
    k = len(raw)
    inv = [0] * k
    for v, w in enumerate(c.vmap):
        inv[w] = v
    per_vertex = []
    for w in range(k):
        v = inv[w]
        outs, ins = raw[v]
        col = E.slot_columns((len(outs), len(ins)), c.out_perm[v], c.in_perm[v])[deco[v]]
        per_vertex.append(col)
    if all(len(col) == 1 for col in per_vertex):
        new = []
        x = coeff
        for col in per_vertex:
            (r, y), = col.items()
            new.append(r)
            x *= y
        key = (c.tree, tuple(new))
        s = out.get(key, 0) + x
        if s:
            out[key] = s
        else:
            out.pop(key, None)
        return
    for combo in itertools.product(*(list(col.items()) for col in per_vertex)):
        x = coeff
        new = []
        for r, y in combo:
            new.append(r)
            x *= y
        key = (c.tree, tuple(new))
        s = out.get(key, 0) + x
        if s:
            out[key] = s
        else:
            out.pop(key, None)


def canon_decorated(E: GeneratorSet, m: int, n: int, raw: Sequence[Vertex], deco: Sequence[int],
                    coeff: Fraction = Fraction(1), out: Optional[Vec] = None) -> Vec:
    if out is None:
        out = {}
    c = canonical_form(m, n, raw)
    transport_deco(E, c, raw, deco, coeff, out)
    return out


def add_into(acc: Vec, v: Mapping[Key, Fraction], s=1) -> Vec:
    for k, c in v.items():
        x = acc.get(k, 0) + s * c
        if x:
            acc[k] = x
        else:
            acc.pop(k, None)
    return acc


def scale(v: Mapping[Key, Fraction], s) -> Vec:
    s = Fraction(s)
    return {k: c * s for k, c in v.items()} if s else {}


# ---------------------------------------------------------------------------
# composition and action


def compose(E: GeneratorSet, a: Mapping[Key, Fraction], i: int, j: int, b: Mapping[Key, Fraction]) -> Vec:
    """a _i o_j b: output j of b feeds input i of a (bilinear)."""
    out: Vec = {}
    for (t1, d1), c1 in a.items():
        if not 1 <= i <= t1.n:
            raise ArityError(f"input index {i} outside 1..{t1.n}")
        for (t2, d2), c2 in b.items():
            if not 1 <= j <= t2.m:
                raise ArityError(f"output index {j} outside 1..{t2.m}")
            m, n, raw, split, _ = graft_raw(t1, i, j, t2)
            if t1.is_unit():
                deco = d2
            elif t2.is_unit():
                deco = d1
            else:
                deco = d1 + d2
            canon_decorated(E, m, n, raw, deco, c1 * c2, out)
    return out


def act(E: GeneratorSet, pi: Perm, sigma: Perm, a: Mapping[Key, Fraction]) -> Vec:
    """(pi, sigma) relabels root k as pi(k) and leaf k as sigma(k) (0-based tuples)."""
    out: Vec = {}
    for (t, d), c in a.items():
        if len(pi) != t.m or len(sigma) != t.n:
            raise ArityError("permutation sizes do not match")
        if t.is_unit():
            add_into(out, {(t, d): c})
            continue
        rmap = {k + 1: pi[k] + 1 for k in range(t.m)}
        lmap = {k + 1: sigma[k] + 1 for k in range(t.n)}
        raw = [(tuple(-rmap[-x] if x < 0 else x for x in o), tuple(-lmap[-x] if x < 0 else x for x in i))
               for o, i in t.verts]
        canon_decorated(E, t.m, t.n, raw, d, c, out)
    return out


def unit() -> Vec:
    return {(UNIT, ()): Fraction(1)}


def slice_action_space(E: GeneratorSet, m: int, n: int) -> SBimoduleSpace:
    """The free slice as an (S_m, S_n)-bimodule in its tree basis."""
    sl = free_slice(E, m, n)
    from ..sbimod import from_action

    def mat(pi, sigma):
        cols = {}
        for idx, key in enumerate(sl.keys):
            img = act(E, pi, sigma, {key: Fraction(1)})
            for k2, c in img.items():
                cols[(sl.index[k2], idx)] = c
        return Mat(sl.dim, sl.dim, cols)

    return from_action(m, n, sl.dim, mat, name=f"F({m},{n})")
