"""Labeled directed (m,n)-trees.

A tree is stored as a tuple of vertices; each vertex is ``(outs, ins)``, two
tuples of slot tokens.  A token ``t >= 0`` is an internal edge id; a negative
token ``-k`` is root ``k`` when it sits in ``outs`` and leaf ``k`` when it sits
in ``ins``.  Edges point from the leaf side to the root side: edge ``e``
leaves the vertex listing it in ``outs`` and enters the vertex listing it in
``ins``.

Canonical form
    * vertices are numbered by a depth-first traversal from the vertex that
      carries root 1, visiting outputs before inputs; within each side a slot
      ranks by the smallest external label beyond it (root labels for
      outputs, leaf labels for inputs);
    * internal edges are numbered in order of discovery during that
      traversal.  This is the canonical edge order used for orientations;
    * the stored slots of a vertex list internal edges by canonical id, then
      external slots by label.  Vertex decorations are read in this order.

Text encoding (``encode``)::

    (m,n)|r1,e0:e1,l3|e0:l1,l2|...

one ``outs:ins`` block per vertex in canonical order; the unit strand is ``(1,1)|``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

Vertex = Tuple[Tuple[int, ...], Tuple[int, ...]]


class MalformedTree(ValueError):
    pass


@dataclass(frozen=True)
class DiTree:
    m: int
    n: int
    verts: Tuple[Vertex, ...] = ()

    @property
    def nverts(self) -> int:
        return len(self.verts)

    @property
    def nedges(self) -> int:
        return max(len(self.verts) - 1, 0)

    @property
    def weight(self) -> int:
        return self.m + self.n - 2

    def shape(self, v: int) -> Tuple[int, int]:
        o, i = self.verts[v]
        return (len(o), len(i))

    def shapes(self) -> Tuple[Tuple[int, int], ...]:
        return tuple((len(o), len(i)) for o, i in self.verts)

    def is_unit(self) -> bool:
        return not self.verts

    def edges(self) -> Dict[int, Tuple[int, int, int, int]]:
        """edge id -> (source vertex, out slot, target vertex, in slot)."""
        src: Dict[int, Tuple[int, int]] = {}
        tgt: Dict[int, Tuple[int, int]] = {}
        for v, (outs, ins) in enumerate(self.verts):
            for k, t in enumerate(outs):
                if t >= 0:
                    src[t] = (v, k)
            for k, t in enumerate(ins):
                if t >= 0:
                    tgt[t] = (v, k)
        return {e: src[e] + tgt[e] for e in src}

    def root_vertex(self, label: int) -> Tuple[int, int]:
        for v, (outs, _) in enumerate(self.verts):
            for k, t in enumerate(outs):
                if t == -label:
                    return v, k
        raise KeyError(label)

    def leaf_vertex(self, label: int) -> Tuple[int, int]:
        for v, (_, ins) in enumerate(self.verts):
            for k, t in enumerate(ins):
                if t == -label:
                    return v, k
        raise KeyError(label)

    def encode(self) -> str:
        return encode(self)

    def __str__(self) -> str:
        return encode(self)


UNIT = DiTree(1, 1, ())


def encode(t: DiTree) -> str:
    def tok(x: int, outs: bool) -> str:
        if x >= 0:
            return f"e{x}"
        return f"r{-x}" if outs else f"l{-x}"

    parts = [f"({t.m},{t.n})"]
    for outs, ins in t.verts:
        parts.append(",".join(tok(x, True) for x in outs) + ":" + ",".join(tok(x, False) for x in ins))
    if not t.verts:
        parts.append("")
    return "|".join(parts)


def decode(text: str) -> DiTree:
    head, *rest = text.split("|")
    m, n = (int(x) for x in head.strip("()").split(","))
    verts = []
    for block in rest:
        if not block:
            continue
        o, i = block.split(":")

        def parse(s: str) -> Tuple[int, ...]:
            out = []
            for x in s.split(","):
                if x[0] == "e":
                    out.append(int(x[1:]))
                else:
                    out.append(-int(x[1:]))
            return tuple(out)

        verts.append((parse(o), parse(i)))
    t = DiTree(m, n, tuple(verts))
    validate(t)
    return t


def corolla(m: int, n: int) -> DiTree:
    if (m, n) == (1, 1):
        raise MalformedTree("a (1,1) vertex is not a corolla; use UNIT")
    return DiTree(m, n, ((tuple(-k for k in range(1, m + 1)), tuple(-k for k in range(1, n + 1))),))


# ---------------------------------------------------------------------------
# validation and canonical form


def validate(t: DiTree) -> None:
    if t.m < 1 or t.n < 1:
        raise MalformedTree("m, n must be positive")
    if not t.verts:
        if (t.m, t.n) != (1, 1):
            raise MalformedTree("only the (1,1) tree may have no vertices")
        return
    _check_raw(t.m, t.n, t.verts)


def _check_raw(m: int, n: int, verts: Sequence[Vertex]) -> None:
    roots, leaves, src, tgt = [], [], {}, {}
    for v, (outs, ins) in enumerate(verts):
        if not outs or not ins:
            raise MalformedTree(f"vertex {v} needs at least one input and one output")
        for t in outs:
            if t >= 0:
                if t in src:
                    raise MalformedTree(f"edge {t} leaves two vertices")
                src[t] = v
            else:
                roots.append(-t)
        for t in ins:
            if t >= 0:
                if t in tgt:
                    raise MalformedTree(f"edge {t} enters two vertices")
                tgt[t] = v
            else:
                leaves.append(-t)
    if sorted(roots) != list(range(1, m + 1)):
        raise MalformedTree(f"root labels {sorted(roots)} are not 1..{m}")
    if sorted(leaves) != list(range(1, n + 1)):
        raise MalformedTree(f"leaf labels {sorted(leaves)} are not 1..{n}")
    if set(src) != set(tgt):
        raise MalformedTree("dangling internal edge")
    if len(src) != len(verts) - 1:
        raise MalformedTree("not a tree: wrong edge count")
    adj: Dict[int, List[int]] = {v: [] for v in range(len(verts))}
    for e in src:
        if src[e] == tgt[e]:
            raise MalformedTree("loop edge")
        adj[src[e]].append(tgt[e])
        adj[tgt[e]].append(src[e])
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(verts):
        raise MalformedTree("not connected")


@dataclass(frozen=True)
class Canon:
    """Result of canonicalizing a raw tree.

    ``vmap[v]`` is the canonical index of raw vertex ``v``; ``emap`` maps raw edge
    ids to canonical ones; ``out_perm[v][k]`` / ``in_perm[v][k]`` is the raw slot
    index that lands in canonical slot ``k`` of raw vertex ``v``.
    """

    tree: DiTree
    vmap: Tuple[int, ...]
    emap: Dict[int, int]
    out_perm: Tuple[Tuple[int, ...], ...]
    in_perm: Tuple[Tuple[int, ...], ...]


def canonical_form(m: int, n: int, verts: Sequence[Vertex], check: bool = False) -> Canon:
    if check:
        _check_raw(m, n, verts) if verts else validate(DiTree(m, n, ()))
    nv = len(verts)
    if nv == 0:
        return Canon(DiTree(m, n, ()), (), {}, (), ())
    src: Dict[int, int] = {}
    tgt: Dict[int, int] = {}
    start = -1
    for v, (outs, ins) in enumerate(verts):
        for t in outs:
            if t >= 0:
                src[t] = v
            elif t == -1:
                start = v
        for t in ins:
            if t >= 0:
                tgt[t] = v
    if start < 0:
        raise MalformedTree("no root labelled 1")

    memo: Dict[Tuple[int, int], Tuple[int, int]] = {}
    big = m + n + 1

    def side(v: int, excl: int) -> Tuple[int, int]:
        # (min leaf, min root) of the component of v once edge excl is removed
        key = (v, excl)
        r = memo.get(key)
        if r is not None:
            return r
        outs, ins = verts[v]
        ml = mr = big
        for t in outs:
            if t < 0:
                if -t < mr:
                    mr = -t
            elif t != excl:
                a, b = side(tgt[t], t)
                ml = min(ml, a)
                mr = min(mr, b)
        for t in ins:
            if t < 0:
                if -t < ml:
                    ml = -t
            elif t != excl:
                a, b = side(src[t], t)
                ml = min(ml, a)
                mr = min(mr, b)
        memo[key] = (ml, mr)
        return ml, mr

    out_order: List[Tuple[int, ...]] = []
    in_order: List[Tuple[int, ...]] = []
    for v, (outs, ins) in enumerate(verts):
        if len(outs) == 1:
            out_order.append((0,))
        else:
            ok = [(-t if t < 0 else side(tgt[t], t)[1]) for t in outs]
            out_order.append(tuple(sorted(range(len(outs)), key=ok.__getitem__)))
        if len(ins) == 1:
            in_order.append((0,))
        else:
            ik = [(-t if t < 0 else side(src[t], t)[0]) for t in ins]
            in_order.append(tuple(sorted(range(len(ins)), key=ik.__getitem__)))

    # recursive preorder walk; vertices and edges numbered on discovery
    emap: Dict[int, int] = {}
    vorder: List[int] = []
    seen = [False] * nv

    def walk(v: int) -> None:
        seen[v] = True
        vorder.append(v)
        outs, ins = verts[v]
        for k in out_order[v]:
            t = outs[k]
            if t >= 0 and t not in emap:
                emap[t] = len(emap)
                if not seen[tgt[t]]:
                    walk(tgt[t])
        for k in in_order[v]:
            t = ins[k]
            if t >= 0 and t not in emap:
                emap[t] = len(emap)
                if not seen[src[t]]:
                    walk(src[t])

    walk(start)
    if len(vorder) != nv:
        raise MalformedTree("not connected")
    vmap = [0] * nv
    for i, v in enumerate(vorder):
        vmap[v] = i
    # stored slot order: internal edges by canonical id, then external labels
    def order(side: Sequence[int]) -> Tuple[int, ...]:
        if len(side) == 1:
            return (0,)
        keys = [emap[t] if t >= 0 else big - t for t in side]
        return tuple(sorted(range(len(side)), key=keys.__getitem__))

    out_perm, in_perm = [], []
    for v in range(nv):
        outs, ins = verts[v]
        out_perm.append(order(outs))
        in_perm.append(order(ins))
    new_verts = []
    for v in vorder:
        outs, ins = verts[v]
        new_verts.append((
            tuple(outs[k] if outs[k] < 0 else emap[outs[k]] for k in out_perm[v]),
            tuple(ins[k] if ins[k] < 0 else emap[ins[k]] for k in in_perm[v]),
        ))
    return Canon(DiTree(m, n, tuple(new_verts)), tuple(vmap), emap,
                 tuple(out_perm), tuple(in_perm))


def permutation_sign(perm: Sequence[int]) -> int:
    """Sign of a permutation given as a sequence of distinct sortable items."""
    seq = list(perm)
    pos = {x: i for i, x in enumerate(sorted(seq))}
    p = [pos[x] for x in seq]
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def canonicalize(t: DiTree, edge_order: Optional[Sequence[int]] = None) -> Tuple[DiTree, int]:
    """Canonical form of ``t`` plus the parity of ``edge_order`` against the canonical edge order.

    ``edge_order`` lists the internal edge ids of ``t`` in the order the caller
    considers oriented; by default, increasing edge id.
    """
    validate(t)
    c = canonical_form(t.m, t.n, t.verts)
    if edge_order is None:
        edge_order = sorted(c.emap)
    if sorted(edge_order) != sorted(c.emap):
        raise MalformedTree("edge_order must list every internal edge once")
    return c.tree, permutation_sign([c.emap[e] for e in edge_order])


def is_canonical(t: DiTree) -> bool:
    return canonical_form(t.m, t.n, t.verts).tree == t


def relabel(t: DiTree, root_map: Dict[int, int], leaf_map: Dict[int, int]) -> Canon:
    """Rename external labels (old -> new) and canonicalize."""
    verts = [(tuple(-root_map[-x] if x < 0 else x for x in o),
              tuple(-leaf_map[-x] if x < 0 else x for x in i)) for o, i in t.verts]
    return canonical_form(t.m, t.n, verts)


# ---------------------------------------------------------------------------
# grafting and contraction


def graft_raw(t1: DiTree, i: int, j: int, t2: DiTree):
    """Raw vertex list of t1 _i o_j t2 (t2's root j into t1's leaf i).

    Returns ``(m, n, verts, split, new_edge)``: vertices of t1 come first
    (``split`` of them), then those of t2.  ``new_edge`` is None when either
    side is the unit strand.
    """
    m1, n1, m2, n2 = t1.m, t1.n, t2.m, t2.n
    if not 1 <= i <= n1:
        raise IndexError(f"input index {i} outside 1..{n1}")
    if not 1 <= j <= m2:
        raise IndexError(f"output index {j} outside 1..{m2}")
    m, n = m1 + m2 - 1, n1 + n2 - 1
    if t1.is_unit():
        return m, n, list(t2.verts), 0, None
    if t2.is_unit():
        return m, n, list(t1.verts), len(t1.verts), None
    off = t1.nedges
    new = t1.nedges + t2.nedges

    def leaf1(k):
        return k if k < i else k + n2 - 1

    def root1(k):
        return j - 1 + k

    def leaf2(k):
        return i - 1 + k

    def root2(k):
        return k if k < j else k + m1 - 1

    verts = []
    for outs, ins in t1.verts:
        verts.append((tuple(-root1(-x) if x < 0 else x for x in outs),
                      tuple((new if x == -i else -leaf1(-x)) if x < 0 else x for x in ins)))
    for outs, ins in t2.verts:
        verts.append((tuple((new if x == -j else -root2(-x)) if x < 0 else x + off for x in outs),
                      tuple(-leaf2(-x) if x < 0 else x + off for x in ins)))
    return m, n, verts, len(t1.verts), new


def graft(t1: DiTree, i: int, j: int, t2: DiTree) -> DiTree:
    """Join output ``j`` of ``t2`` to input ``i`` of ``t1``.

    Inputs of the result: t1's inputs before i, all of t2's inputs, t1's
    remaining inputs.  Outputs: t2's outputs before j, all of t1's outputs,
    t2's remaining outputs.
    """
    m, n, verts, _, _ = graft_raw(t1, i, j, t2)
    return canonical_form(m, n, verts).tree


def contract_edge(t: DiTree, e: int) -> Tuple[DiTree, int, int]:
    """Contract internal edge ``e``; returns (tree, merged vertex index, sign).

    The sign is that of moving ``e`` to the front of the canonical edge order.
    """
    edges = t.edges()
    if e not in edges:
        raise MalformedTree(f"{e} is not an internal edge")
    s, _, g, _ = edges[e]
    verts = list(t.verts)
    so, si = verts[s]
    go, gi = verts[g]
    merged = (tuple(x for x in go) + tuple(x for x in so if x != e),
              tuple(x for x in si) + tuple(x for x in gi if x != e))
    raw = [merged] + [verts[v] for v in range(len(verts)) if v not in (s, g)]
    c = canonical_form(t.m, t.n, raw)
    return c.tree, c.vmap[0], (-1) ** e


# ---------------------------------------------------------------------------
# enumeration

Profile = Union[str, FrozenSet[Tuple[int, int]]]

GENERATOR_SHAPES = frozenset({(1, 2), (2, 1)})


def _shapes_for(profile: Profile, weight: int) -> FrozenSet[Tuple[int, int]]:
    if profile == "reduced":
        return frozenset((a, b) for a in range(1, weight + 3) for b in range(1, weight + 3)
                         if a + b >= 3 and a + b - 2 <= weight)
    return frozenset(profile)


def enumerate_trees(m: int, n: int, profile: Profile = GENERATOR_SHAPES) -> List[DiTree]:
    """All canonical (m,n)-trees whose vertex shapes lie in ``profile``.

    ``profile`` is ``"reduced"`` (every vertex of valency at least three) or a
    set of allowed (out, in) shapes.  The (1,1) unit strand is returned for
    (1,1).  The result is sorted by canonical encoding.
    """
    if m < 1 or n < 1:
        raise ValueError("m, n must be positive")
    shapes = _shapes_for(profile, m + n - 2)
    return list(_enum(m, n, shapes))


@lru_cache(maxsize=None)
def _enum(m: int, n: int, shapes: FrozenSet[Tuple[int, int]]) -> Tuple[DiTree, ...]:
    if (m, n) == (1, 1):
        return (UNIT,)
    found = set()
    if (m, n) in shapes:
        found.add(corolla(m, n))
    w = m + n - 2
    for a, b in shapes:
        if (a, b) == (1, 1):
            continue
        wv = a + b - 2
        mp, np_ = m - a + 1, n - b + 1
        if wv >= w or mp < 1 or np_ < 1:
            continue
        for base in _enum(mp, np_, shapes):
            if base.is_unit():
                continue
            found.update(_attach_below(base, a, b, m, n))
            found.update(_attach_above(base, a, b, m, n))
    return tuple(sorted(found, key=encode))


def _attach_below(base: DiTree, a: int, b: int, m: int, n: int) -> Iterator[DiTree]:
    # new vertex on the leaf side: one of its outputs feeds base's leaf with the top label
    mp, np_ = base.m, base.n
    new = base.nedges
    for rs in itertools.combinations(range(1, m + 1), a - 1):
        rest_r = [x for x in range(1, m + 1) if x not in rs]
        for ls in itertools.combinations(range(1, n + 1), b):
            rest_l = [x for x in range(1, n + 1) if x not in ls]
            verts = []
            for outs, ins in base.verts:
                verts.append((tuple(-rest_r[-x - 1] if x < 0 else x for x in outs),
                              tuple((new if x == -np_ else -rest_l[-x - 1]) if x < 0 else x for x in ins)))
            verts.append(((new,) + tuple(-x for x in rs), tuple(-x for x in ls)))
            yield canonical_form(m, n, verts).tree


def _attach_above(base: DiTree, a: int, b: int, m: int, n: int) -> Iterator[DiTree]:
    # new vertex on the root side: base's root with the top label feeds one of its inputs
    mp, np_ = base.m, base.n
    new = base.nedges
    for rs in itertools.combinations(range(1, m + 1), a):
        rest_r = [x for x in range(1, m + 1) if x not in rs]
        for ls in itertools.combinations(range(1, n + 1), b - 1):
            rest_l = [x for x in range(1, n + 1) if x not in ls]
            verts = []
            for outs, ins in base.verts:
                verts.append((tuple((new if x == -mp else -rest_r[-x - 1]) if x < 0 else x for x in outs),
                              tuple(-rest_l[-x - 1] if x < 0 else x for x in ins)))
            verts.append((tuple(-x for x in rs), (new,) + tuple(-x for x in ls)))
            yield canonical_form(m, n, verts).tree


def is_reduced(t: DiTree) -> bool:
    return all(len(o) + len(i) >= 3 for o, i in t.verts)


def valency_defect(t: DiTree) -> int:
    """Sum over vertices of |Out| + |In| - 2 (equals m + n - 2 for every tree)."""
    return sum(len(o) + len(i) - 2 for o, i in t.verts)


# ---------------------------------------------------------------------------
# forests


@dataclass(frozen=True)
class DiForest:
    """Disjoint union of trees with consecutive label blocks per component."""

    components: Tuple[DiTree, ...]

    @property
    def ms(self) -> Tuple[int, ...]:
        return tuple(t.m for t in self.components)

    @property
    def ns(self) -> Tuple[int, ...]:
        return tuple(t.n for t in self.components)

    def global_labels(self, c: int) -> Tuple[range, range]:
        """(root labels, leaf labels) of component ``c`` in the forest's numbering."""
        mo = sum(self.ms[:c])
        no = sum(self.ns[:c])
        return range(mo + 1, mo + self.ms[c] + 1), range(no + 1, no + self.ns[c] + 1)


# ---------------------------------------------------------------------------
# partial order, levels


def flow_order(t: DiTree) -> Dict[int, FrozenSet[int]]:
    """v -> set of vertices strictly on the root side of v (reachable along edges)."""
    edges = t.edges()
    succ: Dict[int, List[int]] = {v: [] for v in range(t.nverts)}
    for s, _, g, _ in edges.values():
        succ[s].append(g)
    out: Dict[int, FrozenSet[int]] = {}

    def above(v: int) -> FrozenSet[int]:
        if v in out:
            return out[v]
        acc = set()
        for w in succ[v]:
            acc.add(w)
            acc |= above(w)
        out[v] = frozenset(acc)
        return out[v]

    for v in range(t.nverts):
        above(v)
    return out


@dataclass(frozen=True)
class LevelFn:
    tree: DiTree
    level: Tuple[int, ...]
    N: int

    def is_saturated(self, i: int) -> bool:
        return _saturated_at(self.tree, self.level, i)


def leaf_root_paths(t: DiTree) -> List[Tuple[int, ...]]:
    """Vertex sequences of every path from a leaf to a root."""
    edges = t.edges()
    paths = []
    for v, (_, ins) in enumerate(t.verts):
        for x in ins:
            if x < 0:
                paths.extend(_down(t, v, edges, (v,)))
    return paths


def _down(t: DiTree, v: int, edges, acc):
    outs, _ = t.verts[v]
    for x in outs:
        if x < 0:
            yield acc
        else:
            w = edges[x][2]
            yield from _down(t, w, edges, acc + (w,))


def _saturated_at(t: DiTree, level: Sequence[int], i: int) -> bool:
    return all(any(level[v] == i for v in p) for p in leaf_root_paths(t))


def level_functions(t: DiTree, N: int, require_saturated: Optional[Sequence[bool]] = None,
                    strict: bool = False) -> List[LevelFn]:
    """Surjective level maps Vert(t) -> {1..N}, level 1 on the root side.

    With ``strict`` (what box products need) a vertex strictly on
    the root side of another has a strictly smaller level; otherwise only
    ``<=`` is required.  ``require_saturated[i-1]`` demands that every
    leaf-to-root path meets level ``i``.
    """
    if N < 1:
        raise ValueError("N must be positive")
    above = flow_order(t)
    want = list(require_saturated) if require_saturated is not None else [False] * N
    out = []
    for lv in itertools.product(range(1, N + 1), repeat=t.nverts):
        if set(lv) != set(range(1, N + 1)):
            continue
        ok = True
        for w, ups in above.items():
            for v in ups:
                if (lv[v] >= lv[w]) if strict else (lv[v] > lv[w]):
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        if all(_saturated_at(t, lv, i + 1) for i, need in enumerate(want) if need):
            out.append(LevelFn(t, lv, N))
    return out


# ---------------------------------------------------------------------------
# orientation sign of the sheared (de)suspension


def split_at_edge(t: DiTree, e: int):
    """Cut edge ``e``: returns (top Canon, bottom Canon, i, j, top raw ids, bottom raw ids).

    ``top`` holds the edge's target (root side), ``bottom`` its source.  The cut
    edge becomes leaf ``i`` of top and root ``j`` of bottom; the other labels are
    the ranks of the original labels, with the cut slot ranked by the smallest
    label beyond it.
    """
    edges = t.edges()
    s, _, g, _ = edges[e]
    adj: Dict[int, List[int]] = {v: [] for v in range(t.nverts)}
    for x, (a, _, b, _) in edges.items():
        if x != e:
            adj[a].append(b)
            adj[b].append(a)

    def comp(v):
        seen = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return sorted(seen)

    top, bot = comp(g), comp(s)
    top_leaves = [-x for v in top for x in t.verts[v][1] if x < 0]
    top_roots = [-x for v in top for x in t.verts[v][0] if x < 0]
    bot_leaves = [-x for v in bot for x in t.verts[v][1] if x < 0]
    bot_roots = [-x for v in bot for x in t.verts[v][0] if x < 0]
    cut_leaf_key = min(bot_leaves)
    cut_root_key = min(top_roots)
    tl = sorted(top_leaves + [cut_leaf_key])
    br = sorted(bot_roots + [cut_root_key])
    i = tl.index(cut_leaf_key) + 1
    j = br.index(cut_root_key) + 1
    tl_rank = {x: k + 1 for k, x in enumerate(tl)}
    br_rank = {x: k + 1 for k, x in enumerate(br)}
    tr_rank = {x: k + 1 for k, x in enumerate(sorted(top_roots))}
    bl_rank = {x: k + 1 for k, x in enumerate(sorted(bot_leaves))}
    top_verts = []
    for v in top:
        outs, ins = t.verts[v]
        top_verts.append((tuple(-tr_rank[-x] if x < 0 else x for x in outs),
                          tuple(-i if x == e else (-tl_rank[-x] if x < 0 else x) for x in ins)))
    bot_verts = []
    for v in bot:
        outs, ins = t.verts[v]
        bot_verts.append((tuple(-j if x == e else (-br_rank[-x] if x < 0 else x) for x in outs),
                          tuple(-bl_rank[-x] if x < 0 else x for x in ins)))
    ct = canonical_form(len(top_roots), len(tl), top_verts)
    cb = canonical_form(len(br), len(bot_leaves), bot_verts)
    return ct, cb, i, j, top, bot, sorted(top_leaves), sorted(top_roots), sorted(bot_leaves), sorted(bot_roots)


def koszul_reorder_sign(seq: Sequence[int], target: Sequence[int], parity: Dict[int, int]) -> int:
    """Sign of rearranging graded factors listed in ``seq`` into the order ``target``."""
    pos = {v: k for k, v in enumerate(target)}
    p = [pos[v] for v in seq]
    s = 0
    for a in range(len(p)):
        for b in range(a + 1, len(p)):
            if p[a] > p[b]:
                s += parity[seq[a]] * parity[seq[b]]
    return -1 if s % 2 else 1


def composition_sign(m1: int, n1: int, m2: int, n2: int, i: int, j: int) -> int:
    """Sign of f _i o_j g for the standard generators of the endomorphisms of an odd line.

    |f| = m1 - n1 and |g| = m2 - n2 (mod 2); the composite is evaluated by
    inserting g at input i, applying the block permutation, then f at output j.
    """
    fg, ff = (m2 - n2) % 2, (m1 - n1) % 2
    s = fg * (i - 1) + (i - 1) * (j - 1) + (m2 - j) * (n1 - i) + ff * (j - 1)
    return -1 if s % 2 else 1


def suspension_sign(t: DiTree, order: Optional[Sequence[int]] = None, edge: Optional[int] = None) -> int:
    """Sign c with  (composite of the vertex generators, tensored in ``order``) = c * standard generator.

    The generators are those of the endomorphism dioperad of a one-dimensional
    odd space; a vertex of shape (a,b) has parity a + b.  Each vertex generator is
    taken relative to its canonical slot order.  ``edge`` picks the cut used for
    the recursion (any choice gives the same answer).
    """
    k = t.nverts
    if order is None:
        order = list(range(k))
    if k <= 1:
        return 1
    e = 0 if edge is None else edge
    ct, cb, i, j, top, bot, tleaves, troots, bleaves, broots = split_at_edge(t, e)
    top_order = [ct.vmap[top.index(v)] for v in order if v in top]
    bot_order = [cb.vmap[bot.index(v)] for v in order if v in bot]
    c_top = suspension_sign(ct.tree, top_order)
    c_bot = suspension_sign(cb.tree, bot_order)
    m1, n1, m2, n2 = ct.tree.m, ct.tree.n, cb.tree.m, cb.tree.n
    comp = composition_sign(m1, n1, m2, n2, i, j)
    # composite input positions -> original leaf labels, outputs likewise
    tl_nocut = list(tleaves)  # top leaves in rank order, cut excluded
    ins_seq = tl_nocut[: i - 1] + list(bleaves) + tl_nocut[i - 1:]
    outs_seq = list(broots[: j - 1]) + list(troots) + list(broots[j - 1:])
    relabel_sign = permutation_sign(ins_seq) * permutation_sign(outs_seq)
    # a cut can change which labels lie beyond a slot, so the pieces may order
    # some vertex slots differently from t; generators follow t's order
    slots = 1
    for c in (ct, cb):
        for op, ip in zip(c.out_perm, c.in_perm):
            slots *= permutation_sign(op) * permutation_sign(ip)
    parity = {v: (len(t.verts[v][0]) + len(t.verts[v][1])) % 2 for v in range(k)}
    seq = [v for v in order if v in top] + [v for v in order if v in bot]
    reorder = koszul_reorder_sign(seq, list(order), parity)
    return comp * relabel_sign * c_top * c_bot * reorder * slots
