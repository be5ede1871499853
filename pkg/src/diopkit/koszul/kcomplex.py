"""Koszul complexes K P = P [] (Lambda P^!)^*.

Model.  The dual layer is the Koszul dual coalgebra C(a,b) inside the free
slice F(E)(a,b), read as trees with odd (suspended) vertices: a tree vector
stands for the tensor of its vertex decorations in canonical vertex order.
C(a,b) is the set of vectors whose every two-vertex piece lies in R, i.e. the
kernel of the weight-two contraction map with vertex-order signs.  Its
dimension equals dim P^!(a,b).

A basis element of K P(m,n) is a reduced tree whose every edge runs from a
leaf-side vertex (dual layer) into a root-side vertex (P layer), with a
normal-form vector of P at each root-side vertex and a basis vector of C at
each leaf-side vertex.  Its degree is the sum of 2-|Out|-|In| over the dual
layer.  The differential peels one generator off the root side of a dual
block and composes it into the adjacent P vertices; no other splittings
contribute.  Koszul signs come from moving the peeled (odd) generator past the
dual blocks in front of it and from reordering the dual blocks afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from ..ratlin import ChainComplex, Mat, Subspace, homology_dims, kernel
from ..trees import DiTree, UNIT, canonical_form, corolla, enumerate_trees, permutation_sign
from ..diopcore.box import colourings, substitute
from ..diopcore.free import Vec, WeightBoundError, free_slice, transport_deco
from ..diopcore.ideal import quotient_slice
from ..diopcore.presentation import Presentation
from .cobar import _Transport, cobar_basis, contraction_matrix, vertex_sign

KKey = Tuple[DiTree, Tuple[int, ...], Tuple[int, ...]]


# ---------------------------------------------------------------------------
# the dual coalgebra


class DualCoalgebra:
    """C(a,b) for one presentation, with signed relabelling and peeling."""

    def __init__(self, p: Presentation):
        self.p = p
        self.E = p.E
        self._spaces: Dict[Tuple[int, int], Subspace] = {}
        self._basis: Dict[Tuple[int, int], List[Vec]] = {}
        self._slot: Dict[tuple, List[Dict[int, Fraction]]] = {}
        self._peel: Dict[tuple, Dict[tuple, Dict[int, Fraction]]] = {}

    def space(self, a: int, b: int) -> Subspace:
        hit = self._spaces.get((a, b))
        if hit is not None:
            return hit
        sl = free_slice(self.E, a, b)
        if a + b <= 3:
            sub = Subspace.full(sl.dim)
        else:
            bases = cobar_basis(self.p, a, b)
            top = bases[a + b - 3]
            mat = contraction_matrix(self.p, top, bases[a + b - 4], sign=vertex_sign)
            ker = kernel(mat)
            # reindex from the cobar top basis to the free slice basis
            rows = []
            for v in ker.vectors():
                rows.append({sl.index[top[c]]: x for c, x in v.items()})
            sub = Subspace.span(sl.dim, rows)
        self._spaces[(a, b)] = sub
        self._basis[(a, b)] = [sl.from_sparse(r) for r in sub.vectors()]
        return sub

    def dim(self, a: int, b: int) -> int:
        if (a, b) == (1, 1):
            return 0
        return self.space(a, b).dim

    def vector(self, a: int, b: int, k: int) -> Vec:
        self.space(a, b)
        return self._basis[(a, b)][k]

    def coordinates(self, a: int, b: int, v: Vec) -> Dict[int, Fraction]:
        sl = free_slice(self.E, a, b)
        sub = self.space(a, b)
        row = sl.to_sparse(v)
        if not sub.contains(row):
            raise AssertionError(f"vector leaves the dual coalgebra at ({a},{b})")
        return {k: x for k, x in enumerate(sub.coordinates(row)) if x}

    def relabel(self, v: Vec, pi, sigma) -> Vec:
        """Relabel roots by pi and leaves by sigma, with the sign of reordering odd vertices."""
        out: Vec = {}
        for (t, d), c in v.items():
            rmap = {k + 1: pi[k] + 1 for k in range(t.m)}
            lmap = {k + 1: sigma[k] + 1 for k in range(t.n)}
            raw = [(tuple(-rmap[-x] if x < 0 else x for x in o), tuple(-lmap[-x] if x < 0 else x for x in i))
                   for o, i in t.verts]
            cf = canonical_form(t.m, t.n, raw)
            transport_deco(self.E, cf, raw, d, c * permutation_sign(cf.vmap), out)
        return out

    def slot_columns(self, shape, op, ip) -> List[Dict[int, Fraction]]:
        key = (shape, op, ip)
        hit = self._slot.get(key)
        if hit is None:
            from ..sbimod import inverse_perm
            pi, sg = inverse_perm(tuple(op)), inverse_perm(tuple(ip))
            hit = []
            for k in range(self.dim(*shape)):
                if list(op) == sorted(op) and list(ip) == sorted(ip):
                    hit.append({k: Fraction(1)})
                else:
                    hit.append(self.coordinates(*shape, self.relabel(self.vector(*shape, k), pi, sg)))
            self._slot[key] = hit
        return hit

    def peel(self, a: int, b: int, k: int) -> Dict[tuple, Dict[Tuple[int, ...], Fraction]]:
        """Split a root-side generator g off basis vector k of C(a,b).

        g must have no internal outputs.  Removing it leaves one remainder per
        internal input of g.  Keys are ``(shape of g, root labels of g, inputs
        of g, decoration of g, remainders)`` where an input is a leaf label or
        ``-(j+1)`` for the edge to remainder j, and each remainder is given by
        its (root labels, leaf labels) inside C(a,b).  Remainder j is relabelled
        by rank with the cut edge as its last root.  Values map tuples of basis
        indices of the remainders to coefficients.
        """
        key = (a, b, k)
        hit = self._peel.get(key)
        if hit is not None:
            return hit
        acc: Dict[tuple, Dict[tuple, Fraction]] = {}
        shapes: Dict[tuple, List[Tuple[int, int]]] = {}
        for (S, d), c in self.vector(a, b, k).items():
            edges = S.edges()
            for g in range(S.nverts):
                go, gi = S.verts[g]
                if any(x >= 0 for x in go):
                    continue
                comps = []
                ins = []
                for x in gi:
                    if x < 0:
                        ins.append(-x)
                        continue
                    ins.append(-(len(comps) + 1))
                    comps.append(self._component(S, edges, g, x))
                order = [g]
                pieces = []
                spec = []
                for e, vs in comps:
                    roots = sorted(-y for v in vs for y in S.verts[v][0] if y < 0)
                    leaves = sorted(-y for v in vs for y in S.verts[v][1] if y < 0)
                    rmap = {r: i + 1 for i, r in enumerate(roots)}
                    lmap = {l: i + 1 for i, l in enumerate(leaves)}
                    top = len(roots) + 1
                    raw = []
                    for v in vs:
                        o, i = S.verts[v]
                        raw.append((tuple(-top if y == e else (-rmap[-y] if y < 0 else y) for y in o),
                                     tuple(-lmap[-y] if y < 0 else y for y in i)))
                    cf = canonical_form(top, len(leaves), raw)
                    vec: Vec = {}
                    transport_deco(self.E, cf, raw, tuple(d[v] for v in vs), Fraction(1), vec)
                    order.extend(vs[j] for j in sorted(range(len(vs)), key=lambda j: cf.vmap[j]))
                    pieces.append(vec)
                    spec.append((tuple(roots), tuple(leaves)))
                pk = (S.shape(g), tuple(-x for x in go), tuple(ins), d[g], tuple(spec))
                shapes[pk] = [(len(r) + 1, len(l)) for r, l in spec]
                coeff = c * permutation_sign(order)
                tgt = acc.setdefault(pk, {})
                for combo in _combos([list(v.items()) for v in pieces]):
                    kk = tuple(kv[0] for kv in combo)
                    x = coeff
                    for _, y in combo:
                        x *= y
                    tgt[kk] = tgt.get(kk, 0) + x
        out: Dict[tuple, Dict[Tuple[int, ...], Fraction]] = {}
        for pk, tens in acc.items():
            tens = {kk: x for kk, x in tens.items() if x}
            if not tens:
                continue
            coords = self._tensor_coordinates(shapes[pk], tens)
            if coords:
                out[pk] = coords
        self._peel[key] = out
        return out

    @staticmethod
    def _component(S: DiTree, edges, g: int, e: int) -> Tuple[int, List[int]]:
        """Vertices on the far side of edge e from g, in tree order."""
        adj: Dict[int, List[int]] = {v: [] for v in range(S.nverts)}
        for s0, _, g0, _ in edges.values():
            adj[s0].append(g0)
            adj[g0].append(s0)
        start = edges[e][0]
        seen = {g, start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        seen.discard(g)
        return e, sorted(seen)

    def _tensor_coordinates(self, shapes: List[Tuple[int, int]], tens: Dict[tuple, Fraction]) -> Dict[Tuple[int, ...], Fraction]:
        """Coordinates of a tensor of free vectors in the product of C bases (pivot read-off, then checked)."""
        if not shapes:
            return {(): tens.get((), Fraction(0))} if tens.get(()) else {}
        subs = [self.space(*s) for s in shapes]
        slices = [free_slice(self.E, *s) for s in shapes]
        pivots = [dict((pv, j) for j, pv in enumerate(sub.pivots)) for sub in subs]
        coords: Dict[Tuple[int, ...], Fraction] = {}
        for kk, x in tens.items():
            idx = []
            for key, sl, pv in zip(kk, slices, pivots):
                j = pv.get(sl.index[key])
                if j is None:
                    break
                idx.append(j)
            else:
                coords[tuple(idx)] = x
        # check by reconstruction
        rebuilt: Dict[tuple, Fraction] = {}
        for idx, x in coords.items():
            vecs = [self.vector(*s, j) for s, j in zip(shapes, idx)]
            for combo in _combos([list(v.items()) for v in vecs]):
                kk = tuple(kv[0] for kv in combo)
                y = x
                for _, z in combo:
                    y *= z
                rebuilt[kk] = rebuilt.get(kk, 0) + y
        rebuilt = {kk: x for kk, x in rebuilt.items() if x}
        if rebuilt != tens:
            raise AssertionError(f"peeled remainder leaves the dual coalgebra at {shapes}")
        return coords



# ---------------------------------------------------------------------------
# the complex


@dataclass
class KoszulComplexSlice:
    m: int
    n: int
    bases: Dict[int, List[KKey]]
    complex: ChainComplex
    _homology: Optional[Dict[int, int]] = field(default=None, repr=False)

    @property
    def homology(self) -> Dict[int, int]:
        if self._homology is None:
            self._homology = homology_dims(self.complex)
        return self._homology

    def is_exact(self) -> bool:
        return all(v == 0 for v in self.homology.values())


def _degree(t: DiTree, col: Tuple[int, ...]) -> int:
    return sum(2 - a - b for (a, b), c in zip(t.shapes(), col) if c == 2)


def koszul_basis(p: Presentation, C: DualCoalgebra, m: int, n: int) -> Dict[int, List[KKey]]:
    out: Dict[int, List[KKey]] = {k: [] for k in range(2 - m - n, 1)}
    for t in enumerate_trees(m, n, "reduced"):
        for col in colourings(t):
            dims = []
            for (a, b), c in zip(t.shapes(), col):
                dims.append(quotient_slice(p, a, b).dim if c == 1 else C.dim(a, b))
            if 0 in dims:
                continue
            deg = _degree(t, col)
            for deco in _product(dims):
                out[deg].append((t, col, deco))
    return out


def _product(dims):
    if not dims:
        yield ()
        return
    for k in range(dims[0]):
        for rest in _product(dims[1:]):
            yield (k,) + rest


def _combos(parts):
    if not parts:
        yield ()
        return
    for item in parts[0]:
        for rest in _combos(parts[1:]):
            yield (item,) + rest


class _Differential:
    def __init__(self, p: Presentation, C: DualCoalgebra):
        self.p = p
        self.C = C
        self.tr = _Transport(p)
        self._merge: Dict[tuple, Dict[int, Fraction]] = {}

    def merge(self, local: DiTree, decos: Tuple[Tuple[str, int], ...]) -> Dict[int, Fraction]:
        """Compose a generator with P vertices along ``local`` and reduce."""
        key = (local, decos)
        hit = self._merge.get(key)
        if hit is None:
            p = self.p
            pieces = []
            for v, (kind, k) in enumerate(decos):
                if kind == "g":
                    pieces.append({(corolla(*local.shape(v)), (k,)): Fraction(1)})
                else:
                    pieces.append(quotient_slice(p, *local.shape(v)).lift({k: Fraction(1)}))
            hit = quotient_slice(p, local.m, local.n).project(substitute(p.E, local, pieces))
            self._merge[key] = hit
        return hit

    def apply(self, key: KKey) -> Dict[KKey, Fraction]:
        t, col, deco = key
        out: Dict[KKey, Fraction] = {}
        edges = t.edges()
        parity_before = 0
        for w in range(t.nverts):
            if col[w] != 2:
                continue
            a, b = t.shape(w)
            sgn_w = -1 if parity_before % 2 else 1
            parity_before += a + b - 2
            for pk, rem in self.C.peel(a, b, deco[w]).items():
                self._one(t, col, deco, edges, w, pk, rem, sgn_w, out)
        return out

    def _one(self, t, col, deco, edges, w, pk, rem, sgn_w, out):
        gshape, gouts, gins, gdeco, spec = pk
        wo, wi = t.verts[w]
        NE = t.nedges
        g_out_tokens = [wo[r - 1] for r in gouts]
        g_in_tokens = [wi[x - 1] if x > 0 else NE + (-x - 1) for x in gins]
        neigh = []
        for x in g_out_tokens:
            if x >= 0:
                u = edges[x][2]
                if u not in neigh:
                    neigh.append(u)
        absorbed = {x for x in g_out_tokens if x >= 0}
        M_outs = [x for x in g_out_tokens if x < 0]
        for u in neigh:
            M_outs.extend(t.verts[u][0])
        M_ins = list(g_in_tokens)
        for u in neigh:
            M_ins.extend(x for x in t.verts[u][1] if x not in absorbed)
        opos = {x: -(k + 1) for k, x in enumerate(M_outs)}
        ipos = {x: -(k + 1) for k, x in enumerate(M_ins)}
        lid = {x: k for k, x in enumerate(sorted(absorbed, key=g_out_tokens.index))}
        loc = [(tuple(lid[x] if x >= 0 else opos[x] for x in g_out_tokens),
                tuple(ipos[x] for x in g_in_tokens))]
        for u in neigh:
            uo, ui = t.verts[u]
            loc.append((tuple(opos[x] for x in uo), tuple(lid[x] if x in absorbed else ipos[x] for x in ui)))
        local = DiTree(len(M_outs), len(M_ins), tuple(loc))
        mdecos = (("g", gdeco),) + tuple(("p", deco[u]) for u in neigh)
        mvec = self.merge(local, mdecos)
        if not mvec:
            return
        # raw big tree: merged vertex, remainders, untouched vertices
        raw = [(tuple(M_outs), tuple(M_ins))]
        kinds = [("p", (len(M_outs), len(M_ins)))]
        for j, (roots, leaves) in enumerate(spec):
            raw.append((tuple(wo[r - 1] for r in roots) + (NE + j,), tuple(wi[l - 1] for l in leaves)))
            kinds.append(("c", (len(roots) + 1, len(leaves))))
        kept = [v for v in range(t.nverts) if v != w and v not in neigh]
        for v in kept:
            raw.append(t.verts[v])
            kinds.append(("p" if col[v] == 1 else "c", t.shape(v)))
        cf = canonical_form(t.m, t.n, raw)
        nv = len(raw)
        r0 = 1 + len(spec)
        newcol = [0] * nv
        for r, (kind, _) in enumerate(kinds):
            newcol[cf.vmap[r]] = 1 if kind == "p" else 2

        def columns(r, kind, shape):
            op, ip = cf.out_perm[r], cf.in_perm[r]
            return self.tr.slot_columns(shape, op, ip) if kind == "p" else self.C.slot_columns(shape, op, ip)

        # merged vertex and the untouched vertices transform one by one
        single = []
        img: Dict[int, Fraction] = {}
        cols = columns(0, *kinds[0])
        for k, x in mvec.items():
            for k2, y in cols[k].items():
                img[k2] = img.get(k2, 0) + x * y
        single.append([(cf.vmap[0], k2, y) for k2, y in img.items() if y])
        for j, v in enumerate(kept):
            r = r0 + j
            cols = columns(r, *kinds[r])
            single.append([(cf.vmap[r], k2, y) for k2, y in cols[deco[v]].items()])
        # the remainders come as a tensor
        rem_cols = [columns(1 + j, *kinds[1 + j]) for j in range(len(spec))]
        rem_terms: Dict[Tuple[int, ...], Fraction] = {}
        for kk, x in rem.items():
            for combo in _combos([list(rem_cols[j][k].items()) for j, k in enumerate(kk)]):
                nk = tuple(c[0] for c in combo)
                y = x
                for _, z in combo:
                    y *= z
                rem_terms[nk] = rem_terms.get(nk, 0) + y
        # dual blocks: old order (remainders take w's place) against the new canonical order
        seq = []
        for v in range(t.nverts):
            if col[v] != 2:
                continue
            if v == w:
                for j, (roots, leaves) in enumerate(spec):
                    if (len(roots) + len(leaves) - 1) % 2:
                        seq.append(cf.vmap[1 + j])
            elif (sum(t.shape(v)) - 2) % 2:
                seq.append(cf.vmap[r0 + kept.index(v)])
        sign = sgn_w * permutation_sign(seq)
        tree = cf.tree
        newcol = tuple(newcol)
        rem_pos = [cf.vmap[1 + j] for j in range(len(spec))]
        for nk, xr in rem_terms.items():
            if not xr:
                continue
            for combo in _combos(single):
                d = [0] * nv
                x = Fraction(sign) * xr
                for tgt, k2, y in combo:
                    d[tgt] = k2
                    x *= y
                for pos, k2 in zip(rem_pos, nk):
                    d[pos] = k2
                key = (tree, newcol, tuple(d))
                s = out.get(key, 0) + x
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)


def koszul_slice(p: Presentation, m: int, n: int, max_weight: Optional[int] = None,
                 coalgebra: Optional[DualCoalgebra] = None) -> KoszulComplexSlice:
    if max_weight is not None and m + n - 2 > max_weight:
        raise WeightBoundError(f"({m},{n}) has weight {m + n - 2} > bound {max_weight}")
    key = ("koszul", m, n)
    hit = p._cache.get(key)
    if hit is not None:
        return hit
    if (m, n) == (1, 1):
        cx = ChainComplex({0: 1}, {})
        out = KoszulComplexSlice(1, 1, {0: [(UNIT, (), ())]}, cx)
        p._cache[key] = out
        return out
    C = coalgebra or p._cache.setdefault("coalgebra", DualCoalgebra(p))
    bases = koszul_basis(p, C, m, n)
    index = {d: {k: i for i, k in enumerate(b)} for d, b in bases.items()}
    D = _Differential(p, C)
    diffs = {}
    for deg in range(2 - m - n, 0):
        ent = {}
        for col, bkey in enumerate(bases[deg]):
            for k2, x in D.apply(bkey).items():
                ent[(index[deg + 1][k2], col)] = x
        diffs[deg] = Mat(len(bases[deg + 1]), len(bases[deg]), ent)
    cx = ChainComplex({d: len(b) for d, b in bases.items()}, diffs)
    if not cx.check_square_zero():
        raise AssertionError(f"Koszul differential does not square to zero at ({m},{n})")
    out = KoszulComplexSlice(m, n, bases, cx)
    p._cache[key] = out
    return out
