"""Finite-dimensional (S_m, S_n)-bimodules and decorated tree spaces.

Permutations are tuples of images in 0-based form: ``p[k]`` is the image of
``k``.  Both group actions are stored as *left* actions, so that
``action(p1 p2, s1 s2) = action(p1, s1) @ action(p2, s2)``.  On a tree,
``(pi, sigma)`` sends root label ``k`` to ``pi(k)`` and leaf label ``k`` to
``sigma(k)``.  A right action in the usual sense is ``x . sigma = action(id, sigma^-1) x``.
"""

from __future__ import annotations

import itertools
import re
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .ratlin import Mat, Rat
from .trees import DiTree, permutation_sign, relabel

Perm = Tuple[int, ...]


# ---------------------------------------------------------------------------
# permutations


def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def compose_perm(p: Perm, q: Perm) -> Perm:
    """p after q."""
    return tuple(p[q[k]] for k in range(len(q)))


def inverse_perm(p: Perm) -> Perm:
    out = [0] * len(p)
    for k, x in enumerate(p):
        out[x] = k
    return tuple(out)


def perm_sign(p: Perm) -> int:
    return permutation_sign(p)


def transposition(n: int, i: int) -> Perm:
    """Adjacent transposition swapping i and i+1 (0-based)."""
    p = list(range(n))
    p[i], p[i + 1] = p[i + 1], p[i]
    return tuple(p)


def adjacent_word(p: Perm) -> List[int]:
    """Indices i with p = s_{i_1} s_{i_2} ... (s_i swaps i and i+1)."""
    # bubble sort p down to the identity; p = s_a ... so record in reverse
    a = list(p)
    word: List[int] = []
    changed = True
    while changed:
        changed = False
        for i in range(len(a) - 1):
            if a[i] > a[i + 1]:
                a[i], a[i + 1] = a[i + 1], a[i]
                word.append(i)
                changed = True
    # a = p o s_w1 o s_w2 ... = id  =>  p = s_wk ... s_w1
    return word[::-1]


def parse_cycles(text: str, n: int) -> Perm:
    """Cycle notation with 1-based points, e.g. ``(1 2 3)(4 5)`` or ``(12)``; ``()`` or ``id`` is the identity."""
    text = text.strip()
    p = list(range(n))
    if text in ("", "id", "()"):
        return tuple(p)
    cycles = re.findall(r"\(([^()]*)\)", text)
    if "".join(f"({c})" for c in cycles).replace(" ", "") != text.replace(" ", ""):
        raise ValueError(f"bad cycle notation {text!r}")
    for c in cycles:
        c = c.strip()
        if not c:
            continue
        if "," in c or " " in c:
            pts = [int(x) for x in re.split(r"[,\s]+", c) if x]
        else:
            pts = [int(x) for x in c]
        if any(not 1 <= x <= n for x in pts) or len(set(pts)) != len(pts):
            raise ValueError(f"cycle {c!r} does not fit in S_{n}")
        for a, b in zip(pts, pts[1:] + pts[:1]):
            p[a - 1] = b - 1
    if sorted(p) != list(range(n)):
        raise ValueError(f"{text!r} is not a permutation")
    return tuple(p)


def format_cycles(p: Perm) -> str:
    seen = set()
    parts = []
    for start in range(len(p)):
        if start in seen or p[start] == start:
            continue
        cyc = [start]
        seen.add(start)
        k = p[start]
        while k != start:
            cyc.append(k)
            seen.add(k)
            k = p[k]
        parts.append("(" + " ".join(str(x + 1) for x in cyc) + ")")
    return "".join(parts) or "id"


def all_perms(n: int) -> List[Perm]:
    return list(itertools.permutations(range(n)))


# ---------------------------------------------------------------------------
# bimodules


class ActionError(ValueError):
    pass


class TwistKind(Enum):
    DUAL_STAR = "dual_star"
    VEE = "vee"
    SIGMA = "sigma"
    SIGMA_INV = "sigma_inv"
    LAMBDA = "lambda"
    LAMBDA_INV = "lambda_inv"


@dataclass(eq=False)
class SBimoduleSpace:
    m: int
    n: int
    dim: int
    out_gens: Tuple[Mat, ...]
    in_gens: Tuple[Mat, ...]
    degree: int = 0
    name: str = ""
    _cache: Dict[Tuple[Perm, Perm], Mat] = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        if len(self.out_gens) != max(self.m - 1, 0) or len(self.in_gens) != max(self.n - 1, 0):
            raise ActionError("need one matrix per adjacent transposition")
        for g in self.out_gens + self.in_gens:
            if g.shape != (self.dim, self.dim):
                raise ActionError(f"action matrix has shape {g.shape}, expected {(self.dim, self.dim)}")

    def check(self) -> None:
        """Raise ActionError unless the matrices satisfy the Coxeter relations and commute."""
        one = Mat.identity(self.dim)
        for gens, side in ((self.out_gens, "output"), (self.in_gens, "input")):
            for i, g in enumerate(gens):
                if g @ g != one:
                    raise ActionError(f"{side} transposition s{i + 1} is not an involution")
                if i + 1 < len(gens):
                    h = gens[i + 1]
                    if (g @ h) @ (g @ h) @ (g @ h) != one:
                        raise ActionError(f"{side} braid relation fails at s{i + 1}")
                for h in gens[i + 2:]:
                    if g @ h != h @ g:
                        raise ActionError(f"{side} distant transpositions fail to commute")
        for a in self.out_gens:
            for b in self.in_gens:
                if a @ b != b @ a:
                    raise ActionError("left and right actions do not commute")

    @property
    def arity(self) -> Tuple[int, int]:
        return (self.m, self.n)

    def action(self, pi: Optional[Perm] = None, sigma: Optional[Perm] = None) -> Mat:
        pi = identity_perm(self.m) if pi is None else tuple(pi)
        sigma = identity_perm(self.n) if sigma is None else tuple(sigma)
        if len(pi) != self.m or len(sigma) != self.n:
            raise ActionError(f"permutation sizes ({len(pi)},{len(sigma)}) do not match {self.arity}")
        key = (pi, sigma)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        out = Mat.identity(self.dim)
        for i in adjacent_word(pi):
            out = out @ self.out_gens[i]
        for i in adjacent_word(sigma):
            out = out @ self.in_gens[i]
        with self._lock:
            self._cache[key] = out
        return out

    def is_trivial(self) -> bool:
        one = Mat.identity(self.dim)
        return all(g == one for g in self.out_gens + self.in_gens)

    def is_sign(self) -> bool:
        neg = -Mat.identity(self.dim)
        return all(g == neg for g in self.out_gens + self.in_gens)

    def same_action(self, other: "SBimoduleSpace") -> bool:
        return (self.arity == other.arity and self.dim == other.dim
                and self.out_gens == other.out_gens and self.in_gens == other.in_gens)

    def __repr__(self) -> str:
        return f"SBimoduleSpace({self.name or '?'} {self.arity}, dim={self.dim}, deg={self.degree})"


def character_space(m: int, n: int, out_sign: bool, in_sign: bool, degree: int = 0, name: str = "") -> SBimoduleSpace:
    s_out = Mat.from_rows([[-1 if out_sign else 1]])
    s_in = Mat.from_rows([[-1 if in_sign else 1]])
    return SBimoduleSpace(m, n, 1, (s_out,) * (m - 1), (s_in,) * (n - 1), degree, name)


def trivial(m: int, n: int, name: str = "") -> SBimoduleSpace:
    return character_space(m, n, False, False, 0, name)


def sign(m: int, n: int, name: str = "") -> SBimoduleSpace:
    return character_space(m, n, True, True, 0, name)


def from_generators(m: int, n: int, out_gens: Sequence, in_gens: Sequence, degree: int = 0,
                    name: str = "") -> SBimoduleSpace:
    """Build from transposition matrices given as nested lists or Mats; checks the relations."""
    og = tuple(g if isinstance(g, Mat) else Mat.from_rows(g) for g in out_gens)
    ig = tuple(g if isinstance(g, Mat) else Mat.from_rows(g) for g in in_gens)
    dim = og[0].rows if og else (ig[0].rows if ig else 1)
    sp = SBimoduleSpace(m, n, dim, og, ig, degree, name)
    sp.check()
    return sp


def from_action(m: int, n: int, dim: int, act: Callable[[Perm, Perm], Mat], degree: int = 0,
                name: str = "") -> SBimoduleSpace:
    """Build from a function giving the matrix of (pi, sigma); only transpositions are sampled."""
    og = tuple(act(transposition(m, i), identity_perm(n)) for i in range(m - 1))
    ig = tuple(act(identity_perm(m), transposition(n, i)) for i in range(n - 1))
    return SBimoduleSpace(m, n, dim, og, ig, degree, name)


def zero_space(m: int, n: int, name: str = "") -> SBimoduleSpace:
    z = Mat.zero(0, 0)
    return SBimoduleSpace(m, n, 0, (z,) * (m - 1), (z,) * (n - 1), 0, name)


def kron(a: Mat, b: Mat) -> Mat:
    ra, ca = a.shape
    rb, cb = b.shape
    out = {}
    for (i, j), x in a.entries.items():
        for (k, l), y in b.entries.items():
            out[(i * rb + k, j * cb + l)] = x * y
    return Mat(ra * rb, ca * cb, out)


def tensor(a: SBimoduleSpace, b: SBimoduleSpace, name: str = "") -> SBimoduleSpace:
    if a.arity != b.arity:
        raise ActionError("tensor needs equal bi-arities")
    og = tuple(kron(x, y) for x, y in zip(a.out_gens, b.out_gens))
    ig = tuple(kron(x, y) for x, y in zip(a.in_gens, b.in_gens))
    return SBimoduleSpace(a.m, a.n, a.dim * b.dim, og, ig, a.degree + b.degree, name)


def twist(space: SBimoduleSpace, kind: TwistKind) -> SBimoduleSpace:
    """Dual and sign twists.

    ``dual_star``: contragredient (transpose of the inverse); ``vee``: contragredient
    tensored with both sign characters; the suspensions tensor with a
    one-dimensional sign space and shift the degree.
    """
    kind = TwistKind(kind)
    m, n = space.arity
    if kind in (TwistKind.DUAL_STAR, TwistKind.VEE):
        s = -1 if kind is TwistKind.VEE else 1
        # transpositions are involutions, so the inverse transpose is the transpose
        og = tuple(g.T.scale(s) for g in space.out_gens)
        ig = tuple(g.T.scale(s) for g in space.in_gens)
        return SBimoduleSpace(m, n, space.dim, og, ig, -space.degree, space.name + ("^v" if s < 0 else "^*"))
    shift = {
        TwistKind.SIGMA: n - m,
        TwistKind.SIGMA_INV: m - n,
        TwistKind.LAMBDA: m + n - 2,
        TwistKind.LAMBDA_INV: 2 - m - n,
    }[kind]
    line = character_space(m, n, True, True, shift)
    return tensor(line, space, f"{kind.value}({space.name})")


def opposite_space(space: SBimoduleSpace) -> SBimoduleSpace:
    """Swap the roles of inputs and outputs."""
    return SBimoduleSpace(space.n, space.m, space.dim, space.in_gens, space.out_gens, space.degree,
                          space.name + "^op")


def vee_pairing(space: SBimoduleSpace) -> Mat:
    """Evaluation pairing between a space and its vee twist in the dual basis: the identity."""
    return Mat.identity(space.dim)


def check_double_vee(space: SBimoduleSpace) -> bool:
    vv = twist(twist(space, TwistKind.VEE), TwistKind.VEE)
    return vv.same_action(space) and vv.degree == space.degree


# ---------------------------------------------------------------------------
# decorated trees

SpaceMap = Mapping[Tuple[int, int], SBimoduleSpace]


@dataclass(frozen=True)
class DecoratedSpace:
    """E(T) = tensor over vertices (canonical order) of E(Out(v), In(v)).

    Vertex slots are read in the tree's stored order (internal edges first,
    then external labels).  Basis index tuples list one basis index per vertex.
    """

    tree: DiTree
    dims: Tuple[int, ...]

    @property
    def dim(self) -> int:
        d = 1
        for x in self.dims:
            d *= x
        return d

    def index(self, deco: Sequence[int]) -> int:
        k = 0
        for d, x in zip(self.dims, deco):
            k = k * d + x
        return k

    def deco(self, index: int) -> Tuple[int, ...]:
        out = []
        for d in reversed(self.dims):
            out.append(index % d)
            index //= d
        return tuple(reversed(out))

    def basis(self) -> List[Tuple[int, ...]]:
        return list(itertools.product(*(range(d) for d in self.dims)))


def decorated_space(E: SpaceMap, t: DiTree) -> DecoratedSpace:
    dims = []
    for shape in t.shapes():
        sp = E.get(shape)
        dims.append(sp.dim if sp is not None else 0)
    return DecoratedSpace(t, tuple(dims))


def slot_action(E: SpaceMap, shape: Tuple[int, int], out_perm: Sequence[int], in_perm: Sequence[int]) -> Mat:
    """Matrix moving a vertex decoration from one slot order to another.

    ``out_perm[k]`` is the old position of the slot placed at new position ``k``;
    old local label ``j`` therefore becomes ``out_perm^-1(j)``.
    """
    sp = E[shape]
    return sp.action(inverse_perm(tuple(out_perm)), inverse_perm(tuple(in_perm)))


def transport(E: SpaceMap, c, old: DiTree) -> Tuple[DecoratedSpace, List[Mat], Tuple[int, ...]]:
    """Per-vertex matrices carrying decorations of ``old`` (raw) to the canonical tree ``c.tree``.

    Returns the target space, one matrix per old vertex, and the vertex map.
    """
    mats = []
    for v, (outs, ins) in enumerate(old.verts):
        mats.append(slot_action(E, (len(outs), len(ins)), c.out_perm[v], c.in_perm[v]))
    return decorated_space(E, c.tree), mats, c.vmap


def assemble(target: DecoratedSpace, source: DecoratedSpace, mats: Sequence[Mat], vmap: Sequence[int]) -> Mat:
    """Tensor the per-vertex matrices into a map E(source) -> E(target)."""
    k = len(vmap)
    inv = [0] * k
    for v, w in enumerate(vmap):
        inv[w] = v
    col_dicts = [m.col_dicts() for m in mats]
    out: Dict[Tuple[int, int], Rat] = {}
    for src_index in range(source.dim):
        deco = source.deco(src_index)
        # images per target vertex
        terms = [list(col_dicts[inv[w]][deco[inv[w]]].items()) for w in range(k)]
        if any(not t for t in terms):
            continue
        for combo in itertools.product(*terms):
            coeff = Rat(1)
            new = []
            for r, x in combo:
                coeff *= x
                new.append(r)
            key = (target.index(new), src_index)
            out[key] = out.get(key, 0) + coeff
    return Mat(target.dim, source.dim, {k_: v for k_, v in out.items() if v != 0})


def relabel_action(E: SpaceMap, d: DecoratedSpace, pi: Perm, sigma: Perm) -> Tuple[DecoratedSpace, Mat]:
    """Action of (pi, sigma) on the summand E(T): returns E(T') and the matrix E(T) -> E(T')."""
    t = d.tree
    if len(pi) != t.m or len(sigma) != t.n:
        raise ActionError("permutation sizes do not match the tree")
    if t.is_unit():
        return d, Mat.identity(1)
    c = relabel(t, {k + 1: pi[k] + 1 for k in range(t.m)}, {k + 1: sigma[k] + 1 for k in range(t.n)})
    target, mats, vmap = transport(E, c, t)
    return target, assemble(target, d, mats, vmap)
