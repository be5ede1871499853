"""Presentation files: a line-oriented grammar and its canonical printer.

    name bilie
    gen l (1,2) dim=1 act_out=[] act_in=[[-1]]
    gen d (2,1) dim=1 act_out=[[-1]] act_in=[]
    rel drinfeld (2,2) = comp(d,1,1,l) - comp(l,1,1,d) - ...

``act_out``/``act_in`` give the matrix of the transposition (1 2) on the
output/input side (row-major; ``[]`` on the side with one slot).  A generator
of dimension K > 1 has basis elements ``NAME[0] .. NAME[K-1]``.  Terms are
``comp(F, i, j, G)`` (output j of G into input i of F), ``act(out:C, in:C, T)``
(relabel roots/leaves by cycle-notation permutations, ``id`` for none) and
generator names.  Coefficients are integers or ``p/q``.  ``#`` starts a
comment; a line starting with whitespace continues the previous statement.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..ratlin import Echelon, Mat
from ..sbimod import ActionError, SBimoduleSpace, all_perms, format_cycles, identity_perm
from ..diopcore.free import GeneratorSet, Vec, act, add_into, compose, free_slice
from ..diopcore.presentation import (GEN_SHAPES, QUADRATIC_SLOTS, NamedRelation, Presentation,
                                     PresentationError, make_presentation)


class ParseError(ValueError):
    """A problem in a presentation file, located by 1-based line and column."""

    def __init__(self, msg: str, line: int = 0, col: int = 0, token: str = ""):
        self.msg, self.line, self.col, self.token = msg, line, col, token
        where = f"line {line}, column {col}: " if line else ""
        near = f" (at {token!r})" if token else ""
        super().__init__(f"{where}{msg}{near}")


class ArityRangeError(ParseError):
    pass


# ---------------------------------------------------------------------------
# tokens

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_^!']*)|(?P<num>\d+)|(?P<punct>[()\[\],=*+\-/:]))")


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize_line(text: str, lineno: int) -> List[Tok]:
    out, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mt = _TOKEN.match(text, pos)
        if mt is None or mt.end() == pos:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ParseError("unexpected character", lineno, col, text[col - 1])
        kind = mt.lastgroup
        out.append(Tok(kind, mt.group(kind), lineno, mt.start(kind) + 1))
        pos = mt.end()
    return out


def statements(text: str) -> List[List[Tok]]:
    """Split into statements: comments dropped, indented lines joined to the previous one."""
    stmts: List[List[Tok]] = []
    for k, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        toks = _tokenize_line(line, k)
        if line[0].isspace() and stmts:
            stmts[-1].extend(toks)
        else:
            stmts.append(toks)
    return stmts


class _Stream:
    def __init__(self, toks: List[Tok]):
        self.toks, self.i = toks, 0

    def peek(self, k: int = 0) -> Optional[Tok]:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def next(self, what: str = "token") -> Tok:
        t = self.peek()
        if t is None:
            last = self.toks[-1]
            raise ParseError(f"expected {what}, got end of statement", last.line, last.col + len(last.text))
        self.i += 1
        return t

    def expect(self, text: str) -> Tok:
        t = self.next(repr(text))
        if t.text != text:
            raise ParseError(f"expected {text!r}", t.line, t.col, t.text)
        return t

    def integer(self) -> Tuple[int, Tok]:
        t = self.next("an integer")
        if t.kind != "num":
            raise ParseError("expected an integer", t.line, t.col, t.text)
        return int(t.text), t

    def accept(self, text: str) -> bool:
        t = self.peek()
        if t is not None and t.text == text:
            self.i += 1
            return True
        return False

    def done(self) -> None:
        t = self.peek()
        if t is not None:
            raise ParseError("unexpected trailing input", t.line, t.col, t.text)


# ---------------------------------------------------------------------------
# terms

@dataclass(frozen=True)
class Gen:
    name: str
    index: Optional[int]
    tok: Tok


@dataclass(frozen=True)
class Comp:
    f: "Term"
    i: int
    j: int
    g: "Term"
    itok: Tok
    jtok: Tok


@dataclass(frozen=True)
class Act:
    out: Tuple[Tuple[int, ...], ...]
    inn: Tuple[Tuple[int, ...], ...]
    term: "Term"
    otok: Tok
    itok: Tok


Term = Union[Gen, Comp, Act]
Combination = List[Tuple[Fraction, Term]]


def _cycles(s: _Stream) -> Tuple[Tuple[Tuple[int, ...], ...], Tok]:
    first = s.peek()
    if first is not None and first.text == "id":
        s.next()
        return (), first
    cycles = []
    while s.peek() is not None and s.peek().text == "(":
        open_tok = s.next()
        pts: List[int] = []
        nums = []
        while not s.accept(")"):
            v, t = s.integer()
            nums.append(t)
            pts.append(v)
            s.accept(",")
        if len(nums) == 1 and len(nums[0].text) > 1:
            pts = [int(c) for c in nums[0].text]          # (123) shorthand
        if len(set(pts)) != len(pts) or 0 in pts:
            raise ParseError("bad cycle", open_tok.line, open_tok.col, "(")
        cycles.append(tuple(pts))
    if not cycles:
        t = s.next("a permutation")
        raise ParseError("expected a permutation in cycle notation or 'id'", t.line, t.col, t.text)
    return tuple(cycles), first


def parse_term(s: _Stream) -> Term:
    t = s.next("a term")
    if t.kind != "name":
        raise ParseError("expected a term", t.line, t.col, t.text)
    if t.text == "comp" and s.peek() is not None and s.peek().text == "(":
        s.expect("(")
        f = parse_term(s)
        s.expect(",")
        i, itok = s.integer()
        s.expect(",")
        j, jtok = s.integer()
        s.expect(",")
        g = parse_term(s)
        s.expect(")")
        return Comp(f, i, j, g, itok, jtok)
    if t.text == "act" and s.peek() is not None and s.peek().text == "(":
        s.expect("(")
        s.expect("out")
        s.expect(":")
        out, otok = _cycles(s)
        s.expect(",")
        s.expect("in")
        s.expect(":")
        inn, itok = _cycles(s)
        s.expect(",")
        term = parse_term(s)
        s.expect(")")
        return Act(out, inn, term, otok, itok)
    index = None
    if s.accept("["):
        index, _ = s.integer()
        s.expect("]")
    return Gen(t.text, index, t)


def _coefficient(s: _Stream) -> Fraction:
    num, _ = s.integer()
    den = 1
    if s.accept("/"):
        den, dt = s.integer()
        if den == 0:
            raise ParseError("zero denominator", dt.line, dt.col, dt.text)
    s.expect("*")
    return Fraction(num, den)


def parse_combination(s: _Stream) -> Combination:
    out: Combination = []
    first = True
    while s.peek() is not None:
        sign = 1
        if s.accept("-"):
            sign = -1
        elif not s.accept("+") and not first:
            t = s.peek()
            raise ParseError("expected '+' or '-'", t.line, t.col, t.text)
        c = Fraction(1)
        if s.peek() is not None and s.peek().kind == "num":
            c = _coefficient(s)
        out.append((sign * c, parse_term(s)))
        first = False
    if not out:
        raise ParseError("empty relation")
    return out


# ---------------------------------------------------------------------------
# statements

@dataclass
class GenDecl:
    name: str
    shape: Tuple[int, int]
    dim: int
    act_out: Optional[List[List[Fraction]]]
    act_in: Optional[List[List[Fraction]]]
    tok: Tok


@dataclass
class RelDecl:
    name: Optional[str]
    slot: Tuple[int, int]
    combo: Combination
    tok: Tok


@dataclass
class PresentationFile:
    name: Optional[str]
    gens: List[GenDecl]
    rels: List[RelDecl]


def _pair(s: _Stream) -> Tuple[Tuple[int, int], Tok]:
    t = s.expect("(")
    a, _ = s.integer()
    s.expect(",")
    b, _ = s.integer()
    s.expect(")")
    return (a, b), t


def _number(s: _Stream) -> Fraction:
    sign = -1 if s.accept("-") else 1
    num, _ = s.integer()
    den = 1
    if s.accept("/"):
        den, dt = s.integer()
        if den == 0:
            raise ParseError("zero denominator", dt.line, dt.col, dt.text)
    return sign * Fraction(num, den)


def _matrix(s: _Stream) -> Optional[List[List[Fraction]]]:
    s.expect("[")
    if s.accept("]"):
        return None
    rows = []
    while True:
        s.expect("[")
        row = []
        if not s.accept("]"):
            row.append(_number(s))
            while s.accept(","):
                row.append(_number(s))
            s.expect("]")
        rows.append(row)
        if s.accept("]"):
            return rows
        s.expect(",")


def _gen(s: _Stream, head: Tok) -> GenDecl:
    t = s.next("a generator name")
    if t.kind != "name":
        raise ParseError("expected a generator name", t.line, t.col, t.text)
    shape, _ = _pair(s)
    opts: Dict[str, object] = {}
    while s.peek() is not None:
        k = s.next()
        if k.text not in ("dim", "act_out", "act_in") or k.text in opts:
            raise ParseError("expected dim=, act_out= or act_in=", k.line, k.col, k.text)
        s.expect("=")
        opts[k.text] = s.integer()[0] if k.text == "dim" else _matrix(s)
    return GenDecl(t.text, shape, int(opts.get("dim", 1)), opts.get("act_out"), opts.get("act_in"), t)


def _rel(s: _Stream, head: Tok) -> RelDecl:
    name = None
    t = s.peek()
    if t is not None and t.kind == "name":
        name = s.next().text
    slot, st = _pair(s)
    s.expect("=")
    return RelDecl(name, slot, parse_combination(s), st)


def parse_file(text: str) -> PresentationFile:
    name = None
    gens: List[GenDecl] = []
    rels: List[RelDecl] = []
    for toks in statements(text):
        s = _Stream(toks)
        head = s.next()
        if head.text == "name":
            t = s.next("a name")
            name = t.text
            s.done()
        elif head.text == "gen":
            gens.append(_gen(s, head))
        elif head.text == "rel":
            rels.append(_rel(s, head))
        else:
            raise ParseError("expected 'name', 'gen' or 'rel'", head.line, head.col, head.text)
    return PresentationFile(name, gens, rels)


# ---------------------------------------------------------------------------
# evaluation

def _space(g: GenDecl) -> SBimoduleSpace:
    a, b = g.shape
    if g.shape not in GEN_SHAPES:
        raise ParseError("generators must have shape (1,2) or (2,1)", g.tok.line, g.tok.col, g.tok.text)
    if g.dim < 1:
        raise ParseError("dimension must be positive", g.tok.line, g.tok.col, g.tok.text)
    sides = []
    for size, m, label in ((a, g.act_out, "act_out"), (b, g.act_in, "act_in")):
        if size == 1:
            if m is not None:
                raise ParseError(f"{label} must be [] on a side with one slot", g.tok.line, g.tok.col, g.tok.text)
            sides.append(())
            continue
        if m is None:
            raise ParseError(f"{label} is required", g.tok.line, g.tok.col, g.tok.text)
        if len(m) != g.dim or any(len(r) != g.dim for r in m):
            raise ParseError(f"{label} must be {g.dim}x{g.dim}", g.tok.line, g.tok.col, g.tok.text)
        sides.append((Mat.from_rows(m),))
    try:
        sp = SBimoduleSpace(a, b, g.dim, sides[0], sides[1], 0, g.name)
        sp.check()
    except ActionError as exc:
        raise ParseError(f"action matrix is not involutive ({exc})", g.tok.line, g.tok.col, g.tok.text) from None
    return sp


def generator_set(gens: Sequence[GenDecl]) -> Tuple[GeneratorSet, Dict[str, Tuple[Tuple[int, int], int, int]]]:
    spaces, names, lookup = {}, {}, {}
    for g in gens:
        if g.shape in spaces:
            raise ParseError(f"a generator of shape {g.shape} is already declared", g.tok.line, g.tok.col, g.tok.text)
        if g.name in ("comp", "act", "id"):
            raise ParseError("reserved word used as a generator name", g.tok.line, g.tok.col, g.tok.text)
        if any(v[0] == g.name for v in lookup.values()) or g.name in lookup:
            raise ParseError("duplicate generator name", g.tok.line, g.tok.col, g.tok.text)
        spaces[g.shape] = _space(g)
        names[g.shape] = (g.name,) if g.dim == 1 else tuple(f"{g.name}[{k}]" for k in range(g.dim))
        lookup[g.name] = (g.shape, g.dim, 0)
    return GeneratorSet(spaces, names), lookup


def _perm(cycles: Tuple[Tuple[int, ...], ...], n: int, tok: Tok) -> Tuple[int, ...]:
    p = list(range(n))
    for c in cycles:
        if any(x > n for x in c):
            raise ArityRangeError(f"cycle point outside 1..{n}", tok.line, tok.col, tok.text)
        for a, b in zip(c, c[1:] + c[:1]):
            p[a - 1] = b - 1
    return tuple(p)


def evaluate(E: GeneratorSet, lookup, term: Term) -> Tuple[Vec, Tuple[int, int]]:
    if isinstance(term, Gen):
        hit = lookup.get(term.name)
        if hit is None:
            raise ParseError("unknown generator", term.tok.line, term.tok.col, term.tok.text)
        shape, dim, _ = hit
        k = 0 if term.index is None else term.index
        if term.index is None and dim > 1:
            raise ParseError(f"generator has dimension {dim}; write {term.name}[k]",
                             term.tok.line, term.tok.col, term.tok.text)
        if not 0 <= k < dim:
            raise ArityRangeError(f"basis index outside 0..{dim - 1}", term.tok.line, term.tok.col, term.tok.text)
        return E.generator(shape, k), shape
    if isinstance(term, Comp):
        f, (fm, fn) = evaluate(E, lookup, term.f)
        g, (gm, gn) = evaluate(E, lookup, term.g)
        if not 1 <= term.i <= fn:
            raise ArityRangeError(f"input index {term.i} outside 1..{fn}", term.itok.line, term.itok.col, term.itok.text)
        if not 1 <= term.j <= gm:
            raise ArityRangeError(f"output index {term.j} outside 1..{gm}", term.jtok.line, term.jtok.col, term.jtok.text)
        return compose(E, f, term.i, term.j, g), (fm + gm - 1, fn + gn - 1)
    v, (m, n) = evaluate(E, lookup, term.term)
    return act(E, _perm(term.out, m, term.otok), _perm(term.inn, n, term.itok), v), (m, n)


def build(pf: PresentationFile, default_name: str = "presentation") -> Presentation:
    E, lookup = generator_set(pf.gens)
    named = []
    counts: Dict[Tuple[int, int], int] = {}
    for r in pf.rels:
        if r.slot not in QUADRATIC_SLOTS:
            raise ParseError("relations live in (1,3), (3,1) or (2,2)", r.tok.line, r.tok.col, "(")
        vec: Vec = {}
        for c, term in r.combo:
            v, shape = evaluate(E, lookup, term)
            if shape != r.slot:
                tok = _first_tok(term)
                raise ParseError(f"term has bi-arity {shape}, relation is declared in {r.slot}",
                                 tok.line, tok.col, tok.text)
            add_into(vec, v, c)
        counts[r.slot] = counts.get(r.slot, 0) + 1
        name = r.name or f"R{r.slot[0]}{r.slot[1]}_{counts[r.slot]}"
        named.append(NamedRelation(name, r.slot, vec, format_combination(r.combo)))
    try:
        return make_presentation(pf.name or default_name, E, named)
    except PresentationError as exc:
        raise ParseError(str(exc)) from None


def _first_tok(term: Term) -> Tok:
    if isinstance(term, Gen):
        return term.tok
    if isinstance(term, Comp):
        return _first_tok(term.f)
    return term.otok


def parse(text: str, default_name: str = "presentation") -> Presentation:
    return build(parse_file(text), default_name)


# ---------------------------------------------------------------------------
# printing

def _fmt_q(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _fmt_cycles(c) -> str:
    return "id" if not c else "".join("(" + " ".join(map(str, cyc)) + ")" for cyc in c)


def format_term(t: Term) -> str:
    if isinstance(t, Gen):
        return t.name if t.index is None else f"{t.name}[{t.index}]"
    if isinstance(t, Comp):
        return f"comp({format_term(t.f)},{t.i},{t.j},{format_term(t.g)})"
    return f"act(out:{_fmt_cycles(t.out)}, in:{_fmt_cycles(t.inn)}, {format_term(t.term)})"


def format_combination(combo: Sequence[Tuple[Fraction, Union[Term, str]]]) -> str:
    parts = []
    for k, (c, t) in enumerate(combo):
        body = t if isinstance(t, str) else format_term(t)
        mag = abs(c)
        txt = body if mag == 1 else f"{_fmt_q(mag)}*{body}"
        if k == 0:
            parts.append(("-" if c < 0 else "") + txt)
        else:
            parts.append(("- " if c < 0 else "+ ") + txt)
    return " ".join(parts)


def _fmt_matrix(m: Optional[Mat]) -> str:
    if m is None:
        return "[]"
    return "[" + ",".join("[" + ",".join(_fmt_q(x) for x in row) + "]" for row in m.to_dense()) + "]"


def _cycle_tuple(p) -> Tuple[Tuple[int, ...], ...]:
    txt = format_cycles(p)
    if txt == "id":
        return ()
    return tuple(tuple(int(x) for x in c.split()) for c in txt[1:-1].split(")("))


def base_name(E: GeneratorSet, shape) -> str:
    names = E.names[shape]
    if len(names) == 1:
        return names[0]
    stem = names[0].split("[", 1)[0]
    if all(x == f"{stem}[{k}]" for k, x in enumerate(names)):
        return stem
    return re.sub(r"[^A-Za-z0-9_]", "", E[shape].name) or ("g" if shape == (1, 2) else "h")


def _gen_term(E: GeneratorSet, shape, k) -> Gen:
    name = base_name(E, shape)
    return Gen(name, None if E[shape].dim == 1 else k, None)


def _candidates(E: GeneratorSet, slot):
    """Relabelled two-generator composites spanning F(E)(slot), simplest first."""
    m, n = slot
    out = []
    for sf, sg in ((a, b) for a in sorted(E.shapes) for b in sorted(E.shapes)):
        if sf[0] + sg[0] - 1 != m or sf[1] + sg[1] - 1 != n:
            continue
        for kf in range(E[sf].dim):
            for kg in range(E[sg].dim):
                for i in range(1, sf[1] + 1):
                    for j in range(1, sg[0] + 1):
                        base = Comp(_gen_term(E, sf, kf), i, j, _gen_term(E, sg, kg), None, None)
                        vec = compose(E, E.generator(sf, kf), i, j, E.generator(sg, kg))
                        out.append((0, base, vec))
                        for pi in all_perms(m):
                            for sg_ in all_perms(n):
                                if pi == identity_perm(m) and sg_ == identity_perm(n):
                                    continue
                                t = Act(_cycle_tuple(pi), _cycle_tuple(sg_), base, None, None)
                                out.append((1, t, act(E, pi, sg_, vec)))
    out.sort(key=lambda x: x[0])
    return [(t, v) for _, t, v in out]


def express(E: GeneratorSet, slot, vec: Vec) -> Combination:
    """Write a free element of a quadratic slot as a combination of composite terms."""
    sl = free_slice(E, *slot)
    ech = Echelon(sl.dim)
    chosen = []
    for t, v in _candidates(E, slot):
        if ech.add(sl.to_sparse(v)) is not None:
            chosen.append((t, sl.to_sparse(v)))
            if len(chosen) == sl.dim:
                break
    # solve sum c_k chosen_k = vec by elimination on the square system
    n = len(chosen)
    rows = [[chosen[c][1].get(r, Fraction(0)) for c in range(n)] + [Fraction(sl.to_sparse(vec).get(r, 0))]
            for r in range(sl.dim)]
    piv_cols = []
    r = 0
    for c in range(n):
        p = next((k for k in range(r, len(rows)) if rows[k][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][c] != 0:
                f = rows[k][c]
                rows[k] = [x - f * y for x, y in zip(rows[k], rows[r])]
        piv_cols.append(c)
        r += 1
    coeff = {c: rows[k][n] for k, c in enumerate(piv_cols)}
    out = [(coeff[c], chosen[c][0]) for c in sorted(coeff) if coeff[c] != 0]
    if out and out[0][0] < 0:
        out = [(-c, t) for c, t in out]       # a relation is only defined up to scale
    return out


def format_presentation(p: Presentation) -> str:
    """Canonical file text.  Relations keep their source terms when they have them."""
    lines = [f"name {p.name}"]
    for shape in GEN_SHAPES:
        if shape not in p.E:
            continue
        sp = p.E[shape]
        og = sp.out_gens[0] if sp.out_gens else None
        ig = sp.in_gens[0] if sp.in_gens else None
        lines.append(f"gen {base_name(p.E, shape)} ({shape[0]},{shape[1]}) dim={sp.dim} "
                     f"act_out={_fmt_matrix(og)} act_in={_fmt_matrix(ig)}")
    named = p.named or _spanning_relations(p)
    for r in named:
        body = r.source or format_combination(express(p.E, r.slot, r.vec))
        lines.append(f"rel {r.name} ({r.slot[0]},{r.slot[1]}) = {body}")
    return "\n".join(lines) + "\n"


def _spanning_relations(p: Presentation) -> List[NamedRelation]:
    out = []
    for slot in QUADRATIC_SLOTS:
        for k, v in enumerate(p.relation_vectors(slot)):
            out.append(NamedRelation(f"R{slot[0]}{slot[1]}_{k + 1}", slot, v))
    return out
