"""Command-line front end.

    diopkit dims bilie --max-weight 4
    diopkit dual bilie > bilie_dual.diop
    diopkit koszul path/to/file.diop --max-weight 3 --format json

Exit codes: 0 success or EXACT, 1 property violated / NONEXACT / NEITHER,
2 usage or parse error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from ..ratlin import Mat
from ..diopcore.algebra import AlgebraShapeError, check_algebra
from ..diopcore.axioms import axiom_suite
from ..diopcore.box import box_slice
from ..diopcore.free import free_slice
from ..diopcore.ideal import quotient_slice
from ..diopcore.presentation import QUADRATIC_SLOTS, Presentation
from ..koszul.cobar import cobar_slice
from ..koszul.dual import quadratic_dual
from ..koszul.kcomplex import koszul_slice
from ..koszul.verdict import distributive_check
from .cache import Cache
from .grammar import ParseError, format_presentation, parse
from .report import Report, Table

BUILTINS = ("lie", "com", "bilie", "bilie_dual", "ibial")
ALIASES = {"bilie!": "bilie_dual"}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# loading

def builtin_text(name: str) -> str:
    return resources.files("diopkit").joinpath("data", f"{name}.diop").read_text(encoding="utf-8")


def load_text(spec: str) -> str:
    name = ALIASES.get(spec, spec)
    if name in BUILTINS:
        return builtin_text(name)
    path = Path(spec)
    if not path.is_file():
        raise UsageError(f"{spec!r} is neither a builtin ({', '.join(BUILTINS)}) nor a readable file")
    return path.read_text(encoding="utf-8")


_PARSED: Dict[str, Presentation] = {}


def presentation_from_text(text: str, dual: bool = False) -> Presentation:
    """Parse once per process; later calls share the slice caches."""
    key = ("dual:" if dual else "") + text
    hit = _PARSED.get(key)
    if hit is None:
        p = parse(text)
        hit = quadratic_dual(p) if dual else p
        _PARSED[key] = hit
    return hit


def arities(W: int, lowest: int = 0):
    for w in range(lowest, W + 1):
        for m in range(1, w + 2):
            yield m, w + 2 - m


def _hom(d: Dict[int, int]) -> Dict[str, int]:
    return {str(k): v for k, v in sorted(d.items())}


# ---------------------------------------------------------------------------
# per-arity work (runs in worker processes when --jobs > 1)

def compute(text: str, module: str, m: int, n: int, dual: bool = False):
    p = presentation_from_text(text, dual)
    if module == "quotient":
        return {"free": free_slice(p.E, m, n).dim, "quotient": quotient_slice(p, m, n).dim}
    if module == "koszul":
        ks = koszul_slice(p, m, n)
        return {"terms": _hom(ks.complex.dims), "homology": _hom(ks.homology)}
    if module == "cobar":
        cs = cobar_slice(p, m, n)
        return {"terms": _hom(cs.complex.dims), "homology": _hom(cs.homology)}
    raise ValueError(module)


def _norm(v):
    """Degree-keyed tables in numeric order, however they were stored."""
    if isinstance(v, dict):
        keys = sorted(v, key=lambda k: (int(k), k) if k.lstrip("-").isdigit() else (0, k))
        return {k: _norm(v[k]) for k in keys}
    return v


def _compute_star(args):
    return compute(*args)


class Runner:
    def __init__(self, cache: Cache, jobs: int):
        self.cache, self.jobs = cache, max(1, jobs)

    def batch(self, text: str, digest: str, module: str, shapes: Sequence[Tuple[int, int]], dual: bool = False):
        out, todo = {}, []
        for s in shapes:
            hit = self.cache.get(digest, module, s)
            if hit is None:
                todo.append(s)
            else:
                out[s] = _norm(hit)
        if todo:
            # heavier arities last so small ones warm the per-process caches
            if self.jobs > 1 and len(todo) > 1:
                with ProcessPoolExecutor(self.jobs) as ex:
                    vals = list(ex.map(_compute_star, [(text, module, m, n, dual) for m, n in todo]))
            else:
                vals = [compute(text, module, m, n, dual) for m, n in todo]
            for s, v in zip(todo, vals):
                self.cache.put(digest, module, s, v)
                out[s] = _norm(v)
        return out


def _ident(p: Presentation) -> Dict[str, str]:
    return {"name": p.name, "digest": p.digest()}


# ---------------------------------------------------------------------------
# commands

def cmd_dims(args, run: Runner) -> Report:
    text = load_text(args.presentation)
    p = presentation_from_text(text)
    res = run.batch(text, p.digest(), "quotient", list(arities(args.max_weight)))
    rows = [[f"({m},{n})", m + n - 2, v["free"], v["quotient"]] for (m, n), v in res.items()]
    rep = Report(f"dims {args.presentation} --max-weight {args.max_weight}", _ident(p))
    rep.tables.append(Table("quotient dimensions", ["(m,n)", "weight", "free", "quotient"], rows))
    return rep


def cmd_dual(args, run: Runner) -> Report:
    p = presentation_from_text(load_text(args.presentation))
    d = quadratic_dual(p)
    rep = Report(f"dual {args.presentation}", _ident(p), text=format_presentation(d))
    if args.format == "json":
        rows = [[f"({a},{b})", p.relations[(a, b)].dim, d.relations[(a, b)].dim, free_slice(p.E, a, b).dim]
                for a, b in QUADRATIC_SLOTS]
        rep.tables.append(Table("relation dimensions", ["slot", "R", "R_perp", "free"], rows))
    return rep


def cmd_cobar(args, run: Runner) -> Report:
    text = load_text(args.presentation)
    p = presentation_from_text(text)
    shapes = list(arities(args.max_weight, 1))
    res = run.batch(text, p.digest(), "cobar", shapes)
    d = presentation_from_text(text, dual=True)
    dd = run.batch(text, d.digest(), "quotient", shapes, dual=True)
    rows, bad = [], []
    for s in shapes:
        hom = {int(k): v for k, v in res[s]["homology"].items()}
        conc = all(v == 0 for k, v in hom.items() if k != 0)
        h0_ok = hom.get(0, 0) == dd[s]["quotient"]
        rows.append([f"({s[0]},{s[1]})", res[s]["terms"], res[s]["homology"], dd[s]["quotient"],
                     "yes" if conc and h0_ok else "NO"])
        if not (conc and h0_ok):
            bad.append(s)
    rep = Report(f"cobar {args.presentation} --max-weight {args.max_weight}", _ident(p))
    rep.tables.append(Table("cobar dual complexes", ["(m,n)", "terms", "homology", "dual_dim", "H=H0=dual"], rows))
    if bad:
        rep.verdict = "NOT CONCENTRATED at " + ", ".join(f"({m},{n})" for m, n in bad)
        rep.exit_code = 1
    else:
        rep.verdict = f"CONCENTRATED in degree 0 up to weight {args.max_weight}"
    return rep


def cmd_koszul(args, run: Runner) -> Report:
    text = load_text(args.presentation)
    p = presentation_from_text(text)
    shapes = list(arities(args.max_weight, 1))
    res = run.batch(text, p.digest(), "koszul", shapes)
    cshapes = [s for s in shapes if s[0] + s[1] - 2 <= args.cobar_weight]
    cob = run.batch(text, p.digest(), "cobar", cshapes)
    rows, nonexact, disagree = [], [], []
    for s in shapes:
        exact = all(v == 0 for v in res[s]["homology"].values())
        if not exact:
            nonexact.append(s)
        cell = None
        if s in cob:
            conc = all(v == 0 for k, v in cob[s]["homology"].items() if k != "0")
            cell = "yes" if conc else "no"
            earlier_exact = all(t not in nonexact for t in shapes if sum(t) < sum(s))
            if conc != exact and earlier_exact:
                disagree.append(s)
        rows.append([f"({s[0]},{s[1]})", res[s]["terms"], res[s]["homology"],
                     "EXACT" if exact else "NONEXACT", cell])
    rep = Report(f"koszul {args.presentation} --max-weight {args.max_weight} --cobar-weight {args.cobar_weight}",
                 _ident(p))
    rep.tables.append(Table("Koszul complexes", ["(m,n)", "terms", "homology", "verdict", "cobar_concentrated"], rows))
    for s in disagree:
        rep.messages.append(f"warning: Koszul and cobar tests disagree at ({s[0]},{s[1]})")
    if nonexact:
        rep.verdict = "NONEXACT at " + ", ".join(f"({m},{n})" for m, n in nonexact)
        rep.exit_code = 1
    else:
        rep.verdict = f"EXACT up to weight {args.max_weight}"
    return rep


def cmd_box(args, run: Runner) -> Report:
    p = presentation_from_text(load_text(args.first))
    if args.second is None:
        v = distributive_check(p)
        rep = Report(f"box {args.first}", _ident(p))
        cols = sorted({k for row in v.dims.values() for k in row})
        rep.tables.append(Table("decomposition test", ["(m,n)"] + cols,
                                [[f"({m},{n})"] + [row.get(c) for c in cols] for (m, n), row in sorted(v.dims.items())]))
        if v.dual_dims:
            rep.tables.append(Table("dual check", ["(m,n)", "P!", "box"],
                                    [[f"({m},{n})", r["P!"], r["box"]] for (m, n), r in sorted(v.dual_dims.items())]))
        rep.verdict = v.verdict.value
        if v.dual_ok is False:
            rep.messages.append("dual does not decompose as the reversed box product of the dual factors")
        rep.exit_code = 0 if v.passed else 1
        return rep
    q = presentation_from_text(load_text(args.second))
    digest = hashlib.sha256((p.digest() + q.digest()).encode()).hexdigest()[:16]
    rows = []
    for s in arities(args.max_weight):
        hit = run.cache.get(digest, "box", s)
        if hit is None:
            hit = box_slice(p, q, *s).dim
            run.cache.put(digest, "box", s, hit)
        rows.append([f"({s[0]},{s[1]})", s[0] + s[1] - 2, hit])
    rep = Report(f"box {args.first} {args.second} --max-weight {args.max_weight}",
                 {"name": f"{p.name} [] {q.name}", "digest": digest})
    rep.tables.append(Table("box product dimensions", ["(m,n)", "weight", "dim"], rows))
    return rep


def cmd_check(args, run: Runner) -> Report:
    p = presentation_from_text(load_text(args.presentation))
    ax = axiom_suite(p.E, args.cases, args.seed)
    stable = p.is_stable()
    rows = [[f"({a},{b})", free_slice(p.E, a, b).dim, p.relations[(a, b)].dim] for a, b in QUADRATIC_SLOTS]
    rep = Report(f"check {args.presentation} --seed {args.seed} --cases {args.cases}", _ident(p))
    rep.tables.append(Table("relations", ["slot", "free", "R"], rows))
    rep.tables.append(Table("checks", ["check", "result"], [
        [f"dioperad axioms on {ax.cases} composites", "ok" if ax.ok else f"{len(ax.failures)} failures"],
        ["relations closed under the bimodule action", "ok" if stable else "FAILED"],
    ]))
    ok = ax.ok and stable
    rep.verdict = "OK" if ok else "FAILED"
    rep.exit_code = 0 if ok else 1
    return rep


def _matrix(text: str, where: str) -> Mat:
    try:
        rows = json.loads(text)
        return Mat.from_rows([[Fraction(x) for x in r] for r in rows])
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"{where}: cannot read matrix ({exc})") from None


def cmd_verify(args, run: Runner) -> Report:
    p = presentation_from_text(load_text(args.presentation))
    given: Dict[str, str] = {}
    if args.maps:
        try:
            data = json.loads(Path(args.maps).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise UsageError(f"--maps: {exc}") from None
        given.update({k: json.dumps(v) for k, v in data.items()})
    for item in args.map or []:
        if "=" not in item:
            raise UsageError(f"--map expects NAME=MATRIX, got {item!r}")
        k, v = item.split("=", 1)
        given[k.strip()] = v
    maps = {}
    for shape, names in p.E.names.items():
        for k, nm in enumerate(names):
            if nm not in given:
                raise UsageError(f"no matrix given for generator {nm}")
            maps[(shape, k)] = _matrix(given.pop(nm), nm)
    if given:
        raise UsageError("unknown generator(s): " + ", ".join(sorted(given)))
    v = check_algebra(p, args.dim, maps)
    rows = [[r.name, f"({r.slot[0]},{r.slot[1]})", "violated" if r.name in v.violated else "ok"] for r in p.named]
    rep = Report(f"verify-algebra {args.presentation} --dim {args.dim}", _ident(p))
    rep.tables.append(Table("relations", ["relation", "slot", "result"], rows))
    if not v.equivariant:
        rep.messages.append("maps do not respect the symmetry of: " + ", ".join(v.asymmetric))
    rep.verdict = "ALGEBRA" if v.morphism else "NOT AN ALGEBRA (" + ", ".join(v.violated + v.asymmetric) + ")"
    rep.exit_code = 0 if v.morphism else 1
    return rep


COMMANDS = {"dims": cmd_dims, "dual": cmd_dual, "cobar": cmd_cobar, "koszul": cmd_koszul,
            "box": cmd_box, "check": cmd_check, "verify-algebra": cmd_verify}


# ---------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(x: str) -> int:
    v = int(x)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--max-weight", type=_positive, default=4, help="largest m+n-2 (default 4)")
    common.add_argument("--cache", default=".diopkit-cache", help="cache directory (default .diopkit-cache)")
    common.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")
    common.add_argument("--format", choices=("table", "json"), default="table")
    common.add_argument("--jobs", type=_positive, default=1, help="worker processes for per-arity work")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    ap = _Parser(prog="diopkit", description="Dioperads by generators and relations.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, helptext in (("dims", "free and quotient dimensions"), ("dual", "print the quadratic dual"),
                           ("cobar", "homology of the cobar dual complexes"),
                           ("koszul", "Koszul complex homology and verdict"),
                           ("check", "dioperad axioms and relation stability")):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("presentation", help="builtin name or presentation file")
        if name == "koszul":
            sp.add_argument("--cobar-weight", type=int, default=3, help="cross-check with the cobar complex up to this weight")
        if name == "check":
            sp.add_argument("--cases", type=_positive, default=500, help="minimum number of axiom checks")
    sp = sub.add_parser("box", parents=[common], help="box product dimensions, or the decomposition test for one presentation")
    sp.add_argument("first")
    sp.add_argument("second", nargs="?")
    sp = sub.add_parser("verify-algebra", parents=[common], help="is V = Q^dim an algebra over the presentation?")
    sp.add_argument("presentation")
    sp.add_argument("--dim", type=_positive, required=True)
    sp.add_argument("--map", action="append", metavar="NAME=MATRIX",
                    help="generator matrix as JSON rows, e.g. l=[[0,1,-1,0],[0,0,0,0]]")
    sp.add_argument("--maps", metavar="FILE", help="JSON object from generator names to matrices")
    return ap


def run(argv: Sequence[str], out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(list(argv))
        cache = Cache(None if args.no_cache else args.cache)
        runner = Runner(cache, args.jobs)
        t0 = time.perf_counter()
        rep = COMMANDS[args.command](args, runner)
    except (UsageError, ParseError, AlgebraShapeError) as exc:
        err.write(f"diopkit: error: {exc}\n")
        return 2
    out.write(rep.to_json() if args.format == "json" else rep.to_table())
    err.write(f"diopkit: {time.perf_counter() - t0:.2f}s, cache {cache.hits} hits / {cache.misses} misses\n")
    return rep.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
