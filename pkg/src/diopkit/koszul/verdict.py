"""Koszulity and distributive-law verdicts at bounded weight."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..diopcore.box import assembly_is_iso, box_slice
from ..diopcore.free import WeightBoundError
from ..diopcore.ideal import quotient_slice
from ..diopcore.presentation import Presentation, restrict
from .cobar import cobar_slice
from .dual import quadratic_dual
from .kcomplex import koszul_slice

TEST_ARITIES = ((2, 2), (2, 3), (3, 2))


class Exactness(str, enum.Enum):
    EXACT = "EXACT"
    NONEXACT = "NONEXACT"


@dataclass
class KoszulVerdict:
    name: str
    max_weight: int
    rows: Dict[Tuple[int, int], Exactness]
    homology: Dict[Tuple[int, int], Dict[int, int]]
    cobar: Dict[Tuple[int, int], Dict[int, int]] = field(default_factory=dict)
    disagreements: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def koszul(self) -> bool:
        return all(v is Exactness.EXACT for v in self.rows.values())

    def summary(self) -> str:
        if self.koszul:
            return f"{self.name}: Koszul up to weight {self.max_weight}"
        bad = ", ".join(f"({m},{n})" for (m, n), v in sorted(self.rows.items()) if v is Exactness.NONEXACT)
        return f"{self.name}: NONEXACT at {bad}"


def arities(W: int):
    """(m,n) with 3 <= m+n <= W+2, by weight then m."""
    for w in range(1, W + 1):
        for m in range(1, w + 2):
            yield m, w + 2 - m


def koszulity_check(p: Presentation, W: int, cobar_weight: Optional[int] = None,
                    early_exit: bool = False) -> KoszulVerdict:
    """Homology of the Koszul complex at every (m,n) up to weight W.

    Where the cobar complex is also computed (weight <= ``cobar_weight``,
    default W) its homology must vanish off degree 0 exactly when the Koszul
    complex is exact; a mismatch is recorded in ``disagreements``.
    """
    if W < 2:
        raise WeightBoundError("weight bound must be at least 2")
    cw = W if cobar_weight is None else cobar_weight
    rows, hom, cob, bad = {}, {}, {}, []
    for m, n in arities(W):
        ks = koszul_slice(p, m, n)
        hom[(m, n)] = dict(ks.homology)
        rows[(m, n)] = Exactness.EXACT if ks.is_exact() else Exactness.NONEXACT
        if m + n - 2 <= cw:
            cs = cobar_slice(p, m, n)
            cob[(m, n)] = dict(cs.homology)
            concentrated = all(v == 0 for k, v in cs.homology.items() if k != 0)
            # below the first failure both tests see the same weights
            if concentrated != (rows[(m, n)] is Exactness.EXACT) and all(
                    rows[s] is Exactness.EXACT for s in rows if sum(s) < m + n):
                bad.append((m, n))
        if early_exit and rows[(m, n)] is Exactness.NONEXACT:
            break
    return KoszulVerdict(p.name, W, rows, hom, cob, bad)


class Decomposition(str, enum.Enum):
    ROOT_12 = "DECOMPOSES(A[]B^op)"
    ROOT_21 = "DECOMPOSES(B^op[]A)"
    NEITHER = "NEITHER"


@dataclass
class DistributiveVerdict:
    name: str
    verdict: Decomposition
    dims: Dict[Tuple[int, int], Dict[str, int]]
    dual_ok: Optional[bool] = None
    dual_dims: Dict[Tuple[int, int], Dict[str, int]] = field(default_factory=dict)
    factors: Tuple[str, str] = ("", "")

    @property
    def passed(self) -> bool:
        return self.verdict is not Decomposition.NEITHER and self.dual_ok is not False


def _decomposes(p: Presentation, first: Presentation, second: Presentation, dims_row: Dict, label: str) -> bool:
    ok = True
    for m, n in TEST_ARITIES:
        b = box_slice(first, second, m, n).dim
        dims_row[(m, n)][label] = b
        if b != dims_row[(m, n)]["P"]:
            ok = False
    if not ok:
        return False
    return all(assembly_is_iso(p, first, second, m, n) for m, n in TEST_ARITIES)


def distributive_check(p: Presentation, dual_weight: int = 3) -> DistributiveVerdict:
    """Is P = A [] B^op with A generated in (1,2) and B^op in (2,1), or the other way round?

    Detection: dimensions at (2,2), (2,3), (3,2) and bijectivity of the
    composition map from the box product.  When P decomposes as X [] Y the
    dual must decompose as Y^! [] X^!; that is checked on dimensions up to
    ``dual_weight``.
    """
    A = restrict(p, (1, 2), name=f"{p.name}|(1,2)")
    B = restrict(p, (2, 1), name=f"{p.name}|(2,1)")
    dims = {s: {"P": quotient_slice(p, *s).dim} for s in TEST_ARITIES}
    if _decomposes(p, A, B, dims, "A[]B^op"):
        verdict, first, second = Decomposition.ROOT_12, A, B
    elif _decomposes(p, B, A, dims, "B^op[]A"):
        verdict, first, second = Decomposition.ROOT_21, B, A
    else:
        return DistributiveVerdict(p.name, Decomposition.NEITHER, dims)
    d = quadratic_dual(p)
    ds, df = quadratic_dual(second), quadratic_dual(first)
    dual_dims = {}
    ok = True
    for w in range(2, dual_weight + 1):
        for m in range(1, w + 2):
            n = w + 2 - m
            a, b = quotient_slice(d, m, n).dim, box_slice(ds, df, m, n).dim
            dual_dims[(m, n)] = {"P!": a, "box": b}
            ok = ok and a == b
    return DistributiveVerdict(p.name, verdict, dims, ok, dual_dims, (first.name, second.name))
