"""Exact rational linear algebra: sparse matrices, subspaces, chain complexes.

Everything is over the rationals; there is no floating point anywhere.
Elimination works on integer rows (fraction-free, each row kept primitive)
and only converts to :class:`fractions.Fraction` when a reduced row-echelon
basis is requested.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

Rat = Fraction

DENSE_BELOW = 64


class ShapeError(ValueError):
    pass


class SingularPairingError(ValueError):
    pass


def as_rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


class Mat:
    """Sparse rational matrix stored as ``{(row, col): nonzero Fraction}``."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Optional[Mapping] = None):
        if rows < 0 or cols < 0:
            raise ShapeError("negative dimension")
        self.rows = rows
        self.cols = cols
        self.entries: Dict[Tuple[int, int], Fraction] = {}
        if entries:
            for (r, c), v in entries.items():
                if not (0 <= r < rows and 0 <= c < cols):
                    raise ShapeError(f"entry {(r, c)} outside {rows}x{cols}")
                v = as_rat(v)
                if v:
                    self.entries[(r, c)] = v

    @classmethod
    def zero(cls, rows: int, cols: int) -> "Mat":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: Optional[int] = None) -> "Mat":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        ent = {}
        for r, row in enumerate(rows):
            if len(row) != cols:
                raise ShapeError("ragged rows")
            for c, v in enumerate(row):
                if v:
                    ent[(r, c)] = v
        return cls(len(rows), cols, ent)

    @classmethod
    def from_sparse_rows(cls, rows: Sequence[Mapping[int, Fraction]], cols: int) -> "Mat":
        ent = {}
        for r, row in enumerate(rows):
            for c, v in row.items():
                ent[(r, c)] = v
        return cls(len(rows), cols, ent)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, rc: Tuple[int, int]) -> Fraction:
        r, c = rc
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise ShapeError(f"index {rc} outside {self.shape}")
        return self.entries.get(rc, Fraction(0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __repr__(self) -> str:
        return f"Mat({self.rows}x{self.cols}, nnz={len(self.entries)})"

    def to_dense(self) -> List[List[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def row_dicts(self) -> List[Dict[int, Fraction]]:
        rows: List[Dict[int, Fraction]] = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return rows

    def col_dicts(self) -> List[Dict[int, Fraction]]:
        cols: List[Dict[int, Fraction]] = [dict() for _ in range(self.cols)]
        for (r, c), v in self.entries.items():
            cols[c][r] = v
        return cols

    def transpose(self) -> "Mat":
        return Mat(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    T = property(transpose)

    def scale(self, s) -> "Mat":
        s = as_rat(s)
        return Mat(self.rows, self.cols, {k: v * s for k, v in self.entries.items()})

    def __neg__(self) -> "Mat":
        return self.scale(-1)

    def __add__(self, other: "Mat") -> "Mat":
        if self.shape != other.shape:
            raise ShapeError(f"{self.shape} + {other.shape}")
        ent = dict(self.entries)
        for k, v in other.entries.items():
            w = ent.get(k, 0) + v
            if w:
                ent[k] = w
            else:
                ent.pop(k, None)
        return Mat(self.rows, self.cols, ent)

    def __sub__(self, other: "Mat") -> "Mat":
        return self + (-other)

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.cols != other.rows:
            raise ShapeError(f"{self.shape} @ {other.shape}")
        right = other.row_dicts()
        acc: Dict[Tuple[int, int], Fraction] = {}
        for (r, k), a in self.entries.items():
            for c, b in right[k].items():
                key = (r, c)
                acc[key] = acc.get(key, 0) + a * b
        return Mat(self.rows, other.cols, acc)

    def apply(self, vec: Mapping[int, Fraction]) -> Dict[int, Fraction]:
        """Matrix times a sparse column vector."""
        cols = self.col_dicts()
        out: Dict[int, Fraction] = {}
        for c, x in vec.items():
            for r, a in cols[c].items():
                out[r] = out.get(r, 0) + a * x
        return {k: v for k, v in out.items() if v}

    def is_zero(self) -> bool:
        return not self.entries

    def hstack(self, other: "Mat") -> "Mat":
        if self.rows != other.rows:
            raise ShapeError("hstack row mismatch")
        ent = dict(self.entries)
        for (r, c), v in other.entries.items():
            ent[(r, c + self.cols)] = v
        return Mat(self.rows, self.cols + other.cols, ent)

    def vstack(self, other: "Mat") -> "Mat":
        if self.cols != other.cols:
            raise ShapeError("vstack col mismatch")
        ent = dict(self.entries)
        for (r, c), v in other.entries.items():
            ent[(r + self.rows, c)] = v
        return Mat(self.rows + other.rows, self.cols, ent)


# ---------------------------------------------------------------------------
# fraction-free elimination


def _primitive(row: Dict[int, int]) -> Dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g not in (0, 1):
        row = {k: v // g for k, v in row.items()}
    return row


def _integer_row(row: Mapping[int, Fraction]) -> Dict[int, int]:
    den = 1
    for v in row.values():
        d = v.denominator if isinstance(v, Fraction) else 1
        den = den * d // gcd(den, d)
    out = {}
    for k, v in row.items():
        if v:
            out[k] = int(v * den)
    return out


class Echelon:
    """Incrementally maintained, fully reduced echelon form over the integers.

    Each stored row is primitive and has zeros in every other row's pivot
    column.  The pivot of a new row is its entry of smallest magnitude
    (ties broken by column index), which keeps coefficients small on the
    mostly-unimodular matrices produced by tree combinatorics.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivot_row: Dict[int, Dict[int, int]] = {}
        # column -> pivots of the stored rows with a nonzero entry there
        self._users: Dict[int, set] = {}

    def __len__(self) -> int:
        return len(self.pivot_row)

    @property
    def rank(self) -> int:
        return len(self.pivot_row)

    def reduce(self, row: Mapping) -> Dict[int, int]:
        """Reduce a vector against the stored rows; return an integer multiple of the remainder."""
        r = _integer_row(row) if not _is_int_row(row) else dict(row)
        piv = self.pivot_row
        hits = [c for c in r if c in piv]
        for c in hits:
            a = r.get(c)
            if not a:
                continue
            p = piv[c]
            b = p[c]
            if b != 1 and b != -1:
                g = gcd(a, b)
                fa, fb = b // g, a // g
                if fa != 1:
                    for k in r:
                        r[k] *= fa
            else:
                fb = a * b
            for k, v in p.items():
                w = r.get(k, 0) - fb * v
                if w:
                    r[k] = w
                else:
                    r.pop(k, None)
        return r

    def _store(self, pc: int, row: Dict[int, int]) -> None:
        old = self.pivot_row.get(pc)
        if old is not None:
            for k in old:
                if k not in row:
                    self._users[k].discard(pc)
        for k in row:
            self._users.setdefault(k, set()).add(pc)
        self.pivot_row[pc] = row

    def add(self, row: Mapping) -> Optional[int]:
        """Insert a row; return its pivot column, or None if it was dependent."""
        r = self.reduce(row)
        if not r:
            return None
        r = _primitive(r)
        c = min(r, key=lambda k: (abs(r[k]), k))
        b = r[c]
        for pc in sorted(self._users.get(c, ())):
            p = self.pivot_row[pc]
            a = p.get(c)
            if not a:
                continue
            g = gcd(a, b)
            fa, fb = b // g, a // g
            newp = {}
            for k, v in p.items():
                newp[k] = v * fa
            for k, v in r.items():
                w = newp.get(k, 0) - fb * v
                if w:
                    newp[k] = w
                else:
                    newp.pop(k, None)
            self._store(pc, _primitive(newp))
        self._store(c, r)
        return c

    def contains(self, row: Mapping) -> bool:
        return not self.reduce(row)

    def project(self, row: Mapping) -> Dict[int, Fraction]:
        """Exact remainder of ``row`` modulo the span; supported off the pivot columns."""
        r = {k: as_rat(v) for k, v in row.items() if v}
        piv = self.pivot_row
        for c in [c for c in r if c in piv]:
            a = r.get(c)
            if not a:
                continue
            p = piv[c]
            f = a / p[c]
            for k, v in p.items():
                w = r.get(k, 0) - f * v
                if w:
                    r[k] = w
                else:
                    r.pop(k, None)
        return r

    @property
    def pivots(self) -> List[int]:
        return sorted(self.pivot_row)

    def rref_rows(self) -> List[Dict[int, Fraction]]:
        """Rows of the reduced row-echelon basis (leading entry 1, sorted by leading column).

        The leading column of an RREF row is its smallest column, which need not be
        the elimination pivot, so the rows are re-reduced with standard pivoting.
        """
        return rref_from_rows(list(self.pivot_row.values()))


def _is_int_row(row: Mapping) -> bool:
    for v in row.values():
        return isinstance(v, int)
    return True


def rref_from_rows(rows: Iterable[Mapping]) -> List[Dict[int, Fraction]]:
    """Canonical RREF of the span of the given sparse rows."""
    piv: Dict[int, Dict[int, Fraction]] = {}
    for row in rows:
        r = {k: as_rat(v) for k, v in row.items() if v}
        # reduce against existing leading columns
        changed = True
        while r and changed:
            changed = False
            for c in sorted(k for k in r if k in piv):
                a = r.get(c)
                if not a:
                    continue
                for k, v in piv[c].items():
                    w = r.get(k, 0) - a * v
                    if w:
                        r[k] = w
                    else:
                        r.pop(k, None)
                changed = True
        if not r:
            continue
        lead = min(r)
        a = r[lead]
        r = {k: v / a for k, v in r.items()}
        for pc, p in piv.items():
            b = p.get(lead)
            if b:
                for k, v in r.items():
                    w = p.get(k, 0) - b * v
                    if w:
                        p[k] = w
                    else:
                        p.pop(k, None)
        piv[lead] = r
    return [piv[c] for c in sorted(piv)]


def rank(m: Mat) -> int:
    """Row rank over the rationals."""
    if m.rows == 0 or m.cols == 0 or not m.entries:
        return 0
    rows = m.row_dicts() if m.rows <= m.cols else m.col_dicts()
    ech = Echelon(max(m.rows, m.cols))
    for row in sorted((r for r in rows if r), key=len):
        ech.add(row)
    return ech.rank


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True)
class Subspace:
    """Subspace of Q^ambient_dim with a canonical RREF basis (one row per vector)."""

    ambient_dim: int
    rows: Tuple[Tuple[Tuple[int, Fraction], ...], ...] = ()

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[Mapping[int, Fraction]]) -> "Subspace":
        vecs = []
        for v in vectors:
            for k in v:
                if not 0 <= k < ambient_dim:
                    raise ShapeError(f"coordinate {k} outside ambient {ambient_dim}")
            vecs.append(v)
        ech = Echelon(ambient_dim)
        for v in vecs:
            ech.add(v)
        return cls.from_rref(ambient_dim, ech.rref_rows())

    @classmethod
    def from_rref(cls, ambient_dim: int, rows: Sequence[Mapping[int, Fraction]]) -> "Subspace":
        return cls(ambient_dim, tuple(tuple(sorted(r.items())) for r in rows))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, tuple(((i, Fraction(1)),) for i in range(ambient_dim)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def basis(self) -> Mat:
        return Mat(self.dim, self.ambient_dim,
                   {(i, c): v for i, row in enumerate(self.rows) for c, v in row})

    def vectors(self) -> List[Dict[int, Fraction]]:
        return [dict(r) for r in self.rows]

    @property
    def pivots(self) -> Tuple[int, ...]:
        return tuple(r[0][0] for r in self.rows)

    def reducer(self) -> Echelon:
        ech = Echelon(self.ambient_dim)
        for r in self.rows:
            ech.add(dict(r))
        return ech

    @cached_property
    def _reducer(self) -> Echelon:
        return self.reducer()

    def contains(self, vec: Mapping[int, Fraction]) -> bool:
        return self._reducer.contains(vec)

    def coordinates(self, vec: Mapping[int, Fraction]) -> List[Fraction]:
        """Coordinates of a member vector in the RREF basis (its values at the pivots)."""
        return [as_rat(vec.get(p, 0)) for p in self.pivots]

    def __add__(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ShapeError("ambient mismatch")
        return Subspace.span(self.ambient_dim, self.vectors() + other.vectors())

    def __le__(self, other: "Subspace") -> bool:
        red = other._reducer
        return all(red.contains(dict(r)) for r in self.rows)


def kernel(m: Mat) -> Subspace:
    """Right kernel {x : m x = 0} as a subspace of Q^cols."""
    rows = rref_from_rows(r for r in m.row_dicts() if r)
    pivots = [min(r) for r in rows]
    pivset = set(pivots)
    basis = []
    for f in range(m.cols):
        if f in pivset:
            continue
        v = {f: Fraction(1)}
        for p, r in zip(pivots, rows):
            a = r.get(f)
            if a:
                v[p] = -a
        basis.append(v)
    return Subspace.span(m.cols, basis)


def orth_complement(s: Subspace, pairing: Mat) -> Subspace:
    """{w : <v, w> = 0 for all v in s} where <v, w> = v^T P w."""
    n = s.ambient_dim
    if pairing.shape != (n, n):
        raise ShapeError(f"pairing {pairing.shape} vs ambient {n}")
    if rank(pairing) != n:
        raise SingularPairingError("pairing matrix is singular")
    constraints = s.basis @ pairing
    return kernel(constraints)


def quotient_coordinates(sub: Subspace) -> List[int]:
    """Non-pivot columns: images of these standard vectors form a basis of the quotient."""
    piv = set(sub.pivots)
    return [c for c in range(sub.ambient_dim) if c not in piv]


# ---------------------------------------------------------------------------
# chain complexes


@dataclass
class ChainComplex:
    """Cochain complex: ``differentials[k]`` maps degree k to degree k+1.

    ``dims`` covers a contiguous range of degrees; missing differentials are zero.
    """

    dims: Dict[int, int]
    differentials: Dict[int, Mat] = field(default_factory=dict)

    def __post_init__(self):
        degs = sorted(self.dims)
        if degs and degs != list(range(degs[0], degs[-1] + 1)):
            raise ShapeError("degrees must be contiguous")
        for k, d in self.differentials.items():
            src = self.dims.get(k, 0)
            tgt = self.dims.get(k + 1, 0)
            if d.shape != (tgt, src):
                raise ShapeError(f"d^{k} has shape {d.shape}, expected {(tgt, src)}")

    @property
    def degrees(self) -> List[int]:
        return sorted(self.dims)

    def d(self, k: int) -> Mat:
        mat = self.differentials.get(k)
        if mat is None:
            return Mat.zero(self.dims.get(k + 1, 0), self.dims.get(k, 0))
        return mat

    def check_square_zero(self) -> bool:
        for k in self.degrees:
            if k + 1 in self.differentials and k in self.differentials:
                if not (self.differentials[k + 1] @ self.differentials[k]).is_zero():
                    return False
        return True

    def ranks(self) -> Dict[int, int]:
        return {k: rank(d) for k, d in self.differentials.items()}

    def euler_characteristic(self) -> int:
        return sum((-1) ** (k % 2) * v for k, v in self.dims.items())


def homology_dims(c: ChainComplex, ranks: Optional[Mapping[int, int]] = None) -> Dict[int, int]:
    """dim ker d^k - dim im d^{k-1} for every degree."""
    if ranks is None:
        ranks = c.ranks()
    out = {}
    for k in c.degrees:
        out[k] = c.dims[k] - ranks.get(k, 0) - ranks.get(k - 1, 0)
        if out[k] < 0:
            raise ShapeError(f"negative homology at degree {k}: not a complex")
    return out


def euler(table: Mapping[int, int]) -> int:
    return sum((-1) ** (k % 2) * v for k, v in table.items())
