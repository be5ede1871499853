"""Randomized checks of the dioperad axioms on free elements.

The sequential and parallel checks compare the two ways of grafting three
elements along a path, with the block permutation that re-sorts the outer
labels when the third element lands on the other factor.  The equivariance
check asserts that relabelling the factors and then composing equals
composing at the pulled-back slots and then relabelling.

Label layout of f o_{i,j} g, with f in (m1,n1) and g in (m2,n2):
outputs are g's 1..j-1, then f's, then g's j+1..m2; inputs are f's 1..i-1,
then g's, then f's i+1..n1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from ..sbimod import Perm, all_perms, identity_perm, inverse_perm
from .free import GeneratorSet, Vec, act, arity_of, compose, free_slice

SWAP_OUTER = (1, 0, 2, 4, 3)


def block_perm(small: Perm, lengths: Sequence[int]) -> Perm:
    """Permute consecutive blocks of the given lengths; block b moves to position small[b]."""
    inv = inverse_perm(small)
    new_lengths = [lengths[inv[p]] for p in range(len(lengths))]
    start = [sum(new_lengths[:p]) for p in range(len(lengths))]
    out = []
    for b, size in enumerate(lengths):
        out.extend(start[small[b]] + o for o in range(size))
    return tuple(out)


def _layout(m1, n1, m2, n2, i, j):
    """Positions (0-based) of f's and g's labels in f o_{i,j} g."""
    outs_g = [r if r < j - 1 else r + m1 - 1 for r in range(m2)]
    outs_f = [j - 1 + r for r in range(m1)]
    ins_f = [r if r < i - 1 else r + n2 - 1 for r in range(n1)]
    ins_g = [i - 1 + r for r in range(n2)]
    return outs_f, ins_f, outs_g, ins_g


def sequential_cases(E: GeneratorSet, f: Vec, g: Vec, h: Vec) -> List[Tuple[tuple, bool]]:
    """Sequential grafting: (f o_{k,l} g) o_{i,j} h for every admissible k, l, i, j."""
    (m1, n1), (m2, n2), (m3, n3) = arity_of(f), arity_of(g), arity_of(h)
    out = []
    for k in range(1, n1 + 1):
        for l in range(1, m2 + 1):
            Y = compose(E, f, k, l, g)
            for i in range(1, n1 + n2):
                for j in range(1, m3 + 1):
                    lhs = compose(E, Y, i, j, h)
                    if i <= k - 1:
                        rhs = compose(E, compose(E, f, i, j, h), k + n3 - 1, l, g)
                    elif i <= k + n2 - 1:
                        rhs = compose(E, f, k, j + l - 1, compose(E, g, i - k + 1, j, h))
                    else:
                        rhs = compose(E, compose(E, f, i - n2 + 1, j, h), k, l, g)
                    if not k <= i <= k + n2 - 1:
                        bp = block_perm(SWAP_OUTER, [l - 1, j - 1, m1, m3 - j, m2 - l])
                        rhs = act(E, bp, identity_perm(n1 + n2 + n3 - 2), rhs)
                    out.append((("a", k, l, i, j), lhs == rhs))
    return out


def parallel_cases(E: GeneratorSet, f: Vec, g: Vec, h: Vec) -> List[Tuple[tuple, bool]]:
    """Parallel grafting: f o_{i,j} (g o_{k,l} h) for every admissible i, j, k, l."""
    (m1, n1), (m2, n2), (m3, n3) = arity_of(f), arity_of(g), arity_of(h)
    out = []
    for k in range(1, n2 + 1):
        for l in range(1, m3 + 1):
            Z = compose(E, g, k, l, h)
            for i in range(1, n1 + 1):
                for j in range(1, m2 + m3):
                    lhs = compose(E, f, i, j, Z)
                    if j <= l - 1:
                        rhs = compose(E, g, k, l + m1 - 1, compose(E, f, i, j, h))
                    elif j <= l + m2 - 1:
                        rhs = compose(E, compose(E, f, i, j - l + 1, g), k + i - 1, l, h)
                    else:
                        rhs = compose(E, g, k, l, compose(E, f, i, j - m2 + 1, h))
                    if not l <= j <= l + m2 - 1:
                        bp = block_perm(SWAP_OUTER, [i - 1, k - 1, n3, n2 - k, n1 - i])
                        rhs = act(E, identity_perm(m1 + m2 + m3 - 2), inverse_perm(bp), rhs)
                    out.append((("b", i, j, k, l), lhs == rhs))
    return out


def equivariance_case(E: GeneratorSet, f: Vec, g: Vec, i: int, j: int,
                      p1: Perm, s1: Perm, p2: Perm, s2: Perm) -> bool:
    """Equivariance for one choice of relabellings of the two factors."""
    (m1, n1), (m2, n2) = arity_of(f), arity_of(g)
    lhs = compose(E, act(E, p1, s1, f), i, j, act(E, p2, s2, g))
    ii, jj = s1.index(i - 1) + 1, p2.index(j - 1) + 1
    of0, if0, og0, ig0 = _layout(m1, n1, m2, n2, ii, jj)
    of1, if1, og1, ig1 = _layout(m1, n1, m2, n2, i, j)
    pi = [0] * (m1 + m2 - 1)
    sg = [0] * (n1 + n2 - 1)
    for r in range(m1):
        pi[of0[r]] = of1[p1[r]]
    for r in range(m2):
        if r != jj - 1:
            pi[og0[r]] = og1[p2[r]]
    for r in range(n1):
        if r != ii - 1:
            sg[if0[r]] = if1[s1[r]]
    for r in range(n2):
        sg[ig0[r]] = ig1[s2[r]]
    return lhs == act(E, tuple(pi), tuple(sg), compose(E, f, ii, jj, g))


def random_element(E: GeneratorSet, rng: random.Random, max_weight: int = 2, terms: int = 2) -> Vec:
    while True:
        m, n = rng.randint(1, max_weight + 1), rng.randint(1, max_weight + 1)
        if 1 <= m + n - 2 <= max_weight and free_slice(E, m, n).dim:
            break
    sl = free_slice(E, m, n)
    v: Vec = {}
    for _ in range(terms):
        k = rng.choice(sl.keys)
        v[k] = v.get(k, 0) + Fraction(rng.randint(-2, 2))
    v = {k: c for k, c in v.items() if c}
    return v or {rng.choice(sl.keys): Fraction(1)}


@dataclass
class AxiomReport:
    cases: int = 0
    failures: List[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def axiom_suite(E: GeneratorSet, min_cases: int = 500, seed: Optional[int] = 0, max_weight: int = 2) -> AxiomReport:
    """Run the sequential, parallel and equivariance checks on random triples/pairs until at least ``min_cases`` checks have been made."""
    rng = random.Random(seed)
    rep = AxiomReport()
    while rep.cases < min_cases:
        f, g, h = (random_element(E, rng, max_weight) for _ in range(3))
        for label, ok in sequential_cases(E, f, g, h) + parallel_cases(E, f, g, h):
            rep.cases += 1
            if not ok:
                rep.failures.append(label)
        (m1, n1), (m2, n2) = arity_of(f), arity_of(g)
        for _ in range(4):
            i, j = rng.randint(1, n1), rng.randint(1, m2)
            perms = (rng.choice(all_perms(m1)), rng.choice(all_perms(n1)),
                     rng.choice(all_perms(m2)), rng.choice(all_perms(n2)))
            rep.cases += 1
            if not equivariance_case(E, f, g, i, j, *perms):
                rep.failures.append(("c", i, j) + perms)
    return rep
