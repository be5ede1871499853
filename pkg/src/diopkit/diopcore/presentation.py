"""Quadratic presentations <E; R>."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..ratlin import Subspace
from ..sbimod import SBimoduleSpace, all_perms, opposite_space, zero_space
from ..trees import DiTree
from .free import GeneratorSet, Key, Vec, act, add_into, canon_decorated, free_slice

QUADRATIC_SLOTS = ((1, 3), (3, 1), (2, 2))
GEN_SHAPES = ((1, 2), (2, 1))


class PresentationError(ValueError):
    pass


@dataclass
class NamedRelation:
    name: str
    slot: Tuple[int, int]
    vec: Vec
    source: str = ""


@dataclass
class Presentation:
    """Generators at (1,2), (2,1) and bimodule-stable relation subspaces R(i,j).

    ``relations`` maps each quadratic slot to a Subspace of the free slice in
    its tree basis.  ``named`` keeps the spanning relations as written, for
    reports and the algebra checker.
    """

    name: str
    E: GeneratorSet
    relations: Dict[Tuple[int, int], Subspace]
    named: List[NamedRelation] = field(default_factory=list)
    _cache: Dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for s in self.E.shapes:
            if s not in GEN_SHAPES:
                raise PresentationError(f"generator shape {s} is not quadratic")
        for slot in QUADRATIC_SLOTS:
            if slot not in self.relations:
                self.relations[slot] = Subspace.zero(free_slice(self.E, *slot).dim)

    @property
    def E12(self) -> Optional[SBimoduleSpace]:
        return self.E.get((1, 2))

    @property
    def E21(self) -> Optional[SBimoduleSpace]:
        return self.E.get((2, 1))

    def R(self, slot: Tuple[int, int]) -> Subspace:
        return self.relations[slot]

    def relation_dims(self) -> Dict[Tuple[int, int], int]:
        return {s: self.relations[s].dim for s in QUADRATIC_SLOTS}

    def relation_vectors(self, slot: Tuple[int, int]) -> List[Vec]:
        sl = free_slice(self.E, *slot)
        return [sl.from_sparse(r) for r in self.relations[slot].vectors()]

    def digest(self) -> str:
        """Content hash of generators (actions) and relation subspaces."""
        h = hashlib.sha256()
        for s in GEN_SHAPES:
            sp = self.E.get(s)
            if sp is None:
                h.update(f"{s}:0;".encode())
                continue
            h.update(f"{s}:{sp.dim}:".encode())
            for g in sp.out_gens + sp.in_gens:
                h.update(repr(sorted(g.entries.items())).encode())
        for slot in QUADRATIC_SLOTS:
            sl = free_slice(self.E, *slot)
            h.update(f"R{slot}:".encode())
            for row in self.relations[slot].vectors():
                h.update(repr(sorted((sl.keys[k][0].encode(), sl.keys[k][1], str(v)) for k, v in row.items())).encode())
        return h.hexdigest()[:16]

    def is_stable(self) -> bool:
        """Whether every relation subspace is closed under the bimodule action."""
        for slot in QUADRATIC_SLOTS:
            sub = self.relations[slot]
            sl = free_slice(self.E, *slot)
            for v in self.relation_vectors(slot):
                for pi in all_perms(slot[0]):
                    for sg in all_perms(slot[1]):
                        if not sub.contains(sl.to_sparse(act(self.E, pi, sg, v))):
                            return False
        return True


def bimodule_span(E: GeneratorSet, slot: Tuple[int, int], vectors: Sequence[Mapping[Key, Fraction]]) -> Subspace:
    """Smallest bimodule-stable subspace containing the vectors."""
    sl = free_slice(E, *slot)
    rows = []
    for v in vectors:
        for pi in all_perms(slot[0]):
            for sg in all_perms(slot[1]):
                w = act(E, pi, sg, v)
                if w:
                    rows.append(sl.to_sparse(w))
    return Subspace.span(sl.dim, rows)


def make_presentation(name: str, E: GeneratorSet, named: Sequence[NamedRelation]) -> Presentation:
    by_slot: Dict[Tuple[int, int], List[Vec]] = {s: [] for s in QUADRATIC_SLOTS}
    for r in named:
        if r.slot not in by_slot:
            raise PresentationError(f"relation {r.name} lives in {r.slot}, not a quadratic slot")
        by_slot[r.slot].append(r.vec)
    rel = {s: bimodule_span(E, s, vs) for s, vs in by_slot.items()}
    return Presentation(name, E, rel, list(named))


def free_presentation(name: str, E: GeneratorSet) -> Presentation:
    return Presentation(name, E, {})


# ---------------------------------------------------------------------------
# opposite


def reverse_vec(Eop: GeneratorSet, v: Mapping[Key, Fraction]) -> Vec:
    """Turn every tree upside down; decorations keep their basis index."""
    out: Vec = {}
    for (t, d), c in v.items():
        if t.is_unit():
            add_into(out, {(t, d): c})
            continue
        raw = [(ins, outs) for outs, ins in t.verts]
        canon_decorated(Eop, t.n, t.m, raw, d, c, out)
    return out


def opposite_generators(E: GeneratorSet) -> GeneratorSet:
    spaces = {(b, a): opposite_space(sp) for (a, b), sp in E.spaces.items()}
    names = {(b, a): E.names[(a, b)] for (a, b) in E.spaces}
    return GeneratorSet(spaces, names)


def opposite(p: Presentation) -> Presentation:
    Eop = opposite_generators(p.E)
    named = [NamedRelation(r.name, (r.slot[1], r.slot[0]), reverse_vec(Eop, r.vec), r.source) for r in p.named]
    rel = {}
    for slot in QUADRATIC_SLOTS:
        osl = free_slice(Eop, slot[1], slot[0])
        rows = [osl.to_sparse(reverse_vec(Eop, v)) for v in p.relation_vectors(slot)]
        rel[(slot[1], slot[0])] = Subspace.span(osl.dim, rows)
    name = p.name[:-3] if p.name.endswith("^op") else p.name + "^op"
    return Presentation(name, Eop, rel, named)


def restrict(p: Presentation, shape: Tuple[int, int], name: Optional[str] = None) -> Presentation:
    """Keep only the generators of one shape and the relations among them.

    Used for the factors of a distributive decomposition.
    """
    E = GeneratorSet({shape: p.E[shape]}, {shape: p.E.names[shape]}) if shape in p.E else GeneratorSet({})
    rel = {}
    named = []
    for slot in QUADRATIC_SLOTS:
        sl = free_slice(E, *slot)
        rows = []
        for v in p.relation_vectors(slot):
            if all(set(t.shapes()) <= {shape} for t, _ in v):
                rows.append(sl.to_sparse(v))
        rel[slot] = Subspace.span(sl.dim, rows)
    for r in p.named:
        if all(set(t.shapes()) <= {shape} for t, _ in r.vec):
            named.append(r)
    return Presentation(name or f"{p.name}|{shape}", E, rel, named)


def delete_relations(p: Presentation, slot: Tuple[int, int], name: Optional[str] = None) -> Presentation:
    rel = dict(p.relations)
    rel[slot] = Subspace.zero(free_slice(p.E, *slot).dim)
    named = [r for r in p.named if r.slot != slot]
    return Presentation(name or f"{p.name}-R{slot[0]}{slot[1]}", p.E, rel, named)
