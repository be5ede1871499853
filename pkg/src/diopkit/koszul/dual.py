"""Quadratic duality.

The free slices of E and of its vee-twist share the tree basis.  At a
quadratic slot the identification of F(E^v) with F(E)^v pairs a two-vertex
tree with itself, up to the sign of composing the two sheared-desuspension
generators in root-side-first order; decorations pair through the dual bases.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Tuple

from ..ratlin import Mat, Subspace, orth_complement
from ..sbimod import TwistKind, twist
from ..trees import DiTree, suspension_sign
from ..diopcore.free import GeneratorSet, free_slice
from ..diopcore.presentation import QUADRATIC_SLOTS, NamedRelation, Presentation

DUAL_NAMES = {"l": "m", "m": "l", "delta": "Delta", "Delta": "delta", "d": "D", "D": "d"}


def top_first(t: DiTree) -> Tuple[int, ...]:
    """Vertex order with the root-side end of the internal edge first."""
    if t.nverts != 2:
        return tuple(range(t.nverts))
    s, _, g, _ = t.edges()[0]
    return (g, s)


def pairing_sign(t: DiTree) -> int:
    return suspension_sign(t, top_first(t))


def pairing_matrix(E: GeneratorSet, slot: Tuple[int, int]) -> Mat:
    sl = free_slice(E, *slot)
    return Mat(sl.dim, sl.dim, {(k, k): pairing_sign(t) for k, (t, _) in enumerate(sl.keys)})


def pairing_table(p: Presentation) -> Dict[Tuple[int, int], Mat]:
    return {slot: pairing_matrix(p.E, slot) for slot in QUADRATIC_SLOTS}


def dual_generators(E: GeneratorSet, names: Optional[Mapping[str, str]] = None) -> GeneratorSet:
    names = dict(DUAL_NAMES if names is None else names)
    spaces = {}
    new_names = {}
    for s, sp in E.spaces.items():
        v = twist(sp, TwistKind.VEE)
        new = tuple(names.get(x, x + "^v") for x in E.names[s])
        v.name = new[0] if len(new) == 1 else f"{sp.name}^v"
        spaces[s] = v
        new_names[s] = new
    return GeneratorSet(spaces, new_names)


def quadratic_dual(p: Presentation, name: Optional[str] = None,
                   names: Optional[Mapping[str, str]] = None) -> Presentation:
    """<E^v ; R^perp> with R^perp the orthogonal complement under the sign-twisted pairing."""
    Ed = dual_generators(p.E, names)
    rel = {}
    for slot in QUADRATIC_SLOTS:
        pm = pairing_matrix(p.E, slot)
        rel[slot] = orth_complement(p.relations[slot], pm)
    sl = {slot: free_slice(Ed, *slot) for slot in QUADRATIC_SLOTS}
    named = []
    for slot in QUADRATIC_SLOTS:
        for k, row in enumerate(rel[slot].vectors()):
            named.append(NamedRelation(f"perp{slot[0]}{slot[1]}_{k + 1}", slot, sl[slot].from_sparse(row)))
    if name is None:
        name = p.name[:-1] if p.name.endswith("!") else p.name + "!"
    return Presentation(name, Ed, rel, named)


def relation_isomorphic(p: Presentation, q: Presentation) -> bool:
    """Same generator actions and identical relation subspaces in the shared tree basis."""
    for s in ((1, 2), (2, 1)):
        a, b = p.E.get(s), q.E.get(s)
        if (a is None) != (b is None):
            return False
        if a is not None and not a.same_action(b):
            return False
    return all(p.relations[s] == q.relations[s] for s in QUADRATIC_SLOTS)
