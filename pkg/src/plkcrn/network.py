"""Reaction networks and their graph/stoichiometric invariants."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence

import networkx as nx
import numpy as np

from .linalg import Subspace, column_space, contains_positive_vector, is_direct_sum, qvector
from .verdict import Conclusion, Verdict

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReactionNetwork:
    """The triple (species, complexes, reactions).

    Complexes are exact rational vectors indexed like ``species``; reactions
    are (reactant, product) index pairs into ``complexes``. Duplicate complex
    vectors are merged (with a warning) and reactions re-pointed. Stoichiometric
    input is nonnegative, but the same type also carries networks of kinetic
    complexes, whose entries may be negative.
    """

    species: tuple[str, ...]
    complexes: tuple[tuple[Fraction, ...], ...]
    reactions: tuple[tuple[int, int], ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        species = tuple(self.species)
        if len(set(species)) != len(species):
            raise ValueError("duplicate species names")
        m = len(species)
        cx = [qvector(c) for c in self.complexes]
        if any(len(c) != m for c in cx):
            raise ValueError("complex length does not match number of species")
        reactions = [(int(a), int(b)) for a, b in self.reactions]
        for a, b in reactions:
            if not (0 <= a < len(cx) and 0 <= b < len(cx)):
                raise ValueError(f"reaction ({a}, {b}) refers to a missing complex")

        # merge duplicate complexes
        first: dict[tuple, int] = {}
        remap = []
        merged = []
        for c in cx:
            if c in first:
                remap.append(first[c])
            else:
                first[c] = len(merged)
                remap.append(len(merged))
                merged.append(c)
        if len(merged) != len(cx):
            warnings.warn(f"merged {len(cx) - len(merged)} duplicate complex(es)", stacklevel=3)
            reactions = [(remap[a], remap[b]) for a, b in reactions]

        for q, (a, b) in enumerate(reactions):
            if a == b:
                raise ValueError(f"reaction {q} is a self-loop y -> y")
        used = {i for rxn in reactions for i in rxn}
        if used != set(range(len(merged))):
            raise ValueError(f"complexes {sorted(set(range(len(merged))) - used)} take part in no reaction")
        if self.labels is not None and len(self.labels) != len(reactions):
            raise ValueError("one label per reaction required")

        object.__setattr__(self, "species", species)
        object.__setattr__(self, "complexes", tuple(merged))
        object.__setattr__(self, "reactions", tuple(reactions))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_reactions(
        cls,
        species: Sequence[str],
        reactions: Sequence[tuple[Mapping[str, object], Mapping[str, object]]],
        labels: Sequence[str] | None = None,
    ) -> "ReactionNetwork":
        """Build from (reactant, product) pairs given as ``{species: coefficient}`` dicts."""
        species = tuple(species)
        index = {s: i for i, s in enumerate(species)}
        complexes: list[tuple] = []
        pos: dict[tuple, int] = {}
        pairs = []
        for lhs, rhs in reactions:
            ends = []
            for side in (lhs, rhs):
                v = [Fraction(0)] * len(species)
                for s, c in side.items():
                    v[index[s]] += Fraction(c)
                v = tuple(v)
                if v not in pos:
                    pos[v] = len(complexes)
                    complexes.append(v)
                ends.append(pos[v])
            pairs.append(tuple(ends))
        return cls(species, tuple(complexes), tuple(pairs), None if labels is None else tuple(labels))

    @property
    def m(self) -> int:
        return len(self.species)

    @property
    def n(self) -> int:
        return len(self.complexes)

    @property
    def r(self) -> int:
        return len(self.reactions)

    def complex_str(self, j: int) -> str:
        terms = []
        for s, c in zip(self.species, self.complexes[j]):
            if c == 0:
                continue
            terms.append(s if c == 1 else f"{c} {s}")
        return " + ".join(terms) if terms else "0"

    def reaction_str(self, q: int) -> str:
        a, b = self.reactions[q]
        return f"{self.complex_str(a)} -> {self.complex_str(b)}"

    def digraph(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from((a, b, q) for q, (a, b) in enumerate(self.reactions))
        return g

    def reactant_complexes(self) -> tuple[int, ...]:
        return tuple(sorted({a for a, _ in self.reactions}))

    def reactions_of(self, j: int) -> tuple[int, ...]:
        """Indices of the (branching) reactions whose reactant is complex j."""
        return tuple(q for q, (a, _) in enumerate(self.reactions) if a == j)


@dataclass(frozen=True)
class LinkageDecomposition:
    linkage_classes: tuple[tuple[int, ...], ...]
    strong_linkage_classes: tuple[tuple[int, ...], ...]
    terminal_strong_linkage_classes: tuple[tuple[int, ...], ...]
    n_r: int

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.linkage_classes)

    @property
    def sl(self) -> int:
        return len(self.strong_linkage_classes)

    @property
    def t(self) -> int:
        return len(self.terminal_strong_linkage_classes)

    def class_of(self, j: int) -> int:
        return next(i for i, lc in enumerate(self.linkage_classes) if j in lc)


def _sorted_parts(parts) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted((tuple(sorted(p)) for p in parts), key=lambda p: p[0]))


def linkage_classes(net: ReactionNetwork) -> LinkageDecomposition:
    g = net.digraph()
    weak = _sorted_parts(nx.weakly_connected_components(g))
    strong = _sorted_parts(nx.strongly_connected_components(g))
    cond = nx.condensation(nx.DiGraph(g))
    terminal = _sorted_parts(cond.nodes[c]["members"] for c in cond.nodes if cond.out_degree(c) == 0)
    return LinkageDecomposition(weak, strong, terminal, len(net.reactant_complexes()))


def is_weakly_reversible(net: ReactionNetwork) -> bool:
    d = linkage_classes(net)
    return d.sl == d.l


def is_cycle_terminal(net: ReactionNetwork) -> bool:
    return len(net.reactant_complexes()) == net.n


def terminal_points(net: ReactionNetwork) -> tuple[int, ...]:
    reactants = set(net.reactant_complexes())
    return tuple(j for j in range(net.n) if j not in reactants)


def molecularity_matrix(net: ReactionNetwork) -> np.ndarray:
    """Y, m x n: column j is complex j."""
    Y = np.empty((net.m, net.n), dtype=object)
    for j, c in enumerate(net.complexes):
        Y[:, j] = c
    return Y


def incidence_matrix(net: ReactionNetwork) -> np.ndarray:
    """I_a, n x r with -1 at the reactant and +1 at the product of each reaction."""
    Ia = np.zeros((net.n, net.r), dtype=int)
    for q, (a, b) in enumerate(net.reactions):
        Ia[a, q] = -1
        Ia[b, q] = 1
    return Ia


def stoichiometric_matrix(net: ReactionNetwork) -> np.ndarray:
    """N = Y I_a, exact."""
    return np.dot(molecularity_matrix(net), incidence_matrix(net).astype(object))


def stoichiometric_subspace(net: ReactionNetwork) -> Subspace:
    return column_space(stoichiometric_matrix(net))


class Deficiency(NamedTuple):
    n: int
    l: int  # noqa: E741
    s: int
    delta: int


def deficiency(net: ReactionNetwork) -> Deficiency:
    n, l = net.n, linkage_classes(net).l
    s = stoichiometric_subspace(net).dim
    delta = n - l - s
    if delta < 0:
        log.error("negative deficiency %d: internal inconsistency", delta)
    return Deficiency(n, l, s, delta)


def linkage_reaction_indices(net: ReactionNetwork) -> list[tuple[int, ...]]:
    """Reaction indices of each linkage class, in linkage-class order."""
    d = linkage_classes(net)
    return [tuple(q for q, (a, _) in enumerate(net.reactions) if a in set(lc)) for lc in d.linkage_classes]


def subnetwork(net: ReactionNetwork, reaction_indices: Sequence[int]) -> ReactionNetwork:
    """Network on a subset of reactions, keeping the full species list."""
    used = sorted({i for q in reaction_indices for i in net.reactions[q]})
    pos = {j: k for k, j in enumerate(used)}
    return ReactionNetwork(
        net.species,
        tuple(net.complexes[j] for j in used),
        tuple((pos[net.reactions[q][0]], pos[net.reactions[q][1]]) for q in reaction_indices),
        None if net.labels is None else tuple(net.labels[q] for q in reaction_indices),
    )


def linkage_subnetworks(net: ReactionNetwork) -> list[ReactionNetwork]:
    return [subnetwork(net, idx) for idx in linkage_reaction_indices(net)]


def has_ILC(net: ReactionNetwork) -> Verdict:
    """Independent linkage classes, decided two ways that must agree."""
    subs = linkage_subnetworks(net)
    deltas = [deficiency(s).delta for s in subs]
    total = deficiency(net).delta
    by_deficiency = sum(deltas) == total
    by_direct_sum = is_direct_sum([stoichiometric_subspace(s) for s in subs])
    if by_deficiency != by_direct_sum:
        raise AssertionError("deficiency-sum and direct-sum ILC tests disagree")
    return Verdict(
        "independent_linkage_classes",
        (),
        Conclusion.HOLDS if by_deficiency else Conclusion.FAILS,
        {"class_deficiencies": deltas, "deficiency": total},
    )


def is_conservative(net: ReactionNetwork) -> tuple[bool, tuple[Fraction, ...] | None]:
    """Whether S-perp contains a strictly positive vector, with the vector."""
    w = contains_positive_vector(stoichiometric_subspace(net).perp())
    return w is not None, w
