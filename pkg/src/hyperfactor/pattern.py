"""Patterns F and their density parameters.

Both ``d*(F)`` and ``Phi_F(n, p)`` are extremal over subgraphs of F, and both
only depend on the *edge profile*: for each vertex count ``s`` the maximum
number of edges induced by an ``s``-subset.  The profile is computed once per
pattern by vectorised enumeration of all vertex subsets.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .exact import PowerProduct, as_fraction
from .exceptions import GuardError, InvalidHypergraphError, UndefinedParameterError
from .hypergraph import Hypergraph

__all__ = [
    "Pattern",
    "DStar",
    "GluedFamilyMember",
    "MAX_PATTERN_VERTICES",
    "d_star",
    "phi",
    "phi_exact",
    "threshold_probability",
    "is_strictly_balanced",
    "link_is_partite",
    "alpha_is_zero",
    "assemble_glued",
    "glue_union",
    "phi_union_bound_check",
]

#: vertex-subset enumeration is refused above this many pattern vertices
MAX_PATTERN_VERTICES = 20

#: relative tolerance for float-valued Phi comparisons
FLOAT_TOLERANCE = 1e-12


class Pattern:
    """A labelled k-graph F used as the tile of a factor problem."""

    def __init__(self, graph: Hypergraph):
        if graph.k < 2:
            raise InvalidHypergraphError("patterns must be at least 2-uniform")
        self.graph = graph

    @classmethod
    def from_edges(cls, k: int, b: int, edges) -> Pattern:
        return cls(Hypergraph(k, b, edges))

    @classmethod
    def single_edge(cls, k: int) -> Pattern:
        return cls(Hypergraph(k, k, [tuple(range(k))]))

    @property
    def k(self) -> int:
        return self.graph.k

    @property
    def b(self) -> int:
        """Number of vertices ``v_F``."""
        return self.graph.n

    @property
    def f(self) -> int:
        """Number of edges ``e_F``."""
        return self.graph.num_edges

    @property
    def edges(self):
        return self.graph.edges

    def __eq__(self, other):
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.graph == other.graph

    def __hash__(self):
        return hash(self.graph)

    def __repr__(self):
        return f"Pattern(k={self.k}, b={self.b}, edges={list(self.edges)})"

    def require_edges(self) -> None:
        if self.f == 0:
            raise UndefinedParameterError("pattern has no edges")

    @cached_property
    def _subset_counts(self) -> tuple[np.ndarray, np.ndarray]:
        b = self.b
        if b > MAX_PATTERN_VERTICES:
            raise GuardError(f"pattern has {b} vertices; subset enumeration capped at "
                             f"{MAX_PATTERN_VERTICES}")
        masks = np.arange(1 << b, dtype=np.int64)
        counts = np.zeros(1 << b, dtype=np.int32)
        for e in self.edges:
            em = sum(1 << v for v in e)
            counts += (masks & em) == em
        sizes = np.bitwise_count(masks).astype(np.int32)
        return sizes, counts

    @cached_property
    def edge_profile(self) -> tuple[int, ...]:
        """``profile[s]`` = max number of edges induced on ``s`` vertices."""
        sizes, counts = self._subset_counts
        profile = np.zeros(self.b + 1, dtype=np.int64)
        np.maximum.at(profile, sizes, counts)
        return tuple(int(x) for x in profile)

    def densest_subset(self, s: int) -> tuple[int, ...]:
        """An ``s``-subset inducing ``edge_profile[s]`` edges.

        Ties go to the subset whose tuple of induced edge indices is
        lexicographically smallest, then to the smaller vertex mask.
        """
        sizes, counts = self._subset_counts
        target = self.edge_profile[s]
        candidates = np.flatnonzero((sizes == s) & (counts == target))
        edge_masks = [sum(1 << v for v in e) for e in self.edges]

        def key(mask):
            mask = int(mask)
            inside = tuple(i for i, em in enumerate(edge_masks) if mask & em == em)
            return inside, mask

        best = min(candidates, key=key)
        return tuple(v for v in range(self.b) if int(best) >> v & 1)

    def sub(self, vertices: Sequence[int]) -> Pattern:
        """Induced sub-pattern, relabelled order-preservingly."""
        return Pattern(self.graph.induced(vertices))


@dataclass(frozen=True)
class DStar:
    """Exact value of ``d*(F)`` together with a maximising subgraph J."""

    value: Fraction
    edges: int  # j, edges of J
    vertices: int  # s, vertices of J
    J_vertices: tuple[int, ...]  # vertices of J in F's labelling
    J: Pattern

    @property
    def numerator(self) -> int:
        return self.edges

    @property
    def denominator(self) -> int:
        return self.vertices - 1


def d_star(F: Pattern) -> DStar:
    """``max e'/(v'-1)`` over subgraphs with at least two vertices.

    The maximiser with the fewest vertices is returned; further ties are
    broken by the lexicographically smallest edge subset.
    """
    F.require_edges()
    profile = F.edge_profile
    best_s, best = None, Fraction(-1)
    for s in range(2, F.b + 1):
        ratio = Fraction(profile[s], s - 1)
        if ratio > best:
            best_s, best = s, ratio
    U = F.densest_subset(best_s)
    return DStar(best, profile[best_s], best_s, U, F.sub(U))


def _phi_candidates(F: Pattern):
    """(vertex count, edge count, subset) triples over which Phi is minimised.

    For p <= 1 the minimum over subgraphs on s vertices uses the densest
    s-subset; for p >= 1 it is a single edge.  Both kinds are always listed.
    """
    F.require_edges()
    profile = F.edge_profile
    out = [(F.k, 1, tuple(F.edges[0]))]
    for s in range(F.k, F.b + 1):
        if profile[s] > 0:
            out.append((s, profile[s], None))
    return out


def _candidate_pattern(F: Pattern, s: int, e: int, subset):
    if subset is not None:
        return Pattern(Hypergraph(F.k, s, [tuple(range(s))]))
    return F.sub(F.densest_subset(s))


def phi(F: Pattern, n: int, log_p: float) -> tuple[float, Pattern]:
    """``ln Phi_F(n, p)`` for a float ``ln p`` and the minimising subgraph."""
    if log_p > 0:
        raise ValueError("log_p must be <= 0")
    log_n = math.log(n)
    best = None
    for s, e, subset in _phi_candidates(F):
        value = s * log_n + e * log_p if log_p != -math.inf else -math.inf
        if best is None or value < best[0]:
            best = (value, s, e, subset)
    value, s, e, subset = best
    return value, _candidate_pattern(F, s, e, subset)


def phi_exact(F: Pattern, n: int, p: PowerProduct) -> tuple[PowerProduct, Pattern]:
    """``Phi_F(n, p)`` exactly, for ``p`` given as a :class:`PowerProduct`."""
    n = as_fraction(n)
    best = None
    for s, e, subset in _phi_candidates(F):
        value = PowerProduct.of(n, s) * p ** e
        if best is None or value < best[0]:
            best = (value, s, e, subset)
    value, s, e, subset = best
    return value, _candidate_pattern(F, s, e, subset)


def threshold_probability(F: Pattern, n, c) -> PowerProduct:
    """``c * n ** (-1/d*(F))`` as an exact power product."""
    ds = d_star(F)
    return PowerProduct.of(c) * PowerProduct.of(n, -1 / ds.value)


def is_strictly_balanced(F: Pattern) -> bool:
    """Every proper subgraph has a strictly smaller ``e/(v-1)`` than F."""
    F.require_edges()
    if F.b < 2:
        raise InvalidHypergraphError("strict balancedness needs at least two vertices")
    profile = F.edge_profile
    # spanning proper subgraphs lose edges, so only smaller vertex counts matter
    return all(profile[s] * (F.b - 1) < F.f * (s - 1) for s in range(2, F.b))


def link_is_partite(F: Pattern, v: int) -> bool:
    """Whether the link of ``v`` admits a (k-1)-partition with rainbow edges."""
    L = F.graph.link(v)
    classes = L.k
    if classes == 1 or L.num_edges == 0:
        return True
    touched = sorted({u for e in L.edges for u in e})
    edges_at = {u: [e for e in L.edges if u in e] for u in touched}
    colour: dict[int, int] = {}

    def consistent(u):
        for e in edges_at[u]:
            seen = [colour[w] for w in e if w in colour]
            if len(seen) != len(set(seen)):
                return False
        return True

    def assign(i):
        if i == len(touched):
            return True
        u = touched[i]
        # the first vertex's class is fixed by symmetry
        for c in range(1 if i == 0 else classes):
            colour[u] = c
            if consistent(u) and assign(i + 1):
                return True
            del colour[u]
        return False

    return assign(0)


def alpha_is_zero(F: Pattern) -> bool:
    """True iff some vertex of F has a (k-1)-partite link."""
    F.require_edges()
    return any(link_is_partite(F, v) for v in range(F.b))


@dataclass(frozen=True)
class GluedFamilyMember:
    """A centre copy of F with ``b`` petal copies each meeting it in one vertex.

    ``center`` and each entry of ``petals`` map F's vertices to labels of
    ``graph``.
    """

    graph: Hypergraph
    center: tuple[int, ...]
    petals: tuple[tuple[int, ...], ...]
    attach: tuple[tuple[int, int], ...]

    def check(self) -> None:
        centre = set(self.center)
        blocks = [set(p) for p in self.petals]
        for block in blocks:
            if len(block & centre) != 1:
                raise InvalidHypergraphError("petal must share exactly one vertex with centre")
        for i, a in enumerate(blocks):
            for b_ in blocks[i + 1:]:
                if a & b_:
                    raise InvalidHypergraphError("petals must be pairwise disjoint")


def assemble_glued(F: Pattern, attach: Sequence[tuple[int, int]]) -> GluedFamilyMember:
    """Glue ``b`` petal copies of F onto a centre copy.

    ``attach[i] = (c, u)`` identifies vertex ``u`` of petal ``i`` with vertex
    ``c`` of the centre.  The centre keeps labels ``0..b-1``; petal ``i``
    contributes labels ``b + i*(b-1) ...`` in F's vertex order.
    """
    b = F.b
    attach = tuple((int(c), int(u)) for c, u in attach)
    if len(attach) != b:
        raise InvalidHypergraphError(f"need {b} attachment pairs, got {len(attach)}")
    for c, u in attach:
        if not (0 <= c < b and 0 <= u < b):
            raise InvalidHypergraphError(f"attachment {(c, u)} out of range")
    center = tuple(range(b))
    petals = []
    edges = set(F.edges)
    nxt = b
    for c, u in attach:
        image = []
        for w in range(b):
            if w == u:
                image.append(c)
            else:
                image.append(nxt)
                nxt += 1
        petals.append(tuple(image))
        edges.update(tuple(sorted(image[w] for w in e)) for e in F.edges)
    member = GluedFamilyMember(Hypergraph(F.k, nxt, edges), center, tuple(petals), attach)
    member.check()
    return member


def glue_union(F1: Pattern, F2: Pattern, glue: Sequence[tuple[int, int]]) -> Pattern:
    """Union of F1 and F2 identified at exactly one vertex pair ``(v1, v2)``."""
    glue = list(glue)
    if len(glue) != 1:
        raise InvalidHypergraphError(f"patterns must share exactly one vertex, got {len(glue)}")
    if F1.k != F2.k:
        raise InvalidHypergraphError("uniformity mismatch")
    v1, v2 = glue[0]
    if not (0 <= v1 < F1.b and 0 <= v2 < F2.b):
        raise InvalidHypergraphError(f"glue pair {(v1, v2)} out of range")
    label = {}
    nxt = F1.b
    for w in range(F2.b):
        if w == v2:
            label[w] = v1
        else:
            label[w] = nxt
            nxt += 1
    edges = set(F1.edges)
    edges.update(tuple(sorted(label[w] for w in e)) for e in F2.edges)
    return Pattern(Hypergraph(F1.k, nxt, edges))


def phi_union_bound_check(F1: Pattern, F2: Pattern, glue, n, p) -> bool:
    """Whether ``Phi(F1 u F2) >= min(Phi1, Phi2, Phi1*Phi2/n)`` holds.

    ``p`` is either a :class:`PowerProduct` (exact) or a float probability
    (log-scale comparison with relative tolerance ``FLOAT_TOLERANCE``).
    """
    F1.require_edges()
    F2.require_edges()
    U = glue_union(F1, F2, glue)
    if isinstance(p, PowerProduct):
        lhs = phi_exact(U, n, p)[0]
        a = phi_exact(F1, n, p)[0]
        b = phi_exact(F2, n, p)[0]
        return lhs >= min(a, b, a * b / as_fraction(n))
    log_p = math.log(p) if p > 0 else -math.inf
    lhs = phi(U, n, log_p)[0]
    a = phi(F1, n, log_p)[0]
    b = phi(F2, n, log_p)[0]
    rhs = min(a, b, a + b - math.log(n))
    if rhs == -math.inf:
        return True
    return lhs >= rhs - FLOAT_TOLERANCE * max(1.0, abs(rhs))
