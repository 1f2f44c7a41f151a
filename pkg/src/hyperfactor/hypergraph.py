"""Immutable k-uniform hypergraphs on the vertex set ``range(n)``.

Edges are strictly increasing k-tuples.  The sorted tuple of edges is the
source of truth; per-vertex incidence bitsets over edge indices are built
lazily and only used to speed up degree queries.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from collections.abc import Iterable
from functools import cached_property
from pathlib import Path

from .exceptions import InvalidArityError, InvalidHypergraphError, KhgFormatError

__all__ = [
    "Hypergraph",
    "vertex_set",
    "complete",
    "empty",
    "degree",
    "min_degree",
    "induced",
    "union",
    "link",
    "star_subgraph",
    "parse_khg",
    "format_khg",
    "read_khg",
    "write_khg",
]

Edge = tuple[int, ...]


def vertex_set(members: Iterable[int], n: int | None = None) -> tuple[int, ...]:
    """Canonical sorted vertex tuple; rejects duplicates and out-of-range members."""
    result = tuple(sorted(members))
    for a, b in zip(result, result[1:]):
        if a == b:
            raise InvalidHypergraphError(f"duplicate vertex {a} in vertex set")
    if result and result[0] < 0:
        raise InvalidHypergraphError(f"negative vertex {result[0]}")
    if n is not None and result and result[-1] >= n:
        raise InvalidHypergraphError(f"vertex {result[-1]} out of range for n={n}")
    return result


class Hypergraph:
    """A k-uniform hypergraph with vertices ``0..n-1``.

    Parameters
    ----------
    k : int
        Uniformity.  ``k >= 1`` is accepted so that links of graphs exist;
        host graphs and patterns use ``k >= 2``.
    n : int
        Number of vertices.
    edges : iterable of iterables
        Each edge is a set of ``k`` distinct vertices.  Order inside an edge
        does not matter; duplicate edges are rejected.
    """

    __slots__ = ("_k", "_n", "_edges", "_edge_set", "__dict__")

    def __init__(self, k: int, n: int, edges: Iterable[Iterable[int]] = ()):
        if k < 1:
            raise InvalidHypergraphError(f"uniformity must be >= 1, got {k}")
        if n < 0:
            raise InvalidHypergraphError(f"vertex count must be >= 0, got {n}")
        canon = []
        for e in edges:
            t = tuple(sorted(e))
            if len(t) != k or len(set(t)) != k:
                raise InvalidHypergraphError(f"edge {t} is not a set of {k} distinct vertices")
            if t[0] < 0 or t[-1] >= n:
                raise InvalidHypergraphError(f"edge {t} has a vertex outside [0, {n})")
            canon.append(t)
        edge_set = frozenset(canon)
        if len(edge_set) != len(canon):
            raise InvalidHypergraphError("duplicate edge")
        self._k = k
        self._n = n
        self._edge_set = edge_set
        self._edges = tuple(sorted(edge_set))

    @classmethod
    def _trusted(cls, k: int, n: int, edge_set: frozenset) -> Hypergraph:
        # edges already canonical and validated
        obj = cls.__new__(cls)
        obj._k = k
        obj._n = n
        obj._edge_set = edge_set
        obj._edges = tuple(sorted(edge_set))
        return obj

    @property
    def k(self) -> int:
        return self._k

    @property
    def n(self) -> int:
        return self._n

    @property
    def edges(self) -> tuple[Edge, ...]:
        """Edges in lexicographic order."""
        return self._edges

    @property
    def edge_set(self) -> frozenset:
        return self._edge_set

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    def __len__(self) -> int:
        return len(self._edges)

    def __contains__(self, edge) -> bool:
        return tuple(sorted(edge)) in self._edge_set

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self._k, self._n, self._edge_set) == (other._k, other._n, other._edge_set)

    def __hash__(self) -> int:
        return hash((self._k, self._n, self._edge_set))

    def __repr__(self) -> str:
        return f"Hypergraph(k={self._k}, n={self._n}, m={len(self._edges)})"

    @cached_property
    def incidence(self) -> tuple[int, ...]:
        """Bitset over edge indices for each vertex."""
        bits = [0] * self._n
        for i, e in enumerate(self._edges):
            mask = 1 << i
            for v in e:
                bits[v] |= mask
        return tuple(bits)

    @cached_property
    def vertex_degrees(self) -> tuple[int, ...]:
        return tuple(b.bit_count() for b in self.incidence)

    def degree(self, S: Iterable[int]) -> int:
        """Number of edges containing every vertex of ``S`` (``1 <= |S| <= k-1``)."""
        S = vertex_set(S, self._n)
        if not 1 <= len(S) <= self._k - 1:
            raise InvalidArityError(f"|S| must lie in [1, {self._k - 1}], got {len(S)}")
        bits = self.incidence
        acc = bits[S[0]]
        for v in S[1:]:
            acc &= bits[v]
        return acc.bit_count()

    def min_degree(self, d: int) -> int:
        """Minimum over all d-subsets of the vertex set of :meth:`degree`."""
        if not 1 <= d <= self._k - 1:
            raise InvalidArityError(f"d must lie in [1, {self._k - 1}], got {d}")
        if self._n < d:
            raise InvalidArityError(f"no {d}-subsets in a {self._n}-vertex hypergraph")
        if d == 1:
            return min(self.vertex_degrees)
        counts = Counter(
            sub for e in self._edges for sub in itertools.combinations(e, d)
        )
        if len(counts) < math.comb(self._n, d):
            return 0
        return min(counts.values())

    def induced(self, S: Iterable[int]) -> Hypergraph:
        """Subgraph induced on ``S``, relabelled ``S[i] -> i``."""
        S = vertex_set(S, self._n)
        pos = {v: i for i, v in enumerate(S)}
        kept = frozenset(
            tuple(pos[v] for v in e) for e in self._edges if all(v in pos for v in e)
        )
        return Hypergraph._trusted(self._k, len(S), kept)

    def union(self, other: Hypergraph) -> Hypergraph:
        """Edge-set union on the shared vertex set."""
        if other._k != self._k:
            raise InvalidHypergraphError(f"uniformity mismatch: {self._k} vs {other._k}")
        if other._n != self._n:
            raise InvalidHypergraphError(f"vertex count mismatch: {self._n} vs {other._n}")
        return Hypergraph._trusted(self._k, self._n, self._edge_set | other._edge_set)

    def __or__(self, other: Hypergraph) -> Hypergraph:
        return self.union(other)

    def link(self, v: int) -> Hypergraph:
        """The (k-1)-graph ``{e - {v} : v in e}`` on the other ``n-1`` vertices."""
        self._check_vertex(v)
        if self._k < 2:
            raise InvalidArityError("links of 1-uniform hypergraphs are not defined")
        shift = lambda u: u - (u > v)  # noqa: E731
        kept = frozenset(
            tuple(shift(u) for u in e if u != v) for e in self._edges if v in e
        )
        return Hypergraph._trusted(self._k - 1, self._n - 1, kept)

    def star(self, v: int) -> Hypergraph:
        """Spanning subgraph formed by the edges containing ``v``."""
        self._check_vertex(v)
        return Hypergraph._trusted(
            self._k, self._n, frozenset(e for e in self._edges if v in e)
        )

    def edges_within(self, vertices: Iterable[int]) -> list[Edge]:
        """Edges of this graph whose vertices all lie in ``vertices``."""
        inside = set(vertices)
        return [e for e in self._edges if inside.issuperset(e)]

    def isolated_vertices(self) -> list[int]:
        return [v for v, d in enumerate(self.vertex_degrees) if d == 0]

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self._n:
            raise InvalidHypergraphError(f"vertex {v} out of range for n={self._n}")


def complete(n: int, k: int) -> Hypergraph:
    """The complete k-graph on ``n`` vertices."""
    if k < 1 or n < k:
        raise InvalidHypergraphError(f"complete graph needs n >= k >= 1, got n={n}, k={k}")
    return Hypergraph._trusted(k, n, frozenset(itertools.combinations(range(n), k)))


def empty(n: int, k: int) -> Hypergraph:
    return Hypergraph(k, n, ())


def degree(H: Hypergraph, S: Iterable[int]) -> int:
    return H.degree(S)


def min_degree(H: Hypergraph, d: int) -> int:
    return H.min_degree(d)


def induced(H: Hypergraph, S: Iterable[int]) -> Hypergraph:
    return H.induced(S)


def union(G: Hypergraph, Gp: Hypergraph) -> Hypergraph:
    return G.union(Gp)


def link(H: Hypergraph, v: int) -> Hypergraph:
    return H.link(v)


def star_subgraph(F: Hypergraph, v: int) -> Hypergraph:
    return F.star(v)


# --- khg/1 text format -------------------------------------------------------


def parse_khg(text: str) -> Hypergraph:
    """Parse ``khg/1``: a ``k n m`` header then ``m`` lines of ascending vertices."""
    lines = text.splitlines()
    if not lines:
        raise KhgFormatError(1, "missing header 'k n m'")
    header = lines[0].split()
    if len(header) != 3:
        raise KhgFormatError(1, f"header must be 'k n m', got {lines[0]!r}")
    try:
        k, n, m = (int(tok) for tok in header)
    except ValueError:
        raise KhgFormatError(1, f"non-integer header {lines[0]!r}") from None
    if k < 1 or n < 0 or m < 0:
        raise KhgFormatError(1, f"invalid header values k={k} n={n} m={m}")
    body = lines[1:]
    # a single trailing blank line is tolerated
    while body and not body[-1].strip():
        body.pop()
    if len(body) != m:
        raise KhgFormatError(len(body) + 2 if len(body) < m else m + 2,
                             f"expected {m} edge lines, found {len(body)}")
    seen: dict[Edge, int] = {}
    edges = []
    for lineno, raw in enumerate(body, start=2):
        toks = raw.split()
        if len(toks) != k:
            raise KhgFormatError(lineno, f"expected {k} vertices, got {len(toks)}")
        try:
            e = tuple(int(tok) for tok in toks)
        except ValueError:
            raise KhgFormatError(lineno, f"non-integer vertex in {raw!r}") from None
        for v in e:
            if not 0 <= v < n:
                raise KhgFormatError(lineno, f"vertex {v} out of range [0, {n})")
        if any(a >= b for a, b in zip(e, e[1:])):
            raise KhgFormatError(lineno, f"vertices not strictly ascending: {raw.strip()!r}")
        if e in seen:
            raise KhgFormatError(lineno, f"duplicate edge (first on line {seen[e]})")
        seen[e] = lineno
        edges.append(e)
    return Hypergraph._trusted(k, n, frozenset(edges))


def format_khg(H: Hypergraph) -> str:
    out = [f"{H.k} {H.n} {H.num_edges}"]
    out.extend(" ".join(map(str, e)) for e in H.edges)
    return "\n".join(out) + "\n"


def read_khg(path: str | Path) -> Hypergraph:
    return parse_khg(Path(path).read_text())


def write_khg(H: Hypergraph, path: str | Path) -> None:
    Path(path).write_text(format_khg(H))
