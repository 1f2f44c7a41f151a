"""Embeddings, F-factor decision and tilings.

``has_factor`` reduces the question to exact cover: rows are the vertex sets
of copies of F (each set once, whatever its number of embeddings), columns
are host vertices.  The search always branches on the uncovered vertex lying
in the fewest remaining copies.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

from .exceptions import GuardError
from .hypergraph import Hypergraph
from .pattern import Pattern

__all__ = [
    "Tiling",
    "FactorResult",
    "FACTOR",
    "NO_FACTOR",
    "UNKNOWN",
    "enumerate_embeddings",
    "count_embeddings",
    "count_rooted",
    "copy_sets",
    "contains_copy",
    "has_factor",
    "brute_force_oracle",
    "max_tiling",
    "greedy_tiling",
    "copy_count_statistic",
    "expected_copy_count",
    "verify_embedding",
    "verify_tiling",
]

FACTOR = "factor"
NO_FACTOR = "no-factor"
UNKNOWN = "unknown"

ORACLE_MAX_N = 12
EXACT_TILING_MAX_N = 15

Embedding = tuple[int, ...]


@dataclass(frozen=True)
class Tiling:
    """Vertex-disjoint copies of F, each given as a map ``V(F) -> V(H)``."""

    copies: tuple[Embedding, ...] = ()

    @property
    def covered(self) -> frozenset[int]:
        return frozenset(v for c in self.copies for v in c)

    @property
    def coverage(self) -> int:
        return sum(len(c) for c in self.copies)

    def __len__(self) -> int:
        return len(self.copies)

    def __add__(self, other: Tiling) -> Tiling:
        return Tiling(self.copies + other.copies)

    def to_json(self) -> list[list[int]]:
        return [list(c) for c in self.copies]


@dataclass
class FactorResult:
    outcome: str
    tiling: Tiling | None = None
    reason: str = ""
    nodes: int = 0

    @property
    def exists(self) -> bool | None:
        """True/False, or None when the node budget ran out."""
        if self.outcome == UNKNOWN:
            return None
        return self.outcome == FACTOR

    def __bool__(self) -> bool:
        return self.outcome == FACTOR


# --- embeddings ----------------------------------------------------------------


def _closing_edges(F: Pattern) -> list[list[tuple[int, ...]]]:
    closing: list[list[tuple[int, ...]]] = [[] for _ in range(F.b)]
    for e in F.edges:
        closing[max(e)].append(e)
    return closing


def enumerate_embeddings(F: Pattern, H: Hypergraph, limit: int | None = None, *,
                         fixed: dict[int, int] | None = None,
                         within: Iterable[int] | None = None) -> Iterator[Embedding]:
    """Yield every embedding of F into H in lexicographic order of the image tuple.

    ``fixed`` pins pattern vertices to host vertices; ``within`` restricts
    all images to a vertex subset.
    """
    b = F.b
    if F.k != H.k:
        raise ValueError(f"uniformity mismatch: pattern {F.k}, host {H.k}")
    fixed = dict(fixed or {})
    pool = sorted(set(within) if within is not None else range(H.n))
    if b > len(pool):
        return
    closing = _closing_edges(F)
    f_degree = F.graph.vertex_degrees
    h_degree = H.vertex_degrees
    busy = [v for v in pool if h_degree[v] > 0]
    candidates = []
    for u in range(b):
        if u in fixed:
            candidates.append([fixed[u]])
        else:
            candidates.append(busy if f_degree[u] > 0 else pool)
    edge_set = H.edge_set
    image = [0] * b
    used: set[int] = set()
    emitted = 0

    def extend(u):
        nonlocal emitted
        if u == b:
            emitted += 1
            yield tuple(image)
            return
        for w in candidates[u]:
            if w in used:
                continue
            image[u] = w
            if all(tuple(sorted(image[x] for x in e)) in edge_set for e in closing[u]):
                used.add(w)
                yield from extend(u + 1)
                used.discard(w)
                if limit is not None and emitted >= limit:
                    return

    if limit is not None and limit <= 0:
        return
    yield from extend(0)


def count_embeddings(F: Pattern, H: Hypergraph, *, fixed: dict[int, int] | None = None,
                     within: Iterable[int] | None = None) -> int:
    """Number of embeddings; isolated pattern vertices are counted in closed form."""
    fixed = dict(fixed or {})
    pool = sorted(set(within) if within is not None else range(H.n))
    degrees = F.graph.vertex_degrees
    core = [u for u in range(F.b) if degrees[u] > 0 or u in fixed]
    free = F.b - len(core)
    relabel = {u: i for i, u in enumerate(core)}
    core_pattern = Pattern(Hypergraph(F.k, len(core),
                                      [tuple(relabel[u] for u in e) for e in F.edges]))
    core_fixed = {relabel[u]: w for u, w in fixed.items()}
    n_core = sum(1 for _ in enumerate_embeddings(core_pattern, H, fixed=core_fixed, within=pool))
    return n_core * math.perm(len(pool) - len(core), free)


def count_rooted(F: Pattern, v: int, H: Hypergraph, w: int) -> int:
    """Embeddings of the star ``F_v`` into H mapping ``v`` to ``w``."""
    if not 0 <= w < H.n:
        raise ValueError(f"host vertex {w} out of range")
    star = Pattern(F.graph.star(v))
    return count_embeddings(star, H, fixed={v: w})


def copy_sets(F: Pattern, H: Hypergraph,
              within: Iterable[int] | None = None) -> dict[frozenset, Embedding]:
    """Vertex sets spanning a copy of F, each with its lexicographically first embedding."""
    out: dict[frozenset, Embedding] = {}
    if F.f == 1 and F.b == F.k and F.k == H.k:
        # single edge: copies are the host edges, first embedding is the sorted edge
        pool = None if within is None else set(within)
        for e in H.edges:
            if pool is None or pool.issuperset(e):
                out[frozenset(e)] = e
        return out
    for emb in enumerate_embeddings(F, H, within=within):
        key = frozenset(emb)
        if key not in out:
            out[key] = emb
    return out


def contains_copy(F: Pattern, H: Hypergraph, vertices: Iterable[int] | None = None) -> Embedding | None:
    """First embedding of F with all images in ``vertices`` (or anywhere), else None."""
    return next(enumerate_embeddings(F, H, limit=1, within=vertices), None)


# --- exact cover -----------------------------------------------------------------


class _BudgetExhausted(Exception):
    pass


def _exact_cover(columns: Iterable[int], rows: list[frozenset],
                 budget: int | None) -> tuple[list[int] | None, int]:
    """Algorithm X over dict-of-sets.  Returns (row indices or None, nodes used)."""
    X: dict[int, set[int]] = {c: set() for c in columns}
    Y = {i: sorted(r) for i, r in enumerate(rows)}
    for i, r in Y.items():
        for c in r:
            X[c].add(i)
    solution: list[int] = []
    nodes = 0

    def select(r):
        cols = []
        for j in Y[r]:
            for i in X[j]:
                for c in Y[i]:
                    if c != j:
                        X[c].remove(i)
            cols.append(X.pop(j))
        return cols

    def deselect(r, cols):
        for j in reversed(Y[r]):
            X[j] = cols.pop()
            for i in X[j]:
                for c in Y[i]:
                    if c != j:
                        X[c].add(i)

    def search():
        nonlocal nodes
        if not X:
            return True
        nodes += 1
        if budget is not None and nodes > budget:
            raise _BudgetExhausted
        c = min(X, key=lambda v: (len(X[v]), v))
        for r in sorted(X[c]):
            solution.append(r)
            cols = select(r)
            if search():
                return True
            deselect(r, cols)
            solution.pop()
        return False

    found = search()
    return (list(solution) if found else None), nodes


def has_factor(F: Pattern, H: Hypergraph, budget: int | None = None) -> FactorResult:
    """Decide whether H has an F-factor; the witness tiling is attached on success.

    With a node ``budget``, running out yields outcome ``"unknown"``, never a
    false negative.
    """
    F.require_edges()
    if H.n % F.b:
        return FactorResult(NO_FACTOR, reason="divisibility")
    if H.n == 0:
        return FactorResult(FACTOR, Tiling(()))
    copies = copy_sets(F, H)
    rows = list(copies)
    covered = set().union(*rows) if rows else set()
    if len(covered) < H.n:
        return FactorResult(NO_FACTOR, reason="uncoverable vertex")
    try:
        chosen, nodes = _exact_cover(range(H.n), rows, budget)
    except _BudgetExhausted:
        return FactorResult(UNKNOWN, reason="budget", nodes=budget or 0)
    if chosen is None:
        return FactorResult(NO_FACTOR, reason="search", nodes=nodes)
    tiling = Tiling(tuple(sorted(copies[rows[i]] for i in chosen)))
    return FactorResult(FACTOR, tiling, nodes=nodes)


def brute_force_oracle(F: Pattern, H: Hypergraph) -> bool:
    """F-factor existence by enumerating partitions of V(H) into b-sets.

    Deliberately independent of the exact-cover path: each part is tested by
    trying every bijection with V(F).
    """
    if H.n > ORACLE_MAX_N:
        raise GuardError(f"oracle limited to n <= {ORACLE_MAX_N}, got {H.n}")
    b = F.b
    if H.n % b:
        return False
    pattern_edges = [tuple(e) for e in F.graph.edges]
    host_edges = set(H.edges)

    def spans_copy(part):
        for perm in itertools.permutations(part):
            if all(tuple(sorted(perm[u] for u in e)) in host_edges for e in pattern_edges):
                return True
        return False

    def partition(remaining):
        if not remaining:
            return True
        first, rest = remaining[0], remaining[1:]
        for others in itertools.combinations(rest, b - 1):
            part = (first,) + others
            if spans_copy(part) and partition(tuple(v for v in rest if v not in others)):
                return True
        return False

    return partition(tuple(range(H.n)))


# --- tilings --------------------------------------------------------------------


def _greedy_local(copies: dict[frozenset, Embedding], n: int) -> list[frozenset]:
    ordered = sorted(copies, key=lambda s: tuple(sorted(s)))
    chosen: list[frozenset] = []
    used: set[int] = set()
    for s in ordered:
        if used.isdisjoint(s):
            chosen.append(s)
            used |= s
    improved = True
    while improved:
        improved = False
        for idx, s in enumerate(chosen):
            free = (set(range(n)) - used) | s
            inside = [t for t in ordered if t <= free]
            pair = next(((a, c) for a, c in itertools.combinations(inside, 2) if a.isdisjoint(c)),
                        None)
            if pair is not None:
                chosen[idx:idx + 1] = list(pair)
                used = (used - s) | pair[0] | pair[1]
                improved = True
                break
    return chosen


def _branch_and_bound(copies: dict[frozenset, Embedding], n: int, b: int) -> list[frozenset]:
    rows = sorted(copies, key=lambda s: tuple(sorted(s)))
    by_vertex: dict[int, list[frozenset]] = {v: [] for v in range(n)}
    for s in rows:
        for v in s:
            by_vertex[v].append(s)
    best: list[frozenset] = _greedy_local(copies, n)
    ceiling = n // b

    def active(avail):
        return {v for s in rows if s <= avail for v in s}

    def search(avail: frozenset, chosen: list[frozenset]):
        nonlocal best
        if len(best) == ceiling:
            return
        live = active(avail)
        if len(chosen) + len(live) // b <= len(best):
            return
        if not live:
            return
        v = min(live)
        for s in by_vertex[v]:
            if s <= avail:
                chosen.append(s)
                if len(chosen) > len(best):
                    best = list(chosen)
                search(avail - s, chosen)
                chosen.pop()
        search(avail - {v}, chosen)

    search(frozenset(range(n)), [])
    return best


def max_tiling(F: Pattern, H: Hypergraph, mode: str = "exact") -> Tiling:
    """A largest F-tiling (``mode="exact"``, n <= 15) or a greedy+swap heuristic one."""
    F.require_edges()
    copies = copy_sets(F, H)
    if mode == "exact":
        if H.n > EXACT_TILING_MAX_N:
            raise GuardError(f"exact max tiling limited to n <= {EXACT_TILING_MAX_N}")
        sets = _branch_and_bound(copies, H.n, F.b)
    elif mode in ("greedy", "greedy+local", "heuristic"):
        sets = _greedy_local(copies, H.n)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return Tiling(tuple(sorted(copies[s] for s in sets)))


def greedy_tiling(F: Pattern, H: Hypergraph, leftover: int = 0,
                  within: Iterable[int] | None = None) -> tuple[Tiling, tuple[int, ...]]:
    """Take the first copy inside the uncovered set until fewer than ``max(leftover, b)``
    vertices remain or none is left.  Returns the tiling and the remainder R."""
    if leftover < 0:
        raise ValueError("leftover must be >= 0")
    uncovered = set(within) if within is not None else set(range(H.n))
    found = []
    while len(uncovered) >= max(leftover, F.b):
        emb = contains_copy(F, H, uncovered)
        if emb is None:
            break
        found.append(emb)
        uncovered.difference_update(emb)
    return Tiling(tuple(found)), tuple(sorted(uncovered))


def copy_count_statistic(J: Pattern, H: Hypergraph) -> int:
    """Number of ordered vertex tuples spanning a labelled copy of J."""
    return count_embeddings(J, H)


def expected_copy_count(J: Pattern, n: int, p: float) -> float:
    """``n (n-1) ... (n-s+1) p**j`` for J with s vertices and j edges."""
    return math.perm(n, J.b) * p ** J.f


# --- verification ------------------------------------------------------------------


def verify_embedding(F: Pattern, H: Hypergraph, emb: Embedding) -> bool:
    if len(emb) != F.b or len(set(emb)) != F.b:
        return False
    if any(not 0 <= w < H.n for w in emb):
        return False
    return all(tuple(sorted(emb[u] for u in e)) in H.edge_set for e in F.edges)


def verify_tiling(F: Pattern, H: Hypergraph, tiling: Tiling,
                  cover: Iterable[int] | None = None) -> bool:
    """Disjointness, validity of every copy, and (optionally) exact coverage of ``cover``."""
    seen: set[int] = set()
    for emb in tiling.copies:
        if not verify_embedding(F, H, emb):
            return False
        if seen.intersection(emb):
            return False
        seen.update(emb)
    if cover is not None and seen != set(cover):
        return False
    return True

