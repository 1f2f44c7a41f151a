"""Absorbers, template graphs and the absorbing-set construction.

An S-absorber is a vertex set A, disjoint from S with ``|A|`` divisible by
``b``, such that both ``H[A]`` and ``H[A | S]`` have F-factors.  The absorbing
set glues many absorbers together along a bipartite *template graph* whose
perfect matchings survive the removal of any ``beta*m`` vertices from its
flexible class.  Leftover sets R are then absorbed by first covering R (and a
few flexible vertices) with rooted copies living inside the flexible set X.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import as_fraction
from .exceptions import AbsorberBuildError, AbsorptionError, GuardError, InvalidHypergraphError
from .factor import (
    Tiling,
    contains_copy,
    count_rooted,
    enumerate_embeddings,
    has_factor,
    verify_tiling,
)
from .hypergraph import Hypergraph, vertex_set
from .pattern import Pattern, link_is_partite
from .random_models import PerturbedInstance, SeededSampler

__all__ = [
    "AbsorberStructure",
    "TemplateGraph",
    "AbsorbingConstants",
    "AbsorberRecord",
    "AbsorbingSet",
    "is_absorber",
    "is_simple_absorber",
    "find_simple_labelling",
    "choose_root_vertex",
    "find_simple_absorber",
    "find_absorber",
    "complete_template",
    "compact_template",
    "template_verify",
    "template_search",
    "bipartite_matching",
    "rooted_families",
    "build_absorbing_set",
    "absorb",
]

TEMPLATE_MAX_M = 8
TEMPLATE_MAX_FLEX = 4
PAPER_MAX_TEMPLATE_DEGREE = 100


# --- absorber predicates ------------------------------------------------------------


def _factor_in(F: Pattern, H: Hypergraph, vertices: Sequence[int]) -> Tiling | None:
    """F-factor of ``H[vertices]`` mapped back to H's labels, or None."""
    vertices = sorted(vertices)
    result = has_factor(F, H.induced(vertices))
    if not result:
        return None
    back = tuple(tuple(vertices[u] for u in emb) for emb in result.tiling.copies)
    return Tiling(back)


def is_absorber(H: Hypergraph, S: Iterable[int], A: Iterable[int], F: Pattern) -> bool:
    """Both ``H[A]`` and ``H[A | S]`` contain F-factors."""
    S = vertex_set(S, H.n)
    A = vertex_set(A, H.n)
    if len(S) != F.b:
        raise InvalidHypergraphError(f"|S| must be {F.b}, got {len(S)}")
    if not A or len(A) % F.b:
        raise InvalidHypergraphError(f"|A| must be a positive multiple of {F.b}, got {len(A)}")
    if set(A) & set(S):
        raise InvalidHypergraphError("A and S must be disjoint")
    return (_factor_in(F, H, A) is not None
            and _factor_in(F, H, A + S) is not None)


@dataclass(frozen=True)
class AbsorberStructure:
    """Blocks ``A_1..A_b`` of b vertices each; the last vertex of each block
    forms the diagonal block ``A_{b+1}``.  ``labelling`` lists ``s_1..s_b``."""

    blocks: tuple[tuple[int, ...], ...]
    labelling: tuple[int, ...]

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(block[-1] for block in self.blocks)

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(v for block in self.blocks for v in block))

    def check(self, b: int) -> None:
        if len(self.blocks) != b or any(len(block) != b for block in self.blocks):
            raise InvalidHypergraphError(f"need {b} blocks of {b} vertices")
        if len(self.labelling) != b or len(set(self.labelling)) != b:
            raise InvalidHypergraphError(f"labelling must list {b} distinct vertices")
        flat = [v for block in self.blocks for v in block]
        if len(set(flat)) != len(flat):
            raise InvalidHypergraphError("blocks must be pairwise disjoint")
        if set(flat) & set(self.labelling):
            raise InvalidHypergraphError("blocks must avoid S")

    def to_json(self) -> dict:
        return {"blocks": [list(b) for b in self.blocks], "labelling": list(self.labelling),
                "diagonal": list(self.diagonal)}


def _simple_conditions(H: Hypergraph, F: Pattern, blocks, labelling) -> bool:
    if contains_copy(F, H, blocks_diag := [block[-1] for block in blocks]) is None:
        return False
    del blocks_diag
    for s, block in zip(labelling, blocks):
        if contains_copy(F, H, block) is None:
            return False
        if contains_copy(F, H, (s,) + tuple(block[:-1])) is None:
            return False
    return True


def is_simple_absorber(H: Hypergraph, S: Iterable[int], structure: AbsorberStructure,
                       F: Pattern) -> bool:
    """The ``2b + 1`` copy conditions hold for the structure's own labelling of S."""
    structure.check(F.b)
    if set(S) != set(structure.labelling):
        raise InvalidHypergraphError("structure labelling does not enumerate S")
    return _simple_conditions(H, F, structure.blocks, structure.labelling)


def find_simple_labelling(H: Hypergraph, S: Iterable[int],
                          blocks: Sequence[Sequence[int]], F: Pattern) -> tuple[int, ...] | None:
    """Try all ``b!`` labellings of S; return one that works, else None."""
    blocks = tuple(tuple(block) for block in blocks)
    for labelling in itertools.permutations(sorted(S)):
        structure = AbsorberStructure(blocks, labelling)
        if is_simple_absorber(H, S, structure, F):
            return labelling
    return None


# --- simple absorber search ---------------------------------------------------------


def choose_root_vertex(F: Pattern, host: Hypergraph, roots: Sequence[int]) -> int:
    """Vertex ``v*`` of F whose star the host should supply.

    Prefer vertices with a (k-1)-partite link; among those, maximise the
    smallest rooted count of ``F_v`` at the given host roots.
    """
    partite = [v for v in range(F.b) if link_is_partite(F, v)]
    pool = partite or list(range(F.b))
    return max(pool, key=lambda v: (min(count_rooted(F, v, host, w) for w in roots), -v))


def find_simple_absorber(instance: PerturbedInstance, S: Sequence[int], F: Pattern,
                         forbidden: Iterable[int] = (), *, v_star: int | None = None,
                         max_nodes: int = 20000) -> AbsorberStructure | None:
    """Search for a simple S-absorber in ``host | random_part``.

    Block ``i`` consists of a copy of the star of ``v*`` in the *host* rooted
    at ``s_i`` (the images of ``V(F) - v*``) plus a fresh vertex ``d_i``.  The
    remaining edges, i.e. the glued graph on the blocks with ``d_i`` playing
    ``v*`` and a copy of F on the diagonal ``{d_1..d_b}``, must be present in
    the union.  Diagonals are tried first, then blocks depth-first.
    ``max_nodes`` bounds the total number of candidate blocks examined.
    """
    F.require_edges()
    host, union = instance.host, instance.union
    S = tuple(S)
    b = F.b
    if len(S) != b or len(set(S)) != b:
        raise InvalidHypergraphError(f"S must list {b} distinct vertices")
    forbidden = set(forbidden)
    if forbidden & set(S):
        raise InvalidHypergraphError("forbidden set must be disjoint from S")
    if v_star is None:
        v_star = choose_root_vertex(F, host, S)
    star_edges = [e for e in F.edges if v_star in e]
    others = [u for u in range(b) if u != v_star]
    banned = forbidden | set(S)
    free = [v for v in range(union.n) if v not in banned]
    budget = [max_nodes]
    host_edges = host.edge_set

    def block_options(i, d, used):
        # copies of F in the union with v* -> d whose star at s_i is in the host
        pool = [v for v in free if v not in used] + [d]
        for psi in enumerate_embeddings(F, union, fixed={v_star: d}, within=pool):
            budget[0] -= 1
            if budget[0] < 0:
                return
            phi = list(psi)
            phi[v_star] = S[i]
            if all(tuple(sorted(phi[u] for u in e)) in host_edges for e in star_edges):
                yield tuple(psi[u] for u in others) + (d,)

    def fill(i, diagonal, used, blocks):
        if i == b:
            return list(blocks)
        for block in block_options(i, diagonal[i], used):
            blocks.append(block)
            done = fill(i + 1, diagonal, used | set(block), blocks)
            if done is not None:
                return done
            blocks.pop()
            if budget[0] < 0:
                return None
        return None

    seen = set()
    for diagonal in enumerate_embeddings(F, union, within=free):
        if budget[0] < 0:
            break
        key = frozenset(diagonal)
        if key in seen:
            continue
        seen.add(key)
        blocks = fill(0, diagonal, set(diagonal), [])
        if blocks is not None:
            structure = AbsorberStructure(tuple(blocks), S)
            if is_simple_absorber(union, S, structure, F):
                return structure
    return None


# --- generic absorber search --------------------------------------------------------


@dataclass(frozen=True)
class AbsorberRecord:
    """An S-absorber with F-factors of ``H[A]`` and ``H[A | S]``."""

    S: tuple[int, ...]
    vertices: tuple[int, ...]
    alone: Tiling
    with_s: Tiling


def find_absorber(H: Hypergraph, S: Sequence[int], F: Pattern, forbidden: Iterable[int] = (),
                  max_size: int | None = None,
                  candidate_limit: int = 20000) -> AbsorberRecord | None:
    """Smallest-first search for an S-absorber avoiding ``forbidden``.

    Sizes ``b, 2b, ..., max_size`` (default ``b**2``) are tried in turn;
    candidates are scanned lowest-index-first, at most ``candidate_limit``
    per size.
    """
    b = F.b
    max_size = b * b if max_size is None else max_size
    S = tuple(sorted(S))
    banned = set(forbidden) | set(S)
    free = [v for v in range(H.n) if v not in banned]
    for size in range(b, max_size + 1, b):
        for A in itertools.islice(itertools.combinations(free, size), candidate_limit):
            alone = _factor_in(F, H, A)
            if alone is None:
                continue
            with_s = _factor_in(F, H, A + S)
            if with_s is not None:
                return AbsorberRecord(S, tuple(A), alone, with_s)
    return None


# --- template graphs ----------------------------------------------------------------


@dataclass(frozen=True)
class TemplateGraph:
    """Bipartite graph between ``X_m | Y_m`` (left) and ``Z_m`` (right).

    Left vertices ``0 .. m+beta*m-1`` form ``X_m``, the next ``2m`` form
    ``Y_m``; right vertices are ``0 .. 3m-1``.
    """

    m: int
    beta: Fraction
    edges: frozenset[tuple[int, int]]

    @property
    def x_size(self) -> int:
        return self.m + self.flex

    @property
    def flex(self) -> int:
        return int(self.beta * self.m)

    @property
    def y_size(self) -> int:
        return 2 * self.m

    @property
    def z_size(self) -> int:
        return 3 * self.m

    @property
    def left_size(self) -> int:
        return self.x_size + self.y_size

    @property
    def max_degree(self) -> int:
        deg: dict[tuple[str, int], int] = {}
        for a, z in self.edges:
            deg[("l", a)] = deg.get(("l", a), 0) + 1
            deg[("r", z)] = deg.get(("r", z), 0) + 1
        return max(deg.values(), default=0)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def check(self, delta_cap: int | None = PAPER_MAX_TEMPLATE_DEGREE) -> None:
        if (self.beta * self.m).denominator != 1:
            raise InvalidHypergraphError("beta * m must be an integer")
        for a, z in self.edges:
            if not (0 <= a < self.left_size and 0 <= z < self.z_size):
                raise InvalidHypergraphError(f"template edge {(a, z)} out of range")
        if delta_cap is not None and self.max_degree > delta_cap:
            raise InvalidHypergraphError(f"max degree {self.max_degree} exceeds {delta_cap}")


def _template_shape(m: int, beta) -> Fraction:
    beta = as_fraction(beta)
    if m < 1 or beta <= 0:
        raise ValueError("need m >= 1 and beta > 0")
    if (beta * m).denominator != 1:
        raise ValueError(f"beta * m = {beta * m} is not an integer")
    return beta


def complete_template(m: int, beta) -> TemplateGraph:
    beta = _template_shape(m, beta)
    left = m + int(beta * m) + 2 * m
    return TemplateGraph(m, beta, frozenset(itertools.product(range(left), range(3 * m))))


def compact_template(m: int, beta) -> TemplateGraph:
    """A sparse valid template: ``Y_m`` matched onto the first ``2m`` of ``Z_m``
    and ``X_m`` complete to the last ``m``."""
    beta = _template_shape(m, beta)
    x = m + int(beta * m)
    edges = {(x + j, j) for j in range(2 * m)}
    edges |= {(a, 2 * m + j) for a in range(x) for j in range(m)}
    return TemplateGraph(m, beta, frozenset(edges))


def bipartite_matching(left: Sequence[int], adjacency: dict[int, Sequence[int]]) -> dict[int, int]:
    """Maximum matching by augmenting paths; returns ``{left: right}``."""
    match_right: dict[int, int] = {}

    def augment(a, seen):
        for z in adjacency.get(a, ()):
            if z in seen:
                continue
            seen.add(z)
            if z not in match_right or augment(match_right[z], seen):
                match_right[z] = a
                return True
        return False

    for a in left:
        augment(a, set())
    return {a: z for z, a in match_right.items()}


def _template_adjacency(B: TemplateGraph) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {}
    for a, z in B.sorted_edges():
        adj.setdefault(a, []).append(z)
    return adj


def _flexible_matching(B: TemplateGraph, kept_x: Sequence[int],
                       adj: dict[int, list[int]]) -> dict[int, int] | None:
    left = list(kept_x) + list(range(B.x_size, B.left_size))
    matching = bipartite_matching(left, adj)
    return matching if len(matching) == B.z_size else None


def template_verify(B: TemplateGraph, m: int, beta) -> bool:
    """Every m-subset of ``X_m`` together with ``Y_m`` matches ``Z_m`` perfectly."""
    beta = as_fraction(beta)
    if B.m != m or B.beta != beta:
        raise ValueError("template shape does not match (m, beta)")
    if m > TEMPLATE_MAX_M or beta * m > TEMPLATE_MAX_FLEX:
        raise GuardError(f"exhaustive check limited to m <= {TEMPLATE_MAX_M}, "
                         f"beta*m <= {TEMPLATE_MAX_FLEX}")
    B.check(delta_cap=None)
    adj = _template_adjacency(B)
    return all(_flexible_matching(B, kept, adj) is not None
               for kept in itertools.combinations(range(B.x_size), m))


def template_search(m: int, beta, delta_cap: int, sampler: SeededSampler,
                    attempts: int) -> tuple[TemplateGraph | None, int]:
    """Sample random maximal degree-capped bipartite graphs until one verifies.

    Returns the template (or None) and the number of attempts used.
    """
    beta = _template_shape(m, beta)
    left = m + int(beta * m) + 2 * m
    pairs = list(itertools.product(range(left), range(3 * m)))
    for attempt in range(1, attempts + 1):
        order = sampler.generator(attempt).permutation(len(pairs))
        deg_l = [0] * left
        deg_r = [0] * (3 * m)
        edges = set()
        for idx in order:
            a, z = pairs[idx]
            if deg_l[a] < delta_cap and deg_r[z] < delta_cap:
                edges.add((a, z))
                deg_l[a] += 1
                deg_r[z] += 1
        B = TemplateGraph(m, beta, frozenset(edges))
        if template_verify(B, m, beta):
            return B, attempt
    return None, attempts


# --- absorbing set ------------------------------------------------------------------


@dataclass(frozen=True)
class AbsorbingConstants:
    """Constants of the absorbing-set construction.

    :meth:`from_rho` derives ``q``, ``beta`` and ``xi`` from ``rho`` and ``b``
    as in the asymptotic argument; desk-scale runs pass explicit values.
    """

    rho: Fraction
    q: Fraction
    beta: Fraction
    xi: Fraction

    @classmethod
    def from_rho(cls, rho, b: int) -> AbsorbingConstants:
        rho = as_fraction(rho)
        q = rho / (1300 * b * b)
        beta = q ** (b - 1) * rho / 8
        xi = beta * q / (2 * (1 + beta) * (b - 1))
        return cls(rho, q, beta, xi)

    @classmethod
    def of(cls, rho, q, beta, xi) -> AbsorbingConstants:
        return cls(*(as_fraction(x) for x in (rho, q, beta, xi)))

    def to_json(self) -> dict:
        return {k: str(getattr(self, k)) for k in ("rho", "q", "beta", "xi")}


def rooted_families(F: Pattern, H: Hypergraph, inside: Iterable[int],
                    vertices: Iterable[int]) -> dict[int, list[tuple[tuple[int, ...], tuple[int, ...]]]]:
    """For each v, pairwise disjoint (b-1)-sets T inside ``inside - {v}`` such
    that ``{v} | T`` spans a copy of F containing v.

    Members are ``(T, embedding)``, chosen greedily in lexicographic order.
    """
    inside = sorted(set(inside))
    out = {}
    for v in vertices:
        members = []
        taken: set[int] = set()
        for root in range(F.b):
            pool = [w for w in inside if w != v and w not in taken] + [v]
            for emb in enumerate_embeddings(F, H, fixed={root: v}, within=pool):
                if taken.intersection(emb):
                    continue
                T = tuple(sorted(w for w in emb if w != v))
                members.append((T, emb))
                taken.update(T)
        out[v] = members
    return out


@dataclass
class AbsorbingSet:
    """Output of :func:`build_absorbing_set`, with everything :func:`absorb` needs."""

    F: Pattern
    H: Hypergraph
    constants: AbsorbingConstants
    m: int
    X: tuple[int, ...]
    Y: tuple[int, ...]
    Z: tuple[int, ...]
    z_parts: tuple[tuple[int, ...], ...]
    template: TemplateGraph
    left_map: tuple[int, ...]  # template left vertex -> host vertex
    absorbers: dict[tuple[int, int], AbsorberRecord]
    families: dict[int, list[tuple[tuple[int, ...], tuple[int, ...]]]]
    trace: dict = field(default_factory=dict)

    @property
    def flex(self) -> int:
        return int(self.constants.beta * self.m)

    @property
    def vertices(self) -> tuple[int, ...]:
        out = set(self.X) | set(self.Y) | set(self.Z)
        for record in self.absorbers.values():
            out.update(record.vertices)
        return tuple(sorted(out))

    def legal_leftover(self, R: Iterable[int]) -> bool:
        R = set(R)
        n, b = self.H.n, self.F.b
        return (not R & set(self.vertices)
                and len(R) <= self.constants.xi * n
                and (len(self.vertices) + len(R)) % b == 0)


def _fail(stage: str, detail: str, trace: dict):
    trace["failed_stage"] = stage
    trace["detail"] = detail
    raise AbsorberBuildError(stage, detail, trace)


def build_absorbing_set(H: Hypergraph, F: Pattern, constants: AbsorbingConstants,
                        families=None, sampler: SeededSampler | None = None, *,
                        template: TemplateGraph | None = None,
                        V0: Iterable[int] = (),
                        absorber_size: int | None = None,
                        find: Callable | None = None,
                        max_x_retries: int = 50) -> AbsorbingSet:
    """Build an absorbing set for F in H.

    Stages, each of which may fail with :class:`AbsorberBuildError`:

    ``X-concentration``
        sample X (each vertex outside ``V0`` with probability ``q``), retrying
        until ``qn/2 <= |X| <= 2qn`` and ``m = |X|/(1+beta) >= 1``; X is
        trimmed to ``(1+beta) m`` vertices.
    ``template``
        the template graph (complete bipartite by default) must verify.
    ``constants-too-large``
        ``|X|+|Y|+|Z| + absorber_size * |E(B)|`` must not exceed ``rho n / 2``.
    ``allocation``
        Y, Z are the lowest free vertices and one absorber per template edge
        is found greedily, disjoint from everything used so far.
    ``family shortfall``
        every vertex that may need covering has a non-empty family of rooted
        copies inside X.

    ``families`` optionally maps each vertex to candidate ``(b-1)``-sets;
    only members inside X are kept.  By default the families are computed
    inside X directly.
    """
    F.require_edges()
    b, n = F.b, H.n
    sampler = sampler or SeededSampler(0)
    absorber_size = b * b if absorber_size is None else absorber_size
    V0 = set(V0)
    q, beta, rho = constants.q, constants.beta, constants.rho
    trace: dict = {"n": n, "b": b, "constants": constants.to_json(), "x_attempts": []}

    # X-concentration
    pool = [v for v in range(n) if v not in V0]
    X = None
    m = 0
    for attempt in range(max_x_retries):
        draws = sampler.generator(attempt).random(len(pool))
        cand = [v for v, u in zip(pool, draws) if u < float(q)]
        size = len(cand)
        trace["x_attempts"].append(size)
        if not (q * n / 2 <= size <= 2 * q * n):
            continue
        m = math.floor(size / (1 + beta))
        m -= m % beta.denominator if beta.denominator > 1 else 0
        while m > 0 and ((beta * m).denominator != 1 or m * (1 + beta) > size):
            m -= 1
        if m < 1:
            continue
        X = tuple(cand[: int(m * (1 + beta))])
        break
    if X is None:
        _fail("X-concentration", f"no acceptable X in {max_x_retries} attempts", trace)
    flex = int(beta * m)
    trace.update(m=m, flex=flex, X=list(X))

    # template
    if template is None:
        template = complete_template(m, beta)
    if template.m != m or template.beta != beta:
        _fail("template", f"template shape ({template.m}, {template.beta}) != ({m}, {beta})", trace)
    try:
        ok = template_verify(template, m, beta)
        trace["template_verified"] = ok
    except GuardError:
        ok = True
        trace["template_verified"] = "skipped (guard)"
    if not ok:
        _fail("template", "template graph lacks the flexible matching property", trace)
    trace["template_edges"] = len(template.edges)
    trace["template_max_degree"] = template.max_degree

    # size accounting
    y_size, z_size = 2 * m, 3 * m * (b - 1)
    footprint = len(X) + y_size + z_size + absorber_size * len(template.edges)
    trace["footprint"] = footprint
    trace["paper_bound"] = 4 * b * m + PAPER_MAX_TEMPLATE_DEGREE * b * b * 3 * m
    trace["budget"] = str(rho * n / 2)
    if footprint > rho * n / 2:
        _fail("constants-too-large", f"footprint {footprint} exceeds rho*n/2 = {rho * n / 2}", trace)

    # allocation
    rest = [v for v in range(n) if v not in V0 and v not in set(X)]
    if len(rest) < y_size + z_size:
        _fail("allocation", "not enough vertices for Y and Z", trace)
    Y = tuple(rest[:y_size])
    Z = tuple(rest[y_size:y_size + z_size])
    z_parts = tuple(Z[i:i + b - 1] for i in range(0, len(Z), b - 1))
    left_map = X + Y
    used = set(X) | set(Y) | set(Z)
    finder = find or (lambda S, forbidden: find_absorber(H, S, F, forbidden, max_size=absorber_size))
    absorbers: dict[tuple[int, int], AbsorberRecord] = {}
    for a, z in template.sorted_edges():
        S_e = tuple(sorted((left_map[a],) + z_parts[z]))
        record = finder(S_e, used)
        if record is None:
            trace["absorbers_found"] = len(absorbers)
            _fail("allocation", f"no absorber for template edge {(a, z)}", trace)
        absorbers[(a, z)] = record
        used.update(record.vertices)
    trace["absorbers_found"] = len(absorbers)

    # families inside X
    A = used
    needy = [v for v in range(n) if v not in A or v in set(X)]
    if families is None:
        fam = rooted_families(F, H, X, needy)
    else:
        fam = {}
        for v in needy:
            members = []
            for T in families.get(v, ()):
                T = tuple(sorted(T))
                if set(T) <= set(X) and v not in T:
                    emb = contains_copy(F, H, (v,) + T)
                    if emb is not None:
                        members.append((T, emb))
            fam[v] = members
    sizes = [len(fam[v]) for v in needy]
    trace["family_min"] = min(sizes, default=0)
    if any(s == 0 for s in sizes):
        short = [v for v in needy if not fam[v]]
        _fail("family shortfall", f"{len(short)} vertices have no rooted copy inside X", trace)

    result = AbsorbingSet(F, H, constants, m, X, Y, Z, z_parts, template, left_map,
                          absorbers, fam, trace)
    trace["size"] = len(result.vertices)
    return result


def _pick_family_members(state: AbsorbingSet, targets: list[int], avoid: set[int],
                         budget: int = 100000):
    chosen: list[tuple[int, tuple[int, ...], tuple[int, ...]]] = []
    taken = set(avoid)
    nodes = [budget]

    def search(i):
        if i == len(targets):
            return True
        v = targets[i]
        for T, emb in state.families[v]:
            nodes[0] -= 1
            if nodes[0] < 0:
                return False
            if taken.intersection(T):
                continue
            chosen.append((v, T, emb))
            taken.update(T)
            if search(i + 1):
                return True
            taken.difference_update(T)
            chosen.pop()
        return False

    return chosen if search(0) else None


def absorb(state: AbsorbingSet, R: Iterable[int]) -> Tiling:
    """An F-factor of ``H[A | R]`` for a legal leftover set R."""
    F, H = state.F, state.H
    b, n = F.b, H.n
    R = vertex_set(R, n)
    A = set(state.vertices)
    if A & set(R):
        raise AbsorptionError("R must be disjoint from the absorbing set")
    if len(R) > state.constants.xi * n:
        raise AbsorptionError(f"|R| = {len(R)} exceeds xi*n = {state.constants.xi * n}")
    if (len(A) + len(R)) % b:
        raise AbsorptionError("divisibility: b must divide |A| + |R|")
    need = state.flex - (b - 1) * len(R)
    if need < 0 or need % b:
        raise AbsorptionError(f"divisibility: beta*m - (b-1)|R| = {need} is not in bN")
    X_prime = list(state.X[: need // b])
    picks = _pick_family_members(state, list(R) + X_prime, set(X_prime))
    if picks is None:
        raise AbsorptionError("no disjoint rooted copies for R and X'")
    Q = set(X_prime)
    for _, T, _ in picks:
        Q.update(T)
    if len(Q) != state.flex:
        raise AbsorptionError(f"|Q| = {len(Q)} != beta*m = {state.flex}")
    kept = [i for i, v in enumerate(state.X) if v not in Q]
    B = state.template
    matching = _flexible_matching(B, kept, _template_adjacency(B))
    if matching is None:
        raise AbsorptionError("template has no perfect matching for the remaining X")
    matched = set(matching.items())
    copies = [emb for _, _, emb in picks]
    for edge, record in state.absorbers.items():
        tiles = record.with_s if edge in matched else record.alone
        copies.extend(tiles.copies)
    tiling = Tiling(tuple(sorted(copies)))
    if not verify_tiling(F, H, tiling, cover=A | set(R)):
        raise AbsorptionError("assembled tiling failed verification")
    return tiling
