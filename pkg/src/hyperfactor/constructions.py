"""Extremal host constructions and their closed-form properties."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact import PowerProduct, as_fraction
from .exceptions import InvalidHypergraphError
from .hypergraph import Hypergraph
from .pattern import Pattern, d_star
from .random_models import SeededSampler, sample_binomial

__all__ = [
    "SplitHost",
    "CounterexampleSetup",
    "build_split_host",
    "split_host_min_degree",
    "matching_cover_bound",
    "sublinear_counterexample",
    "isolated_vertex_expectation",
    "estimate_isolated_vertices",
    "sparse_tiling_probability",
]


@dataclass(frozen=True)
class SplitHost:
    """All k-sets meeting ``A``; ``A`` is the first ``eta * n`` vertices."""

    graph: Hypergraph
    A: tuple[int, ...]
    B: tuple[int, ...]
    eta: Fraction

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def k(self) -> int:
        return self.graph.k


def _split_host(n: int, k: int, a: int) -> Hypergraph:
    edges = frozenset(e for e in itertools.combinations(range(n), k) if e[0] < a)
    return Hypergraph._trusted(k, n, edges)


def build_split_host(n: int, k: int, eta) -> SplitHost:
    """``H_n(A, B, eta)`` with ``|A| = eta * n`` exactly."""
    eta = as_fraction(eta)
    if not 0 < eta <= 1:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    if n < k:
        raise InvalidHypergraphError(f"need n >= k, got n={n}, k={k}")
    size = eta * n
    if size.denominator != 1:
        raise ValueError(f"eta * n = {size} is not an integer")
    a = int(size)
    return SplitHost(_split_host(n, k, a), tuple(range(a)), tuple(range(a, n)), eta)


def split_host_min_degree(n: int, k: int, a: int) -> int:
    """``C(n-1, k-1) - C(n-a-1, k-1)``, the minimum vertex degree of a split host."""
    rest = n - a - 1
    return math.comb(n - 1, k - 1) - (math.comb(rest, k - 1) if rest >= 0 else 0)


def matching_cover_bound(host: SplitHost) -> int:
    """Most vertices a matching of host edges can cover.

    Every edge uses a vertex of ``A``, so a matching has at most ``|A|``
    edges (and at most ``n // k``).
    """
    return host.k * min(len(host.A), host.n // host.k)


@dataclass(frozen=True)
class CounterexampleSetup:
    host: SplitHost
    p: float
    omega: float
    eta_requested: float

    @property
    def eta_realized(self) -> Fraction:
        return Fraction(len(self.host.A), self.host.n)


def sublinear_counterexample(n: int, k: int, omega: float) -> CounterexampleSetup:
    """Split host with ``|A| = max(1, floor(n / (3 k omega)))`` and
    ``p = ln(omega) / (2 C(n-1, k-1))``."""
    if omega <= 1:
        raise ValueError(f"omega must exceed 1, got {omega}")
    if n < k:
        raise InvalidHypergraphError(f"need n >= k, got n={n}, k={k}")
    a = max(1, math.floor(n / (3 * k * omega)))
    p = 0.5 * math.log(omega) / math.comb(n - 1, k - 1)
    if p > 1:
        raise ValueError(f"omega={omega} gives p={p} > 1 at n={n}")
    host = SplitHost(_split_host(n, k, a), tuple(range(a)), tuple(range(a, n)), Fraction(a, n))
    return CounterexampleSetup(host, p, omega, 1 / (3 * k * omega))


def isolated_vertex_expectation(n: int, k: int, p: float) -> float:
    """Expected number of isolated vertices of ``H^(k)(n, p)``."""
    if not 0 <= p <= 1:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    return n * (1 - p) ** math.comb(n - 1, k - 1)


def estimate_isolated_vertices(n: int, k: int, p: float, seeds, stream: int = 0):
    """Monte Carlo mean and standard error of the isolated-vertex count."""
    counts = np.array([
        len(sample_binomial(n, k, p, SeededSampler(s, stream)).isolated_vertices())
        for s in seeds
    ], dtype=float)
    se = counts.std(ddof=1) / math.sqrt(len(counts)) if len(counts) > 1 else math.nan
    return float(counts.mean()), float(se)


def sparse_tiling_probability(F: Pattern, theta, n) -> tuple[PowerProduct, PowerProduct]:
    """Constant ``c = (theta / 2b) ** (1/j)`` and ``p = c n ** (-1/d*)`` for the
    densest subgraph J (``j`` edges) of F, below which random graphs have no
    J-tiling of ``theta n / b`` members."""
    theta = as_fraction(theta)
    ds = d_star(F)
    c = PowerProduct.of(theta / (2 * F.b), Fraction(1, ds.edges))
    p = c * PowerProduct.of(n, -1 / ds.value)
    return c, p
