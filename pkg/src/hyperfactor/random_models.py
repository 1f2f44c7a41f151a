"""Seeded samplers for binomial random k-graphs and perturbed instances.

Every k-subset of ``range(n)`` has a fixed colexicographic rank.  The uniform
draw for rank ``r`` is the ``r``-th output of a Philox counter-based
generator keyed by ``(seed, stream)``, so a draw depends only on
``(seed, stream, r)``.  Colex ranks do not depend on ``n``, hence the sample
on ``n`` vertices restricted to the first ``m`` vertices is the sample on
``m`` vertices.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import GuardError
from .hypergraph import Hypergraph

__all__ = [
    "MAX_KSETS",
    "SeededSampler",
    "PerturbedInstance",
    "colex_ksets",
    "sample_binomial",
    "sample_coupled",
    "two_round_split",
    "sample_two_round",
    "perturb",
]

MAX_KSETS = 10**7
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SeededSampler:
    """Stateless source of randomness identified by ``(seed, stream)``."""

    seed: int
    stream: int = 0

    def _key(self) -> int:
        return ((self.seed & _MASK64) << 64) | (self.stream & _MASK64)

    def uniforms(self, count: int) -> np.ndarray:
        """The first ``count`` counter-mode uniforms of this stream."""
        gen = np.random.Generator(np.random.Philox(key=self._key()))
        return gen.random(count)

    def child(self, label: int) -> SeededSampler:
        """An independent sampler for a sub-task, e.g. one exposure round."""
        ss = np.random.SeedSequence([self.seed & _MASK64, self.stream & _MASK64, label])
        return SeededSampler(int(ss.generate_state(1, np.uint64)[0]), label)

    def generator(self, purpose: int = 0) -> np.random.Generator:
        """A numpy Generator for auxiliary choices (subset sampling, shuffles)."""
        ss = np.random.SeedSequence([self.seed & _MASK64, self.stream & _MASK64, 1 << 32, purpose])
        return np.random.Generator(np.random.Philox(ss))


@lru_cache(maxsize=32)
def colex_ksets(n: int, k: int) -> np.ndarray:
    """All k-subsets of ``range(n)`` in colex order, shape ``(C(n,k), k)``."""
    total = math.comb(n, k)
    if total > MAX_KSETS:
        raise GuardError(f"C({n},{k}) = {total} exceeds the desk-scale limit {MAX_KSETS}")
    rows = sorted(itertools.combinations(range(n), k), key=lambda t: t[::-1])
    arr = np.array(rows, dtype=np.int64).reshape(total, k)
    arr.setflags(write=False)
    return arr


def _draws(n: int, k: int, sampler: SeededSampler) -> tuple[np.ndarray, np.ndarray]:
    ksets = colex_ksets(n, k)
    return ksets, sampler.uniforms(len(ksets))


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")


def _from_mask(n: int, k: int, ksets: np.ndarray, mask: np.ndarray) -> Hypergraph:
    chosen = frozenset(map(tuple, ksets[mask].tolist()))
    return Hypergraph._trusted(k, n, chosen)


def sample_binomial(n: int, k: int, p: float, sampler: SeededSampler) -> Hypergraph:
    """``H^(k)(n, p)``: each k-set independently with probability ``p``."""
    _check_p(p)
    ksets, u = _draws(n, k, sampler)
    return _from_mask(n, k, ksets, u < p)


def sample_coupled(n: int, k: int, p_list: Sequence[float],
                   sampler: SeededSampler) -> list[Hypergraph]:
    """Nested samples sharing one uniform per k-set; ``E_i`` grows with ``p_i``."""
    p_list = list(p_list)
    for p in p_list:
        _check_p(p)
    if any(a > b for a, b in zip(p_list, p_list[1:])):
        raise ValueError("p_list must be ascending")
    ksets, u = _draws(n, k, sampler)
    return [_from_mask(n, k, ksets, u < p) for p in p_list]


def two_round_split(p: float) -> float:
    """The per-round probability ``p'`` with ``(1 - p')**2 = 1 - p``."""
    _check_p(p)
    return 1.0 - math.sqrt(1.0 - p)


def sample_two_round(n: int, k: int, p: float,
                     sampler: SeededSampler) -> tuple[Hypergraph, Hypergraph]:
    """Two independent ``H^(k)(n, p')`` samples whose union is distributed as ``H^(k)(n, p)``."""
    q = two_round_split(p)
    return (sample_binomial(n, k, q, sampler.child(1)),
            sample_binomial(n, k, q, sampler.child(2)))


@dataclass(frozen=True)
class PerturbedInstance:
    host: Hypergraph
    random_part: Hypergraph
    union: Hypergraph
    p: float


def perturb(host: Hypergraph, p: float, sampler: SeededSampler) -> PerturbedInstance:
    """Add ``H^(k)(n, p)`` on the host's vertex set."""
    random_part = sample_binomial(host.n, host.k, p, sampler)
    return PerturbedInstance(host, random_part, host.union(random_part), p)
