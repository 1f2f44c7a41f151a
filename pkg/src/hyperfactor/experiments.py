"""Seeded Monte Carlo experiments: threshold scans, tiling coverage and the
isolated-vertex counterexample, with CSV and SVG output.

Every random draw is keyed by ``(seed, stream)`` where the stream is the cell's
``n``.  Cells can therefore be added to a spec without changing the samples of
existing cells, and results do not depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from statistics import NormalDist

from .constructions import (
    build_split_host,
    isolated_vertex_expectation,
    matching_cover_bound,
    sublinear_counterexample,
)
from .exact import PowerProduct, as_fraction
from .exceptions import GuardError
from .factor import (
    EXACT_TILING_MAX_N,
    FACTOR,
    NO_FACTOR,
    UNKNOWN,
    copy_count_statistic,
    expected_copy_count,
    has_factor,
    max_tiling,
)
from .hypergraph import Hypergraph, complete, empty, read_khg
from .pattern import Pattern, d_star
from .random_models import MAX_KSETS, SeededSampler, sample_binomial, sample_coupled

__all__ = [
    "ExperimentSpec",
    "TrialRecord",
    "CellSummary",
    "ScanResult",
    "wilson_interval",
    "probability_for",
    "scan_threshold",
    "bisect_threshold",
    "coupled_monotone",
    "prop2_experiment",
    "counterexample_experiment",
    "emit_outputs",
    "write_csv",
    "render_svg",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("n", "c", "p", "seed", "outcome", "coverage", "X", "wall_ms")
WORKERS_ENV = "HYPERFACTOR_WORKERS"
MAX_SCAN_N = 40


@dataclass
class ExperimentSpec:
    """A JSON-serialisable experiment description.

    ``host`` is ``"none"``, ``"complete"``, ``"split-host"`` (with ``eta``) or
    ``"file"`` (with ``host_path``).  ``pattern`` is either a path to a khg
    file or an inline ``{"b": ..., "edges": [...]}`` object.  ``coverage``
    selects exact or heuristic (greedy plus swaps) largest tilings for
    failed threshold trials; the heuristic value is a lower bound.
    """

    k: int
    pattern: dict | str
    n_list: list[int]
    c_list: list | None = None
    p_list: list[float] | None = None
    host: str = "none"
    eta: str | None = None
    host_path: str | None = None
    seeds_per_cell: int = 10
    seed_base: int = 0
    node_budget: int | None = 200000
    output: str | None = None
    svg: str | None = None
    theta: str | None = None
    omega: float | None = None
    kind: str = "threshold"
    timing: bool = False
    bisect: dict | None = None
    coverage: str = "heuristic"

    def __post_init__(self):
        if self.coverage not in ("exact", "heuristic"):
            raise ValueError(f"coverage must be 'exact' or 'heuristic', got {self.coverage!r}")
        if self.seeds_per_cell < 1:
            raise ValueError("seeds_per_cell must be at least 1")
        if self.kind not in ("threshold", "prop2", "counterexample"):
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.kind == "threshold" and not (self.c_list or self.p_list or self.bisect):
            raise ValueError("a threshold scan needs c_list, p_list or bisect")
        for n in self.n_list:
            if n > MAX_SCAN_N or math.comb(n, self.k) > MAX_KSETS:
                raise GuardError(f"n={n} is beyond the desk-scale limit")

    @classmethod
    def from_json(cls, text: str) -> ExperimentSpec:
        data = json.loads(text)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown spec fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> ExperimentSpec:
        return cls.from_json(Path(path).read_text())

    @property
    def seeds(self) -> range:
        return range(self.seed_base, self.seed_base + self.seeds_per_cell)

    def load_pattern(self) -> Pattern:
        if isinstance(self.pattern, str):
            return Pattern(read_khg(self.pattern))
        return Pattern.from_edges(self.k, self.pattern["b"], [tuple(e) for e in self.pattern["edges"]])

    def build_host(self, n: int) -> Hypergraph:
        if self.host == "none":
            return empty(n, self.k)
        if self.host == "complete":
            return complete(n, self.k)
        if self.host == "split-host":
            return build_split_host(n, self.k, as_fraction(self.eta)).graph
        if self.host == "file":
            H = read_khg(self.host_path)
            if H.n != n or H.k != self.k:
                raise ValueError(f"host file has (k, n) = ({H.k}, {H.n}), expected ({self.k}, {n})")
            return H
        raise ValueError(f"unknown host descriptor {self.host!r}")


@dataclass(frozen=True)
class TrialRecord:
    n: int
    c: float
    p: float
    seed: int
    outcome: str
    coverage: float
    X: int
    wall_ms: float = 0.0

    def row(self) -> list[str]:
        return [str(self.n), repr(float(self.c)), repr(float(self.p)), str(self.seed),
                self.outcome, repr(float(self.coverage)), str(self.X), f"{self.wall_ms:.3f}"]


@dataclass
class CellSummary:
    n: int
    c: float
    p: float
    p_exact: str
    successes: int
    failures: int
    unknown: int
    rate: float
    low: float
    high: float


@dataclass
class ScanResult:
    records: list[TrialRecord]
    cells: list[CellSummary]
    notes: dict = field(default_factory=dict)


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval; ``(0, 1)`` when there are no trials."""
    if trials == 0:
        return 0.0, 1.0
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def probability_for(F: Pattern, n: int, c) -> tuple[float, str]:
    """``c n^(-1/d*)`` rounded once to a float, clamped to 1, plus its exact form."""
    c = as_fraction(c)
    if c == 0:
        return 0.0, "0"
    exact = PowerProduct.of(c) * PowerProduct.of(n, -1 / d_star(F).value)
    return min(1.0, float(exact)), str(exact)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _run_jobs(fn, jobs: list) -> list:
    """Map ``fn`` over jobs, preserving job order regardless of parallelism."""
    workers = _workers()
    if workers == 1 or len(jobs) < 2:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=1))


# --- threshold scans ----------------------------------------------------------------


def _scan_job(job):
    spec, F, n, seed, cs, ps = job
    host = spec.build_host(n)
    ds = d_star(F)
    order = sorted(range(len(ps)), key=lambda i: ps[i])
    samples = sample_coupled(n, spec.k, [ps[i] for i in order], SeededSampler(seed, n))
    by_index = dict(zip(order, samples))
    out = []
    for i, (c, p) in enumerate(zip(cs, ps)):
        start = time.perf_counter()
        random_part = by_index[i]
        union = host.union(random_part)
        result = has_factor(F, union, budget=spec.node_budget)
        if result.outcome == FACTOR:
            coverage = 1.0
        else:
            exact = (spec.coverage == "exact" and n <= EXACT_TILING_MAX_N
                     and result.outcome == NO_FACTOR)
            mode = "exact" if exact else "heuristic"
            coverage = max_tiling(F, union, mode=mode).coverage / n
        X = copy_count_statistic(ds.J, random_part)
        wall = (time.perf_counter() - start) * 1000 if spec.timing else 0.0
        out.append(TrialRecord(n, c, p, seed, result.outcome, coverage, X, wall))
    return out


def _summarise(mine: list[TrialRecord], n: int, c, p: float, p_exact: str) -> CellSummary:
    succ = sum(r.outcome == FACTOR for r in mine)
    fail = sum(r.outcome == NO_FACTOR for r in mine)
    unk = sum(r.outcome == UNKNOWN for r in mine)
    decided = succ + fail
    low, high = wilson_interval(succ, decided)
    rate = succ / decided if decided else math.nan
    return CellSummary(n, c, p, p_exact, succ, fail, unk, rate, low, high)


def scan_threshold(spec: ExperimentSpec) -> ScanResult:
    """Success rates of ``host | H^(k)(n, p)`` over a grid of (n, c).

    For each n and seed one coupled sample covers the whole c-grid, so each
    seed's outcome is monotone in c.  Unknown outcomes (budget exhausted) are
    excluded from rates and counted separately.
    """
    F = spec.load_pattern()
    jobs, grid = [], {}
    for n in spec.n_list:
        if spec.c_list is not None:
            cs = [float(as_fraction(c)) for c in spec.c_list]
            pe = [probability_for(F, n, c) for c in spec.c_list]
        else:
            cs = [math.nan] * len(spec.p_list)
            pe = [(float(p), repr(float(p))) for p in spec.p_list]
        ps = [p for p, _ in pe]
        grid[n] = list(zip(cs, ps, [e for _, e in pe]))
        jobs.extend((spec, F, n, seed, cs, ps) for seed in spec.seeds)
    per_job = _run_jobs(_scan_job, jobs)
    # order by (cell, seed)
    flat = [r for chunk in per_job for r in chunk]
    records = []
    cells = []
    for n in spec.n_list:
        for idx, (c, p, p_exact) in enumerate(grid[n]):
            cell = [r for r in flat if r.n == n and r.p == p and (r.c == c or math.isnan(c))]
            cell.sort(key=lambda r: r.seed)
            records.extend(cell)
            cells.append(_summarise(cell, n, c, p, p_exact))
    return ScanResult(records, cells, {"pattern_d_star": str(d_star(F).value)})


def bisect_threshold(spec: ExperimentSpec, n: int, c_low: float, c_high: float,
                     iterations: int = 8) -> tuple[float, list[tuple[float, float]]]:
    """Geometric bisection for the c where the success rate crosses 1/2.

    Returns the estimate and the ``(c, rate)`` evaluations made.
    """
    F = spec.load_pattern()
    history = []

    def rate(c):
        p, _ = probability_for(F, n, c)
        rows = [r for seed in spec.seeds for r in _scan_job((spec, F, n, seed, [c], [p]))]
        decided = [r for r in rows if r.outcome != UNKNOWN]
        value = sum(r.outcome == FACTOR for r in decided) / len(decided) if decided else math.nan
        history.append((c, value))
        return value

    lo, hi = c_low, c_high
    for _ in range(iterations):
        mid = math.sqrt(lo * hi)
        if rate(mid) >= 0.5:
            hi = mid
        else:
            lo = mid
    return math.sqrt(lo * hi), history


def coupled_monotone(records: list[TrialRecord]) -> dict[tuple[int, int], bool]:
    """Per (n, seed): does the decided outcome switch from failure to success at most once along ascending p?"""
    groups: dict[tuple[int, int], list[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.n, r.seed), []).append(r)
    out = {}
    for key, rows in groups.items():
        seq = [r.outcome == FACTOR for r in sorted(rows, key=lambda r: r.p) if r.outcome != UNKNOWN]
        out[key] = all(not a or b for a, b in zip(seq, seq[1:]))
    return out


# --- tiling coverage in the pure random model ---------------------------------------


def _prop2_job(job):
    spec, F, n, seed, c, p, theta = job
    start = time.perf_counter()
    ds = d_star(F)
    G = sample_binomial(n, spec.k, p, SeededSampler(seed, n))
    exact = n <= EXACT_TILING_MAX_N
    coverage = max_tiling(F, G, mode="exact" if exact else "heuristic").coverage / n
    if coverage == 1.0:
        outcome = FACTOR
    else:
        outcome = NO_FACTOR if exact else UNKNOWN
    X = copy_count_statistic(ds.J, G)
    wall = (time.perf_counter() - start) * 1000 if spec.timing else 0.0
    return TrialRecord(n, c, p, seed, outcome, coverage, X, wall)


def prop2_experiment(spec: ExperimentSpec) -> ScanResult:
    """Largest F-tiling coverage in ``H^(k)(n, p)`` at ``p = c n^(-1/d*)``.

    ``c`` defaults to ``(theta / 2b)^(1/j)`` where J (j edges) is the densest
    subgraph of F.  Per n the notes report the fraction of seeds whose
    coverage reaches theta and the fraction whose J-copy count X reaches
    twice its mean.
    """
    F = spec.load_pattern()
    theta = as_fraction(spec.theta or "1/2")
    ds = d_star(F)
    if spec.c_list:
        c_values = [as_fraction(c) for c in spec.c_list]
    else:
        c_values = [None]
    jobs = []
    cells_meta = []
    for n in spec.n_list:
        for c in c_values:
            if c is None:
                cexact = PowerProduct.of(theta / (2 * F.b), Fraction(1, ds.edges))
                pexact = cexact * PowerProduct.of(n, -1 / ds.value)
                cf, p, p_str = float(cexact), min(1.0, float(pexact)), str(pexact)
            else:
                cf = float(c)
                p, p_str = probability_for(F, n, c)
            cells_meta.append((n, cf, p, p_str))
            jobs.extend((spec, F, n, seed, cf, p, theta) for seed in spec.seeds)
    records = _run_jobs(_prop2_job, jobs)
    cells, notes = [], {}
    for n, cf, p, p_str in cells_meta:
        cell = [r for r in records if r.n == n and r.c == cf]
        cells.append(_summarise(cell, n, cf, p, p_str))
        mu = expected_copy_count(ds.J, n, p)
        notes[f"n={n},c={cf!r}"] = {
            "mu": mu,
            "covered_theta": sum(r.coverage >= theta for r in cell) / len(cell),
            "X_at_least_2mu": sum(r.X >= 2 * mu for r in cell) / len(cell),
        }
    return ScanResult(records, cells, notes)


# --- isolated-vertex counterexample -------------------------------------------------


@dataclass(frozen=True)
class CounterexampleRow:
    n: int
    seed: int
    p: float
    isolated: int
    a_size: int
    forced: bool


def _counter_job(job):
    n, k, omega, seed = job
    setup = sublinear_counterexample(n, k, omega)
    G = sample_binomial(n, k, setup.p, SeededSampler(seed, n))
    isolated = len(G.isolated_vertices())
    a = len(setup.host.A)
    return CounterexampleRow(n, seed, setup.p, isolated, a, isolated > k * a)


def counterexample_experiment(n_list, k: int, omega: float, seeds) -> tuple[list[CounterexampleRow], dict]:
    """Isolated vertices of the random part next to a sublinear split host.

    More than ``k|A|`` vertices isolated in the random part cannot all be
    covered by host edges (each meets A), which rules out a perfect matching.
    The summary compares the empirical mean with ``n (1-p)^C(n-1,k-1)``.
    """
    seeds = list(seeds)
    jobs = [(n, k, omega, s) for n in n_list for s in seeds]
    rows = _run_jobs(_counter_job, jobs)
    summary = {}
    for n in n_list:
        mine = [r for r in rows if r.n == n]
        counts = [r.isolated for r in mine]
        mean = sum(counts) / len(counts)
        var = sum((x - mean) ** 2 for x in counts) / (len(counts) - 1) if len(counts) > 1 else math.nan
        se = math.sqrt(var / len(counts)) if len(counts) > 1 else math.nan
        setup = sublinear_counterexample(n, k, omega)
        expect = isolated_vertex_expectation(n, k, setup.p)
        summary[n] = {
            "p": setup.p,
            "A": len(setup.host.A),
            "matching_cover_bound": matching_cover_bound(setup.host),
            "mean": mean,
            "se": se,
            "expected": expect,
            "z": (mean - expect) / se if se and se > 0 else math.nan,
            "forced_rate": sum(r.forced for r in mine) / len(mine),
        }
    return rows, summary


# --- output -------------------------------------------------------------------------


def write_csv(records: list[TrialRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(r.row())
    return buf.getvalue()


def render_svg(cells: list[CellSummary], width: int = 640, height: int = 400) -> str:
    """Line chart of success rate against log c, one polyline per n."""
    pad = 50
    usable = [c for c in cells if c.c > 0 and not math.isnan(c.rate)]
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
             f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
             f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
             f'<text x="{width / 2:.1f}" y="{height - 10}" text-anchor="middle" font-size="12">c (log scale)</text>',
             f'<text x="12" y="{height / 2:.1f}" font-size="12" transform="rotate(-90 12 {height / 2:.1f})" '
             f'text-anchor="middle">success rate</text>']
    if usable:
        logs = [math.log10(c.c) for c in usable]
        lo, hi = min(logs), max(logs)
        span = hi - lo or 1.0
        palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]

        def xy(cell):
            x = pad + (math.log10(cell.c) - lo) / span * (width - 2 * pad)
            y = height - pad - cell.rate * (height - 2 * pad)
            return f"{x:.2f},{y:.2f}"

        for i, n in enumerate(sorted({c.n for c in usable})):
            pts = sorted((c for c in usable if c.n == n), key=lambda c: c.c)
            colour = palette[i % len(palette)]
            lines.append(f'<polyline fill="none" stroke="{colour}" stroke-width="2" '
                         f'points="{" ".join(xy(c) for c in pts)}"/>')
            lines.append(f'<text x="{width - pad + 5}" y="{pad + 15 * i}" font-size="11" '
                         f'fill="{colour}">n={n}</text>')
        for frac in (0.0, 0.5, 1.0):
            y = height - pad - frac * (height - 2 * pad)
            lines.append(f'<text x="{pad - 5}" y="{y:.2f}" font-size="10" text-anchor="end">{frac:.1f}</text>')
        for c in sorted({c.c for c in usable}):
            x = pad + (math.log10(c) - lo) / span * (width - 2 * pad)
            lines.append(f'<text x="{x:.2f}" y="{height - pad + 15}" font-size="10" '
                         f'text-anchor="middle">{c:g}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def emit_outputs(records: list[TrialRecord], csv_path: str | Path,
                 svg_path: str | Path | None = None,
                 cells: list[CellSummary] | None = None) -> None:
    """Write the CSV (and optionally the SVG chart); output depends only on the records."""
    Path(csv_path).write_text(write_csv(records))
    if svg_path is not None:
        if cells is None:
            cells = []
            for n, c, p in sorted({(r.n, r.c, r.p) for r in records}):
                mine = [r for r in records if (r.n, r.c, r.p) == (n, c, p)]
                cells.append(_summarise(mine, n, c, p, repr(p)))
        Path(svg_path).write_text(render_svg(cells))


def summary_json(result: ScanResult) -> str:
    return json.dumps({"cells": [asdict(c) for c in result.cells], "notes": result.notes},
                      indent=2, sort_keys=True, default=str)
