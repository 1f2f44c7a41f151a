import json
import math

import pytest

from hyperfactor.experiments import (
    CSV_COLUMNS,
    ExperimentSpec,
    TrialRecord,
    bisect_threshold,
    counterexample_experiment,
    coupled_monotone,
    emit_outputs,
    prop2_experiment,
    probability_for,
    render_svg,
    scan_threshold,
    wilson_interval,
    write_csv,
)
from hyperfactor.exceptions import GuardError
from hyperfactor.factor import FACTOR, NO_FACTOR, UNKNOWN
from hyperfactor.pattern import Pattern

EDGE = {"b": 3, "edges": [[0, 1, 2]]}


def spec(**kw):
    base = dict(k=3, pattern=EDGE, n_list=[9], c_list=["1/10", "1", "10"],
                host="split-host", eta="1/9", seeds_per_cell=6)
    base.update(kw)
    return ExperimentSpec(**base)


def test_wilson_against_statsmodels():
    proportion = pytest.importorskip("statsmodels.stats.proportion")
    for s, n in [(0, 5), (3, 10), (10, 10), (47, 200), (1, 1)]:
        lo, hi = wilson_interval(s, n)
        ref = proportion.proportion_confint(s, n, alpha=0.05, method="wilson")
        assert lo == pytest.approx(ref[0], abs=1e-9) and hi == pytest.approx(ref[1], abs=1e-9)
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_probability_rounding_recorded():
    p, exact = probability_for(Pattern.single_edge(3), 15, 10)
    assert p == pytest.approx(10 / 225, rel=1e-15)
    assert "15" in exact
    assert probability_for(Pattern.single_edge(3), 5, 1000)[0] == 1.0


def test_spec_validation():
    with pytest.raises(ValueError):
        spec(seeds_per_cell=0)
    with pytest.raises(GuardError):
        spec(n_list=[300])
    with pytest.raises(ValueError):
        ExperimentSpec.from_json(json.dumps({"k": 3, "pattern": EDGE, "n_list": [6], "bogus": 1}))


def test_large_c_always_succeeds():
    result = scan_threshold(spec(c_list=["1000"], host="none"))
    assert all(c.rate == 1.0 for c in result.cells)


def test_zero_c_with_blocked_host_always_fails():
    result = scan_threshold(spec(c_list=["0"]))
    assert all(c.rate == 0.0 and c.failures == 6 for c in result.cells)


def test_coupled_monotone_and_ordering():
    result = scan_threshold(spec(n_list=[9, 12], c_list=["1/10", "3", "10", "30"], seeds_per_cell=8, host="none"))
    assert all(coupled_monotone(result.records).values())
    keys = [(r.n, r.c, r.seed) for r in result.records]
    order = {c: i for i, c in enumerate([0.1, 3.0, 10.0, 30.0])}
    assert keys == sorted(keys, key=lambda t: (t[0], order[t[1]], t[2]))
    for c in result.cells:
        assert 0 <= c.low <= c.rate <= c.high <= 1


def test_unknown_excluded_from_rates():
    result = scan_threshold(spec(c_list=["10"], host="none", node_budget=1, n_list=[12]))
    for cell in result.cells:
        assert cell.successes + cell.failures + cell.unknown == 6
        if cell.successes + cell.failures == 0:
            assert math.isnan(cell.rate)
    assert sum(c.unknown for c in result.cells) == sum(r.outcome == UNKNOWN for r in result.records)


def test_adding_cells_keeps_existing_samples():
    a = scan_threshold(spec(n_list=[9]))
    b = scan_threshold(spec(n_list=[9, 18]))
    assert [r for r in b.records if r.n == 9] == a.records


def test_csv_and_svg(tmp_path):
    assert write_csv([]) == ",".join(CSV_COLUMNS) + "\n"
    recs = [TrialRecord(9, 1.0, 0.01, 0, FACTOR, 1.0, 12), TrialRecord(9, 1.0, 0.01, 1, NO_FACTOR, 0.67, 3)]
    assert len(write_csv(recs).splitlines()) == 3
    result = scan_threshold(spec())
    emit_outputs(result.records, tmp_path / "a.csv", tmp_path / "a.svg", result.cells)
    emit_outputs(scan_threshold(spec()).records, tmp_path / "b.csv", tmp_path / "b.svg")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.svg").read_text().startswith("<svg")
    assert render_svg(result.cells) == render_svg(result.cells)


def test_parallel_matches_serial(monkeypatch):
    serial = write_csv(scan_threshold(spec(n_list=[9, 12], host="none")).records)
    monkeypatch.setenv("HYPERFACTOR_WORKERS", "2")
    parallel = write_csv(scan_threshold(spec(n_list=[9, 12], host="none")).records)
    assert serial == parallel


def test_prop2_extremes():
    zero = prop2_experiment(spec(kind="prop2", host="none", c_list=["0"], theta="1/2"))
    assert all(r.coverage == 0 for r in zero.records)
    full = prop2_experiment(spec(kind="prop2", host="none", c_list=["10000"], theta="1/2"))
    assert all(r.coverage == 1.0 for r in full.records)


def test_prop2_default_c():
    result = prop2_experiment(spec(kind="prop2", host="none", c_list=None, theta="1/2",
                                   n_list=[9, 12], seeds_per_cell=10))
    for note in result.notes.values():
        assert 0 <= note["covered_theta"] <= 1
        assert note["mu"] > 0


def test_counterexample_near_one_isolates_everything():
    rows, summary = counterexample_experiment([12], 3, 1.0001, range(20))
    assert summary[12]["mean"] >= 11.9


def test_counterexample_summary():
    rows, summary = counterexample_experiment([12, 18], 3, 8, range(300))
    for n, s in summary.items():
        assert abs(s["mean"] - s["expected"]) < 3.5 * s["se"]
        assert s["A"] >= 1


def test_bisection_brackets():
    s = spec(host="none", n_list=[9], c_list=None, bisect={"low": 0.1, "high": 100})
    c_hat, history = bisect_threshold(s, 9, 0.1, 100, iterations=4)
    assert 0.1 <= c_hat <= 100 and len(history) == 4
