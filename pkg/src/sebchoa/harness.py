"""Replication harness: seeded multi-run experiments, rank-sum tests, reports, CSV export."""

from __future__ import annotations

import csv
import dataclasses
import functools
import itertools
import logging
import math
import os
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .algorithms import check_variant, run_variant
from .choa import ChoaConfig
from .records import RunRecord
from .rng_chaos import derive_seed

log = logging.getLogger(__name__)

SIGNIFICANCE = 0.05
EXACT_MAX_TOTAL = 12
TRACE_HEADER = ("algorithm", "problem", "seed", "iteration", "best_fitness")
REPORT_HEADER = (
    "algorithm", "problem", "runs", "mean", "std", "median", "best", "worst",
    "p_value", "significant", "marker", "rank", "feasible_runs", "best_feasible_objective",
    "single_run_std",
)
_TINY = float(np.nextafter(0.0, 1.0))


@dataclass(frozen=True)
class AlgorithmSpec:
    """A variant name plus ChoaConfig overrides; `label` names it in reports."""

    variant: str
    overrides: dict = field(default_factory=dict)
    label: Optional[str] = None

    def __post_init__(self):
        check_variant(self.variant)

    @property
    def name(self) -> str:
        return self.label or self.variant


def _as_spec(alg: Union[str, AlgorithmSpec]) -> AlgorithmSpec:
    return alg if isinstance(alg, AlgorithmSpec) else AlgorithmSpec(alg)


def cell_seed(master_seed: int, algorithm: str, problem: str, run_index: int) -> int:
    return derive_seed(master_seed, algorithm, problem, run_index)


def _run_cell(spec: AlgorithmSpec, problem, base: ChoaConfig, seed: int, run_index: int) -> RunRecord:
    try:
        config = dataclasses.replace(base, seed=seed, **spec.overrides)
        record = run_variant(spec.variant, problem, config)
        record.algorithm = spec.name
    except Exception as exc:  # one bad cell must not sink the grid
        log.debug("cell failed:\n%s", traceback.format_exc())
        record = RunRecord(spec.name, problem.name, seed, error=f"{type(exc).__name__}: {exc}")
    record.run_index = run_index
    return record


def run_experiment(
    algorithms: Sequence[Union[str, AlgorithmSpec]],
    problems: Sequence,
    n_runs: int,
    master_seed: int,
    config: Optional[ChoaConfig] = None,
    workers: int = 1,
) -> list[RunRecord]:
    """Run every (algorithm, problem, run index) cell.

    Each cell's seed is derived from its own coordinates, so results do not
    depend on execution order, worker count, or which other cells exist.
    Failed cells come back as records with `error` set. Records are returned
    in grid order: algorithm, then problem, then run index.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be at least 1")
    specs = [_as_spec(a) for a in algorithms]
    labels = [s.name for s in specs]
    if len(set(labels)) != len(labels):
        raise ValueError("algorithm labels must be unique")
    base = config or ChoaConfig()
    jobs = [
        (spec, problem, base, cell_seed(master_seed, spec.name, problem.name, i), i)
        for spec in specs
        for problem in problems
        for i in range(n_runs)
    ]
    if workers <= 1:
        return [_run_cell(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_cell, *zip(*jobs), chunksize=max(1, len(jobs) // (4 * workers))))


# ---------------------------------------------------------------------------
# Rank-sum test


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks; tied values share the mean of the ranks they span."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


@functools.lru_cache(maxsize=None)
def _exact_u_counts(n_a: int, n_b: int) -> tuple[int, ...]:
    """Null frequency of U for every U in 0..n_a*n_b, by enumerating rank subsets."""
    counts = [0] * (n_a * n_b + 1)
    offset = n_a * (n_a + 1) // 2
    for subset in itertools.combinations(range(1, n_a + n_b + 1), n_a):
        counts[sum(subset) - offset] += 1
    return tuple(counts)


@dataclass(frozen=True)
class RankSumResult:
    statistic: float
    p_value: float
    significant: bool
    method: str


def wilcoxon_rank_sum(sample_a: Sequence[float], sample_b: Sequence[float]) -> RankSumResult:
    """Two-sided Wilcoxon rank-sum (Mann-Whitney) test.

    `statistic` is U for `sample_a`: the number of pairs with a > b, ties
    counting one half. The null distribution is enumerated exactly when the
    samples are tie-free and hold at most 12 values in total; otherwise the
    normal approximation with tie and continuity corrections is used.
    """
    a = np.asarray(sample_a, dtype=float).ravel()
    b = np.asarray(sample_b, dtype=float).ravel()
    if len(a) == 0 or len(b) == 0:
        raise ValueError("both samples must be nonempty")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("samples must be finite")
    n_a, n_b = len(a), len(b)
    n = n_a + n_b
    ranks = average_ranks(np.concatenate([a, b]))
    u = float(ranks[:n_a].sum() - n_a * (n_a + 1) / 2.0)
    tie_free = len(np.unique(ranks)) == n

    if tie_free and n <= EXACT_MAX_TOTAL:
        counts = _exact_u_counts(n_a, n_b)
        total = math.comb(n, n_a)
        k = int(round(u))
        lower = sum(counts[: k + 1]) / total
        upper = sum(counts[k:]) / total
        p = min(1.0, 2.0 * min(lower, upper))
        method = "exact"
    else:
        _, tie_counts = np.unique(ranks, return_counts=True)
        tie_term = float(np.sum(tie_counts**3 - tie_counts)) / (n * (n - 1)) if n > 1 else 0.0
        var = n_a * n_b / 12.0 * ((n + 1) - tie_term)
        if var <= 0:
            p = 1.0
        else:
            z = max(0.0, abs(u - n_a * n_b / 2.0) - 0.5) / math.sqrt(var)
            p = min(1.0, math.erfc(z / math.sqrt(2.0)))
        method = "normal"
    p = max(p, _TINY)
    return RankSumResult(u, p, p < SIGNIFICANCE, method)


# ---------------------------------------------------------------------------
# Aggregation


@dataclass
class CellStats:
    algorithm: str
    problem: str
    runs: int
    mean: float
    std: float
    median: float
    best: float
    worst: float
    p_value: Optional[float] = None
    significant: Optional[bool] = None
    marker: str = ""
    rank: Optional[float] = None
    feasible_runs: Optional[int] = None
    best_feasible_objective: Optional[float] = None

    @property
    def single_run_std(self) -> bool:
        """Set when std is reported as 0 only because the cell has one run."""
        return self.runs == 1


@dataclass
class ComparisonReport:
    algorithms: list
    problems: list
    reference: Optional[str]
    cells: dict  # (algorithm, problem) -> CellStats
    average_rank: dict
    missing: list
    failures: list

    def cell(self, algorithm: str, problem: str) -> CellStats:
        return self.cells[(algorithm, problem)]


def _ordered_unique(items: Iterable[str]) -> list:
    return list(dict.fromkeys(items))


def aggregate(records: Sequence[RunRecord], reference: Optional[str] = None) -> ComparisonReport:
    """Summarize final best fitness per (algorithm, problem) cell.

    Cells are compared with `reference` (default: the first algorithm) by the
    rank-sum test and ranked by mean within each problem. A cell with no
    successful run is listed in `missing` and left out of the ranking.
    """
    algorithms = _ordered_unique(r.algorithm for r in records)
    problems = _ordered_unique(r.problem for r in records)
    if reference is None and algorithms:
        reference = algorithms[0]
    if reference is not None and reference not in algorithms:
        raise ValueError(f"reference algorithm {reference!r} has no records")

    finals: dict = {}
    by_cell: dict = {}
    for r in records:
        if r.ok:
            finals.setdefault((r.algorithm, r.problem), []).append(r.best_fitness)
            by_cell.setdefault((r.algorithm, r.problem), []).append(r)
    failures = [r for r in records if not r.ok]

    cells, missing = {}, []
    for alg in algorithms:
        for prob in problems:
            vals = finals.get((alg, prob))
            if not vals:
                missing.append((alg, prob))
                continue
            v = np.asarray(vals)
            stats = CellStats(
                alg, prob, len(v),
                mean=float(np.mean(v)),
                std=float(np.std(v, ddof=1)) if len(v) > 1 else 0.0,
                median=float(np.median(v)),
                best=float(np.min(v)),
                worst=float(np.max(v)),
            )
            recs = by_cell[(alg, prob)]
            if any(r.violation is not None for r in recs):
                feasible = [r.final_objective for r in recs if r.feasible]
                stats.feasible_runs = len(feasible)
                stats.best_feasible_objective = min(feasible) if feasible else None
            cells[(alg, prob)] = stats

    for prob in problems:
        ref = finals.get((reference, prob))
        for alg in algorithms:
            cell = cells.get((alg, prob))
            if cell is None or alg == reference or not ref:
                continue
            test = wilcoxon_rank_sum(finals[(alg, prob)], ref)
            cell.p_value, cell.significant = test.p_value, test.significant
            if not test.significant:
                cell.marker = "≈"
            else:
                # U below its null mean: this algorithm tends to the lower (better) values.
                cell.marker = "+" if test.statistic < len(finals[(alg, prob)]) * len(ref) / 2 else "-"

        present = [a for a in algorithms if (a, prob) in cells]
        if present:
            ranks = average_ranks([cells[(a, prob)].mean for a in present])
            for a, rk in zip(present, ranks):
                cells[(a, prob)].rank = float(rk)

    average_rank = {}
    for alg in algorithms:
        rks = [cells[(alg, p)].rank for p in problems if (alg, p) in cells]
        average_rank[alg] = float(np.mean(rks)) if rks else float("nan")
    return ComparisonReport(algorithms, problems, reference, cells, average_rank, missing, failures)


# ---------------------------------------------------------------------------
# CSV


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _open_for_write(path):
    try:
        parent = os.path.dirname(os.fspath(path))
        if parent:
            os.makedirs(parent, exist_ok=True)
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {os.fspath(path)!r}: {exc.strerror or exc}") from exc


def export_traces_csv(records: Sequence[RunRecord], path) -> None:
    """One row per trace entry, sorted by algorithm, problem, seed, iteration."""
    rows = sorted((r for r in records if r.ok), key=lambda r: (r.algorithm, r.problem, r.seed))
    with _open_for_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for r in rows:
            for it, value in enumerate(r.trace):
                w.writerow((r.algorithm, r.problem, r.seed, it, _fmt(float(value))))


def export_report_csv(report: ComparisonReport, path) -> None:
    """One row per (algorithm, problem) cell, sorted by algorithm then problem."""
    with _open_for_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for key in sorted(report.cells):
            c = report.cells[key]
            w.writerow(
                _fmt(v)
                for v in (
                    c.algorithm, c.problem, c.runs, c.mean, c.std, c.median, c.best, c.worst,
                    c.p_value, c.significant, c.marker, c.rank, c.feasible_runs,
                    c.best_feasible_objective, c.single_run_std,
                )
            )


def export_csv(data: Union[ComparisonReport, Sequence[RunRecord]], path) -> None:
    """Write a report or a list of run records to `path`."""
    if isinstance(data, ComparisonReport):
        export_report_csv(data, path)
    else:
        export_traces_csv(data, path)


def read_report_csv(path) -> list[dict]:
    """Parse a report CSV back into typed dicts (empty fields become None)."""
    ints = {"runs", "feasible_runs"}
    floats = {"mean", "std", "median", "best", "worst", "p_value", "rank", "best_feasible_objective"}
    bools = {"significant", "single_run_std"}
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            parsed = {}
            for k, v in row.items():
                if v == "":
                    parsed[k] = None
                elif k in ints:
                    parsed[k] = int(v)
                elif k in floats:
                    parsed[k] = float(v)
                elif k in bools:
                    parsed[k] = v == "true"
                else:
                    parsed[k] = v
            out.append(parsed)
    return out
