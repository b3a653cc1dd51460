"""Experiment harness: run solvers over a corpus directory and tabulate."""

from __future__ import annotations

import csv
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, Optional, Sequence

from phyorient.constrained import BudgetExceededError
from phyorient.cyclebasis import baseline_space_size, search_space_size
from phyorient.fileio import read_network
from phyorient.netmodel import UndirectedNetwork, reticulation_number
from phyorient.solvers import (
    CLASSES,
    DEFAULT_BASELINE_BUDGET,
    TREE_CHILD,
    ClassPredicate,
    Outcome,
    SolverTimeout,
    baseline_c_orientation,
    basis_or_empty,
    check_orientation,
    exact_c_orientation,
    tree_child_heuristic,
)

ALGOS = ("exact", "heuristic", "baseline")
_VERDICT_NAME = {"ORIENTED": "Oriented", "NO": "No", "PROBABLY_NO": "ProbablyNo"}


class VerificationError(AssertionError):
    pass


@dataclass(frozen=True)
class ExperimentRecord:
    instance: str
    n_leaves: int
    r: int
    solver: str
    verdict: str
    elapsed: float
    placements_tried: int
    constrained_calls: int
    search_space_exact: int
    search_space_baseline: int


def run_solver(
    n: UndirectedNetwork,
    algo: str,
    cls: ClassPredicate = TREE_CHILD,
    timeout: Optional[float] = None,
    budget: int = DEFAULT_BASELINE_BUDGET,
    parallel: int = 1,
) -> Outcome:
    if algo == "exact":
        return exact_c_orientation(n, cls, timeout=timeout, parallel=parallel)
    if algo == "heuristic":
        if cls is not TREE_CHILD:
            raise ValueError("the heuristic only targets tree-child networks")
        return tree_child_heuristic(n, timeout=timeout, parallel=parallel)
    if algo == "baseline":
        return baseline_c_orientation(n, cls, timeout=timeout, budget=budget, parallel=parallel)
    raise ValueError(f"unknown algorithm {algo!r}")


def run_cell(
    instance: str,
    n: UndirectedNetwork,
    algo: str,
    cls_name: str = "tree-child",
    timeout: Optional[float] = None,
    budget: int = DEFAULT_BASELINE_BUDGET,
) -> ExperimentRecord:
    cls = CLASSES[cls_name]
    r = reticulation_number(n)
    exact_space = search_space_size(basis_or_empty(n))
    base_space = baseline_space_size(n)
    try:
        out = run_solver(n, algo, cls, timeout, budget)
    except SolverTimeout:
        verdict, elapsed, tried, calls = "Timeout", float(timeout or 0.0), 0, 0
    except BudgetExceededError:
        verdict, elapsed, tried, calls = "BudgetExceeded", 0.0, 0, 0
    else:
        if out.oriented:
            problems = check_orientation(n, out.network, out.placement, cls)
            if problems:
                raise VerificationError(f"{instance}/{algo}: " + "; ".join(problems))
        verdict = _VERDICT_NAME[out.verdict.value]
        elapsed, tried, calls = out.elapsed, out.placements_tried, out.constrained_calls
    return ExperimentRecord(
        instance, n.n_leaves, r, algo, verdict, round(elapsed, 6), tried, calls,
        exact_space, base_space,
    )


def _cell_from_file(args):
    path, algo, cls_name, timeout, budget = args
    return run_cell(Path(path).stem, read_network(path), algo, cls_name, timeout, budget)


def run_bench(
    corpus: Path,
    algos: Sequence[str] = ALGOS,
    cls_name: str = "tree-child",
    timeout: Optional[float] = 60.0,
    budget: int = DEFAULT_BASELINE_BUDGET,
    parallel: int = 1,
) -> list[ExperimentRecord]:
    files = sorted(Path(corpus).glob("*.txt"))
    jobs = [(str(f), a, cls_name, timeout, budget) for f in files for a in algos]
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            records = list(pool.map(_cell_from_file, jobs))
    else:
        records = [_cell_from_file(j) for j in jobs]
    return sorted(records, key=lambda rec: (rec.instance, rec.solver))


def _is_yes(verdict: str) -> Optional[bool]:
    if verdict == "Oriented":
        return True
    if verdict in ("No", "ProbablyNo"):
        return False
    return None


def summarize(records: Iterable[ExperimentRecord]) -> list[dict]:
    """Per (r, solver, reference answer) rows in the layout of an accuracy table.

    The reference is the exact solver's verdict, or the baseline's when the
    exact solver was not run. Instances without a reference are reported
    under ``truth='unknown'``.
    """
    records = list(records)
    ref: dict[str, Optional[bool]] = {}
    for name in ("baseline", "exact"):
        for rec in records:
            if rec.solver == name and _is_yes(rec.verdict) is not None:
                ref[rec.instance] = _is_yes(rec.verdict)
    groups: dict[tuple, list[ExperimentRecord]] = {}
    for rec in records:
        truth = ref.get(rec.instance)
        key = (rec.r, rec.solver, {True: "YES", False: "NO", None: "unknown"}[truth])
        groups.setdefault(key, []).append(rec)
    rows = []
    for (r, solver, truth), recs in sorted(groups.items()):
        answered = [x for x in recs if _is_yes(x.verdict) is not None]
        correct = sum(
            1 for x in answered if truth != "unknown" and _is_yes(x.verdict) == (truth == "YES")
        )
        times = [x.elapsed for x in answered]
        rows.append(
            {
                "r": r,
                "solver": solver,
                "truth": truth,
                "instances": len(recs),
                "correct": correct if truth != "unknown" else "",
                "accuracy": f"{correct / len(recs):.3f}" if truth != "unknown" else "",
                "timeouts": sum(x.verdict == "Timeout" for x in recs),
                "mean_sec": f"{statistics.fmean(times):.6f}" if times else "",
                "min_sec": f"{min(times):.6f}" if times else "",
                "max_sec": f"{max(times):.6f}" if times else "",
            }
        )
    return rows


def write_records(path: Path, records: Sequence[ExperimentRecord]) -> None:
    names = [f.name for f in fields(ExperimentRecord)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=names, lineterminator="\n")
        w.writeheader()
        for rec in records:
            w.writerow(asdict(rec))


def write_summary(path: Path, rows: Sequence[dict]) -> None:
    if not rows:
        Path(path).write_text("", encoding="utf-8")
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
