"""Suite execution, optionally over a process pool."""
from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor

from .config import SuiteConfig
from .report import Record, Report
from .suites import Case, build_cases, run_case

WORKERS_ENV = "QOSCLAB_WORKERS"


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _timed(args):
    case, cfg = args
    t = time.perf_counter()
    try:
        outs = run_case(case, cfg)
        err = None
    except Exception as e:  # reported as a failed record, not a crash
        outs, err = [], f"{type(e).__name__}: {e}"
    return outs, err, time.perf_counter() - t


def run_suite(cfg: SuiteConfig, workers: int | None = None) -> Report:
    report = Report(cfg.as_dict())
    cases: list[Case] = []
    for suite in cfg.suites:
        cs, notes = build_cases(cfg, suite)
        cases += cs
        report.notes += notes
    workers = worker_count() if workers is None else workers
    jobs = [(c, cfg) for c in cases]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_timed, jobs))
    else:
        results = [_timed(j) for j in jobs]
    for case, (outs, err, dt) in zip(cases, results):
        if err is not None:
            report.errors.append(f"{case.suite} {case.label}: {err}")
            continue
        share = dt / max(1, len(outs))
        for o in outs:
            report.records.append(Record(
                case.suite, o.check_id, case.label, o.key, case.params, o.residual, o.tol,
                o.passed, o.truncation_bound, share, o.skipped))
    return report
