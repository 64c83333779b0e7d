"""Replay workloads through the algorithms, check them, and report counters."""

from __future__ import annotations

import csv
import io
import json
import os
import random
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Literal, Sequence

import click

from .adversary import WorkloadPair, striangle_oumv_padded
from .omv import BoolMatrix, OuMvInstance
from .predictions import containment_check
from .subconn import PromiseBroken
from .workloads import (
    PROBLEMS,
    VARIANTS,
    StepOracle,
    format_answer,
    generate,
    load_workload,
    make_algorithm,
    oracle_answers,
    save_workload,
)

SEED_ENV = "DYNPRED_SEED"
CSV_COLUMNS = ("t", "kind", "answer", "oracle", "probes", "heap_ops", "dstar", "errset_size")
CheckMode = Literal["every-step", "queries-only", "off"]

EXIT_OK, EXIT_MISMATCH, EXIT_BAD_INPUT = 0, 1, 2


def default_seed() -> int:
    try:
        return int(os.environ.get(SEED_ENV, "0"))
    except ValueError:
        return 0


@dataclass
class RunConfig:
    problem: str
    variant: str
    workload: Path | None = None
    n: int | None = None
    T: int | None = None
    d: int | None = None
    k: int | None = None
    seed: int | None = None
    check: CheckMode = "every-step"
    output: Path | None = None

    def __post_init__(self) -> None:
        spec = (self.n, self.T, self.d, self.k)
        if self.workload is not None and any(x is not None for x in spec):
            raise ValueError("give either a workload directory or a generator spec, not both")
        if self.check not in ("every-step", "queries-only", "off"):
            raise ValueError(f"unknown check mode {self.check!r}")

    def load(self) -> WorkloadPair:
        if self.workload is not None:
            w = load_workload(self.workload)
            if w.problem != self.problem:
                raise ValueError(f"workload is for {w.problem!r}, not {self.problem!r}")
            return w
        return generate(
            self.problem,
            self.n or 16,
            self.T or 100,
            self.d or 0,
            self.k or 0,
            default_seed() if self.seed is None else self.seed,
        )


@dataclass
class RunReport:
    problem: str
    variant: str
    rows: list[dict] = field(default_factory=list)
    mismatches: int = 0
    totals: dict = field(default_factory=dict)
    peak_errset: int = 0
    dstar_trace: list = field(default_factory=list)
    wall_seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.mismatches == 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
        wr.writeheader()
        for row in self.rows:
            wr.writerow(row)
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)


def _dstar_cell(alg) -> str:
    if not hasattr(alg, "levels"):
        return ""
    return "inf" if alg.dstar is None else str(alg.dstar)


def run_workload(w: WorkloadPair, variant: str, check: CheckMode = "every-step") -> RunReport:
    """Replay ``w.rho`` through one variant and compare with a brute-force replay."""
    alg = make_algorithm(w, variant)
    oracle = None if check == "off" else StepOracle(w.problem, w.instance)
    report = RunReport(w.problem, variant)
    totals: Counter = Counter()
    start = time.perf_counter()
    for t, r in enumerate(w.rho, 1):
        before = Counter(alg.work)
        ans = alg.process(r)
        delta = Counter(alg.work)
        delta.subtract(before)
        expected = oracle.apply(r) if oracle is not None else None
        good = True
        if oracle is not None:
            if r.is_query:
                good = ans == expected
            elif check == "every-step" and hasattr(alg, "c"):
                expected = oracle.current()
                good = alg.c == expected
        if not good:
            report.mismatches += 1
        errset = alg.errset_size()
        report.peak_errset = max(report.peak_errset, errset)
        dstar = _dstar_cell(alg) if r.is_query else ""
        if r.is_query and dstar:
            report.dstar_trace.append(dstar)
        totals.update(delta)
        report.rows.append(
            {
                "t": t,
                "kind": r.kind,
                "answer": format_answer(ans) if r.is_query else "",
                "oracle": format_answer(expected) if expected is not None else "",
                "probes": delta["probes"] + delta["scanned"],
                "scanned": delta["scanned"],
                "heap_ops": delta["heap_ops"],
                "dstar": dstar,
                "errset_size": errset,
                "correct": good,
            }
        )
    report.wall_seconds = time.perf_counter() - start
    report.totals = {k: v for k, v in sorted(totals.items())}
    return report


def verify_workload(w: WorkloadPair) -> list[str]:
    """Problems with a workload: certificate, containment, ground truth."""
    problems = [f"certificate: {p}" for p in w.certificate.problems(w.rho, w.rhohat)]
    if not problems:
        c = w.certificate
        kept = [w.rho[i] for i in c.I]
        kept_hat = [w.rhohat[i] for i in c.Ihat]
        if not containment_check(kept, kept_hat, c.d):
            problems.append("containment fails at the certified delay")
    try:
        truth = oracle_answers(w.problem, w.instance, w.rho)
    except ValueError as exc:
        problems.append(f"invalid request sequence: {exc}")
    else:
        if truth != list(w.answers):
            problems.append("recorded answers differ from replay")
    return problems


def random_oumv(n: int, rounds: int, seed: int) -> OuMvInstance:
    rng = random.Random(f"oumv:{n}:{rounds}:{seed}")
    M = BoolMatrix.from_rows([[rng.randint(0, 1) for _ in range(n)] for _ in range(n)])
    pairs = tuple(
        (tuple(rng.randint(0, 1) for _ in range(n)), tuple(rng.randint(0, 1) for _ in range(n)))
        for _ in range(rounds)
    )
    return OuMvInstance(M, pairs)


def _bench_one(args: tuple) -> dict:
    problem, variant, n, T, d, k, seed = args
    w = generate(problem, n, T, d, k, seed)
    rep = run_workload(w, variant, "queries-only")
    return {
        "problem": problem,
        "variant": variant,
        "n": n,
        "T": T,
        "d": d,
        "k": k,
        "seed": seed,
        "mismatches": rep.mismatches,
        "probes": rep.totals.get("probes", 0) + rep.totals.get("scanned", 0),
        "scanned": rep.totals.get("scanned", 0),
        "heap_ops": rep.totals.get("heap_ops", 0),
        "peak_errset": rep.peak_errset,
        "wall_seconds": round(rep.wall_seconds, 6),
    }


def bench(problem: str, variants: Sequence[str], n: int, T: int, ds: Sequence[int],
          k: int, trials: int, seed: int, jobs: int = 1) -> list[dict]:
    tasks = [
        (problem, v, n, T, d, k, seed + i) for v in variants for d in ds for i in range(trials)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_bench_one, tasks))
    return [_bench_one(a) for a in tasks]


# -- command line -----------------------------------------------------------


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        click.echo(text, nl=False)
    else:
        Path(output).write_text(text)


def _rows_out(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    if not rows:
        return ""
    buf = io.StringIO()
    wr = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    wr.writeheader()
    wr.writerows(rows)
    return buf.getvalue()


@click.group()
def main() -> None:
    """Dynamic algorithms with predictions: workloads, replays, checks."""


@main.group()
def gen() -> None:
    """Write a workload directory."""


@gen.command("perturb")
@click.option("--problem", type=click.Choice(PROBLEMS), required=True)
@click.option("--n", type=int, default=16, show_default=True)
@click.option("--T", "T", type=int, default=100, show_default=True)
@click.option("--d", type=int, default=0, show_default=True)
@click.option("--k", type=int, default=0, show_default=True)
@click.option("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV} or 0")
@click.option("--out", type=click.Path(path_type=Path), required=True)
def gen_perturb(problem, n, T, d, k, seed, out):
    """Random instance and prediction with a (d, k)-certified realization."""
    seed = default_seed() if seed is None else seed
    try:
        w = generate(problem, n, T, d, k, seed)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    save_workload(w, out, {"generator": "perturb", "n": n, "T": T, "d": d, "k": k, "seed": seed})
    click.echo(str(out))


@gen.command("striangle-oumv")
@click.option("--n", type=int, default=5, show_default=True)
@click.option("--rounds", type=int, default=None, help="defaults to n")
@click.option("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV} or 0")
@click.option("--out", type=click.Path(path_type=Path), required=True)
def gen_striangle_oumv(n, rounds, seed, out):
    """Random OuMv instance encoded as padded triangle updates against the
    universal prediction."""
    seed = default_seed() if seed is None else seed
    if n < 1:
        raise click.UsageError("n must be positive")
    inst = random_oumv(n, rounds or n, seed)
    w = striangle_oumv_padded(inst)
    save_workload(
        w, out, {"generator": "striangle-oumv", "n": n, "rounds": rounds or n, "seed": seed}
    )
    click.echo(str(out))


@main.command("run")
@click.option("--problem", type=click.Choice(PROBLEMS), required=True)
@click.option("--variant", required=True)
@click.option("--workload", type=click.Path(path_type=Path, exists=True, file_okay=False))
@click.option("--n", type=int)
@click.option("--T", "T", type=int)
@click.option("--d", type=int)
@click.option("--k", type=int)
@click.option("--seed", type=int)
@click.option("--check", type=click.Choice(["every-step", "queries-only", "off"]), default="every-step", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--output", type=click.Path(path_type=Path))
def run_cmd(problem, variant, workload, n, T, d, k, seed, check, fmt, output):
    """Replay one workload through one variant."""
    try:
        cfg = RunConfig(problem, variant, workload, n, T, d, k, seed, check, output)
        w = cfg.load()
        rep = run_workload(w, variant, check)
    except (ValueError, KeyError, OSError, PromiseBroken) as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(EXIT_BAD_INPUT)
    _emit(rep.to_json() + "\n" if fmt == "json" else rep.to_csv(), output)
    if not rep.ok:
        click.echo(f"{rep.mismatches} mismatching answers", err=True)
        raise SystemExit(EXIT_MISMATCH)


@main.command("verify")
@click.argument("workload", type=click.Path(path_type=Path, exists=True, file_okay=False))
def verify_cmd(workload):
    """Check certificate, containment and recorded answers of a workload."""
    try:
        w = load_workload(workload)
    except (ValueError, KeyError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(EXIT_BAD_INPUT)
    problems = verify_workload(w)
    for p in problems:
        click.echo(p, err=True)
    click.echo("ok" if not problems else "invalid")
    raise SystemExit(EXIT_OK if not problems else EXIT_MISMATCH)


@main.command("bench")
@click.option("--problem", type=click.Choice(PROBLEMS), required=True)
@click.option("--variant", "variants", multiple=True, help="repeatable; defaults to all")
@click.option("--n", type=int, default=16, show_default=True)
@click.option("--T", "T", type=int, default=100, show_default=True)
@click.option("--d", "ds", default="0,1,2,4,8", show_default=True, help="comma-separated delays")
@click.option("--k", type=int, default=0, show_default=True)
@click.option("--trials", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--output", type=click.Path(path_type=Path))
def bench_cmd(problem, variants, n, T, ds, k, trials, seed, jobs, fmt, output):
    """Counter totals over a delay sweep of generated workloads."""
    try:
        dlist = [int(x) for x in ds.split(",") if x.strip()]
    except ValueError:
        raise click.UsageError("--d takes comma-separated integers")
    variants = list(variants) or list(VARIANTS[problem])
    unknown = [v for v in variants if v not in VARIANTS[problem]]
    if unknown:
        raise click.UsageError(f"unknown variant(s) {unknown} for {problem}")
    if problem == "subconn" and k and "promise" in variants:
        raise click.UsageError("the promise variant needs k = 0")
    seed = default_seed() if seed is None else seed
    try:
        rows = bench(problem, variants, n, T, dlist, k, trials, seed, jobs)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(EXIT_BAD_INPUT)
    _emit(_rows_out(rows, fmt), output)
    if any(r["mismatches"] for r in rows):
        raise SystemExit(EXIT_MISMATCH)


if __name__ == "__main__":
    main()
