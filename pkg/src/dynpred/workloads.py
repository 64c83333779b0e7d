"""Certified random workloads per problem, their on-disk form, and oracles."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

from . import apsp, erickson, reach_tc, striangle, subconn
from .adversary import WorkloadPair, perturb
from .predictions import DelayCertificate
from .requests import Request, RequestSequence

PROBLEMS = ("striangle", "subconn", "tc", "apsp", "erickson")


@dataclass(frozen=True)
class Digraph:
    n: int
    edges: frozenset


# -- generators -------------------------------------------------------------


def _striangle(rng: random.Random, n: int, T: int, d: int, k: int):
    n = max(n, 3)
    G0 = striangle.FlipGraph(
        n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.3]
    )
    out = []
    for _ in range(T):
        x = rng.random()
        if x < 0.25:
            out.append(striangle.triangle_query())
        elif x < 0.55:
            out.append(striangle.edge_flip(0, rng.randrange(1, n)))
        else:
            out.append(striangle.edge_flip(*rng.sample(range(n), 2)))
    rhohat = RequestSequence(out)
    rho, cert = perturb(rhohat, d, k, rng)
    return G0, rhohat, rho, cert


ANCHORS = 3


def _subconn(rng: random.Random, n: int, T: int, d: int, k: int):
    """Vertices 0..2 are always on and never updated; they absorb outliers.

    Consecutive requests naming the same vertex, at least one of them an
    update, sit more than 2d apart in the prediction, so any d-delayed
    shuffle keeps the sequence valid.
    """
    n = max(n, ANCHORS + 2)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 2.5 / n]
    S0 = set(range(ANCHORS)) | {v for v in range(ANCHORS, n) if rng.random() < 0.5}
    inst = subconn.SubConnInstance.build(n, edges, S0)
    S = set(S0)
    gap = 2 * d
    last_touch: dict[int, int] = {}
    last_update: dict[int, int] = {}
    never = -(10**9)
    out: list[Request] = []
    for p in range(T):
        free = [v for v in range(ANCHORS, n) if p - last_touch.get(v, never) > gap]
        if free and rng.random() < 0.5:
            v = rng.choice(free)
            out.append(subconn.vdel(v) if v in S else subconn.vadd(v))
            S ^= {v}
            last_touch[v] = last_update[v] = p
        else:
            ok = sorted(v for v in S if p - last_update.get(v, never) > gap)
            a, b = rng.choice(ok), rng.choice(ok)
            out.append(subconn.conn_query(a, b))
            last_touch[a] = last_touch[b] = p
    rhohat = RequestSequence(out)

    def replace(r: random.Random, old: Request) -> Request | None:
        if old.is_update:
            return None
        return subconn.conn_query(r.randrange(ANCHORS), r.randrange(ANCHORS))

    rho, cert = perturb(
        rhohat, d, k, rng, replace=replace, valid=lambda s: subconn.is_valid(inst, s)
    )
    return inst, rhohat, rho, cert


def _tc(rng: random.Random, n: int, T: int, d: int, k: int):
    n = max(n, 2)
    E0 = frozenset(
        (a, b) for a in range(n) for b in range(n) if a != b and rng.random() < 1.5 / n
    )
    out = []
    for _ in range(T):
        if rng.random() < 0.6:
            out.append(reach_tc.dedge_flip(*rng.sample(range(n), 2)))
        else:
            out.append(reach_tc.reach_query(rng.randrange(n), rng.randrange(n)))
    rhohat = RequestSequence(out)
    rho, cert = perturb(rhohat, d, k, rng)
    return Digraph(n, E0), rhohat, rho, cert


def _apsp(rng: random.Random, n: int, T: int, d: int, k: int):
    n = max(n, 2)
    E0 = frozenset(
        (a, b, rng.randint(1, 10))
        for a in range(n)
        for b in range(n)
        if a != b and rng.random() < 1.5 / n
    )
    pool = sorted(E0)
    out = []
    for _ in range(T):
        x = rng.random()
        if x < 0.3 and pool:
            out.append(apsp.wedge_flip(*rng.choice(pool)))
        elif x < 0.6:
            a, b = rng.sample(range(n), 2)
            out.append(apsp.wedge_flip(a, b, rng.randint(1, 10)))
        else:
            out.append(apsp.dist_query(rng.randrange(n), rng.randrange(n)))
    rhohat = RequestSequence(out)
    rho, cert = perturb(rhohat, d, k, rng)
    return Digraph(n, E0), rhohat, rho, cert


def _erickson(rng: random.Random, n: int, T: int, d: int, k: int):
    n = max(n, 1)
    M0 = [[rng.randint(0, 20) for _ in range(n)] for _ in range(n)]
    out = []
    for _ in range(T):
        x = rng.random()
        if x < 0.35:
            out.append(erickson.row_incr(rng.randrange(n)))
        elif x < 0.7:
            out.append(erickson.col_incr(rng.randrange(n)))
        else:
            out.append(erickson.max_query())
    rhohat = RequestSequence(out)
    rho, cert = perturb(rhohat, d, k, rng)
    return M0, rhohat, rho, cert


_GENERATORS = {
    "striangle": _striangle,
    "subconn": _subconn,
    "tc": _tc,
    "apsp": _apsp,
    "erickson": _erickson,
}


def generate(problem: str, n: int, T: int, d: int, k: int, seed: int) -> WorkloadPair:
    """Random instance, prediction, and a realized sequence certified (d, k)."""
    if problem not in _GENERATORS:
        raise ValueError(f"unknown problem {problem!r}")
    if T < 1 or n < 1 or d < 0 or k < 0 or k > T:
        raise ValueError("need n, T >= 1, d >= 0 and 0 <= k <= T")
    rng = random.Random(f"{problem}:{n}:{T}:{d}:{k}:{seed}")
    inst, rhohat, rho, cert = _GENERATORS[problem](rng, n, T, d, k)
    return WorkloadPair(problem, inst, rhohat, rho, cert, oracle_answers(problem, inst, rho))


# -- oracles ----------------------------------------------------------------


def oracle_answers(problem: str, inst: Any, rho: Sequence[Request]) -> list:
    if problem == "striangle":
        return striangle.oracle_answers(inst, rho)
    if problem == "subconn":
        return subconn.oracle_answers(inst, rho)
    if problem == "tc":
        return reach_tc.oracle_answers(inst.n, inst.edges, rho)
    if problem == "apsp":
        return apsp.oracle_answers(inst.n, inst.edges, rho)
    if problem == "erickson":
        return erickson.oracle_answers(inst, rho)
    raise ValueError(f"unknown problem {problem!r}")


class StepOracle:
    """Brute-force replay that can also report the answer between queries
    for problems whose query takes no arguments."""

    def __init__(self, problem: str, inst: Any) -> None:
        self.problem = problem
        if problem == "striangle":
            self.state = inst.copy()
        elif problem == "subconn":
            self.inst = inst
            self.state = set(inst.S0)
        elif problem in ("tc", "apsp"):
            self.inst = inst
            self.state = set(inst.edges)
        elif problem == "erickson":
            self.state = erickson.EricksonBase(inst)
        else:
            raise ValueError(f"unknown problem {problem!r}")

    def apply(self, r: Request) -> Any:
        p = self.problem
        if r.is_update:
            if p == "striangle":
                self.state.flip(*r.args)
            elif p == "subconn":
                subconn.apply_vertex_op(self.state, r)
            elif p in ("tc", "apsp"):
                self.state ^= {reach_tc.flip_key(r)}
            else:
                self.state.apply(r)
            return None
        return self.answer(r)

    def answer(self, r: Request) -> Any:
        p = self.problem
        if p == "striangle":
            return striangle.count_striangles(self.state)
        if p == "erickson":
            return erickson.erickson_oracle(self.state)[0]
        u, v = r.args
        if p == "subconn":
            return subconn.connected(self.inst.adj, self.state, u, v)
        if p == "tc":
            return reach_tc.reachable(self.inst.n, self.state, u, v)
        return apsp.bellman_ford(self.inst.n, self.state, u)[v]

    def current(self) -> Any:
        """Answer of the argument-free query, where the problem has one."""
        if self.problem == "striangle":
            return striangle.count_striangles(self.state)
        if self.problem == "erickson":
            return erickson.erickson_oracle(self.state)[0]
        return None


# -- algorithms by name -----------------------------------------------------

VARIANTS: dict[str, dict[str, Callable]] = {
    "striangle": {
        "baseline-q": lambda w: striangle.BaselineQopt(w.instance),
        "baseline-u": lambda w: striangle.BaselineUopt(w.instance),
        "qopt": lambda w: striangle.StriQopt(w.instance, w.rhohat),
        "uopt": lambda w: striangle.StriUopt(w.instance, w.rhohat),
    },
    "subconn": {
        "baseline": lambda w: subconn.BaselineSubConn(w.instance),
        "promise": lambda w: subconn.PromiseSubConn(w.instance, w.rhohat, w.certificate.d),
        "agnostic": lambda w: subconn.AgnosticSubConn(w.instance, w.rhohat),
    },
    "tc": {
        "baseline": lambda w: reach_tc.BaselineTC(w.instance.n, w.instance.edges),
        "agnostic": lambda w: reach_tc.AgnosticTC(w.instance.n, w.instance.edges, w.rhohat),
    },
    "apsp": {
        "baseline": lambda w: apsp.BaselineApsp(w.instance.n, w.instance.edges),
        "agnostic": lambda w: apsp.AgnosticApsp(w.instance.n, w.instance.edges, w.rhohat),
    },
    "erickson": {
        "baseline": lambda w: erickson.BaselineErickson(w.instance),
        "qopt": lambda w: erickson.EricksonQopt(w.instance, w.rhohat),
        "uopt": lambda w: erickson.EricksonUopt(w.instance, w.rhohat),
        "qopt-lazy": lambda w: erickson.EricksonQopt(w.instance, w.rhohat, mode="lazy"),
        "uopt-lazy": lambda w: erickson.EricksonUopt(w.instance, w.rhohat, mode="lazy"),
    },
}


def make_algorithm(w: WorkloadPair, variant: str):
    try:
        return VARIANTS[w.problem][variant](w)
    except KeyError:
        raise ValueError(f"no variant {variant!r} for problem {w.problem!r}") from None


# -- serialization ----------------------------------------------------------


def format_answer(x: Any) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return apsp.format_distance(x)
    return str(x)


def parse_answer(s: str) -> Any:
    return apsp.INF if s == "inf" else int(s)


def _dump_instance(problem: str, inst: Any, out: Path) -> None:
    if problem == "striangle":
        body = [f"{inst.n}"] + [f"{u} {v}" for u, v in inst.edges()]
        (out / "instance.edges").write_text("\n".join(body) + "\n")
    elif problem == "subconn":
        body = [f"{inst.n}"] + [f"{u} {v}" for u, v in inst.edges()]
        (out / "instance.edges").write_text("\n".join(body) + "\n")
        (out / "instance.vertices").write_text(" ".join(map(str, sorted(inst.S0))) + "\n")
    elif problem in ("tc", "apsp"):
        body = [f"{inst.n}"] + [" ".join(map(str, e)) for e in sorted(inst.edges)]
        (out / "instance.edges").write_text("\n".join(body) + "\n")
    elif problem == "erickson":
        (out / "instance.matrix").write_text(erickson.dump_matrix(inst))
    else:
        raise ValueError(f"unknown problem {problem!r}")


def _read_edges(path: Path, arity: int) -> tuple[int, list[tuple[int, ...]]]:
    lines = [ln.split() for ln in path.read_text().splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 1:
        raise ValueError(f"{path.name}: first line must be the vertex count")
    n = int(lines[0][0])
    edges = []
    for ln in lines[1:]:
        if len(ln) != arity:
            raise ValueError(f"{path.name}: expected {arity} fields, got {ln}")
        edges.append(tuple(int(x) for x in ln))
    return n, edges


def _load_instance(problem: str, d: Path) -> Any:
    if problem == "striangle":
        n, edges = _read_edges(d / "instance.edges", 2)
        return striangle.FlipGraph(n, edges)
    if problem == "subconn":
        n, edges = _read_edges(d / "instance.edges", 2)
        S0 = [int(x) for x in (d / "instance.vertices").read_text().split()]
        return subconn.SubConnInstance.build(n, edges, S0)
    if problem == "tc":
        n, edges = _read_edges(d / "instance.edges", 2)
        return Digraph(n, frozenset(edges))
    if problem == "apsp":
        n, edges = _read_edges(d / "instance.edges", 3)
        if any(e[2] < 0 for e in edges):
            raise ValueError("negative edge weight")
        return Digraph(n, frozenset(edges))
    if problem == "erickson":
        return erickson.load_matrix((d / "instance.matrix").read_text())
    raise ValueError(f"unknown problem {problem!r}")


def save_workload(w: WorkloadPair, out: Path, meta: dict | None = None) -> Path:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    _dump_instance(w.problem, w.instance, out)
    (out / "pred.txt").write_text(w.rhohat.dumps())
    (out / "actual.txt").write_text(w.rho.dumps())
    (out / "cert.json").write_text(w.certificate.to_json() + "\n")
    (out / "answers.txt").write_text("".join(format_answer(a) + "\n" for a in w.answers))
    info = {"problem": w.problem, **(meta or {})}
    (out / "meta.json").write_text(json.dumps(info, indent=1, sort_keys=True) + "\n")
    return out


def load_workload(src: Path) -> WorkloadPair:
    src = Path(src)
    meta = json.loads((src / "meta.json").read_text())
    problem = meta["problem"]
    inst = _load_instance(problem, src)
    rhohat = RequestSequence.loads((src / "pred.txt").read_text())
    rho = RequestSequence.loads((src / "actual.txt").read_text())
    cert = DelayCertificate.from_json((src / "cert.json").read_text())
    answers = [parse_answer(x) for x in (src / "answers.txt").read_text().split()]
    return WorkloadPair(problem, inst, rhohat, rho, cert, answers)
