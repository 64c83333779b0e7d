"""Subgraph connectivity: a fixed graph, a switched-on vertex set S, and
pairwise connectivity queries inside G[S].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .base import DynamicAlgorithm
from .levels import doubling_levels, window
from .requests import Request, query, update

VADD, VDEL = "vadd", "vdel"


class PromiseBroken(RuntimeError):
    """The predicted permanent set is not contained in the current one."""


def vadd(v: int) -> Request:
    return update(VADD, v)


def vdel(v: int) -> Request:
    return update(VDEL, v)


def conn_query(u: int, v: int) -> Request:
    return query("query", u, v)


@dataclass(frozen=True)
class SubConnInstance:
    n: int
    adj: tuple[frozenset[int], ...]
    S0: frozenset[int]

    @classmethod
    def build(cls, n: int, edges: Iterable[tuple[int, int]], S0: Iterable[int]) -> "SubConnInstance":
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"bad edge ({u},{v})")
            adj[u].add(v)
            adj[v].add(u)
        S = frozenset(S0)
        if any(not 0 <= v < n for v in S):
            raise ValueError("initial vertex outside the graph")
        return cls(n, tuple(frozenset(a) for a in adj), S)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in range(self.n) for v in self.adj[u] if u < v)


def apply_vertex_op(S: set[int], r: Request) -> None:
    """Strict insert/delete; raises ValueError on an invalid operation."""
    (v,) = r.args
    if r.tag == VADD:
        if v in S:
            raise ValueError(f"vertex {v} already present")
        S.add(v)
    elif r.tag == VDEL:
        if v not in S:
            raise ValueError(f"vertex {v} not present")
        S.remove(v)
    else:
        raise ValueError(f"unexpected update {r}")


def touched(r: Request) -> tuple[int, ...]:
    return r.args


def connected(adj: Sequence[Iterable[int]], allowed: set[int] | frozenset[int], u: int, v: int) -> bool:
    """DFS from u inside the allowed vertex set."""
    if u == v:
        return True
    seen = {u}
    stack = [u]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y in allowed and y not in seen:
                if y == v:
                    return True
                seen.add(y)
                stack.append(y)
    return False


def is_valid(inst: SubConnInstance, rho: Sequence[Request]) -> bool:
    S = set(inst.S0)
    for r in rho:
        if r.is_update:
            try:
                apply_vertex_op(S, r)
            except ValueError:
                return False
        elif any(x not in S for x in r.args):
            return False
    return True


def oracle_answers(inst: SubConnInstance, rho: Sequence[Request]) -> list[bool]:
    S = set(inst.S0)
    out = []
    for r in rho:
        if r.is_update:
            apply_vertex_op(S, r)
        else:
            u, v = r.args
            out.append(connected(inst.adj, S, u, v))
    return out


class BaselineSubConn(DynamicAlgorithm):
    """No prediction: DFS on G[S_t] per query."""

    def __init__(self, inst: SubConnInstance) -> None:
        super().__init__()
        self.inst = inst
        self.S = set(inst.S0)

    def _process(self, t: int, request: Request):
        if request.is_update:
            self.work["probes"] += 1
            apply_vertex_op(self.S, request)
            return None
        u, v = request.args
        if u not in self.S or v not in self.S:
            raise ValueError(f"queried vertex outside S at step {t}")
        self.work["scanned"] += len(self.S)
        return connected(self.inst.adj, self.S, u, v)


# -- predicted timelines ----------------------------------------------------


def predicted_sets(inst: SubConnInstance, rhohat: Sequence[Request]) -> list[frozenset[int]]:
    """Vertex set after each predicted prefix, index 0..T."""
    S = set(inst.S0)
    out = [frozenset(S)]
    for r in rhohat:
        if r.is_update:
            apply_vertex_op(S, r)
        out.append(frozenset(S))
    return out


class SubConnTimeline:
    """Permanent/active sets and shortcut connectivity for one level d.

    For time t the window is predicted positions [t-d, t+d]. A vertex is
    permanent when it is in the predicted set before the window, is not
    updated inside it and is not queried inside it. A vertex is active when
    some request in the window touches it.

    Connectivity through permanent vertices is stored per active vertex as
    a bitmask of the permanent components it touches, so that
    ``shortcut(a, b, t)`` is connectivity of a and b in G[P_t + {a, b}].
    """

    def __init__(self, inst: SubConnInstance, rhohat: Sequence[Request], d: int,
                 sets: list[frozenset[int]] | None = None) -> None:
        self.inst = inst
        self.d = d
        rhohat = list(rhohat)
        T = self.T = len(rhohat)
        sets = sets or predicted_sets(inst, rhohat)
        self.perm: list[frozenset[int]] = []
        self.active: list[frozenset[int]] = []
        self.masks: list[dict[int, int]] = []
        self.inserts: list[list[int]] = []
        self.deletes: list[list[int]] = []
        self.work = 0
        comp: dict[int, int] = {}
        for t in range(T + 1):
            lo, hi = window(t, d, T)
            blocked: set[int] = set()
            act: set[int] = set()
            for p in range(lo, hi + 1):
                r = rhohat[p - 1]
                act.update(r.args)
                if r.is_query or p > t - d:
                    blocked.update(r.args)
            P = sets[max(0, t - d)] - blocked
            if not self.perm or P != self.perm[-1]:
                comp = self._components(P)
            prev = self.perm[-1] if self.perm else frozenset()
            self.inserts.append(sorted(P - prev))
            self.deletes.append(sorted(prev - P))
            self.perm.append(P)
            self.active.append(frozenset(act))
            self.masks.append({a: self._mask(a, P, comp) for a in act})

    def _components(self, P: frozenset[int]) -> dict[int, int]:
        adj = self.inst.adj
        comp: dict[int, int] = {}
        c = 0
        for s in sorted(P):
            if s in comp:
                continue
            comp[s] = c
            stack = [s]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    self.work += 1
                    if y in P and y not in comp:
                        comp[y] = c
                        stack.append(y)
            c += 1
        return comp

    def _mask(self, a: int, P: frozenset[int], comp: dict[int, int]) -> int:
        m = 1 << comp[a] if a in P else 0
        for y in self.inst.adj[a]:
            self.work += 1
            if y in P:
                m |= 1 << comp[y]
        return m

    def shortcut(self, a: int, b: int, t: int) -> bool:
        """Connectivity of a and b in G[P_t + {a, b}]; both must be active at t."""
        masks = self.masks[t]
        if a not in masks or b not in masks:
            raise KeyError(f"shortcut lookup for inactive pair ({a},{b}) at {t}")
        return a == b or b in self.inst.adj[a] or bool(masks[a] & masks[b])


def promise_preprocess(inst: SubConnInstance, rhohat: Sequence[Request], d: int) -> SubConnTimeline:
    return SubConnTimeline(inst, rhohat, d)


class _Level:
    """Residual bookkeeping of one level against the true vertex set."""

    __slots__ = ("tl", "P", "Q", "missing")

    def __init__(self, tl: SubConnTimeline, S: set[int]) -> None:
        self.tl = tl
        self.P = set(tl.perm[0])
        self.Q = S - self.P
        self.missing = len(self.P - S)

    def vertex_added(self, v: int) -> None:
        if v in self.P:
            self.missing -= 1
        else:
            self.Q.add(v)

    def vertex_removed(self, v: int) -> None:
        if v in self.P:
            self.missing += 1
        else:
            self.Q.discard(v)

    def advance(self, t: int, S: set[int]) -> int:
        ops = 0
        for x in self.tl.inserts[t]:
            self.P.add(x)
            if x in S:
                self.Q.discard(x)
            else:
                self.missing += 1
            ops += 1
        for x in self.tl.deletes[t]:
            self.P.discard(x)
            if x in S:
                self.Q.add(x)
            else:
                self.missing -= 1
            ops += 1
        return ops


def _shortcut_search(tl: SubConnTimeline, Q: set[int], u: int, v: int, t: int) -> tuple[bool, int]:
    """DFS on the residual vertices plus u and v, with shortcut edges."""
    H = set(Q) | {u, v}
    adj = tl.inst.adj
    seen = {u}
    stack = [u]
    while stack:
        x = stack.pop()
        if x == v:
            return True, len(H)
        for y in H:
            if y not in seen and (y in adj[x] or tl.shortcut(x, y, t)):
                seen.add(y)
                stack.append(y)
    return v in seen, len(H)


class _LeveledSubConn(DynamicAlgorithm):
    def __init__(self, inst: SubConnInstance, rhohat: Sequence[Request], levels: Sequence[int]) -> None:
        super().__init__()
        self.inst = inst
        self.rhohat = list(rhohat)
        sets = predicted_sets(inst, self.rhohat)
        self.S = set(inst.S0)
        self.timelines = [SubConnTimeline(inst, self.rhohat, d, sets) for d in levels]
        self.preprocess_work = sum(tl.work for tl in self.timelines)
        self.levels = [_Level(tl, self.S) for tl in self.timelines]

    def _advance(self, t: int, request: Request) -> None:
        if t > len(self.rhohat):
            raise ValueError(f"request {t} lies beyond the prediction horizon")
        if request.is_update:
            apply_vertex_op(self.S, request)
            (v,) = request.args
            for lv in self.levels:
                if request.tag == VADD:
                    lv.vertex_added(v)
                else:
                    lv.vertex_removed(v)
                self.work["probes"] += 1
        for lv in self.levels:
            self.work["probes"] += lv.advance(t, self.S)

    def level_ok(self, lv: _Level, t: int, u: int, v: int) -> bool:
        d = lv.tl.d
        if lv.missing or len(lv.Q) > 4 * d + 2:
            return False
        act = lv.tl.active[t]
        self.work["probes"] += len(lv.Q) + 2
        return u in act and v in act and lv.Q <= act

    def errset_size(self) -> int:
        return min((len(lv.Q) for lv in self.levels if not lv.missing), default=len(self.S))


class PromiseSubConn(_LeveledSubConn):
    """Single known delay d; refuses to answer when the promise is broken."""

    def __init__(self, inst: SubConnInstance, rhohat: Sequence[Request], d: int) -> None:
        super().__init__(inst, rhohat, [d])

    def _process(self, t: int, request: Request):
        self._advance(t, request)
        if request.is_update:
            return None
        u, v = request.args
        if u not in self.S or v not in self.S:
            raise ValueError(f"queried vertex outside S at step {t}")
        lv = self.levels[0]
        if lv.missing:
            raise PromiseBroken(f"permanent vertices missing from S at step {t}")
        if not (lv.Q | {u, v}) <= lv.tl.active[t]:
            raise PromiseBroken(f"residual vertex outside the predicted window at step {t}")
        ans, size = _shortcut_search(lv.tl, lv.Q, u, v, t)
        self.dstar = lv.tl.d
        self.work["scanned"] += size
        return ans


class AgnosticSubConn(_LeveledSubConn):
    """Unknown delay: answer at the smallest level whose residual fits."""

    def __init__(self, inst: SubConnInstance, rhohat: Sequence[Request],
                 levels: Sequence[int] | None = None) -> None:
        if levels is None:
            levels = doubling_levels(inst.n)
        super().__init__(inst, rhohat, levels)

    def _process(self, t: int, request: Request):
        self._advance(t, request)
        if request.is_update:
            return None
        u, v = request.args
        if u not in self.S or v not in self.S:
            raise ValueError(f"queried vertex outside S at step {t}")
        for lv in self.levels:
            if self.level_ok(lv, t, u, v):
                ans, size = _shortcut_search(lv.tl, lv.Q, u, v, t)
                self.dstar = lv.tl.d
                self.work["scanned"] += size
                return ans
        self.dstar = None
        self.work["scanned"] += len(self.S)
        return connected(self.inst.adj, self.S, u, v)
