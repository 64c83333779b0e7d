"""Counting triangles through a fixed vertex s under edge flips."""

from __future__ import annotations

from bisect import bisect_right
from typing import Iterable, Sequence

from .base import DynamicAlgorithm, predicted_at
from .predictions import SymDiffTracker
from .requests import Request, query, update

EDGE = "edge"


def edge_flip(u: int, v: int) -> Request:
    if u == v:
        raise ValueError(f"self-loop at {u}")
    return update(EDGE, min(u, v), max(u, v))


def triangle_query() -> Request:
    return query("query")


class FlipGraph:
    """Undirected simple graph on vertices 0..n-1 toggled one edge at a time."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = (), s: int = 0) -> None:
        if not 0 <= s < n:
            raise ValueError("distinguished vertex outside the graph")
        self.n = n
        self.s = s
        self.adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not self.has(u, v):
                self.flip(u, v)

    def _check(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError(f"self-loop at {u}")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"edge ({u},{v}) outside vertex range")

    def has(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def flip(self, u: int, v: int) -> bool:
        """Toggle (u, v); returns True if the edge is now present."""
        self._check(u, v)
        if v in self.adj[u]:
            self.adj[u].discard(v)
            self.adj[v].discard(u)
            return False
        self.adj[u].add(v)
        self.adj[v].add(u)
        return True

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in range(self.n) for v in self.adj[u] if u < v)

    def copy(self) -> "FlipGraph":
        g = FlipGraph(self.n, s=self.s)
        g.adj = [set(a) for a in self.adj]
        return g

    def sensitivity(self, u: int) -> int:
        """Change in the count caused by flipping (s, u) on."""
        s = self.s
        return sum(1 for w in self.adj[u] if w != s and s in self.adj[w])


def count_striangles(G: FlipGraph, s: int | None = None) -> int:
    """Number of pairs {a, b} with (s,a), (s,b), (a,b) all present."""
    s = G.s if s is None else s
    nb = sorted(G.adj[s])
    return sum(1 for i, a in enumerate(nb) for b in nb[i + 1 :] if b in G.adj[a])


def _apply(G: FlipGraph, r: Request | None) -> bool | None:
    if r is None or not r.is_update:
        return None
    if r.tag != EDGE:
        raise ValueError(f"unexpected update {r}")
    return G.flip(*r.args)


def oracle_answers(G0: FlipGraph, rho: Sequence[Request]) -> list[int]:
    G = G0.copy()
    out = []
    for r in rho:
        if r.is_query:
            out.append(count_striangles(G))
        else:
            _apply(G, r)
    return out


# -- prediction-free baselines ----------------------------------------------


class BaselineQopt(DynamicAlgorithm):
    """Linear-time updates, constant-time queries."""

    def __init__(self, G0: FlipGraph) -> None:
        super().__init__()
        self.G = G0.copy()
        self.c = count_striangles(self.G)
        self.work["probes"] += self.G.n * self.G.n

    def flip(self, u: int, v: int) -> int:
        G, s = self.G, self.G.s
        if s in (u, v):
            x = v if u == s else u
            delta = G.sensitivity(x)
            self.work["probes"] += len(G.adj[x]) + 1
        else:
            delta = int(G.has(s, u) and G.has(s, v))
            self.work["probes"] += 2
        self.c += delta if G.flip(u, v) else -delta
        return self.c

    def _process(self, t: int, request: Request) -> int | None:
        if request.is_query:
            self.work["probes"] += 1
            return self.c
        self.flip(*request.args)
        return None


class BaselineUopt(DynamicAlgorithm):
    """Constant-time updates, quadratic-time queries."""

    def __init__(self, G0: FlipGraph) -> None:
        super().__init__()
        self.G = G0.copy()

    def _process(self, t: int, request: Request) -> int | None:
        if request.is_query:
            self.work["probes"] += len(self.G.adj[self.G.s]) ** 2
            return count_striangles(self.G)
        self.work["probes"] += 1
        _apply(self.G, request)
        return None


# -- sensitivity timelines --------------------------------------------------


class SensitivityTimeline:
    """Per-vertex change-points of the predicted sensitivity."""

    def __init__(self, n: int) -> None:
        self.times: list[list[int]] = [[] for _ in range(n)]
        self.vals: list[list[int]] = [[] for _ in range(n)]

    def record(self, v: int, t: int, value: int) -> None:
        ts, vs = self.times[v], self.vals[v]
        if ts and ts[-1] == t:
            vs[-1] = value
        else:
            if ts and ts[-1] > t:
                raise ValueError("change-points must be recorded in time order")
            ts.append(t)
            vs.append(value)

    def lookup(self, v: int, t: int) -> int:
        i = bisect_right(self.times[v], t) - 1
        if i < 0:
            raise KeyError(f"no change-point for vertex {v} at or before {t}")
        return self.vals[v][i]

    def current(self, v: int) -> int:
        return self.vals[v][-1]


def build_timeline(G0: FlipGraph, rhohat: Sequence[Request]) -> tuple[SensitivityTimeline, list[int]]:
    """Sensitivity change-points and predicted counts for every time step.

    Returns the timeline and ``chat`` with ``chat[t]`` the count on the
    predicted graph after t requests.
    """
    G = G0.copy()
    s = G.s
    tl = SensitivityTimeline(G.n)
    for v in range(G.n):
        tl.record(v, 0, G.sensitivity(v))
    base = BaselineQopt(G)
    chat = [base.c]
    for t, r in enumerate(rhohat, 1):
        if r.is_update:
            u, v = r.args
            base.flip(u, v)
            on = G.flip(u, v)
            sign = 1 if on else -1
            if s in (u, v):
                x = v if u == s else u
                for w in G.adj[x]:
                    if w != s:
                        tl.record(w, t, tl.current(w) + sign)
            else:
                if G.has(s, v):
                    tl.record(u, t, tl.current(u) + sign)
                if G.has(s, u):
                    tl.record(v, t, tl.current(v) + sign)
        chat.append(base.c)
    return tl, chat


# -- prediction-aided algorithms --------------------------------------------


class _PredictedStri(DynamicAlgorithm):
    def __init__(self, G0: FlipGraph, rhohat: Sequence[Request]) -> None:
        super().__init__()
        self.rhohat = list(rhohat)
        self.G = G0.copy()
        self.Ghat = G0.copy()
        self.tracker = SymDiffTracker()
        self._vd_refs: dict[int, int] = {}
        self.timeline, self.chat = build_timeline(G0, self.rhohat)

    @property
    def V_D(self) -> set[int]:
        return set(self._vd_refs)

    def errset_size(self) -> int:
        return len(self.tracker)

    def _track(self, t: int, actual: Request) -> None:
        predicted = predicted_at(self.rhohat, t)
        if predicted is None:
            raise ValueError(f"request {t} lies beyond the prediction horizon")
        for x, old, new in self.tracker.step(actual, predicted):
            self.work["probes"] += 1
            if x.is_update and (old == 0) != (new == 0):
                for v in x.args:
                    if new:
                        self._vd_refs[v] = self._vd_refs.get(v, 0) + 1
                    else:
                        self._vd_refs[v] -= 1
                        if not self._vd_refs[v]:
                            del self._vd_refs[v]
        _apply(self.Ghat, predicted)


class StriQopt(_PredictedStri):
    """Corrects predicted sensitivities on every update; queries are O(1)."""

    def __init__(self, G0: FlipGraph, rhohat: Sequence[Request]) -> None:
        super().__init__(G0, rhohat)
        self.c = self.chat[0]

    def sensediff(self, x: int) -> int:
        """True minus predicted sensitivity of x, scanning only V_D."""
        G, H, s = self.G, self.Ghat, self.G.s
        diff = 0
        for w in self._vd_refs:
            self.work["scanned"] += 1
            if w == s or w == x:
                continue
            diff += int(G.has(x, w) and G.has(w, s)) - int(H.has(x, w) and H.has(w, s))
        return diff

    def _process(self, t: int, request: Request) -> int | None:
        self._track(t, request)
        if request.is_query:
            self.work["probes"] += 1
            return self.c
        u, v = request.args
        s = self.G.s
        if s in (u, v):
            x = v if u == s else u
            delta = self.timeline.lookup(x, t) + self.sensediff(x)
            self.work["probes"] += 1
        else:
            delta = int(self.G.has(s, u) and self.G.has(s, v))
            self.work["probes"] += 2
        self.c += delta if self.G.flip(u, v) else -delta
        return None


class StriUopt(_PredictedStri):
    """O(1) updates; queries correct the predicted count over V_D."""

    def _process(self, t: int, request: Request) -> int | None:
        self._track(t, request)
        if request.is_update:
            self.work["probes"] += 1
            _apply(self.G, request)
            return None
        return self.query(t)

    def query(self, t: int) -> int:
        G, H, s = self.G, self.Ghat, self.G.s
        vd = [v for v in self._vd_refs if v != s]
        # Pairs inside V_D are seen in both orders; the sum is halved at the end.
        twice = 0
        inner = dict.fromkeys(vd, 0)
        for a in vd:
            for b in vd:
                self.work["scanned"] += 1
                if a == b:
                    continue
                te = G.has(s, a) and G.has(s, b) and G.has(a, b)
                th = H.has(s, a) and H.has(s, b) and H.has(a, b)
                twice += int(te) - int(th)
                if H.has(a, b) and H.has(b, s):
                    inner[a] += 1
        # A pair with only a in V_D differs only through (s, a); the
        # predicted sensitivity minus its V_D part counts those pairs.
        single = 0
        for a in vd:
            b_a = int(G.has(s, a)) - int(H.has(s, a))
            if b_a:
                single += b_a * (self.timeline.lookup(a, t) - inner[a])
        self.work["probes"] += 1
        return self.chat[t] + twice // 2 + single
