"""Pairwise reachability in a digraph under edge flips."""

from __future__ import annotations

from typing import Hashable, Iterable, Sequence

from .base import DynamicAlgorithm
from .levels import doubling_levels, window
from .requests import Request, query, update

DEDGE = "dedge"


def dedge_flip(u: int, v: int) -> Request:
    if u == v:
        raise ValueError(f"self-loop at {u}")
    return update(DEDGE, u, v)


def reach_query(u: int, v: int) -> Request:
    return query("query", u, v)


def flip_key(r: Request) -> tuple:
    """Identity of the edge a flip toggles."""
    return r.args


# -- window bookkeeping shared with the shortest-path variant ----------------


class EdgeTimeline:
    """Permanent edges, active vertices and lookup tables for one level d.

    An edge is permanent at t when it is present in the predicted graph
    before the window [t-d, t+d] and no predicted flip inside the window
    touches it. A vertex is active at t when a predicted request in the
    window names it. Subclasses fill ``tables[t]`` from (P_t, A_t).
    """

    def __init__(self, n: int, predicted: list[frozenset], rhohat: Sequence[Request], d: int) -> None:
        self.n = n
        self.d = d
        T = self.T = len(rhohat)
        self.perm: list[frozenset] = []
        self.active: list[frozenset[int]] = []
        self.inserts: list[list] = []
        self.deletes: list[list] = []
        self.tables: list[dict] = []
        self.work = 0
        for t in range(T + 1):
            lo, hi = window(t, d, T)
            flipped = set()
            act: set[int] = set()
            for p in range(lo, hi + 1):
                r = rhohat[p - 1]
                act.update(r.args[:2])
                if r.is_update and p > t - d:
                    flipped.add(flip_key(r))
            P = predicted[max(0, t - d)] - flipped
            prev = self.perm[-1] if self.perm else None
            same = prev is not None and P == prev
            self.inserts.append(sorted(P - prev) if prev is not None else sorted(P))
            self.deletes.append(sorted(prev - P) if prev is not None else [])
            self.perm.append(P if not same else prev)
            A = frozenset(act)
            self.active.append(A)
            self.tables.append(self._table(P, A, self.tables[-1] if same else None))

    def _table(self, P: frozenset, A: frozenset[int], reuse: dict | None) -> dict:
        raise NotImplementedError

    def lookup(self, a: int, b: int, t: int):
        row = self.tables[t].get(a)
        if row is None or b not in self.active[t]:
            raise KeyError(f"lookup for inactive pair ({a},{b}) at {t}")
        return row


def predicted_edge_sets(E0: Iterable[Hashable], rhohat: Sequence[Request]) -> list[frozenset]:
    E = set(E0)
    out = [frozenset(E)]
    for r in rhohat:
        if r.is_update:
            E ^= {flip_key(r)}
        out.append(frozenset(E))
    return out


class EdgeLevel:
    """Tracks F = E_t minus P_t and how many permanent edges are absent."""

    __slots__ = ("tl", "P", "F", "missing")

    def __init__(self, tl: EdgeTimeline, E: set) -> None:
        self.tl = tl
        self.P = set(tl.perm[0])
        self.F = E - self.P
        self.missing = len(self.P - E)

    def flipped(self, key, present: bool) -> None:
        if key in self.P:
            self.missing += -1 if present else 1
        elif present:
            self.F.add(key)
        else:
            self.F.discard(key)

    def advance(self, t: int, E: set) -> int:
        for x in self.tl.inserts[t]:
            self.P.add(x)
            if x in E:
                self.F.discard(x)
            else:
                self.missing += 1
        for x in self.tl.deletes[t]:
            self.P.discard(x)
            if x in E:
                self.F.add(x)
            else:
                self.missing -= 1
        return len(self.tl.inserts[t]) + len(self.tl.deletes[t])

    def fits(self, u: int, v: int, t: int) -> bool:
        d = self.tl.d
        if self.missing or len(self.F) > 2 * d + 1:
            return False
        act = self.tl.active[t]
        return u in act and v in act and all(e[0] in act and e[1] in act for e in self.F)

    def vertices(self, u: int, v: int) -> set[int]:
        H = {u, v}
        for e in self.F:
            H.add(e[0])
            H.add(e[1])
        return H


class LeveledEdgeAlgorithm(DynamicAlgorithm):
    """Flip bookkeeping across all levels; subclasses answer queries."""

    timeline_cls: type[EdgeTimeline]

    def __init__(self, n: int, E0: Iterable, rhohat: Sequence[Request], levels: Sequence[int]) -> None:
        super().__init__()
        self.n = n
        self.rhohat = list(rhohat)
        self.E = set(E0)
        pred = predicted_edge_sets(self.E, self.rhohat)
        self.timelines = [self.timeline_cls(n, pred, self.rhohat, d) for d in levels]
        self.preprocess_work = sum(tl.work for tl in self.timelines)
        self.levels = [EdgeLevel(tl, self.E) for tl in self.timelines]

    def _advance(self, t: int, request: Request) -> None:
        if t > len(self.rhohat):
            raise ValueError(f"request {t} lies beyond the prediction horizon")
        if request.is_update:
            key = flip_key(request)
            present = key not in self.E
            if present:
                self.E.add(key)
            else:
                self.E.discard(key)
            self._on_flip(key, present)
            for lv in self.levels:
                lv.flipped(key, present)
                self.work["probes"] += 1
        for lv in self.levels:
            self.work["probes"] += lv.advance(t, self.E)

    def _on_flip(self, key, present: bool) -> None:
        pass

    def choose_level(self, u: int, v: int, t: int) -> EdgeLevel | None:
        for lv in self.levels:
            self.work["probes"] += 1
            if lv.fits(u, v, t):
                return lv
        return None

    def errset_size(self) -> int:
        return min((len(lv.F) for lv in self.levels if not lv.missing), default=len(self.E))


# -- reachability -----------------------------------------------------------


def reachable(n: int, edges: Iterable[tuple[int, int]], u: int, v: int) -> bool:
    out: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        out[a].append(b)
    seen = {u}
    stack = [u]
    while stack:
        x = stack.pop()
        if x == v:
            return True
        for y in out[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return False


def oracle_answers(n: int, E0: Iterable[tuple[int, int]], rho: Sequence[Request]) -> list[bool]:
    E = set(E0)
    out = []
    for r in rho:
        if r.is_update:
            E ^= {flip_key(r)}
        else:
            out.append(reachable(n, E, *r.args))
    return out


class TCTimeline(EdgeTimeline):
    """Tables hold, per active vertex, the bitmask of vertices it reaches in (V, P_t)."""

    def _table(self, P, A, reuse):
        out = [0] * self.n
        for a, b in P:
            out[a] |= 1 << b
        table = {}
        for a in A:
            if reuse is not None and a in reuse:
                table[a] = reuse[a]
                continue
            seen = 1 << a
            frontier = seen
            while frontier:
                low = frontier & -frontier
                x = low.bit_length() - 1
                frontier ^= low
                self.work += 1
                new = out[x] & ~seen
                seen |= new
                frontier |= new
            table[a] = seen
        return table

    def reaches(self, a: int, b: int, t: int) -> bool:
        return bool(self.lookup(a, b, t) >> b & 1)


def tc_preprocess(n: int, E0, rhohat, levels) -> list[TCTimeline]:
    pred = predicted_edge_sets(E0, list(rhohat))
    return [TCTimeline(n, pred, list(rhohat), d) for d in levels]


class BaselineTC(DynamicAlgorithm):
    """No prediction: graph search per query."""

    def __init__(self, n: int, E0: Iterable[tuple[int, int]]) -> None:
        super().__init__()
        self.n = n
        self.E = set(E0)

    def _process(self, t: int, request: Request):
        if request.is_update:
            self.E ^= {flip_key(request)}
            self.work["probes"] += 1
            return None
        self.work["scanned"] += self.n
        return reachable(self.n, self.E, *request.args)


class AgnosticTC(LeveledEdgeAlgorithm):
    """Reachability with predictions of unknown delay."""

    timeline_cls = TCTimeline

    def __init__(self, n: int, E0: Iterable[tuple[int, int]], rhohat: Sequence[Request],
                 levels: Sequence[int] | None = None) -> None:
        if levels is None:
            levels = doubling_levels(2 * n)
        super().__init__(n, E0, rhohat, levels)

    def _process(self, t: int, request: Request):
        self._advance(t, request)
        if request.is_update:
            return None
        u, v = request.args
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"query ({u},{v}) outside vertex range")
        lv = self.choose_level(u, v, t)
        if lv is None:
            self.dstar = None
            self.work["scanned"] += self.n
            return reachable(self.n, self.E, u, v)
        self.dstar = lv.tl.d
        H = lv.vertices(u, v)
        self.work["scanned"] += len(H)
        tl = lv.tl
        seen = {u}
        stack = [u]
        while stack:
            x = stack.pop()
            if x == v:
                return True
            for y in H:
                if y not in seen and ((x, y) in self.E or tl.reaches(x, y, t)):
                    seen.add(y)
                    stack.append(y)
        return False
