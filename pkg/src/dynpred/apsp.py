"""Exact shortest-path distances in a weighted digraph under edge flips.

Edges are (u, v, w) triples; a flip toggles one triple, so parallel edges
with different weights may coexist and the lighter one counts.
"""

from __future__ import annotations

import heapq
import math
from collections import defaultdict
from typing import Iterable, Sequence

from .base import DynamicAlgorithm
from .levels import doubling_levels
from .reach_tc import EdgeTimeline, LeveledEdgeAlgorithm, flip_key, predicted_edge_sets
from .requests import Request, query, update

WEDGE = "wedge"
INF = math.inf

Triple = tuple[int, int, int]


def wedge_flip(u: int, v: int, w: int) -> Request:
    if u == v:
        raise ValueError(f"self-loop at {u}")
    if w < 0:
        raise ValueError("negative weight")
    return update(WEDGE, u, v, w)


def dist_query(u: int, v: int) -> Request:
    return query("query", u, v)


def format_distance(x) -> str:
    return "inf" if x == INF else str(int(x))


def _adjacency(n: int, edges: Iterable[Triple]) -> list[dict[int, int]]:
    out: list[dict[int, int]] = [{} for _ in range(n)]
    for a, b, w in edges:
        if w < out[a].get(b, INF):
            out[a][b] = w
    return out


def dijkstra(adj: Sequence[dict[int, int]], src: int) -> dict[int, int]:
    """Distances from src; unreachable vertices are absent."""
    dist = {src: 0}
    heap = [(0, src)]
    while heap:
        d, x = heapq.heappop(heap)
        if d > dist[x]:
            continue
        for y, w in adj[x].items():
            nd = d + w
            if nd < dist.get(y, INF):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return dist


def shortest_distance(n: int, edges: Iterable[Triple], u: int, v: int):
    return dijkstra(_adjacency(n, edges), u).get(v, INF)


def bellman_ford(n: int, edges: Iterable[Triple], u: int) -> list:
    """Independent distance oracle."""
    edges = list(edges)
    dist = [INF] * n
    dist[u] = 0
    for _ in range(n - 1):
        changed = False
        for a, b, w in edges:
            if dist[a] + w < dist[b]:
                dist[b] = dist[a] + w
                changed = True
        if not changed:
            break
    return dist


def _check_weights(edges: Iterable[Triple]) -> set[Triple]:
    out = set()
    for e in edges:
        if e[2] < 0:
            raise ValueError(f"negative weight on {e}")
        out.add(tuple(e))
    return out


def oracle_answers(n: int, E0: Iterable[Triple], rho: Sequence[Request]) -> list:
    E = _check_weights(E0)
    out = []
    for r in rho:
        if r.is_update:
            E ^= {flip_key(r)}
        else:
            u, v = r.args
            out.append(bellman_ford(n, E, u)[v])
    return out


class ApspTimeline(EdgeTimeline):
    """Tables hold, per active vertex, its distance map in (V, P_t)."""

    def _table(self, P, A, reuse):
        adj = None
        table = {}
        for a in A:
            if reuse is not None and a in reuse:
                table[a] = reuse[a]
                continue
            if adj is None:
                adj = _adjacency(self.n, P)
            dist = dijkstra(adj, a)
            self.work += len(dist)
            table[a] = dist
        return table

    def distance(self, a: int, b: int, t: int):
        return self.lookup(a, b, t).get(b, INF)


def apsp_preprocess(n: int, E0, rhohat, levels) -> list[ApspTimeline]:
    pred = predicted_edge_sets(_check_weights(E0), list(rhohat))
    return [ApspTimeline(n, pred, list(rhohat), d) for d in levels]


class BaselineApsp(DynamicAlgorithm):
    """No prediction: Dijkstra per query."""

    def __init__(self, n: int, E0: Iterable[Triple]) -> None:
        super().__init__()
        self.n = n
        self.E = _check_weights(E0)

    def _process(self, t: int, request: Request):
        if request.is_update:
            self.E ^= {flip_key(request)}
            self.work["probes"] += 1
            return None
        self.work["scanned"] += self.n
        return shortest_distance(self.n, self.E, *request.args)


class AgnosticApsp(LeveledEdgeAlgorithm):
    """Distances with predictions of unknown delay."""

    timeline_cls = ApspTimeline

    def __init__(self, n: int, E0: Iterable[Triple], rhohat: Sequence[Request],
                 levels: Sequence[int] | None = None) -> None:
        if levels is None:
            levels = doubling_levels(2 * n)
        E0 = _check_weights(E0)
        for r in rhohat:
            if r.is_update and r.args[2] < 0:
                raise ValueError(f"negative weight in {r}")
        self._weights: dict[tuple[int, int], set[int]] = defaultdict(set)
        for a, b, w in E0:
            self._weights[a, b].add(w)
        super().__init__(n, E0, rhohat, levels)

    def _on_flip(self, key, present: bool) -> None:
        a, b, w = key
        if w < 0:
            raise ValueError(f"negative weight on {key}")
        if present:
            self._weights[a, b].add(w)
        else:
            self._weights[a, b].discard(w)

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
            return shortest_distance(self.n, self.E, u, v)
        self.dstar = lv.tl.d
        tl = lv.tl
        H = sorted(lv.vertices(u, v))
        self.work["scanned"] += len(H)
        adj: list[dict[int, int]] = [{} for _ in range(self.n)]
        for a in H:
            for b in H:
                if a == b:
                    continue
                ws = self._weights.get((a, b))
                w = min(ws) if ws else INF
                w = min(w, tl.distance(a, b, t))
                if w < INF:
                    adj[a][b] = w
        return dijkstra(adj, u).get(v, INF)
