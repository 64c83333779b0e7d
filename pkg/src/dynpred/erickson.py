"""Maximum entry of an integer matrix under whole-row and whole-column increments.

Entry (i, j) after t requests is ``M0[i][j] + I_R[i] + I_C[j]``. Payloads
are ``row i``, ``col j`` and ``query`` with 0-based indices.
"""

from __future__ import annotations

from typing import Literal, Sequence

import numpy as np

from .base import DynamicAlgorithm, predicted_at
from .heap import IndexedMaxHeap
from .levels import doubling_levels, window
from .requests import Request, query, update

ROW, COL = "row", "col"
NEG_INF = float("-inf")


def row_incr(i: int) -> Request:
    return update(ROW, i)


def col_incr(j: int) -> Request:
    return update(COL, j)


def max_query() -> Request:
    return query("query")


def load_matrix(text: str) -> list[list[int]]:
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    try:
        n = int(lines[0][0])
        rows = [[int(x) for x in ln] for ln in lines[1:]]
    except (IndexError, ValueError) as exc:
        raise ValueError("matrix file must be 'n' then n rows of integers") from exc
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError("matrix body does not match its size line")
    return rows


def dump_matrix(M: Sequence[Sequence[int]]) -> str:
    return f"{len(M)}\n" + "".join(" ".join(str(x) for x in r) + "\n" for r in M)


def _check_square(M0: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(M0)
    if n < 1 or any(len(r) != n for r in M0):
        raise ValueError("need a non-empty square matrix")
    return [list(map(int, r)) for r in M0]


class EricksonBase:
    """Initial matrix plus per-row and per-column increment counters."""

    def __init__(self, M0: Sequence[Sequence[int]]) -> None:
        self.M0 = _check_square(M0)
        self.n = len(self.M0)
        self.IR = [0] * self.n
        self.IC = [0] * self.n

    def apply(self, r: Request) -> None:
        if not r.is_update:
            return
        (x,) = r.args
        if not 0 <= x < self.n:
            raise IndexError(f"index {x} outside [0, {self.n})")
        if r.tag == ROW:
            self.IR[x] += 1
        elif r.tag == COL:
            self.IC[x] += 1
        else:
            raise ValueError(f"unexpected update {r}")

    def entry(self, i: int, j: int) -> int:
        return self.M0[i][j] + self.IR[i] + self.IC[j]


def erickson_oracle(base: EricksonBase) -> tuple[int, tuple[int, int]]:
    """Full scan; ties go to the lexicographically smallest (i, j), 0-based."""
    best, arg = None, (0, 0)
    for i in range(base.n):
        for j in range(base.n):
            v = base.entry(i, j)
            if best is None or v > best:
                best, arg = v, (i, j)
    return best, arg


def oracle_answers(M0, rho: Sequence[Request]) -> list[int]:
    base = EricksonBase(M0)
    out = []
    for r in rho:
        if r.is_query:
            out.append(erickson_oracle(base)[0])
        else:
            base.apply(r)
    return out


class BaselineErickson(DynamicAlgorithm):
    """No prediction: full scan per query."""

    def __init__(self, M0) -> None:
        super().__init__()
        self.base = EricksonBase(M0)

    def _process(self, t: int, request: Request):
        if request.is_update:
            self.work["probes"] += 1
            self.base.apply(request)
            return None
        self.work["scanned"] += self.base.n**2
        return erickson_oracle(self.base)[0]


# -- predicted trajectory and heap snapshots --------------------------------


class PredictedMatrix:
    """Row/column counts of every predicted prefix."""

    def __init__(self, M0: list[list[int]], rhohat: Sequence[Request]) -> None:
        self.M0 = M0
        self.n = n = len(M0)
        self.rhohat = list(rhohat)
        base = EricksonBase(M0)
        self.rows = [tuple(base.IR)]
        self.cols = [tuple(base.IC)]
        for r in self.rhohat:
            base.apply(r)
            self.rows.append(tuple(base.IR))
            self.cols.append(tuple(base.IC))
        self.T = len(self.rhohat)
        self._M0 = np.array(M0, dtype=np.int64).reshape(n, n)

    def entry(self, t: int, i: int, j: int) -> int:
        return self.M0[i][j] + self.rows[t][i] + self.cols[t][j]

    def row_values(self, t: int, i: int) -> list[int]:
        ri, cols, m = self.rows[t][i], self.cols[t], self.M0[i]
        return [m[j] + ri + cols[j] for j in range(self.n)]

    def col_values(self, t: int, j: int) -> list[int]:
        cj, rows, M0 = self.cols[t][j], self.rows[t], self.M0
        return [M0[i][j] + rows[i] + cj for i in range(self.n)]

    def array(self, t: int) -> np.ndarray:
        return self._M0 + np.array(self.rows[t])[:, None] + np.array(self.cols[t])[None, :]


def _sorted_heap(values: list[int]) -> IndexedMaxHeap:
    """A descending order is already a valid max-heap."""
    h = IndexedMaxHeap.__new__(IndexedMaxHeap)
    h.val = values
    h.heap = sorted(range(len(values)), key=lambda k: (-values[k], k))
    pos = [0] * len(values)
    for p, k in enumerate(h.heap):
        pos[k] = p
    h.pos = pos
    h.ops = 0
    return h


class HeapStore:
    """Row heaps H_R(i, t) and column heaps H_C(j, t) over the predicted matrix.

    ``full`` builds all of them up front; ``lazy`` builds a heap the first
    time it is requested. Each heap is corrected at most at its own step.
    """

    def __init__(self, pm: PredictedMatrix, mode: Literal["full", "lazy"] = "full") -> None:
        if mode not in ("full", "lazy"):
            raise ValueError(f"unknown heap mode {mode!r}")
        self.pm = pm
        self.mode = mode
        self._rows: dict[tuple[int, int], IndexedMaxHeap] = {}
        self._cols: dict[tuple[int, int], IndexedMaxHeap] = {}
        if mode == "full":
            for t in range(1, pm.T + 1):
                for x in range(pm.n):
                    self._rows[t, x] = _sorted_heap(pm.row_values(t, x))
                    self._cols[t, x] = _sorted_heap(pm.col_values(t, x))

    def row(self, t: int, i: int) -> IndexedMaxHeap:
        h = self._rows.get((t, i))
        if h is None:
            h = self._rows[t, i] = _sorted_heap(self.pm.row_values(t, i))
        return h

    def col(self, t: int, j: int) -> IndexedMaxHeap:
        h = self._cols.get((t, j))
        if h is None:
            h = self._cols[t, j] = _sorted_heap(self.pm.col_values(t, j))
        return h

    def discard_before(self, t: int) -> None:
        """Heaps of earlier steps are never read again."""
        if self.mode == "lazy":
            for store in (self._rows, self._cols):
                for key in [k for k in store if k[0] < t]:
                    del store[key]


class ErrorLedger:
    """Signed row/column differences between the true and predicted prefixes."""

    def __init__(self) -> None:
        self.rdiff: dict[int, int] = {}
        self.cdiff: dict[int, int] = {}

    @staticmethod
    def _bump(diff: dict[int, int], x: int, delta: int) -> None:
        v = diff.get(x, 0) + delta
        if v:
            diff[x] = v
        else:
            diff.pop(x, None)

    def step(self, actual: Request, predicted: Request | None) -> None:
        for r, delta in ((actual, 1), (predicted, -1)):
            if r is not None and r.is_update:
                self._bump(self.rdiff if r.tag == ROW else self.cdiff, r.args[0], delta)

    @property
    def E_R(self) -> set[int]:
        return set(self.rdiff)

    @property
    def E_C(self) -> set[int]:
        return set(self.cdiff)

    def size(self) -> int:
        return len(self.rdiff) + len(self.cdiff)


class _PredictedErickson(DynamicAlgorithm):
    def __init__(self, M0, rhohat: Sequence[Request], mode: str = "full") -> None:
        super().__init__()
        self.base = EricksonBase(M0)
        self.n = self.base.n
        for r in rhohat:
            if r.is_update and not 0 <= r.args[0] < self.n:
                raise IndexError(f"predicted index {r.args[0]} outside [0, {self.n})")
        self.pm = PredictedMatrix(self.base.M0, rhohat)
        self.heaps = HeapStore(self.pm, mode)
        self.ledger = ErrorLedger()

    def _step(self, t: int, request: Request) -> Request | None:
        if t > self.pm.T:
            raise ValueError(f"request {t} lies beyond the prediction horizon")
        predicted = predicted_at(self.pm.rhohat, t)
        self.base.apply(request)
        self.ledger.step(request, predicted)
        self.heaps.discard_before(t)
        self.work["probes"] += 2
        return predicted

    def errset_size(self) -> int:
        return self.ledger.size()


class EricksonQopt(_PredictedErickson):
    """Tracks the maximum on every update; queries return it directly."""

    def __init__(self, M0, rhohat: Sequence[Request], mode: str = "full") -> None:
        super().__init__(M0, rhohat, mode)
        self.c, (self.istar, self.jstar) = erickson_oracle(self.base)
        self.last_corrections = 0

    def _process(self, t: int, request: Request):
        self._step(t, request)
        if request.is_query:
            self.work["probes"] += 1
            return self.c
        (x,) = request.args
        led = self.ledger
        self.last_corrections = 0
        if request.tag == ROW:
            if x == self.istar:
                self.c += 1
                return None
            h = self.heaps.row(t, x)
            for j, cd in led.cdiff.items():
                h.update(j, self.pm.entry(t, x, j) + cd)
            self.last_corrections = len(led.cdiff)
            value, j = h.top()
            value += led.rdiff.get(x, 0)
            arg = (x, j)
        else:
            if x == self.jstar:
                self.c += 1
                return None
            h = self.heaps.col(t, x)
            for i, rd in led.rdiff.items():
                h.update(i, self.pm.entry(t, i, x) + rd)
            self.last_corrections = len(led.rdiff)
            value, i = h.top()
            value += led.cdiff.get(x, 0)
            arg = (i, x)
        self.work["heap_ops"] += h.ops + 1
        h.ops = 0
        if value > self.c:
            self.c = value
            self.istar, self.jstar = arg
        return None


class _UoptLevel:
    """Window counters of one level: how far the true counts sit inside
    the predicted counts at t-d and t+d."""

    __slots__ = ("d", "lo", "hi", "bad", "above")

    def __init__(self, d: int, n: int, pm: PredictedMatrix) -> None:
        self.d = d
        ahead = min(pm.T, d)
        # lo = true - predicted(t-d), hi = predicted(t+d) - true; index 0 rows, 1 columns
        self.lo = ([0] * n, [0] * n)
        self.hi = (list(pm.rows[ahead]), list(pm.cols[ahead]))
        self.bad = [0, 0]
        self.above: tuple[set[int], set[int]] = (set(), set())

    def _shift(self, axis: int, x: int, dlo: int, dhi: int) -> None:
        lo, hi = self.lo[axis], self.hi[axis]
        was_bad = lo[x] < 0 or hi[x] < 0
        lo[x] += dlo
        hi[x] += dhi
        self.bad[axis] += (lo[x] < 0 or hi[x] < 0) - was_bad
        if lo[x] > 0:
            self.above[axis].add(x)
        else:
            self.above[axis].discard(x)

    def step(self, t: int, actual: Request, pm: PredictedMatrix) -> int:
        ops = 0
        if actual.is_update:
            self._shift(actual.tag == COL, actual.args[0], 1, -1)
            ops += 1
        if t - self.d >= 1:
            r = pm.rhohat[t - self.d - 1]
            if r.is_update:
                self._shift(r.tag == COL, r.args[0], -1, 0)
                ops += 1
        if t + self.d <= pm.T:
            r = pm.rhohat[t + self.d - 1]
            if r.is_update:
                self._shift(r.tag == COL, r.args[0], 0, 1)
                ops += 1
        return ops

    @property
    def full(self) -> bool:
        return self.bad[0] == 0 and self.bad[1] == 0


class EricksonUopt(_PredictedErickson):
    """Cheap updates; a query corrects only rows and columns the prediction
    could have gotten wrong at the smallest consistent level."""

    def __init__(self, M0, rhohat: Sequence[Request], mode: str = "full",
                 levels: Sequence[int] | None = None) -> None:
        super().__init__(M0, rhohat, mode)
        n, T = self.n, self.pm.T
        self.level_values = list(levels) if levels is not None else doubling_levels(n)
        self.levels = [_UoptLevel(d, n, self.pm) for d in self.level_values]
        # Non-permanent rows/columns and the permanent-block maximum per (t, level).
        self.loose_rows: list[list[list[int]]] = [[] for _ in self.level_values]
        self.loose_cols: list[list[list[int]]] = [[] for _ in self.level_values]
        self.phat: list[list[float]] = [[] for _ in self.level_values]
        for li, d in enumerate(self.level_values):
            for t in range(T + 1):
                rows, cols = set(), set()
                lo, hi = window(t, d, T)
                for p in range(lo, hi + 1):
                    r = self.pm.rhohat[p - 1]
                    if r.is_update:
                        (rows if r.tag == ROW else cols).add(r.args[0])
                self.loose_rows[li].append(sorted(rows))
                self.loose_cols[li].append(sorted(cols))
                if len(rows) == n or len(cols) == n:
                    self.phat[li].append(NEG_INF)
                    continue
                A = self.pm.array(t)
                keep_r = np.ones(n, bool)
                keep_r[list(rows)] = False
                keep_c = np.ones(n, bool)
                keep_c[list(cols)] = False
                self.phat[li].append(int(A[np.ix_(keep_r, keep_c)].max()))
        self.dstar_now = self._current_dstar()

    def _current_dstar(self) -> int | None:
        for li, lv in enumerate(self.levels):
            if lv.full:
                return li
        return None

    def _process(self, t: int, request: Request):
        self._step(t, request)
        for lv in self.levels:
            self.work["probes"] += lv.step(t, request, self.pm)
        self.dstar_now = self._current_dstar()
        if request.is_update:
            return None
        return self.query(t)

    def query(self, t: int) -> int:
        li = self.dstar_now
        if li is None:
            self.dstar = None
            self.work["scanned"] += self.n * self.n
            return erickson_oracle(self.base)[0]
        self.dstar = self.level_values[li]
        rows, cols = self.loose_rows[li][t], self.loose_cols[li][t]
        led = self.ledger
        if not (led.rdiff.keys() <= set(rows) and led.cdiff.keys() <= set(cols)):
            raise RuntimeError(f"prediction error on a permanent line at step {t}")
        c = self.phat[li][t]
        self.work["scanned"] += len(rows) * len(cols)
        hr = [self.heaps.row(t, i) for i in rows]
        hc = [self.heaps.col(t, j) for j in cols]
        for i, h in zip(rows, hr):
            for j, g in zip(cols, hc):
                m = self.pm.entry(t, i, j)
                h.update(j, m + led.cdiff.get(j, 0))
                g.update(i, m + led.rdiff.get(i, 0))
        for i, h in zip(rows, hr):
            c = max(c, led.rdiff.get(i, 0) + h.top()[0])
        for j, g in zip(cols, hc):
            c = max(c, led.cdiff.get(j, 0) + g.top()[0])
        for h in hr + hc:
            self.work["heap_ops"] += h.ops + 1
            h.ops = 0
        return int(c)
