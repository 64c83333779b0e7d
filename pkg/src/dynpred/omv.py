"""Boolean matrix-vector kernels and prediction-aided round solvers."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

from .predictions import eh_blocks

Vector = Sequence[int]


@dataclass(frozen=True)
class BoolMatrix:
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not self.rows or not self.rows[0]:
            raise ValueError("matrix must be at least 1x1")
        w = len(self.rows[0])
        if any(len(r) != w for r in self.rows):
            raise ValueError("ragged matrix")
        if any(x not in (0, 1) for r in self.rows for x in r):
            raise ValueError("entries must be 0 or 1")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "BoolMatrix":
        return cls(tuple(tuple(int(bool(x)) for x in r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "BoolMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)])

    @property
    def n1(self) -> int:
        return len(self.rows)

    @property
    def n2(self) -> int:
        return len(self.rows[0])

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def dumps(self) -> str:
        lines = [f"{self.n1} {self.n2}"]
        lines += ["".join(str(x) for x in r) for r in self.rows]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "BoolMatrix":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        try:
            n1, n2 = (int(x) for x in lines[0].split())
        except (IndexError, ValueError) as exc:
            raise ValueError("matrix header must be 'n1 n2'") from exc
        body = lines[1:]
        if len(body) != n1 or any(len(r) != n2 or set(r) - {"0", "1"} for r in body):
            raise ValueError("matrix body does not match header")
        return cls(tuple(tuple(int(c) for c in r) for r in body))


def _check_len(v: Vector, n: int) -> None:
    if len(v) != n:
        raise ValueError(f"vector length {len(v)} does not match dimension {n}")


def int_mv(M: BoolMatrix, v: Vector) -> list[int]:
    """Integer product M v."""
    _check_len(v, M.n2)
    return [sum(a * b for a, b in zip(row, v)) for row in M.rows]


def bool_mv(M: BoolMatrix, v: Vector) -> list[int]:
    """Boolean product: entry i is OR_k (M[i][k] AND v[k])."""
    return [int(x > 0) for x in int_mv(M, v)]


def oumv_round(M: BoolMatrix, u: Vector, v: Vector) -> int:
    """u^T M v over the Boolean semiring."""
    _check_len(u, M.n1)
    _check_len(v, M.n2)
    return int(
        any(u[i] and M.rows[i][j] and v[j] for i in range(M.n1) for j in range(M.n2))
    )


@dataclass(frozen=True)
class OuMvInstance:
    M: BoolMatrix
    pairs: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    def __post_init__(self) -> None:
        for u, v in self.pairs:
            _check_len(u, self.M.n1)
            _check_len(v, self.M.n2)

    def answers(self) -> list[int]:
        return [oumv_round(self.M, u, v) for u, v in self.pairs]


# -- extended Hamming round solver ------------------------------------------

Multiplier = Callable[[BoolMatrix, Vector], list[int]]


@dataclass(frozen=True)
class EHState:
    M: BoolMatrix
    predictions: tuple[tuple[int, ...], ...]
    yhat: tuple[tuple[int, ...], ...]
    prefix: tuple[tuple[int, ...], ...]  # prefix[j][b] = sum of M[j][0:b]


class EHResult(NamedTuple):
    arith: list[int]
    bool_result: list[int]
    corrections: int
    probes: int


def eh_preprocess(
    M: BoolMatrix, predictions: Sequence[Vector], multiply: Multiplier = int_mv
) -> EHState:
    """Precompute predicted products and per-row prefix sums."""
    preds = []
    for v in predictions:
        _check_len(v, M.n2)
        preds.append(tuple(int(bool(x)) for x in v))
    yhat = tuple(tuple(multiply(M, v)) for v in preds)
    prefix = []
    for row in M.rows:
        acc = [0]
        for x in row:
            acc.append(acc[-1] + x)
        prefix.append(tuple(acc))
    return EHState(M, tuple(preds), yhat, tuple(prefix))


def eh_query(state: EHState, i: int, v: Vector) -> EHResult:
    """Integer product M v for round ``i`` (0-based) using its prediction.

    Starts from the predicted product and, for every block on which the
    prediction and ``v`` are constant and differ, adds or subtracts that
    block's row sums. Probes: one per copied entry, one per scanned bit and
    two prefix lookups per row and block.
    """
    if not 0 <= i < len(state.predictions):
        raise IndexError(f"round {i} outside [0, {len(state.predictions)})")
    M = state.M
    _check_len(v, M.n2)
    vhat = state.predictions[i]
    y = list(state.yhat[i])
    probes = M.n1 + M.n2
    blocks = eh_blocks(vhat, v)
    for lo, hi, sign in blocks:
        for j, pre in enumerate(state.prefix):
            y[j] += sign * (pre[hi] - pre[lo - 1])
        probes += 2 * M.n1
    return EHResult(y, [int(x > 0) for x in y], len(blocks), probes)


# -- other round solvers ----------------------------------------------------


def sparse_partition_solve(M: BoolMatrix, queries: Sequence[Vector], t: float) -> list[list[int]]:
    """Answer each query as an OR of products restricted to column groups.

    Columns are cut into consecutive groups of size floor(n2 ** t).
    """
    if not 0 < t <= 1:
        raise ValueError("exponent must lie in (0, 1]")
    size = max(1, math.floor(M.n2**t))
    groups = [range(a, min(M.n2, a + size)) for a in range(0, M.n2, size)]
    out = []
    for v in queries:
        _check_len(v, M.n2)
        acc = [0] * M.n1
        for g in groups:
            part = [0] * M.n2
            for k in g:
                part[k] = v[k]
            acc = [a | b for a, b in zip(acc, bool_mv(M, part))]
        out.append(acc)
    return out


STAR = "*"


def bit_accurate_solve(
    M: BoolMatrix,
    partials: Sequence[Sequence],
    online_fill: Sequence[Vector],
    work: Counter | None = None,
) -> list[list[int]]:
    """Rounds whose vectors are partly known in advance.

    ``partials`` entries are 0, 1 or ``"*"``. The products of the known
    1-bits are computed up front; each round only adds the columns of the
    starred positions that the online vector sets to 1.
    """
    if len(partials) != len(online_fill):
        raise ValueError("one fill per partial vector required")
    pre = []
    for p in partials:
        _check_len(p, M.n2)
        if any(x not in (0, 1, STAR) for x in p):
            raise ValueError("partial entries must be 0, 1 or '*'")
        pre.append(int_mv(M, [1 if x == 1 else 0 for x in p]))
    out = []
    for p, v, base in zip(partials, online_fill, pre):
        _check_len(v, M.n2)
        stars = []
        for k, (x, y) in enumerate(zip(p, v)):
            if x == STAR:
                stars.append(k)
            elif x != y:
                raise ValueError(f"fill contradicts fixed bit at position {k}")
        y = list(base)
        for k in stars:
            if v[k]:
                for i in range(M.n1):
                    y[i] += M.rows[i][k]
        if work is not None:
            work["probes"] += M.n1 * len(stars) + M.n1
        out.append([int(x > 0) for x in y])
    return out
