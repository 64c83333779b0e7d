"""Prediction quality metrics and conversions between prediction models."""

from __future__ import annotations

import json
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .requests import Request, RequestSequence

Bits = Sequence[int] | str


def _bits(s: Bits) -> list[int]:
    if isinstance(s, str):
        if set(s) - {"0", "1"}:
            raise ValueError(f"not a bit-string: {s!r}")
        return [1 if ch == "1" else 0 for ch in s]
    return [1 if x else 0 for x in s]


def eh_blocks(s: Bits, t: Bits) -> list[tuple[int, int, int]]:
    """Maximal runs on which both strings are constant and differ.

    Returns ``(lo, hi, sign)`` with 1-based inclusive bounds and
    ``sign = t[hi] - s[hi]``.
    """
    a, b = _bits(s), _bits(t)
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    out = []
    n = len(a)
    lo = 0
    for i in range(1, n + 1):
        if i == n or a[i] != a[lo] or b[i] != b[lo]:
            if a[lo] != b[lo]:
                out.append((lo + 1, i, b[lo] - a[lo]))
            lo = i
    return out


def extended_hamming(s: Bits, t: Bits) -> int:
    """Number of maximal common-constant blocks on which s and t differ."""
    return len(eh_blocks(s, t))


def hamming(s: Bits, t: Bits) -> int:
    a, b = _bits(s), _bits(t)
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return sum(x != y for x, y in zip(a, b))


# -- delay ------------------------------------------------------------------


def occurrence_matching(
    rho: Sequence[Hashable], rhohat: Sequence[Hashable]
) -> list[int] | None:
    """Pair the j-th occurrence of each value in rho with its j-th one in rhohat.

    Returns ``m`` with ``rhohat[m[i]] == rho[i]`` (0-based), or None when the
    two sequences differ as multisets.
    """
    rho, rhohat = list(rho), list(rhohat)
    if len(rho) != len(rhohat):
        return None
    where: dict[Hashable, list[int]] = defaultdict(list)
    for j, x in enumerate(rhohat):
        where[x].append(j)
    used: Counter = Counter()
    m = []
    for x in rho:
        slots = where.get(x)
        if not slots or used[x] >= len(slots):
            return None
        m.append(slots[used[x]])
        used[x] += 1
    return m


def min_delay(rho: Sequence[Hashable], rhohat: Sequence[Hashable]) -> int | None:
    """Smallest d such that rho is a d-delayed permutation of rhohat."""
    m = occurrence_matching(rho, rhohat)
    if m is None:
        return None
    return max((abs(j - i) for i, j in enumerate(m)), default=0)


def total_delay(rho: Sequence[Hashable], rhohat: Sequence[Hashable]) -> int | None:
    """Smallest total displacement over permutations mapping rho to rhohat."""
    m = occurrence_matching(rho, rhohat)
    if m is None:
        return None
    return sum(abs(j - i) for i, j in enumerate(m))


BRUTE_FORCE_LIMIT = 8


def _all_matchings(rho: list, rhohat: list):
    n = len(rho)
    used = [False] * n
    m = [0] * n

    def rec(i):
        if i == n:
            yield list(m)
            return
        for j in range(n):
            if not used[j] and rhohat[j] == rho[i]:
                used[j] = True
                m[i] = j
                yield from rec(i + 1)
                used[j] = False

    yield from rec(0)


def _bruteforce(rho, rhohat, cost) -> int | None:
    rho, rhohat = list(rho), list(rhohat)
    if len(rho) > BRUTE_FORCE_LIMIT or len(rhohat) > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force refused beyond T={BRUTE_FORCE_LIMIT}")
    if len(rho) != len(rhohat):
        return None
    best = None
    for m in _all_matchings(rho, rhohat):
        c = cost(abs(j - i) for i, j in enumerate(m))
        if best is None or c < best:
            best = c
    return best


def min_delay_bruteforce(rho, rhohat) -> int | None:
    """Exhaustive minimum of the max displacement (T <= 8)."""
    return _bruteforce(rho, rhohat, lambda it: max(it, default=0))


def total_delay_bruteforce(rho, rhohat) -> int | None:
    """Exhaustive minimum of the summed displacement (T <= 8)."""
    return _bruteforce(rho, rhohat, sum)


# -- list predictions -------------------------------------------------------


@dataclass(frozen=True)
class ListPrediction:
    slots: tuple[frozenset, ...]
    bound: int

    def __post_init__(self) -> None:
        for t, s in enumerate(self.slots, 1):
            if not 1 <= len(s) <= self.bound:
                raise ValueError(f"slot {t} has {len(s)} elements, bound {self.bound}")

    def __len__(self) -> int:
        return len(self.slots)

    def slot(self, t: int) -> frozenset:
        """1-based slot access."""
        return self.slots[t - 1]

    def contains(self, rho: Sequence[Hashable]) -> bool:
        return len(rho) == len(self.slots) and all(
            x in s for x, s in zip(rho, self.slots)
        )


def delay_to_list(rhohat: Sequence[Hashable], d: int) -> ListPrediction:
    """Slot t holds every predicted request within distance d of t."""
    if d < 0:
        raise ValueError("d must be non-negative")
    items = list(rhohat)
    T = len(items)
    slots = tuple(
        frozenset(items[max(0, t - d) : min(T, t + d + 1)]) for t in range(T)
    )
    return ListPrediction(slots, 2 * d + 1)


def list_to_point_sample(lp: ListPrediction, rng: random.Random) -> RequestSequence:
    """Pick one element per slot uniformly at random."""
    out = []
    for t, s in enumerate(lp.slots, 1):
        if not s:
            raise ValueError(f"slot {t} is empty")
        out.append(rng.choice(sorted(s)))
    return RequestSequence(out)


# -- symmetric difference ---------------------------------------------------


@dataclass
class SymDiffTracker:
    """Signed multiset difference between the true and predicted prefixes.

    Positive counts are surplus in the true prefix, negative counts surplus
    in the predicted one.
    """

    counts: dict = field(default_factory=dict)
    size: int = 0

    def step(self, actual: Request, predicted: Request) -> list[tuple[Request, int, int]]:
        """Advance one step; returns ``(request, old, new)`` for changed entries."""
        if actual == predicted:
            return []
        changes = []
        for x, delta in ((actual, 1), (predicted, -1)):
            old = self.counts.get(x, 0)
            new = old + delta
            if new:
                self.counts[x] = new
            else:
                del self.counts[x]
            self.size += abs(new) - abs(old)
            changes.append((x, old, new))
        return changes

    def __len__(self) -> int:
        return self.size

    def elements(self) -> Iterable[Request]:
        return self.counts.keys()


def symdiff_step(tracker: SymDiffTracker, actual: Request, predicted: Request) -> SymDiffTracker:
    tracker.step(actual, predicted)
    return tracker


def containment_check(rho: Sequence[Hashable], rhohat: Sequence[Hashable], d: int) -> bool:
    """True iff rhohat[<=t-d] is contained in rho[<=t], itself inside rhohat[<=t+d], for all t."""
    rho, rhohat = list(rho), list(rhohat)
    if len(rho) != len(rhohat):
        raise ValueError("sequences must have equal length")
    T = len(rho)
    lower: Counter = Counter()  # count in rho prefix minus count in rhohat[<=t-d]
    upper: Counter = Counter()  # count in rhohat[<=t+d] minus count in rho prefix
    bad_lower = bad_upper = 0

    def bump(c: Counter, x, delta):
        before = c[x] < 0
        c[x] += delta
        return (c[x] < 0) - before

    for t in range(1, min(T, d) + 1):
        bad_upper += bump(upper, rhohat[t - 1], 1)
    for t in range(1, T + 1):
        x = rho[t - 1]
        bad_lower += bump(lower, x, 1)
        bad_upper += bump(upper, x, -1)
        if t - d >= 1:
            bad_lower += bump(lower, rhohat[t - d - 1], -1)
        if t + d <= T:
            bad_upper += bump(upper, rhohat[t + d - 1], 1)
        if bad_lower or bad_upper:
            return False
    return True


# -- certificates -----------------------------------------------------------


@dataclass
class DelayCertificate:
    """Witness that rho is d-delayed with k outliers relative to rhohat.

    ``I`` and ``Ihat`` are sorted 1-based positions kept from rho and rhohat;
    ``pi[a] = b`` (0-based, over the kept positions) says the a-th kept
    element of rho is the b-th kept element of rhohat.
    """

    pi: list[int]
    I: list[int]
    Ihat: list[int]
    d: int
    k: int

    def problems(self, rho: Sequence[Hashable], rhohat: Sequence[Hashable]) -> list[str]:
        rho, rhohat = list(rho), list(rhohat)
        T = len(rho)
        out = []
        if len(rhohat) != T:
            out.append("length mismatch")
        Tp = len(self.pi)
        if len(self.I) != Tp or len(self.Ihat) != Tp:
            out.append("index sets and permutation differ in size")
            return out
        if Tp < T - self.k:
            out.append(f"only {Tp} kept positions, need {T - self.k}")
        for name, idx, bound in (("I", self.I, T), ("Ihat", self.Ihat, len(rhohat))):
            if any(b <= a for a, b in zip(idx, idx[1:])):
                out.append(f"{name} not strictly increasing")
            if idx and (idx[0] < 1 or idx[-1] > bound):
                out.append(f"{name} out of range")
        if sorted(self.pi) != list(range(Tp)):
            out.append("pi is not a permutation")
            return out
        if out:
            return out
        for a, b in enumerate(self.pi):
            if abs(a - b) > self.d:
                out.append(f"displacement {abs(a - b)} at {a + 1} exceeds {self.d}")
                break
        for a, b in enumerate(self.pi):
            if rho[self.I[a] - 1] != rhohat[self.Ihat[b] - 1]:
                out.append(f"element mismatch at kept position {a + 1}")
                break
        return out

    def verify(self, rho, rhohat) -> bool:
        return not self.problems(rho, rhohat)

    def to_json(self) -> str:
        return json.dumps(
            {"pi": self.pi, "I": self.I, "Ihat": self.Ihat, "d": self.d, "k": self.k},
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str) -> "DelayCertificate":
        obj = json.loads(text)
        return cls(
            pi=[int(x) for x in obj["pi"]],
            I=[int(x) for x in obj["I"]],
            Ihat=[int(x) for x in obj["Ihat"]],
            d=int(obj["d"]),
            k=int(obj["k"]),
        )

    @classmethod
    def identity(cls, T: int) -> "DelayCertificate":
        idx = list(range(1, T + 1))
        return cls(list(range(T)), idx, list(idx), 0, 0)

    @classmethod
    def from_matching(cls, rho, rhohat) -> "DelayCertificate":
        """Outlier-free certificate at the minimal delay; rho, rhohat must be multiset-equal."""
        m = occurrence_matching(rho, rhohat)
        if m is None:
            raise ValueError("sequences are not equal as multisets")
        T = len(m)
        idx = list(range(1, T + 1))
        d = max((abs(j - i) for i, j in enumerate(m)), default=0)
        return cls(m, idx, list(idx), d, 0)
