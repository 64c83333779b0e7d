"""Shared shape of the dynamic algorithms."""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections import Counter
from typing import Any, Sequence

from .requests import Request


class DynamicAlgorithm(ABC):
    """Processes one request per call; queries return their answer.

    ``work`` holds primitive-operation counters (``probes``, ``heap_ops``,
    ``scanned``). ``dstar`` is the level used by the last query, when the
    algorithm has levels; ``None`` means no level qualified and the query
    was answered by recomputation.
    """

    def __init__(self) -> None:
        self.work: Counter = Counter()
        self.t = 0
        self.dstar: int | None = None

    def process(self, request: Request) -> Any:
        self.t += 1
        return self._process(self.t, request)

    @abstractmethod
    def _process(self, t: int, request: Request) -> Any: ...

    def errset_size(self) -> int:
        """Size of the algorithm's current error set (0 when it has none)."""
        return 0


def predicted_at(rhohat: Sequence[Request], t: int) -> Request | None:
    """The t-th predicted request (1-based) or None past the end."""
    return rhohat[t - 1] if 1 <= t <= len(rhohat) else None


def replay(alg: DynamicAlgorithm, rho: Sequence[Request]) -> list[Any]:
    """Feed every request; return the answers of the queries in order."""
    out = []
    for r in rho:
        a = alg.process(r)
        if r.is_query:
            out.append(a)
    return out
