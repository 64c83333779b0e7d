"""Running several list-prediction algorithms side by side.

Each copy is built for a different delay guess d in {0, 1, 2, 4, ...}.
Copies are advanced one work unit at a time; the scheduler pauses copies
that have burned far more work than the copy furthest ahead and spawns the
next guess once some copy has spent ``T * d`` units.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Generator, Iterable, Sequence

from .predictions import ListPrediction, delay_to_list
from .requests import Request

PAUSE_FACTOR = 2


class ProtocolError(RuntimeError):
    """Raised when no copy can ever answer a query."""


class ResumableAlgorithm(ABC):
    """An algorithm that can be advanced in bounded slices of work."""

    @abstractmethod
    def feed(self, request: Request) -> None: ...

    @abstractmethod
    def step(self, budget: int) -> bool:
        """Spend up to ``budget`` units; True once every fed request is processed."""

    @abstractmethod
    def answer_ready(self, t: int) -> bool: ...

    @abstractmethod
    def answer(self, t: int) -> Any: ...

    @abstractmethod
    def work_spent(self) -> int: ...

    @abstractmethod
    def completed(self) -> int:
        """Number of requests fully processed."""


_WAIT = object()


class GeneratorAlgorithm(ResumableAlgorithm):
    """Adapter turning a generator into a resumable algorithm.

    Subclasses implement ``run()``, which yields ``None`` once per unit of
    work and obtains requests through ``self.next_request()``.
    """

    def __init__(self) -> None:
        self._inbox: list[Request] = []
        self._answers: dict[int, Any] = {}
        self._work = 0
        self._done = 0
        self._gen = self.run()

    def feed(self, request: Request) -> None:
        self._inbox.append(request)

    def next_request(self) -> Generator[Any, None, Request]:
        while len(self._inbox) <= self._done:
            yield _WAIT
        return self._inbox[self._done]

    def finish(self, answer: Any = None) -> None:
        """Mark the current request processed."""
        self._done += 1
        if self._inbox[self._done - 1].is_query:
            self._answers[self._done] = answer

    def step(self, budget: int) -> bool:
        for _ in range(budget):
            try:
                token = next(self._gen)
            except StopIteration:
                return True
            if token is _WAIT:
                return True
            self._work += 1
        return self._done >= len(self._inbox)

    def answer_ready(self, t: int) -> bool:
        return self._done >= t

    def answer(self, t: int) -> Any:
        return self._answers.get(t)

    def work_spent(self) -> int:
        return self._work

    def completed(self) -> int:
        return self._done

    @abstractmethod
    def run(self) -> Generator[Any, None, None]: ...


class ListGuidedSolver(GeneratorAlgorithm):
    """Cost model of an algorithm that precomputes along a list prediction.

    Preprocessing reads every slot (one unit per element). A request found
    in its slot costs one unit per slot element plus one; a request missing
    from its slot costs ``miss_cost`` extra units (a full recomputation).
    Answers always come from the exact ``solver``.
    """

    def __init__(self, lp: ListPrediction, solver: Callable[[Request], Any], miss_cost: int) -> None:
        self.lp = lp
        self.solver = solver
        self.miss_cost = miss_cost
        self.misses = 0
        super().__init__()

    def run(self):
        for s in self.lp.slots:
            for _ in s:
                yield None
        T = len(self.lp.slots)
        while True:
            r = yield from self.next_request()
            t = self.completed() + 1
            slot = self.lp.slots[t - 1] if t <= T else frozenset()
            for _ in slot:
                yield None
            if r not in slot:
                self.misses += 1
                for _ in range(self.miss_cost):
                    yield None
            yield None
            self.finish(self.solver(r))


def delay_levels(T: int) -> list[int]:
    """Guesses 0, 1, 2, 4, ... up to the first power of two >= T."""
    levels = [0, 1]
    while levels[-1] < T:
        levels.append(levels[-1] * 2)
    return levels


@dataclass
class SimulationResult:
    answers: dict[int, Any]
    total_work: int
    copy_work: dict[int, int]
    answered_by: dict[int, int] = field(default_factory=dict)


def run_single(
    factory: Callable[[ListPrediction], ResumableAlgorithm],
    rhohat: Sequence[Request],
    online: Sequence[Request],
    d: int,
) -> tuple[dict[int, Any], int]:
    """Run one copy alone to completion; returns (answers, work)."""
    alg = factory(delay_to_list(rhohat, d))
    answers = {}
    for t, r in enumerate(online, 1):
        alg.feed(r)
        while not alg.step(1 << 30):
            pass
        if r.is_query:
            answers[t] = alg.answer(t)
    return answers, alg.work_spent()


def parallel_simulation(
    factory: Callable[[ListPrediction], ResumableAlgorithm],
    rhohat: Sequence[Request],
    online: Iterable[Request],
) -> SimulationResult:
    """Answer ``online`` by interleaving copies for doubling delay guesses."""
    T = len(rhohat)
    levels = delay_levels(T)
    copies: dict[int, ResumableAlgorithm] = {}
    history: list[Request] = []
    answers: dict[int, Any] = {}
    answered_by: dict[int, int] = {}

    def spawn(d: int) -> None:
        alg = factory(delay_to_list(rhohat, d))
        for r in history:
            alg.feed(r)
        copies[d] = alg

    spawn(levels[0])
    nxt = 1
    for t, r in enumerate(online, 1):
        history.append(r)
        for alg in copies.values():
            alg.feed(r)
        while not any(a.answer_ready(t) for a in copies.values()):
            before = sum(a.work_spent() + a.completed() for a in copies.values())
            leader = max(copies.values(), key=lambda a: (a.completed(), -a.work_spent()))
            cap = PAUSE_FACTOR * max(1, leader.work_spent())
            for alg in list(copies.values()):
                if alg is leader or alg.work_spent() <= cap:
                    alg.step(1)
            if nxt < len(levels) and max(a.work_spent() for a in copies.values()) >= T * levels[nxt]:
                spawn(levels[nxt])
                nxt += 1
            elif sum(a.work_spent() + a.completed() for a in copies.values()) == before:
                raise ProtocolError(f"no copy can answer request {t}")
        if r.is_query:
            ready = [(d, a) for d, a in copies.items() if a.answer_ready(t)]
            d, best = max(ready, key=lambda p: (p[1].completed(), -p[1].work_spent()))
            answers[t] = best.answer(t)
            answered_by[t] = d
    copy_work = {d: a.work_spent() for d, a in copies.items()}
    return SimulationResult(answers, sum(copy_work.values()), copy_work, answered_by)
