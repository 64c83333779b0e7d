"""Adversarial and randomized request-sequence generators.

Includes certified random perturbations for testing the prediction-aided
algorithms, the block padding that turns an OuMv reduction into a
sequence with provably small delay, list predictions that hide the
reduction behind junk updates, and query amplification.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .omv import OuMvInstance
from .predictions import DelayCertificate, ListPrediction
from .requests import Request, RequestSequence
from .striangle import FlipGraph, edge_flip, oracle_answers, triangle_query

Replacer = Callable[[random.Random, Request], "Request | None"]


@dataclass
class WorkloadPair:
    """An initial instance with a predicted and a realized request sequence."""

    problem: str
    instance: Any
    rhohat: RequestSequence
    rho: RequestSequence
    certificate: DelayCertificate
    answers: list = field(default_factory=list)


# -- certified perturbations ------------------------------------------------


def _perturb_once(
    rhohat: Sequence[Request], d: int, k: int, rng: random.Random, replace: Replacer | None
) -> tuple[RequestSequence, DelayCertificate]:
    items = list(rhohat)
    T = len(items)
    # random tie-breaks let neighbours at distance exactly d trade places
    keys = [(t + rng.randint(0, d), rng.random()) for t in range(T)]
    order = sorted(range(T), key=keys.__getitem__)
    rho = [items[i] for i in order]
    outliers: set[int] = set()
    candidates = list(range(T))
    rng.shuffle(candidates)
    for p in candidates:
        if len(outliers) >= k:
            break
        if replace is None:
            new = rng.choice(items)
        else:
            new = replace(rng, rho[p])
            if new is None:
                continue
        rho[p] = new
        outliers.add(p)
    kept = [p for p in range(T) if p not in outliers]
    kept_hat = sorted(order[p] for p in kept)
    rank_hat = {q: b for b, q in enumerate(kept_hat)}
    pi = [rank_hat[order[p]] for p in kept]
    cert = DelayCertificate(pi, [p + 1 for p in kept], [q + 1 for q in kept_hat], d, k)
    return RequestSequence(rho), cert


def perturb(
    rhohat: Sequence[Request],
    d: int,
    k: int,
    rng: random.Random,
    *,
    replace: Replacer | None = None,
    valid: Callable[[RequestSequence], bool] | None = None,
    attempts: int = 200,
) -> tuple[RequestSequence, DelayCertificate]:
    """Random sequence within delay d of ``rhohat`` with up to k replaced requests.

    Every element is moved by sorting on ``t + r_t`` with ``r_t`` uniform in
    [0, d] and random tie-breaks, which never displaces anything by more
    than d. Then up to k
    positions are overwritten: by ``replace(rng, old)`` when given (None
    means the position cannot be replaced), else by a random predicted
    request. When ``valid`` is given the draw is repeated until it accepts.
    """
    if d < 0 or k < 0 or k > len(rhohat):
        raise ValueError("need d >= 0 and 0 <= k <= T")
    for _ in range(attempts):
        rho, cert = _perturb_once(rhohat, d, k, rng, replace)
        if valid is None or valid(rho):
            return rho, cert
    raise RuntimeError(f"no valid perturbation found in {attempts} attempts")


# -- padded reductions ------------------------------------------------------


@dataclass(frozen=True)
class UniversalBlock:
    """Template block listing every request a round may use, in a fixed order."""

    B: tuple[Request, ...]
    ord: dict

    def __post_init__(self) -> None:
        for x in self.B:
            if x.is_update and self.ord.get(x, 0) < 1:
                raise ValueError(f"update {x} needs a cyclic order >= 1")

    @property
    def M(self) -> Counter:
        return Counter(self.B)

    @property
    def u(self) -> int:
        return sum(1 for x in self.B if x.is_update)

    @property
    def q(self) -> int:
        return sum(1 for x in self.B if x.is_query)

    def distinct(self) -> list[Request]:
        return list(dict.fromkeys(self.B))


def universal_prediction(block: UniversalBlock, n3: int) -> RequestSequence:
    """n3 back-to-back copies of the block."""
    return RequestSequence(list(block.B) * n3)


def pad_blocks(
    block: UniversalBlock, per_round: Sequence[Sequence[Request]]
) -> tuple[list[list[Request]], list[Request]]:
    """Extended rounds B*_1..B*_n3 and the leftover tail of the universal sequence.

    After round k every update x has been issued N times with
    ``k*M(x) - ord(x) < N <= k*M(x)`` and every query exactly ``k*M(q)``
    times. Padding copies of an update come in multiples of its cyclic
    order, so they leave the data unchanged.
    """
    M = block.M
    order = block.distinct()
    N: Counter = Counter()
    blocks: list[list[Request]] = []
    for k, sub in enumerate(per_round, 1):
        for x, c in Counter(sub).items():
            if c > M[x]:
                raise ValueError(f"round {k} uses {x} {c} times, block allows {M[x]}")
        out = list(sub)
        N.update(sub)
        for x in order:
            if x.is_update:
                o = block.ord[x]
                if N[x] <= k * M[x] - o:
                    extra = (k * M[x] - N[x]) // o * o
                    out.extend([x] * extra)
                    N[x] += extra
        for x in order:
            if x.is_query and N[x] < k * M[x]:
                out.extend([x] * (k * M[x] - N[x]))
                N[x] = k * M[x]
        blocks.append(out)
    n3 = len(per_round)
    universal = list(block.B) * n3
    left = {x: n3 * M[x] - N[x] for x in order}
    tail = []
    for i in range(len(universal) - 1, -1, -1):
        x = universal[i]
        if left[x] > 0:
            tail.append(i)
            left[x] -= 1
    return blocks, [universal[i] for i in sorted(tail)]


def pad_locally_reducible(
    block: UniversalBlock, per_round: Sequence[Sequence[Request]]
) -> RequestSequence:
    """Padded rounds followed by whatever the universal sequence still holds."""
    blocks, tail = pad_blocks(block, per_round)
    return RequestSequence([r for b in blocks for r in b] + tail)


def prefix_counts(rho: Sequence[Request], block_ends: Sequence[int]) -> list[Counter]:
    """Request counts of each prefix ending at the given lengths."""
    out, c, pos = [], Counter(), 0
    items = list(rho)
    for end in block_ends:
        c.update(items[pos:end])
        pos = end
        out.append(Counter(c))
    return out


# -- the triangle-through-s reduction ----------------------------------------


def _oumv_graph(inst: OuMvInstance) -> FlipGraph:
    """Vertex 0 is s, rows are 1..n1, columns n1+1..n1+n2."""
    M = inst.M
    edges = [
        (1 + i, 1 + M.n1 + j) for i in range(M.n1) for j in range(M.n2) if M.rows[i][j]
    ]
    return FlipGraph(1 + M.n1 + M.n2, edges, s=0)


def striangle_block(inst: OuMvInstance) -> UniversalBlock:
    n1, n2 = inst.M.n1, inst.M.n2
    B = [edge_flip(0, 1 + i) for i in range(n1)]
    B += [edge_flip(0, 1 + n1 + j) for j in range(n2)]
    B.append(triangle_query())
    return UniversalBlock(tuple(B), {x: 2 for x in B if x.is_update})


def striangle_rounds(inst: OuMvInstance) -> list[list[Request]]:
    """Per-round flips that set the s-edges to (u_k, v_k), then one query."""
    n1 = inst.M.n1
    state = [0] * (inst.M.n1 + inst.M.n2)
    rounds = []
    for u, v in inst.pairs:
        sub = []
        for pos, bit in enumerate(list(u) + list(v)):
            if state[pos] != bit:
                sub.append(edge_flip(0, 1 + pos))
                state[pos] = bit
        sub.append(triangle_query())
        rounds.append(sub)
    return rounds


def gen_striangle_oumv(inst: OuMvInstance) -> WorkloadPair:
    """Plain reduction: a round's answer is positive iff u_k^T M v_k = 1.

    No prediction is involved; the pair carries the sequence as its own
    (perfect) prediction.
    """
    G0 = _oumv_graph(inst)
    rho = RequestSequence(r for sub in striangle_rounds(inst) for r in sub)
    return WorkloadPair(
        "striangle", G0, rho, rho, DelayCertificate.identity(len(rho)), oracle_answers(G0, rho)
    )


def striangle_oumv_padded(inst: OuMvInstance) -> WorkloadPair:
    """Padded reduction against the universal prediction."""
    G0 = _oumv_graph(inst)
    block = striangle_block(inst)
    rhohat = universal_prediction(block, len(inst.pairs))
    rho = pad_locally_reducible(block, striangle_rounds(inst))
    cert = DelayCertificate.from_matching(rho, rhohat)
    return WorkloadPair("striangle", G0, rhohat, rho, cert, oracle_answers(G0, rho))


def decode_oumv_bits(answers: Sequence[int]) -> list[int]:
    return [int(a > 0) for a in answers]


def gen_2list_striangle(inst: OuMvInstance) -> tuple[FlipGraph, ListPrediction, RequestSequence]:
    """Reduction whose every step is one of two known flips.

    Vertex 0 is s, vertex 1 the junk vertex, then rows and columns. Round k
    visits every row and column vertex x once: if the edge (s, x) must
    change it is flipped, otherwise the harmless edge (junk, x) is flipped.
    The list prediction for that step is {(s, x), (junk, x)}.
    """
    n1, n2 = inst.M.n1, inst.M.n2
    base = _oumv_graph(inst)
    G0 = FlipGraph(base.n + 1, [(u + 1, v + 1) for u, v in base.edges()], s=0)
    state = [0] * (n1 + n2)
    slots, rho = [], []
    for u, v in inst.pairs:
        for pos, bit in enumerate(list(u) + list(v)):
            x = 2 + pos
            real, junk = edge_flip(0, x), edge_flip(1, x)
            slots.append(frozenset((real, junk)))
            if state[pos] != bit:
                rho.append(real)
                state[pos] = bit
            else:
                rho.append(junk)
        q = triangle_query()
        slots.append(frozenset((q,)))
        rho.append(q)
    return G0, ListPrediction(tuple(slots), 2), RequestSequence(rho)


# -- query amplification ----------------------------------------------------


def eps_amplify(
    rho: Sequence[Request], qstar: Request, eps: float, rng: random.Random
) -> RequestSequence:
    """Hide rho among a*T copies of qstar, a = ceil(1 / (1 - eps)).

    The positions of rho's requests are a uniform random subset of the
    (a+1)*T slots, so rho remains a subsequence.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if not qstar.is_query:
        raise ValueError("the padding request must be a query")
    items = list(rho)
    T = len(items)
    a = math.ceil(1 / (1 - eps))
    total = (a + 1) * T
    keep = set(rng.sample(range(total), T))
    out, it = [], iter(items)
    for i in range(total):
        out.append(next(it) if i in keep else qstar)
    return RequestSequence(out)


def is_subsequence(small: Sequence, big: Sequence) -> bool:
    it = iter(big)
    return all(any(x == y for y in it) for x in small)
