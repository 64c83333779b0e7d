"""Shared fuzz drivers for the module tests and the acceptance suite."""

from __future__ import annotations

import json
import random
from collections import Counter
from pathlib import Path

from dynpred.adversary import UniversalBlock, pad_blocks, universal_prediction
from dynpred.omv import BoolMatrix, eh_preprocess, eh_query, int_mv
from dynpred.predictions import extended_hamming

DATA = Path(__file__).parent / "data"
EH_BASELINE = DATA / "eh_probe_baseline.json"


def random_matrix(rng: random.Random, n1: int, n2: int, p: float = 0.5) -> BoolMatrix:
    return BoolMatrix.from_rows([[int(rng.random() < p) for _ in range(n2)] for _ in range(n1)])


def random_bits(rng: random.Random, n: int, p: float = 0.5) -> tuple[int, ...]:
    return tuple(int(rng.random() < p) for _ in range(n))


def near_bits(rng: random.Random, base: tuple[int, ...], flips: int) -> tuple[int, ...]:
    """Flip a random contiguous run and a few single bits of ``base``."""
    v = list(base)
    n = len(v)
    for _ in range(flips):
        if rng.random() < 0.5:
            lo = rng.randrange(n)
            hi = min(n, lo + rng.randint(1, 6))
            for i in range(lo, hi):
                v[i] ^= 1
        else:
            v[rng.randrange(n)] ^= 1
    return tuple(v)


def eh_fuzz(count: int = 100, seed: int = 2024, max_n: int = 64) -> list[dict]:
    """Run eh_query on ``count`` random square instances; one record per round."""
    rng = random.Random(seed)
    records = []
    for inst in range(count):
        n = rng.randint(1, max_n)
        M = random_matrix(rng, n, n, rng.choice([0.1, 0.5, 0.9]))
        rounds = rng.randint(1, 4)
        preds = [random_bits(rng, n, rng.random()) for _ in range(rounds)]
        state = eh_preprocess(M, preds)
        for i, vhat in enumerate(preds):
            v = near_bits(rng, vhat, rng.randint(0, 4))
            res = eh_query(state, i, v)
            records.append(
                {
                    "instance": inst,
                    "n": n,
                    "eh": extended_hamming(vhat, v),
                    "corrections": res.corrections,
                    "probes": res.probes,
                    "arith_ok": res.arith == int_mv(M, v),
                    "bool_ok": res.bool_result == [int(x > 0) for x in int_mv(M, v)],
                }
            )
    return records


def eh_summary(records: list[dict]) -> dict:
    return {
        "rounds": len(records),
        "total_probes": sum(r["probes"] for r in records),
        "max_ratio": max(r["probes"] / (r["n"] * (1 + r["eh"])) for r in records),
    }


def load_eh_baseline() -> dict:
    return json.loads(EH_BASELINE.read_text())


def rho_star_violations(block: UniversalBlock, per_round) -> list[str]:
    """Check the three padding properties on the extended rounds."""
    blocks, tail = pad_blocks(block, per_round)
    M = block.M
    out = []
    N: Counter = Counter()
    for k, (b, sub) in enumerate(zip(blocks, per_round), 1):
        # the round's own requests come first, untouched
        if b[: len(sub)] != list(sub):
            out.append(f"round {k} does not start with its own requests")
        N.update(b)
        for x in block.distinct():
            if x.is_update and not k * M[x] - block.ord[x] < N[x] <= k * M[x]:
                out.append(f"update {x} count {N[x]} after round {k}")
            if x.is_query and N[x] != k * M[x]:
                out.append(f"query {x} count {N[x]} after round {k}")
    N.update(tail)
    if N != Counter(universal_prediction(block, len(per_round))):
        out.append("padded sequence is not a permutation of the universal sequence")
    return out
