"""Monte-Carlo line network: blocks of batches relayed over identical GE links.

At every hop each scheme picks per-batch packet counts and a slot order,
the link drops packets, and a batch's next-hop rank becomes
``min(received, rank)``.  Normalized throughput at a hop is the mean rank
of the arriving batches divided by the batch size.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import ConfigError, ExperimentConfig, Scheme
from .ge_channel import GEModel, sample_losses
from .interleaver import DispersionObjective, block_sequence
from .recoding import DEFAULT_ITERATIONS, greedy_allocate, joint_optimize

CSV_HEADER = ("scheme", "hop", "mean_throughput", "group_variance", "blocks", "seed")


def _received_by_batch(seq: Sequence[int], lost: np.ndarray, n_batches: int) -> list[int]:
    got = [0] * n_batches
    for k, drop in zip(seq, lost.tolist()):
        if not drop:
            got[k - 1] += 1
    return got


def simulate_block_hop(
    scheme: Scheme,
    ranks: Sequence[int],
    model: GEModel,
    objective: DispersionObjective,
    T: int,
    rng: np.random.Generator,
    iterations: int = DEFAULT_ITERATIONS,
) -> tuple[int, ...]:
    """Send one block over one link; return the ranks arriving at the next node."""
    L = len(ranks)
    scheme = Scheme(scheme)
    if T < 1 or L < 1:
        raise ConfigError("need at least one batch and one packet per block")
    if scheme is Scheme.AR_SI:
        alloc = greedy_allocate(ranks, [float(L)] * L, T, model)
        # each batch rides its own stream: a stationary chain seen every L slots
        got = [
            int(t - sample_losses(model, range(1, 1 + L * t, L), rng).sum()) if t else 0
            for t in alloc
        ]
    else:
        if scheme is Scheme.BR_BI:
            if T % L:
                raise ConfigError(f"baseline recoding needs L | T, got T={T}, L={L}")
            seq = block_sequence(L, T // L)
        else:
            _, seq = joint_optimize(ranks, T, model, objective, iterations)
        got = _received_by_batch(seq, sample_losses(model, range(1, T + 1), rng), L)
    return tuple(min(x, int(r)) for x, r in zip(got, ranks))


@dataclass(frozen=True)
class ThroughputRow:
    scheme: Scheme
    hop: int
    mean_throughput: float
    group_variance: float
    blocks: int


@dataclass(frozen=True)
class ThroughputReport:
    """Per (scheme, hop) statistics; hop 0 is the source."""

    rows: tuple[ThroughputRow, ...]
    seed: int
    group_size: int = 100

    def get(self, scheme: Scheme | str, hop: int) -> ThroughputRow:
        scheme = Scheme(scheme)
        for row in self.rows:
            if row.scheme is scheme and row.hop == hop:
                return row
        raise KeyError((scheme, hop))

    def curve(self, scheme: Scheme | str) -> np.ndarray:
        scheme = Scheme(scheme)
        return np.array([r.mean_throughput for r in self.rows if r.scheme is scheme])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            var = "nan" if math.isnan(r.group_variance) else repr(r.group_variance)
            w.writerow([r.scheme.value, r.hop, repr(r.mean_throughput), var, r.blocks, self.seed])
        return buf.getvalue()


def group_variance(samples: np.ndarray, group_size: int) -> float:
    """Sample variance (ddof 1) of the means of consecutive full groups; NaN below two groups."""
    n_groups = len(samples) // group_size
    if n_groups < 2:
        return math.nan
    means = samples[: n_groups * group_size].reshape(n_groups, group_size).mean(axis=1)
    return float(means.var(ddof=1))


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Stream for one block, derived from (master seed, block index).

    Every scheme replays the same stream for a given block, so scheme
    comparisons share their randomness.
    """
    return np.random.default_rng(np.random.SeedSequence([seed, block]))


def run_experiment(config: ExperimentConfig) -> ThroughputReport:
    M, L, T = config.M, config.L, config.total
    if Scheme.BR_BI in config.schemes and T % L:
        raise ConfigError(f"baseline recoding needs L | T, got T={T}, L={L}")
    rows = []
    for scheme in config.schemes:
        # throughput[h, block] = mean rank / M after h hops
        throughput = np.ones((config.hops + 1, config.blocks))
        for block in range(config.blocks):
            rng = block_rng(config.seed, block)
            ranks: tuple[int, ...] = (M,) * L
            for hop in range(1, config.hops + 1):
                if any(ranks):
                    ranks = simulate_block_hop(
                        scheme, ranks, config.model, config.objective, T, rng, config.iterations
                    )
                throughput[hop, block] = sum(ranks) / (L * M)
        for hop in range(config.hops + 1):
            rows.append(
                ThroughputRow(
                    scheme,
                    hop,
                    float(throughput[hop].mean()),
                    group_variance(throughput[hop], config.group_size),
                    config.blocks,
                )
            )
    return ThroughputReport(tuple(rows), config.seed, config.group_size)
