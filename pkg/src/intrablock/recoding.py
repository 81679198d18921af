"""Blockwise adaptive recoding: choose per-batch packet counts for a block.

The joint problem (counts and transmission order) is split into two steps
that alternate: a greedy allocation that models each batch's packets as
evenly spaced at its pseudo interleaver depth, and the intrablock
interleaver that turns the allocation into an actual slot order.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from .expected_rank import expected_rank_at_slots, expected_rank_curve
from .ge_channel import GEModel
from .interleaver import DispersionObjective, positions, tuned_sequence

DEFAULT_ITERATIONS = 2

# marginal gains closer than this are ties; while t <= r every packet adds
# exactly 1 - eps, and rounding must not decide who gets it
GAIN_TIE_TOL = 1e-12


def uniform_times(depth: float, t: int) -> list[float]:
    """``{1, depth + 1, ..., (t - 1) depth + 1}``; empty for ``t == 0``."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    return [1 + j * depth for j in range(t)]


def pseudo_depth(times: Sequence[float]) -> float:
    """Average gap between consecutive packets of a batch; 1 for fewer than two packets."""
    if len(times) < 2:
        return 1.0
    return (times[-1] - times[0]) / (len(times) - 1)


def effective_depth(depth: float, model: GEModel) -> float:
    """Depth actually fed to the expected-rank model.

    Fractional powers of the transition matrix only exist when ``1 - p - q``
    is nonnegative; otherwise round to the nearest integer, halves down.
    """
    if model.eigenvalue >= 0.0 or float(depth).is_integer():
        return float(depth)
    lower = int(depth)
    return float(lower if depth - lower <= 0.5 else lower + 1)


def greedy_allocate(
    ranks: Sequence[int],
    depths: Sequence[float],
    total: int,
    model: GEModel,
) -> tuple[int, ...]:
    """Hand out ``total`` packets one at a time to the largest marginal gain.

    Batch ``k``'s gain from its ``t``-th packet is
    ``E(r_k, S(t)) - E(r_k, S(t - 1))`` on the uniform grid of its depth.
    Ties (within ``GAIN_TIE_TOL``) go to the lowest batch index.  Optimal
    because every curve is concave in ``t``.
    """
    if len(ranks) != len(depths):
        raise ValueError("ranks and depths must have the same length")
    if any(d < 1 for d in depths):
        raise ValueError("depths must be at least 1")
    curves = [
        expected_rank_curve(int(r), effective_depth(d, model), total, model)
        for r, d in zip(ranks, depths)
    ]
    alloc = [0] * len(ranks)
    for _ in range(total):
        best, best_gain = 0, -1.0
        for k, curve in enumerate(curves):
            gain = curve[alloc[k] + 1] - curve[alloc[k]]
            if gain > best_gain + GAIN_TIE_TOL:
                best, best_gain = k, gain
        alloc[best] += 1
    return tuple(alloc)


def block_objective(ranks: Sequence[int], seq: Sequence[int], model: GEModel) -> float:
    """Mean expected next-hop rank of the block's batches under ``seq``."""
    return sum(
        expected_rank_at_slots(int(r), positions(seq, k), model)
        for k, r in enumerate(ranks, start=1)
    ) / len(ranks)


def joint_optimize(
    ranks: Sequence[int],
    total: int,
    model: GEModel,
    objective: DispersionObjective,
    iterations: int = DEFAULT_ITERATIONS,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Alternate allocation and interleaving; return the best ``(alloc, sequence)`` seen."""
    return _joint_optimize(tuple(int(r) for r in ranks), total, model, objective, iterations)


@lru_cache(maxsize=200_000)
def _joint_optimize(
    ranks: tuple[int, ...],
    total: int,
    model: GEModel,
    objective: DispersionObjective,
    iterations: int,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    if total < 1 or iterations < 1:
        raise ValueError("need a positive packet budget and iteration count")
    depths = [1.0] * len(ranks)
    best = None
    best_value = float("-inf")
    for _ in range(iterations):
        alloc = greedy_allocate(ranks, depths, total, model)
        seq = tuned_sequence(alloc, objective)
        value = block_objective(ranks, seq, model)
        if value > best_value:
            best, best_value = (alloc, seq), value
        depths = [pseudo_depth(positions(seq, k)) for k in range(1, len(ranks) + 1)]
    assert best is not None
    return best
