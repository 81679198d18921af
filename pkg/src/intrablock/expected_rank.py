"""Expected rank of a batch sent over a GE channel at a given set of times.

The number of received packets ``X`` is computed by a forward pass over the
joint (chain state, received count) distribution.  Rank after the hop is
approximated by ``min(X, r)``, valid for large field sizes such as GF(2^8).
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .ge_channel import GEModel, matrix_power, stationary


def _check_times(times: Sequence[float]) -> None:
    for a, b in zip(times, times[1:]):
        if not b > a:
            raise ValueError(f"times must be strictly increasing, got {a} then {b}")


def _forward(model: GEModel, gaps: Sequence[float]) -> list[np.ndarray]:
    """Reception distributions after each packet.

    ``gaps[0]`` is ignored (the chain is stationary at the first packet);
    ``gaps[j]`` is the time between packets ``j - 1`` and ``j``.  Returns a
    list whose entry ``j`` is ``Pr(X = i)`` for ``i = 0..j`` after ``j``
    packets.
    """
    loss = np.array([model.g, model.b])[:, None]
    keep = 1.0 - loss
    joint = np.array(stationary(model))[:, None]  # shape (2, received + 1)
    out = [np.ones(1)]
    cache: dict[float, np.ndarray] = {}
    for j, gap in enumerate(gaps):
        if j > 0:
            trans = cache.get(gap)
            if trans is None:
                trans = cache[gap] = matrix_power(model, gap)
            joint = trans.T @ joint
        nxt = np.zeros((2, joint.shape[1] + 1))
        nxt[:, :-1] += loss * joint
        nxt[:, 1:] += keep * joint
        joint = nxt
        out.append(joint.sum(axis=0))
    return out


def reception_distribution(model: GEModel, times: Sequence[float]) -> np.ndarray:
    """``Pr(X = i)``, ``i = 0..len(times)``, for packets sent at ``times``."""
    times = list(times)
    _check_times(times)
    if not times:
        return np.ones(1)
    gaps = [0.0] + [b - a for a, b in zip(times, times[1:])]
    return _forward(model, gaps)[-1]


def rank_fn(i: int, r: int) -> int:
    return min(i, r)


def _rank_weights(n: int, r: int) -> np.ndarray:
    return np.minimum(np.arange(n + 1), r)


def expected_rank(r: int, times: Sequence[float], model: GEModel) -> float:
    if r == 0 or len(times) == 0:
        return 0.0
    dist = reception_distribution(model, times)
    return float(dist @ _rank_weights(len(dist) - 1, r))


@lru_cache(maxsize=None)
def _uniform_distributions(model: GEModel, depth: float, t_max: int) -> tuple[np.ndarray, ...]:
    return tuple(_forward(model, [depth] * t_max))


@lru_cache(maxsize=None)
def expected_rank_curve(r: int, depth: float, t_max: int, model: GEModel) -> np.ndarray:
    """``E(r, S_depth(t))`` for ``t = 0..t_max`` on the uniform grid ``1, 1+depth, ...``."""
    dists = _uniform_distributions(model, float(depth), t_max)
    curve = np.array([d @ _rank_weights(len(d) - 1, r) for d in dists])
    curve.flags.writeable = False
    return curve


@lru_cache(maxsize=65536)
def _expected_rank_gaps(r: int, gaps: tuple[int, ...], model: GEModel) -> float:
    dist = _forward(model, (0,) + gaps)[-1]
    return float(dist @ _rank_weights(len(dist) - 1, r))


def expected_rank_at_slots(r: int, slots: Sequence[int], model: GEModel) -> float:
    """Memoised ``expected_rank`` for integer slots (depends only on the gaps)."""
    if r == 0 or len(slots) == 0:
        return 0.0
    gaps = tuple(b - a for a, b in zip(slots, slots[1:]))
    return _expected_rank_gaps(r, gaps, model)
