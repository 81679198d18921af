"""Gilbert-Elliott two-state burst-loss channel.

State ``G`` (good) loses a packet with probability ``g``, state ``B`` (bad)
with probability ``b``.  The chain moves G->B with probability ``p`` and
B->G with probability ``q`` once per unit time.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class ChannelError(ValueError):
    """Base class for invalid or degenerate channel parameters."""


class DegenerateModelError(ChannelError):
    pass


class InfeasibleStatisticsError(ChannelError):
    """No GE model with the given ``g``, ``b`` matches the requested statistics."""


class NegativeEigenvalueError(ChannelError):
    """Fractional power of a transition matrix whose second eigenvalue is negative."""


class ChainState(enum.IntEnum):
    G = 0
    B = 1


@dataclass(frozen=True)
class GEModel:
    p: float
    q: float
    g: float
    b: float

    def __post_init__(self) -> None:
        for name in ("p", "q", "g", "b"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (0.0 < self.p < 1.0 and 0.0 < self.q < 1.0):
            raise ChannelError(f"transition probabilities must lie in (0, 1), got p={self.p}, q={self.q}")
        if not (0.0 <= self.g <= 1.0 and 0.0 <= self.b <= 1.0):
            raise ChannelError(f"loss probabilities must lie in [0, 1], got g={self.g}, b={self.b}")

    @property
    def eigenvalue(self) -> float:
        """Second eigenvalue ``1 - p - q`` of the transition matrix."""
        return 1.0 - self.p - self.q

    @property
    def transition_matrix(self) -> np.ndarray:
        return np.array([[1.0 - self.p, self.p], [self.q, 1.0 - self.q]])


def stationary(model: GEModel) -> tuple[float, float]:
    s = model.p + model.q
    return model.q / s, model.p / s


def loss_rate(model: GEModel) -> float:
    return (model.g * model.q + model.b * model.p) / (model.p + model.q)


def _burst_start(model: GEModel) -> tuple[float, float]:
    """Probabilities that a burst's first loss happens in G and in B."""
    p, q, g, b = model.p, model.q, model.g, model.b
    pi_g, pi_b = stationary(model)
    start_g = (1 - p) * g * (1 - g) * pi_g + q * g * (1 - b) * pi_b
    start_b = p * b * (1 - g) * pi_g + (1 - q) * b * (1 - b) * pi_b
    total = start_g + start_b
    if total <= 0.0:
        raise DegenerateModelError("no burst can start under this model")
    return start_g / total, start_b / total


def _loss_kernel(model: GEModel) -> np.ndarray:
    # K[s, s'] = Pr(move s -> s' and lose the packet there)
    p, q, g, b = model.p, model.q, model.g, model.b
    return np.array([[(1 - p) * g, p * b], [q * g, (1 - q) * b]])


def abel(model: GEModel) -> float:
    """Average burst error length: expected number of consecutive losses."""
    if model.g == 0.0 and model.b == 0.0:
        raise DegenerateModelError("lossless channel has no bursts")
    start = np.array(_burst_start(model))
    system = np.eye(2) - _loss_kernel(model)
    if abs(np.linalg.det(system)) < 1e-15:
        raise DegenerateModelError("burst never terminates (I - K singular)")
    lengths = np.linalg.solve(system, np.ones(2))
    return float(start @ lengths)


def burst_length_distribution(model: GEModel, max_len: int) -> np.ndarray:
    """Survival function of the burst length.

    Entry ``i - 1`` is ``Pr(burst length >= i)`` for ``i = 1..max_len``.
    """
    if max_len < 1:
        raise ValueError("max_len must be positive")
    if model.g == 0.0 and model.b == 0.0:
        raise DegenerateModelError("lossless channel has no bursts")
    kernel = _loss_kernel(model)
    state = np.array(_burst_start(model))
    out = np.empty(max_len)
    for i in range(max_len):
        out[i] = state.sum()
        state = state @ kernel
    return out


def burst_length_pmf(model: GEModel, max_len: int) -> np.ndarray:
    """``Pr(burst length == i)`` for ``i = 1..max_len``."""
    survival = burst_length_distribution(model, max_len + 1)
    return survival[:-1] - survival[1:]


def _quadratic_coefficients(eps: float, abel_: float, g: float, b: float) -> tuple[float, float, float]:
    w = (1 - b) * (1 - g) - (1 - eps)
    h = g * (1 - g) * (b - eps) + b * (1 - b) * (eps - g)
    a = abel_ * (b - eps) * (b - g) ** 3 * w
    bb = abel_ * (b - g) * (w * h - (b - eps) * (eps - g) * (1 - b) * (1 - g) * (b - g)) - eps * (b - g) ** 2 * w
    c = (eps - g) * (1 - b) * (1 - g) * (eps * (b - g) - abel_ * h)
    return a, bb, c


def _real_roots(a: float, b: float, c: float) -> list[float]:
    scale = max(abs(a), abs(b), abs(c))
    if scale == 0.0:
        return []
    if abs(a) <= 1e-14 * scale:
        return [] if b == 0.0 else [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0.0:
        if disc > -1e-14 * b * b:
            disc = 0.0
        else:
            return []
    root = math.sqrt(disc)
    # numerically stable pair
    k = -0.5 * (b + math.copysign(root, b))
    roots = [k / a]
    if k != 0.0:
        roots.append(c / k)
    else:
        roots.append(-b / (2 * a))
    return roots


def fit_from_stats(epsilon: float, abel_: float, g: float, b: float, tol: float = 1e-9) -> GEModel:
    """Recover ``(p, q)`` from the average loss rate and ABEL for fixed ``g``, ``b``.

    Solves the quadratic in ``p`` obtained by substituting
    ``q = p (b - eps) / (eps - g)`` into the ABEL expression, then keeps the
    root whose model reproduces both statistics best.
    """
    if epsilon == g or epsilon == b:
        raise DegenerateModelError("epsilon must differ from both g and b")
    if abel_ < 1.0:
        raise InfeasibleStatisticsError(f"ABEL must be at least 1, got {abel_}")

    candidates: list[tuple[float, GEModel]] = []
    for p in _real_roots(*_quadratic_coefficients(epsilon, abel_, g, b)):
        q = p * (b - epsilon) / (epsilon - g)
        if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
            continue
        model = GEModel(p, q, g, b)
        try:
            err = max(abs(loss_rate(model) - epsilon), abs(abel(model) - abel_))
        except DegenerateModelError:
            continue
        candidates.append((err, model))
    if not candidates:
        raise InfeasibleStatisticsError(
            f"no GE model with g={g}, b={b} has loss rate {epsilon} and ABEL {abel_}"
        )
    err, model = min(candidates, key=lambda c: c[0])
    if err > tol:
        raise InfeasibleStatisticsError(f"best fit misses the requested statistics by {err:.3g}")
    return model


def matrix_power(model: GEModel, x: float) -> np.ndarray:
    """Real power ``P**x`` of the transition matrix via its eigen-decomposition."""
    if x < 0:
        raise ValueError("power must be nonnegative")
    lam = model.eigenvalue
    integral = float(x).is_integer()
    if lam < 0.0 and not integral:
        raise NegativeEigenvalueError(
            f"P**{x} is not real-valued: eigenvalue 1-p-q = {lam} is negative"
        )
    lx = lam ** (int(x) if integral else x)
    p, q = model.p, model.q
    s = p + q
    return np.array(
        [
            [(q + p * lx) / s, (p - p * lx) / s],
            [(q - q * lx) / s, (p + q * lx) / s],
        ]
    )


def sample_losses(model: GEModel, slots: Sequence[int], rng: np.random.Generator) -> np.ndarray:
    """Loss indicators (True = lost) for packets sent at the given integer slots.

    The chain starts in its stationary distribution at the first slot and
    advances one unit per slot, so a gap of ``d`` slots carries ``P**d``.
    """
    n = len(slots)
    if n == 0:
        return np.zeros(0, dtype=bool)
    p, q, s = model.p, model.q, model.p + model.q
    lam = model.eigenvalue
    loss_p = (model.g, model.b)
    # switch[d] = (Pr(G -> B), Pr(B -> G)) over d unit steps
    switch: dict[int, tuple[float, float]] = {}
    u_state = rng.random(n).tolist()
    u_loss = rng.random(n).tolist()
    state = 0 if u_state[0] < q / s else 1
    lost = [u_loss[0] < loss_p[state]]
    for j in range(1, n):
        gap = slots[j] - slots[j - 1]
        if gap <= 0:
            raise ValueError("slots must be strictly increasing")
        probs = switch.get(gap)
        if probs is None:
            decay = 1.0 - lam**gap
            probs = switch[gap] = (p * decay / s, q * decay / s)
        if u_state[j] < probs[state]:
            state ^= 1
        lost.append(u_loss[j] < loss_p[state])
    return np.array(lost, dtype=bool)
