"""Reference optimisers for the dispersion problem.

``simulated_annealing`` is the stochastic benchmark.  ``exhaustive_optimum``
finds the exact maximiser; it exploits that the dispersion is a sum of
per-batch terms, so a dynamic program over the set of occupied slots covers
every sequence without listing them one by one.  ``iter_sequences`` is the
literal enumerator, used to cross-check the dynamic program on small blocks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .interleaver import DispersionObjective, Scope, dispersion


class SearchSpaceExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class AnnealParams:
    initial_temp: float = 5000.0
    cooling_factor: float = 0.95
    stop_temp: float = 1e-4
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.cooling_factor < 1.0:
            raise ValueError("cooling factor must lie in (0, 1)")
        if not 0.0 < self.stop_temp < self.initial_temp:
            raise ValueError("need 0 < stop_temp < initial_temp")


def simulated_annealing(
    seq0: Sequence[int],
    obj: DispersionObjective,
    params: AnnealParams = AnnealParams(),
    rng: np.random.Generator | None = None,
) -> tuple[int, ...]:
    """Minimise ``-dispersion`` by swapping two slots holding different batches.

    One neighbour is proposed per temperature step.  Worse neighbours are
    accepted with probability ``exp(-dE / temp)``.  Returns the best state
    visited, not the final one.
    """
    f = list(seq0)
    if len(set(f)) < 2:
        return tuple(f)
    rng = np.random.default_rng(params.seed) if rng is None else rng
    size = len(f)
    energy = -dispersion(f, obj)
    best, best_energy = tuple(f), energy
    temp = params.initial_temp
    while temp > params.stop_temp:
        while True:
            i, j = rng.integers(size, size=2)
            if f[i] != f[j]:
                break
        f[i], f[j] = f[j], f[i]
        trial = -dispersion(f, obj)
        delta = trial - energy
        if delta < 0 or rng.random() < math.exp(-delta / temp):
            energy = trial
            if energy < best_energy:
                best, best_energy = tuple(f), energy
        else:
            f[i], f[j] = f[j], f[i]
        temp *= params.cooling_factor
    return best


def multinomial(alloc: Sequence[int]) -> int:
    out, n = 1, 0
    for t in alloc:
        n += t
        out *= math.comb(n, t)
    return out


def iter_sequences(alloc: Sequence[int], symmetric: bool = True) -> Iterator[tuple[int, ...]]:
    """All distinct sequences realising ``alloc``.

    With ``symmetric=True`` only one representative per relabelling of
    equal-count batches is produced: among batches with the same count, a
    lower label must start earlier.
    """
    alloc = list(alloc)
    size = sum(alloc)
    # predecessor[k] = previous label with the same count, or None
    predecessor: list[int | None] = [None] * len(alloc)
    if symmetric:
        seen: dict[int, int] = {}
        for k, t in enumerate(alloc):
            if t > 0:
                predecessor[k] = seen.get(t)
                seen[t] = k
    remaining = list(alloc)
    started = [False] * len(alloc)
    f = [0] * size

    def rec(pos: int) -> Iterator[tuple[int, ...]]:
        if pos == size:
            yield tuple(f)
            return
        for k in range(len(alloc)):
            if remaining[k] == 0:
                continue
            first = not started[k]
            if first and predecessor[k] is not None and not started[predecessor[k]]:
                continue
            remaining[k] -= 1
            started[k] = True
            f[pos] = k + 1
            yield from rec(pos + 1)
            remaining[k] += 1
            started[k] = not first
        return

    yield from rec(0)


def _subset_table(size: int, count: int, obj: DispersionObjective) -> tuple[np.ndarray, np.ndarray]:
    """Bitmasks of all ``count``-subsets of ``size`` slots and their per-batch efficiency."""
    combos = np.array(list(itertools.combinations(range(size), count)), dtype=np.int64).reshape(-1, count)
    masks = np.bitwise_or.reduce(np.left_shift(np.int64(1), combos), axis=1)
    if count < 2:
        return masks, np.zeros(len(masks))
    kernel = np.array([0.0] + [obj.g(d) for d in range(1, size)])
    if obj.scope is Scope.NEIGHB:
        values = kernel[np.diff(combos, axis=1)].sum(axis=1)
    else:
        i, j = np.triu_indices(count, 1)
        values = kernel[combos[:, j] - combos[:, i]].sum(axis=1)
    return masks, values


def _dp_work(counts_: Sequence[int], size: int) -> int:
    work, used = 0, 0
    for t in counts_:
        work += math.comb(size, used) * math.comb(size, t)
        used += t
    return work


def exhaustive_optimum(
    alloc: Sequence[int],
    obj: DispersionObjective,
    cap: int = 10**8,
    method: str = "dp",
) -> tuple[tuple[int, ...], float]:
    """Exact maximiser of the dispersion over all sequences realising ``alloc``.

    ``method="dp"`` runs the occupied-slot dynamic program; ``cap`` bounds its
    work (mask/subset pairs).  ``method="enumerate"`` walks the
    symmetry-reduced multiset permutations; ``cap`` bounds the multinomial.
    """
    size = sum(alloc)
    if size == 0:
        return (), 0.0
    if method == "enumerate":
        if multinomial(alloc) > cap:
            raise SearchSpaceExceeded(f"{multinomial(alloc)} sequences exceed cap {cap}")
        best = max(iter_sequences(alloc), key=lambda s: dispersion(s, obj))
        return best, dispersion(best, obj)
    if method != "dp":
        raise ValueError(f"unknown method {method!r}")
    if size > 26:
        raise SearchSpaceExceeded(f"block of {size} slots is too large for the exact search")

    batches = sorted((k for k in range(len(alloc)) if alloc[k] > 0), key=lambda k: -alloc[k])
    sizes = [alloc[k] for k in batches]
    work = _dp_work(sizes, size)
    if work > cap:
        raise SearchSpaceExceeded(f"dynamic program needs {work} steps, cap is {cap}")

    tables = {t: _subset_table(size, t, obj) for t in set(sizes)}
    layers = [np.full(1 << size, -np.inf)]
    layers[0][0] = 0.0
    for t in sizes:
        masks, values = tables[t]
        cur = layers[-1]
        nxt = np.full(1 << size, -np.inf)
        for m in np.flatnonzero(cur > -np.inf):
            ok = (masks & m) == 0
            np.maximum.at(nxt, masks[ok] | m, cur[m] + values[ok])
        layers.append(nxt)

    seq = [0] * size
    m = (1 << size) - 1
    for layer in range(len(sizes), 0, -1):
        masks, values = tables[sizes[layer - 1]]
        prev = layers[layer - 1]
        inside = (masks & m) == masks
        cand = masks[inside]
        hit = np.flatnonzero(prev[m ^ cand] + values[inside] == layers[layer][m])[0]
        sub = int(cand[hit])
        label = batches[layer - 1] + 1
        for slot in range(size):
            if sub >> slot & 1:
                seq[slot] = label
        m ^= sub
    best = tuple(seq)
    return best, dispersion(best, obj)
