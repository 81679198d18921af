"""Intrablock interleaving of a block of batches with unequal packet counts.

A transmission sequence is a tuple ``f`` of 1-based batch labels where
``f[i - 1]`` is the batch sent in slot ``i``.  An allocation is a sequence of
per-batch packet counts ``t`` where ``t[k - 1]`` belongs to batch ``k``.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

Sequence_ = tuple[int, ...]


class Scope(str, enum.Enum):
    ALL_PAIRS = "allpairs"
    NEIGHB = "neighb"


_KERNELS = ("neg_pe", "ln", "atan")


@dataclass(frozen=True)
class DispersionObjective:
    """Pair scope plus an increasing concave kernel applied to packet separations.

    ``kernel`` is one of ``neg_pe`` (``-x**-n``), ``ln`` or ``atan``; ``n`` is
    only used by ``neg_pe``.
    """

    scope: Scope = Scope.NEIGHB
    kernel: str = "neg_pe"
    n: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "scope", Scope(self.scope))
        if self.kernel not in _KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}; expected one of {_KERNELS}")
        if self.kernel == "neg_pe" and not self.n > 0:
            raise ValueError("potential-energy exponent must be positive")
        if self.kernel != "neg_pe":
            object.__setattr__(self, "n", 1.0)

    @classmethod
    def parse(cls, text: str) -> "DispersionObjective":
        """Parse ``scope:kernel`` such as ``allpairs:neg_pe2``, ``neighb:ln``."""
        try:
            scope, kernel = text.strip().lower().split(":")
        except ValueError:
            raise ValueError(f"objective must look like 'neighb:neg_pe1', got {text!r}") from None
        if kernel.startswith("neg_pe"):
            return cls(Scope(scope), "neg_pe", float(kernel[len("neg_pe"):] or 1))
        return cls(Scope(scope), kernel)

    @property
    def name(self) -> str:
        k = f"neg_pe{self.n:g}" if self.kernel == "neg_pe" else self.kernel
        return f"{self.scope.value}:{k}"

    def g(self, x: float) -> float:
        if self.kernel == "neg_pe":
            return -(x ** -self.n)
        if self.kernel == "ln":
            return math.log(x)
        return math.atan(x)


ALL_OBJECTIVES: tuple[DispersionObjective, ...] = tuple(
    DispersionObjective(scope, kernel, n)
    for scope in (Scope.ALL_PAIRS, Scope.NEIGHB)
    for kernel, n in (("neg_pe", 1.0), ("neg_pe", 2.0), ("ln", 1.0), ("atan", 1.0))
)


# ---------------------------------------------------------------------------
# sequence helpers


def to_string(seq: Sequence[int]) -> str:
    if all(k < 10 for k in seq):
        return "".join(str(k) for k in seq)
    return ",".join(str(k) for k in seq)


def from_string(text: str) -> Sequence_:
    text = text.strip()
    if "," in text:
        return tuple(int(x) for x in text.split(","))
    return tuple(int(c) for c in text)


def positions(seq: Sequence[int], batch: int) -> list[int]:
    """1-based slots of ``batch`` in ``seq``."""
    return [i + 1 for i, k in enumerate(seq) if k == batch]


def counts(seq: Sequence[int], n_batches: int | None = None) -> tuple[int, ...]:
    n = max(seq, default=0) if n_batches is None else n_batches
    out = [0] * n
    for k in seq:
        out[k - 1] += 1
    return tuple(out)


def is_valid(seq: Sequence[int], alloc: Sequence[int]) -> bool:
    """Membership of ``seq`` in the set of sequences realising ``alloc``."""
    if len(seq) != sum(alloc):
        return False
    if any(not 1 <= k <= len(alloc) for k in seq):
        return False
    return counts(seq, len(alloc)) == tuple(alloc)


# ---------------------------------------------------------------------------
# dispersion efficiency


@lru_cache(maxsize=None)
def _kernel_table(obj: DispersionObjective, size: int) -> tuple[float, ...]:
    # entry d is g(d); entry 0 is unused
    return (0.0,) + tuple(obj.g(d) for d in range(1, size + 1))


def _slots_by_batch(seq: Sequence[int]) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for i, k in enumerate(seq, start=1):
        out.setdefault(k, []).append(i)
    return out


def dispersion(seq: Sequence[int], obj: DispersionObjective) -> float:
    """Dispersion efficiency of ``seq``; larger means better spread batches.

    The accumulation order is fixed (slot order for neighbour gaps, batch
    label then pair order for all pairs) so the value is a deterministic
    function of the sequence, which fine-tuning relies on.
    """
    table = _kernel_table(obj, max(len(seq), 1))
    total = 0.0
    if obj.scope is Scope.NEIGHB:
        last: dict[int, int] = {}
        for i, k in enumerate(seq):
            if k in last:
                total += table[i - last[k]]
            last[k] = i
        return total
    by_batch = _slots_by_batch(seq)
    for k in sorted(by_batch):
        slots = by_batch[k]
        for i, xi in enumerate(slots):
            for xj in slots[i + 1:]:
                total += table[xj - xi]
    return total


# ---------------------------------------------------------------------------
# transmission sequence approximation


def slip(x: float | Fraction, occupancy: Sequence[bool]) -> int:
    """Closest unassigned 1-based position to ``x``; ties go left.

    ``occupancy[i - 1]`` is True when position ``i`` is already taken.
    """
    num, den = Fraction(x).as_integer_ratio()
    return _slip_ratio(num, den, occupancy)


def _slip_ratio(num: int, den: int, occupancy: Sequence[bool]) -> int:
    # slip() for x = num / den with den > 0, in exact integer arithmetic
    size = len(occupancy)
    left = 0
    for k in range(min(num // den, size), 0, -1):
        if not occupancy[k - 1]:
            left = k
            break
    right = 0
    for k in range(max(-(-num // den), 1), size + 1):
        if not occupancy[k - 1]:
            right = k
            break
    if left == 0 and right == 0:
        raise ValueError("no unassigned position left")
    if right == 0 or (left != 0 and num - left * den <= right * den - num):
        return left
    return right


def approximate_sequence_steps(alloc: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Run the approximation and yield the partial sequence after each outer step.

    Partial sequences use original batch labels and 0 for unassigned slots.
    Batches are processed in order of descending count (stable in the
    original index); batches with no packets are skipped.
    """
    total = sum(alloc)
    if any(t < 0 for t in alloc):
        raise ValueError("packet counts must be nonnegative")
    order = sorted((k for k in range(len(alloc)) if alloc[k] > 0), key=lambda k: -alloc[k])
    ts = [alloc[k] for k in order]
    n = len(ts)
    f = [0] * total  # sorted-batch index + 1, 0 = free
    taken = [False] * total

    def snapshot() -> tuple[int, ...]:
        return tuple(order[v - 1] + 1 if v else 0 for v in f)

    left, right, i = 1, total, 0
    while i < n:
        ti = ts[i]
        if ti > 1:
            bundle = 1
            while i + bundle < n and ts[i + bundle] == ti:
                bundle += 1
            # exact gap = span / den; positions are left + j + t * gap
            span, den = (right - left + 1) - bundle, ti - 1
            for t in range(ti):
                pos = []
                for j in range(bundle):
                    slot = _slip_ratio((left + j) * den + t * span, den, taken)
                    taken[slot - 1] = True
                    pos.append(slot)
                for j, slot in enumerate(sorted(pos)):
                    f[slot - 1] = i + j + 1
            i += bundle
        else:
            f[left - 1] = i + 1
            taken[left - 1] = True
            i += 1
        free = [s for s in range(1, total + 1) if not taken[s - 1]]
        if free:
            left, right = free[0], free[-1]
        yield snapshot()


def approximate_sequence(alloc: Sequence[int]) -> Sequence_:
    """Deterministic intrablock interleaver for per-batch counts ``alloc``."""
    result: tuple[int, ...] = ()
    for result in approximate_sequence_steps(alloc):
        pass
    return result


# ---------------------------------------------------------------------------
# fine tuning


def _move_delta(slots: Sequence[int], idx: int, dst: int, table: Sequence[float], scope: Scope) -> float:
    """Change in one batch's value when its packet ``slots[idx]`` moves to the free slot ``dst``."""
    src = slots[idx]
    if scope is Scope.NEIGHB:
        others = slots[max(idx - 1, 0):idx] + slots[idx + 1:idx + 2]
    else:
        others = slots[:idx] + slots[idx + 1:]
    return sum(table[abs(dst - x)] - table[abs(src - x)] for x in others)


# local deltas below this are rejected without a full recomputation; far
# larger than any rounding difference between the two evaluations
_REJECT_BELOW = -1e-9


def fine_tune(seq: Sequence[int], obj: DispersionObjective) -> Sequence_:
    """Swap adjacent packets while a swap strictly increases the dispersion.

    The scan restarts from the first slot after every accepted swap.  A swap
    is judged on the full recomputed dispersion; the local change of the two
    affected batches only serves to discard clearly worse swaps early.
    """
    if obj.scope is Scope.NEIGHB:
        return _fine_tune_neighb(seq, obj)
    f = list(seq)
    size = len(f)
    cap = size**3
    table = _kernel_table(obj, max(size, 1))
    by_batch = {k: [s - 1 for s in v] for k, v in _slots_by_batch(f).items()}
    swaps = 0
    current = dispersion(f, obj)
    i = 0
    while i < size - 1:
        a, b = f[i], f[i + 1]
        if a != b:
            sa, sb = by_batch[a], by_batch[b]
            ia, ib = bisect.bisect_left(sa, i), bisect.bisect_left(sb, i + 1)
            delta = _move_delta(sa, ia, i + 1, table, obj.scope) + _move_delta(sb, ib, i, table, obj.scope)
            if delta >= _REJECT_BELOW:
                f[i], f[i + 1] = b, a
                trial = dispersion(f, obj)
                if trial > current:
                    current = trial
                    sa[ia], sb[ib] = i + 1, i
                    swaps += 1
                    if swaps > cap:
                        raise RuntimeError("fine-tuning exceeded its swap budget")
                    i = 0
                    continue
                f[i], f[i + 1] = a, b
        i += 1
    return tuple(f)


def _fine_tune_neighb(seq: Sequence[int], obj: DispersionObjective) -> Sequence_:
    # same search as fine_tune, with same-batch neighbours kept as links so
    # the local change of a swap costs O(1)
    f = list(seq)
    size = len(f)
    cap = size**3
    table = _kernel_table(obj, max(size, 1))
    prev, nxt = [-1] * size, [-1] * size
    last: dict[int, int] = {}
    for i, k in enumerate(f):
        j = last.get(k, -1)
        prev[i] = j
        if j >= 0:
            nxt[j] = i
        last[k] = i
    swaps = 0
    current = dispersion(f, obj)
    i = 0
    while i < size - 1:
        a, b = f[i], f[i + 1]
        if a != b:
            pa, na, pb, nb = prev[i], nxt[i], prev[i + 1], nxt[i + 1]
            delta = 0.0
            if pa >= 0:
                delta += table[i + 1 - pa] - table[i - pa]
            if na >= 0:
                delta += table[na - i - 1] - table[na - i]
            if pb >= 0:
                delta += table[i - pb] - table[i + 1 - pb]
            if nb >= 0:
                delta += table[nb - i] - table[nb - i - 1]
            if delta >= _REJECT_BELOW:
                f[i], f[i + 1] = b, a
                trial = dispersion(f, obj)
                if trial > current:
                    current = trial
                    prev[i], nxt[i], prev[i + 1], nxt[i + 1] = pb, nb, pa, na
                    if pa >= 0:
                        nxt[pa] = i + 1
                    if na >= 0:
                        prev[na] = i + 1
                    if pb >= 0:
                        nxt[pb] = i
                    if nb >= 0:
                        prev[nb] = i
                    swaps += 1
                    if swaps > cap:
                        raise RuntimeError("fine-tuning exceeded its swap budget")
                    i = 0
                    continue
                f[i], f[i + 1] = a, b
        i += 1
    return tuple(f)


# ---------------------------------------------------------------------------
# reference sequences


def worst_sequence(alloc: Sequence[int]) -> Sequence_:
    """No interleaving: every batch's packets back to back."""
    return tuple(k + 1 for k, t in enumerate(alloc) for _ in range(t))


def block_sequence(n_batches: int, rounds: int) -> Sequence_:
    """Classic block interleaver: ``1 2 ... L`` repeated ``rounds`` times."""
    if n_batches < 1 or rounds < 0:
        raise ValueError("need at least one batch and a nonnegative round count")
    return tuple(k for _ in range(rounds) for k in range(1, n_batches + 1))


@lru_cache(maxsize=None)
def tuned_sequence(alloc: tuple[int, ...], obj: DispersionObjective) -> Sequence_:
    """Memoised ``fine_tune(approximate_sequence(alloc), obj)``."""
    return fine_tune(approximate_sequence(alloc), obj)

