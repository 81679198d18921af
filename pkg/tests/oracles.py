"""Independent reference computations used by the tests.

Nothing here imports the package's numerical routines; the formulas are
derived separately (renewal counting, brute-force path sums, exact rationals).
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

# (epsilon, ABEL) -> (p, q) for g = 1/10, b = 4/5
PRESET_CELLS = {
    (Fraction(35, 100), Fraction(2)): (Fraction(4, 21), Fraction(12, 35)),
    (Fraction(35, 100), Fraction(5, 2)): (Fraction(5, 63), Fraction(1, 7)),
    (Fraction(35, 100), Fraction(900, 299)): (Fraction(23, 5670), Fraction(23, 3150)),
    (Fraction(45, 100), Fraction(2)): (Fraction(20, 49), Fraction(20, 49)),
    (Fraction(45, 100), Fraction(5, 2)): (Fraction(11, 49), Fraction(11, 49)),
    (Fraction(45, 100), Fraction(900, 299)): (Fraction(1, 10), Fraction(1, 10)),
    (Fraction(55, 100), Fraction(2)): (Fraction(4, 5), Fraction(4, 9)),
    (Fraction(55, 100), Fraction(5, 2)): (Fraction(17, 35), Fraction(17, 63)),
    (Fraction(55, 100), Fraction(900, 299)): (Fraction(859, 3150), Fraction(859, 5670)),
}
G, B = Fraction(1, 10), Fraction(4, 5)


def exact_stats(p, q, g=G, b=B):
    """(loss rate, ABEL) in exact arithmetic via renewal counting.

    ABEL = E[losses per slot] / E[burst starts per slot], where a burst
    starts at a slot that is lost while the previous slot was received.
    """
    p, q, g, b = (Fraction(x) for x in (p, q, g, b))
    pi = (q / (p + q), p / (p + q))
    P = ((1 - p, p), (q, 1 - q))
    loss = (g, b)
    eps = pi[0] * loss[0] + pi[1] * loss[1]
    starts = sum(pi[s] * (1 - loss[s]) * P[s][t] * loss[t] for s in (0, 1) for t in (0, 1))
    return eps, eps / starts


def two_state_power(p, q, x):
    """P**x by repeated multiplication (integer x) for cross-checking."""
    P = np.array([[1 - p, p], [q, 1 - q]])
    return np.linalg.matrix_power(P, int(x))


def reception_pmf_bruteforce(p, q, g, b, times, power):
    """Pr(X = i) by summing over every state path and every loss pattern.

    ``power(x)`` returns the x-step transition matrix.
    """
    n = len(times)
    pi = np.array([q / (p + q), p / (p + q)])
    loss = (g, b)
    out = np.zeros(n + 1)
    steps = [power(b_ - a_) for a_, b_ in zip(times, times[1:])]
    for states in itertools.product((0, 1), repeat=n):
        w = pi[states[0]]
        for j in range(1, n):
            w *= steps[j - 1][states[j - 1], states[j]]
        if w == 0.0:
            continue
        for pattern in itertools.product((0, 1), repeat=n):  # 1 = received
            v = w
            for s, rec in zip(states, pattern):
                v *= (1 - loss[s]) if rec else loss[s]
            out[sum(pattern)] += v
    return out
