"""Compiled inner loop for direct Monte Carlo sampling of the decryption error.

Each trial draws fresh s, e, r, e1 vectors and an e2 scalar from chi via a
counter-based generator (splitmix64 over a per-trial substream), accumulates
E = <e, r> + e2 - <e1, s> on the fly, and counts threshold crossings. The
substream schedule depends only on (seed, trial index), so results are
identical for any thread count.
"""

from __future__ import annotations

import warnings

import numba
import numpy as np
from numba.core.errors import NumbaWarning

# this host's TBB is too old; numba falls back to another threading layer
warnings.filterwarnings("ignore", message=".*TBB.*", category=NumbaWarning)

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@numba.njit(numba.uint64(numba.uint64), cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@numba.njit(numba.int64(numba.uint64, numba.uint64[:]), cache=True, inline="always")
def _chi(u, cdt):
    # branchless binary search over the 31-entry table; value = index - 15
    i = 0
    for step in (16, 8, 4, 2, 1):
        k = i + step
        if k < 31 and u >= cdt[k - 1]:
            i = k
    return i - 15


@numba.njit(cache=True, parallel=True)
def error_trials(seed, trials, n, cdt, threshold):
    """Run `trials` independent error draws; returns (failures, sum_E, sum_E2)."""
    fails = 0
    total = 0.0
    total_sq = 0.0
    for t in numba.prange(trials):
        base = _mix(np.uint64(seed) ^ _mix(np.uint64(t) + np.uint64(1)))
        acc = np.int64(0)
        ctr = np.uint64(0)
        for _ in range(n):
            e = _chi(_mix(base + ctr * _GOLDEN), cdt)
            ctr += np.uint64(1)
            r = _chi(_mix(base + ctr * _GOLDEN), cdt)
            ctr += np.uint64(1)
            acc += e * r
        for _ in range(n):
            e1 = _chi(_mix(base + ctr * _GOLDEN), cdt)
            ctr += np.uint64(1)
            s = _chi(_mix(base + ctr * _GOLDEN), cdt)
            ctr += np.uint64(1)
            acc -= e1 * s
        acc += _chi(_mix(base + ctr * _GOLDEN), cdt)
        if acc >= threshold or acc <= -threshold:
            fails += 1
        total += acc
        total_sq += float(acc) * acc
    return fails, total, total_sq
