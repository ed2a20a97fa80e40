"""Hot integer kernels, each with a numba loop and a vectorised numpy twin.

The exact evaluators in :mod:`cardcomp.rankguess` spend almost all their time
in the adversary's minimisation over the ``3**(n-1)`` perturbations of the
observed values.  For Mono-Gaps and Exp-Gaps every guess probability has a
small common denominator, so the minimisation can run on plain int64 and be
turned back into Fractions by the caller.

``CARDCOMP_NUMBA=0`` selects the numpy versions.  Both versions are always
importable (``*_loop`` / ``*_numpy``) so tests and the benchmark can compare
them directly.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from ._accel import ENABLE_NUMBA, njit

__all__ = [
    "INT64_SAFE",
    "appc_fail_mask",
    "exp_gaps_worst_sizes",
    "mono_gaps_worst_units",
    "perturbation_grid",
]

# Values (and L * value products) must stay below this for the int64 kernels.
INT64_SAFE = 2**62


@lru_cache(maxsize=16)
def perturbation_grid(m: int) -> np.ndarray:
    """All vectors of ``{-1, 0, +1}**m`` as a ``(3**m, m)`` int64 array."""
    if m == 0:
        return np.zeros((1, 0), dtype=np.int64)
    axes = np.meshgrid(*([np.array([-1, 0, 1], dtype=np.int64)] * m), indexing="ij")
    grid = np.stack([a.ravel() for a in axes], axis=1)
    grid.setflags(write=False)
    return grid


# ---------------------------------------------------------------------------
# Mono-Gaps: units of 1 / (6 (n - 3)) for the guess equal to the deleted index

def _mono_units_numpy(values: np.ndarray, N: int) -> np.ndarray:
    n = values.shape[0]
    grid = perturbation_grid(n - 1)
    out = np.empty(n, dtype=np.int64)
    for i in range(n):  # 0-based deleted index; guess label i + 1
        base = np.delete(values, i)
        obs = np.clip(base[None, :] + grid, 1, N)
        g = np.diff(obs, axis=1)
        units = np.zeros(grid.shape[0], dtype=np.int64)
        for t in range(n - 3):  # adjacent gap pair (g[t], g[t+1]), 1-based position t + 1
            inc = g[:, t] + 4 < g[:, t + 1]
            dec = g[:, t] > g[:, t + 1] + 4
            flat = ~(inc | dec)
            # label = t+1 (i), t+2 (i+1), t+3 (i+2), t+4 (i+3)
            lab = i + 1
            if lab == t + 1:
                units += np.where(inc, 2, np.where(flat, 3, 0))
            elif lab == t + 2:
                units += np.where(dec, 4, 0)
            elif lab == t + 3:
                units += np.where(inc, 4, 0)
            elif lab == t + 4:
                units += np.where(dec, 2, np.where(flat, 3, 0))
        out[i] = units.min()
    return out


@njit
def _mono_units_loop(values, N):
    n = values.shape[0]
    m = n - 1
    out = np.empty(n, dtype=np.int64)
    base = np.empty(m, dtype=np.int64)
    obs = np.empty(m, dtype=np.int64)
    digits = np.empty(m, dtype=np.int64)
    total = 1
    for _ in range(m):
        total *= 3
    for i in range(n):
        k = 0
        for j in range(n):
            if j != i:
                base[k] = values[j]
                k += 1
        lab = i + 1
        best = -1
        for code in range(total):
            c = code
            for j in range(m):
                digits[j] = c % 3 - 1
                c //= 3
            for j in range(m):
                v = base[j] + digits[j]
                if v < 1:
                    v = 1
                elif v > N:
                    v = N
                obs[j] = v
            units = 0
            for t in range(n - 3):
                a = obs[t + 1] - obs[t]
                b = obs[t + 2] - obs[t + 1]
                inc = a + 4 < b
                dec = a > b + 4
                if lab == t + 1:
                    if inc:
                        units += 2
                    elif not dec:
                        units += 3
                elif lab == t + 2:
                    if dec:
                        units += 4
                elif lab == t + 3:
                    if inc:
                        units += 4
                elif lab == t + 4:
                    if dec:
                        units += 2
                    elif not inc:
                        units += 3
            if best < 0 or units < best:
                best = units
        out[i] = best
    return out


def mono_gaps_worst_units(values, N: int, *, use_numba: bool | None = None) -> np.ndarray:
    """Per deleted index ``i``, the adversary's minimum of ``P[guess = i]`` in units of ``1/(6(n-3))``."""
    vals = np.asarray(values, dtype=np.int64)
    if vals.shape[0] < 4:
        raise ValueError("Mono-Gaps needs n >= 4")
    use = ENABLE_NUMBA if use_numba is None else use_numba
    fn = _mono_units_loop if use else _mono_units_numpy
    return fn(vals, np.int64(N))


# ---------------------------------------------------------------------------
# Exp-Gaps: 0 if some perturbation drops i from I, else the largest |I| seen

def _exp_sizes_numpy(values: np.ndarray, N: int, L: int) -> np.ndarray:
    n = values.shape[0]
    grid = perturbation_grid(n - 1)
    out = np.empty(n, dtype=np.int64)
    P = grid.shape[0]
    for i in range(n):
        base = np.delete(values, i)
        obs = np.clip(base[None, :] + grid, 1, N)
        g = np.diff(obs, axis=1)  # g[:, j] is the 1-based gap g_{j+1}
        if g.shape[1] >= 2:
            inc = np.all(g[:, :-1] < g[:, 1:], axis=1)
            dec = ~inc & np.all(g[:, :-1] > g[:, 1:], axis=1)
        else:
            inc = np.ones(P, dtype=bool)
            dec = np.zeros(P, dtype=bool)
        member = np.zeros((P, n + 1), dtype=bool)  # column = 1-based label
        member[:, 1] = True
        member[:, n] = True
        member[:, 2] |= ~dec
        member[:, n - 1] |= dec
        for lab in range(3, n):  # increasing: 3 <= i <= n-1
            cond = g[:, lab - 2] >= L * g[:, lab - 3] + 2 * L + 2
            member[:, lab] |= inc & cond
        for lab in range(2, n - 1):  # decreasing: 2 <= i <= n-2
            cond = g[:, lab - 2] >= L * g[:, lab - 1] + 2 * L + 2
            member[:, lab] |= dec & cond
        size = member.sum(axis=1)
        mine = member[:, i + 1]
        out[i] = size.max() if mine.all() else 0
    return out


@njit
def _exp_sizes_loop(values, N, L):
    n = values.shape[0]
    m = n - 1
    out = np.empty(n, dtype=np.int64)
    base = np.empty(m, dtype=np.int64)
    obs = np.empty(m, dtype=np.int64)
    g = np.empty(max(m - 1, 1), dtype=np.int64)
    member = np.zeros(n + 1, dtype=np.bool_)
    total = 1
    for _ in range(m):
        total *= 3
    for i in range(n):
        k = 0
        for j in range(n):
            if j != i:
                base[k] = values[j]
                k += 1
        lab = i + 1
        best = 0
        dropped = False
        for code in range(total):
            c = code
            for j in range(m):
                v = base[j] + (c % 3 - 1)
                c //= 3
                if v < 1:
                    v = 1
                elif v > N:
                    v = N
                obs[j] = v
            for j in range(m - 1):
                g[j] = obs[j + 1] - obs[j]
            inc = True
            dec = True
            for j in range(m - 2):
                if not g[j] < g[j + 1]:
                    inc = False
                if not g[j] > g[j + 1]:
                    dec = False
            if inc:
                dec = False
            for j in range(n + 1):
                member[j] = False
            member[1] = True
            member[n] = True
            if dec:
                member[n - 1] = True
                for q in range(2, n - 1):
                    if g[q - 2] >= L * g[q - 1] + 2 * L + 2:
                        member[q] = True
            else:
                member[2] = True
                if inc:
                    for q in range(3, n):
                        if g[q - 2] >= L * g[q - 3] + 2 * L + 2:
                            member[q] = True
            if not member[lab]:
                dropped = True
                break
            size = 0
            for j in range(1, n + 1):
                if member[j]:
                    size += 1
            if size > best:
                best = size
        out[i] = 0 if dropped else best
    return out


def exp_gaps_worst_sizes(values, N: int, L: int, *, use_numba: bool | None = None) -> np.ndarray:
    """Per deleted index: 0 if the adversary can exclude it from ``I``, else the largest ``|I|``.

    The adversary's minimum of ``P[guess = i]`` is then ``1/size`` (or 0).
    """
    vals = np.asarray(values, dtype=np.int64)
    if vals.shape[0] < 3:
        raise ValueError("Exp-Gaps needs n >= 3")
    use = ENABLE_NUMBA if use_numba is None else use_numba
    fn = _exp_sizes_loop if use else _exp_sizes_numpy
    return fn(vals, np.int64(N), np.int64(L))


# ---------------------------------------------------------------------------
# App-C simulation failure: r_i <= sum_{j<i} r_j for some i

def _fail_numpy(r: np.ndarray) -> np.ndarray:
    prefix = np.cumsum(r, axis=1) - r
    return np.any(r[:, 1:] <= prefix[:, 1:], axis=1)


@njit
def _fail_loop(r):
    trials, n = r.shape
    out = np.zeros(trials, dtype=np.bool_)
    for t in range(trials):
        acc = r[t, 0]
        for i in range(1, n):
            if r[t, i] <= acc:
                out[t] = True
                break
            acc += r[t, i]
    return out


def appc_fail_mask(r, *, use_numba: bool | None = None) -> np.ndarray:
    """Row-wise failure flags for level draws ``r[:, i] ~ Uni[Delta**(i+1)]``."""
    arr = np.ascontiguousarray(r, dtype=np.int64)
    use = ENABLE_NUMBA if use_numba is None else use_numba
    return (_fail_loop if use else _fail_numpy)(arr)
