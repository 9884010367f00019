"""Batched trial kernels for the permutation tester.

A block of trials is described by arrays drawn up front with numpy, so both backends
consume exactly the same randomness and agree bit for bit:

  c      rows of S that fall in the cover part of the instance (one per image value)
  fill   values of the other s - c sampled rows, uniform over the m image values
  t, p   Grover iterations and success probability, given the marked count M
  u      one uniform per search, compared against p

Only the collision scan and the search loop run in the kernel.  Set
APPROXDEG_NO_NUMBA=1 to force the numpy backend.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

ENV_FLAG = "APPROXDEG_NO_NUMBA"


def numba_enabled() -> bool:
    return njit is not None and os.environ.get(ENV_FLAG, "") in ("", "0")


def _run_block_numpy(c, fill, t, p, u, s):
    B, width = fill.shape
    f = s - c
    cols = np.arange(width)
    live = cols[None, :] < f[:, None]
    # dead slots get distinct values that can never collide with real ones
    vals = np.where(live, fill, -1 - cols[None, :])
    low = (live & (fill < c[:, None])).any(axis=1)
    srt = np.sort(vals, axis=1)
    dup = (srt[:, 1:] == srt[:, :-1]).any(axis=1) if width > 1 else np.zeros(B, dtype=bool)
    injective = ~(low | dup)

    R = u.shape[1]
    hit = u < p[:, None]
    found = hit.any(axis=1) & injective
    first = np.where(found, hit.argmax(axis=1), R - 1)
    searches = np.where(injective, first + 1, 0)
    queries = s + searches * (t + 1) + found.astype(np.int64)
    reject = ~injective | found
    return reject, queries.astype(np.int64)


def _run_block_loops(c, fill, t, p, u, s, seen):
    B = fill.shape[0]
    R = u.shape[1]
    reject = np.zeros(B, dtype=np.bool_)
    queries = np.empty(B, dtype=np.int64)
    for i in range(B):
        f = s - c[i]
        ok = True
        for j in range(f):
            v = fill[i, j]
            if v < c[i] or seen[v] == i + 1:
                ok = False
                break
            seen[v] = i + 1
        q = s
        if not ok:
            reject[i] = True
        else:
            for r in range(R):
                q += t[i] + 1
                if u[i, r] < p[i]:
                    q += 1
                    reject[i] = True
                    break
        queries[i] = q
    return reject, queries


_run_block_numba = njit(cache=True)(_run_block_loops) if njit is not None else None


def run_block(c, fill, t, p, u, s: int, m: int, *, backend: str | None = None):
    """Decide a block of trials; returns (reject flags, query counts)."""
    if backend is None:
        backend = "numba" if numba_enabled() else "numpy"
    if backend == "numpy":
        return _run_block_numpy(c, fill, t, p, u, s)
    if backend == "numba":
        if _run_block_numba is None:
            raise RuntimeError("numba is not available")
        # stamps are trial index + 1, so a fresh zero array is needed per block
        seen = np.zeros(max(m, 1), dtype=np.int64)
        return _run_block_numba(c, fill, t, p, u, s, seen)
    if backend == "python":
        seen = np.zeros(max(m, 1), dtype=np.int64)
        return _run_block_loops(c, fill, t, p, u, s, seen)
    raise ValueError(f"unknown backend {backend!r}")
