"""Monte-Carlo estimate of P(|x(t)|^2 >= y^2 t for some grid t in [1, n]).

x is an m-dimensional standard Wiener process observed on the grid
t_i = 1 + i (n-1)/M, M = ceil((n-1)/dt).  Grid values are generated by
Brownian-bridge midpoint refinement instead of sequential increments; the
joint law on the grid is identical.  Each normal is a pure function of
(seed, path, grid index, coordinate), so the estimate does not depend on the
order in which grid points are visited or on the thread count.

A bridge segment whose endpoints sit far enough below the boundary is not
refined: the chance that any interior grid point of it crosses is then below
SKIP_EPS, and the indicator equals the full-grid one except on that event.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from statistics import NormalDist

import numba
from numba.core.errors import NumbaWarning
import numpy as np

from .errors import DomainError

CI_LEVEL = 0.99
SKIP_EPS = 1e-15
MAX_DT = 0.01
THREADS_ENV = "KUMMER_GAP_THREADS"

_MASK = (1 << 64) - 1

warnings.filterwarnings("ignore", message="The TBB threading layer", category=NumbaWarning)


@dataclass(frozen=True)
class McEstimate:
    p_hat: float
    paths: int
    ci_low: float
    ci_high: float
    ci_level: float
    seed: int
    dt: float
    hits: int = 0

    @property
    def ci_width(self) -> float:
        return self.ci_high - self.ci_low


def wilson_interval(hits: int, trials: int, level: float = CI_LEVEL) -> tuple[float, float]:
    if trials <= 0:
        raise DomainError("trials must be positive")
    zq = NormalDist().inv_cdf(0.5 + level / 2)
    p = hits / trials
    denom = 1 + zq * zq / trials
    centre = (p + zq * zq / (2 * trials)) / denom
    half = zq * math.sqrt(p * (1 - p) / trials + zq * zq / (4 * trials * trials)) / denom
    return max(0.0, min(centre - half, p)), min(1.0, max(centre + half, p))


@numba.njit(cache=True, inline="always")
def _splitmix(x):
    x = (x + np.uint64(0x9E3779B97F4A7C15)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


@numba.njit(cache=True)
def _normal(seed, path, node, coord):
    key = _splitmix(seed ^ _splitmix(np.uint64(path)))
    key = _splitmix(key ^ (np.uint64(node) << np.uint64(5)) ^ np.uint64(coord))
    h1 = _splitmix(key)
    h2 = _splitmix(h1)
    # 53-bit uniforms; u1 in (0, 1] keeps the log finite
    u1 = ((h1 >> np.uint64(11)) + np.uint64(1)) * (1.0 / 9007199254740992.0)
    u2 = (h2 >> np.uint64(11)) * (1.0 / 9007199254740992.0)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


@numba.njit(cache=True)
def _path_crosses(seed, path, m, n_steps, h, y2, skip_log, x_first, x_last, x_mid, stack):
    """True when the path hits |x|^2 >= y^2 t at some grid point."""
    t_last = 1.0 + n_steps * h
    r2 = 0.0
    for c in range(m):
        x_first[c] = _normal(seed, path, 0, c)
        r2 += x_first[c] * x_first[c]
    if r2 >= y2:
        return True
    if n_steps == 0:
        return False
    sd = math.sqrt(t_last - 1.0)
    r2 = 0.0
    for c in range(m):
        x_last[c] = x_first[c] + sd * _normal(seed, path, n_steps, c)
        r2 += x_last[c] * x_last[c]
    if r2 >= y2 * t_last:
        return True

    # stack rows: [i, j, x_i (m), x_j (m)]
    top = 0
    stack[0, 0] = 0.0
    stack[0, 1] = n_steps
    for c in range(m):
        stack[0, 2 + c] = x_first[c]
        stack[0, 2 + m + c] = x_last[c]
    top = 1
    while top > 0:
        top -= 1
        i = int(stack[top, 0])
        j = int(stack[top, 1])
        if j - i < 2:
            continue
        ti = 1.0 + i * h
        tj = 1.0 + j * h
        ri = 0.0
        rj = 0.0
        for c in range(m):
            ri += stack[top, 2 + c] ** 2
            rj += stack[top, 2 + m + c] ** 2
        d = math.sqrt(y2 * ti) - math.sqrt(max(ri, rj))
        if d > 0.0 and d * d >= 0.5 * m * (tj - ti) * skip_log:
            continue
        k = (i + j) // 2
        tk = 1.0 + k * h
        w = (tk - ti) / (tj - ti)
        s = math.sqrt((tk - ti) * (tj - tk) / (tj - ti))
        rk = 0.0
        for c in range(m):
            xi = stack[top, 2 + c]
            xj = stack[top, 2 + m + c]
            x_mid[c] = xi + w * (xj - xi) + s * _normal(seed, path, k, c)
            rk += x_mid[c] * x_mid[c]
        if rk >= y2 * tk:
            return True
        # right child reuses this row's x_j; left child goes on top
        right = top
        left = top + 1
        for c in range(m):
            stack[left, 2 + c] = stack[top, 2 + c]
            stack[left, 2 + m + c] = x_mid[c]
        stack[left, 0] = i
        stack[left, 1] = k
        stack[right, 0] = k
        for c in range(m):
            stack[right, 2 + c] = x_mid[c]
        top += 2
    return False


@numba.njit(cache=True, parallel=True)
def _count_hits(seed, paths, m, n_steps, h, y2, skip_log, n_chunks):
    depth = 2 * (int(math.log2(max(n_steps, 1))) + 2)
    hits = np.zeros(n_chunks, dtype=np.int64)
    per = (paths + n_chunks - 1) // n_chunks
    for chunk in numba.prange(n_chunks):
        x_first = np.empty(m)
        x_last = np.empty(m)
        x_mid = np.empty(m)
        stack = np.empty((depth, 2 + 2 * m))
        lo = chunk * per
        hi = min(paths, lo + per)
        count = 0
        for p in range(lo, hi):
            if _path_crosses(seed, p, m, n_steps, h, y2, skip_log, x_first, x_last, x_mid, stack):
                count += 1
        hits[chunk] = count
    return hits.sum()


def configured_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    limit = numba.config.NUMBA_NUM_THREADS
    if not raw:
        return limit
    try:
        wanted = int(raw)
    except ValueError:
        raise DomainError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return max(1, min(wanted, limit))


def grid_steps(n: float, dt: float) -> int:
    return math.ceil((n - 1) / dt - 1e-9)


def estimate_pfa(m: int, n: float, y: float, paths: int, dt: float = 1e-3, seed: int = 42) -> McEstimate:
    """Fraction of simulated paths whose squared magnitude reaches y^2 t on the grid."""
    if m < 1 or paths < 1:
        raise DomainError("need m >= 1 and paths >= 1")
    if n <= 1 or y < 0 or not 0 < dt <= MAX_DT:
        raise DomainError(f"need n > 1, y >= 0 and 0 < dt <= {MAX_DT}")
    n_steps = grid_steps(n, dt)
    h = (n - 1) / n_steps
    numba.set_num_threads(configured_threads())
    # Chunking is fixed so the partition never depends on the thread count.
    n_chunks = min(paths, 256)
    hits = int(
        _count_hits(
            np.uint64(seed & _MASK),
            paths,
            m,
            n_steps,
            h,
            float(y) ** 2,
            math.log(2 * m / SKIP_EPS),
            n_chunks,
        )
    )
    lo, hi = wilson_interval(hits, paths)
    return McEstimate(hits / paths, paths, lo, hi, CI_LEVEL, seed, dt, hits)
