"""Hot numeric kernels, each with a numba and a pure-numpy implementation.

The numba path is used when numba imports cleanly and the environment
variable ``CRYSTALLINE_DISABLE_NUMBA`` is unset (or ``0``).  Both paths are
always importable so tests and the benchmark can compare them directly.
"""

from __future__ import annotations

import cmath
import math
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("CRYSTALLINE_DISABLE_NUMBA", "0").lower() in (
    "",
    "0",
    "false",
    "no",
)

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# exponential polynomial evaluation
# ---------------------------------------------------------------------------


def eval_terms_numpy(alphas: np.ndarray, coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Sum ``coeffs[k] * exp(2 pi i alphas[k] z)`` in ascending term modulus.

    ``alphas`` must be sorted ascending.  For ``Im z >= 0`` the term modulus
    ``exp(-2 pi alpha Im z)`` decreases with alpha, so terms are added from the
    largest frequency down; otherwise from the smallest up.
    """
    z = np.asarray(z, dtype=np.complex128)
    m = alphas.shape[0]
    upper = z.imag >= 0
    acc = np.zeros(z.shape, dtype=np.complex128)
    for step in range(m):
        k_up = m - 1 - step
        k_lo = step
        term_up = coeffs[k_up] * np.exp(1j * TWO_PI * alphas[k_up] * z)
        term_lo = coeffs[k_lo] * np.exp(1j * TWO_PI * alphas[k_lo] * z)
        acc += np.where(upper, term_up, term_lo)
    return acc


def series_recursion_numpy(
    freqs: np.ndarray, pred: np.ndarray, ratios: np.ndarray, gmin: float
) -> np.ndarray:
    """Coefficients of ``1 / (1 + sum_j ratios[j] w**g_j)`` on a sorted support.

    ``pred[i, j]`` is the support index of ``freqs[i] - g_j`` or -1.  Entries are
    solved in wavefronts: every frequency in ``[b*gmin, (b+1)*gmin)`` depends only
    on strictly earlier wavefronts.
    """
    n = freqs.shape[0]
    blk = np.floor(freqs / gmin).astype(np.int64)
    safe = np.where(pred >= 0, pred, 0)
    # float noise can put a predecessor in the same wavefront; push such entries later
    while True:
        pb = np.where(pred >= 0, blk[safe], -1).max(axis=1) if pred.shape[1] else np.full(n, -1)
        pb[0] = -1
        bad = pb >= blk
        if not bad.any():
            break
        blk[bad] = pb[bad] + 1
    c = np.zeros(n + 1, dtype=np.complex128)
    c[0] = 1.0
    p = np.where(pred >= 0, pred, n)
    order = np.argsort(blk, kind="stable")
    sorted_blk = blk[order]
    edges = np.flatnonzero(np.diff(sorted_blk)) + 1
    for idx in np.split(order, edges):
        idx = idx[idx != 0]
        if idx.size:
            c[idx] = -(c[p[idx]] * ratios).sum(axis=1)
    return c[:n]


def _nearest_numpy(x: np.ndarray, targets: np.ndarray) -> np.ndarray:
    k = np.searchsorted(x, targets)
    lo = np.clip(k - 1, 0, x.shape[0] - 1)
    hi = np.clip(k, 0, x.shape[0] - 1)
    return np.where(np.abs(x[lo] - targets) <= np.abs(x[hi] - targets), lo, hi)


def progression_scan_numpy(x: np.ndarray, min_len: int, min_diff: float, tol: float) -> np.ndarray:
    """Maximal arithmetic progressions of sorted reals ``x``.

    Returns an ``(k, 3)`` int array of ``(start index, second index, length)``.
    """
    n = x.shape[0]
    if n < 2:
        return np.zeros((0, 3), dtype=np.int64)
    ii, jj = np.triu_indices(n, k=1)
    d = x[jj] - x[ii]
    keep = d >= min_diff
    ii, jj, d = ii[keep], jj[keep], d[keep]
    back = x[ii] - d
    kb = _nearest_numpy(x, back)
    maximal = np.abs(x[kb] - back) > tol
    ii, jj, d = ii[maximal], jj[maximal], d[maximal]
    length = np.full(ii.shape, 2, dtype=np.int64)
    last = x[jj].copy()
    active = np.arange(ii.shape[0])
    while active.size:
        target = last[active] + d[active]
        k = _nearest_numpy(x, target)
        found = np.abs(x[k] - target) <= tol
        active = active[found]
        length[active] += 1
        last[active] = x[k[found]]
    sel = length >= min_len
    return np.stack([ii[sel], jj[sel], length[sel]], axis=1).astype(np.int64)


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def eval_terms_numba(alphas, coeffs, z):
        n = z.shape[0]
        m = alphas.shape[0]
        out = np.empty(n, dtype=np.complex128)
        for i in range(n):
            zi = z[i]
            acc = 0j
            if zi.imag >= 0:
                for k in range(m - 1, -1, -1):
                    acc += coeffs[k] * cmath.exp(1j * TWO_PI * alphas[k] * zi)
            else:
                for k in range(m):
                    acc += coeffs[k] * cmath.exp(1j * TWO_PI * alphas[k] * zi)
            out[i] = acc
        return out

    @njit(cache=True)
    def _series_recursion_numba(pred, ratios):
        n = pred.shape[0]
        nj = pred.shape[1]
        c = np.zeros(n, dtype=np.complex128)
        c[0] = 1.0
        for i in range(1, n):
            acc = 0j
            for j in range(nj):
                p = pred[i, j]
                if p >= 0:
                    acc += ratios[j] * c[p]
            c[i] = -acc
        return c

    def series_recursion_numba(freqs, pred, ratios, gmin):
        return _series_recursion_numba(pred, ratios)

    @njit(cache=True)
    def _nearest_nb(x, t):
        n = x.shape[0]
        lo = 0
        hi = n
        while lo < hi:
            mid = (lo + hi) // 2
            if x[mid] < t:
                lo = mid + 1
            else:
                hi = mid
        best = -1
        bestd = np.inf
        for k in (lo - 1, lo):
            if 0 <= k < n:
                dk = abs(x[k] - t)
                if dk < bestd:
                    bestd = dk
                    best = k
        return best, bestd

    @njit(cache=True)
    def _progression_scan_nb(x, min_len, min_diff, tol):
        n = x.shape[0]
        out = [(np.int64(0), np.int64(0), np.int64(0))]
        out.pop()
        for i in range(n):
            for j in range(i + 1, n):
                d = x[j] - x[i]
                if d < min_diff:
                    continue
                _, db = _nearest_nb(x, x[i] - d)
                if db <= tol:
                    continue
                length = 2
                last = x[j]
                while True:
                    k, dk = _nearest_nb(x, last + d)
                    if dk > tol:
                        break
                    length += 1
                    last = x[k]
                if length >= min_len:
                    out.append((np.int64(i), np.int64(j), np.int64(length)))
        res = np.zeros((len(out), 3), dtype=np.int64)
        for r in range(len(out)):
            res[r, 0] = out[r][0]
            res[r, 1] = out[r][1]
            res[r, 2] = out[r][2]
        return res

    def progression_scan_numba(x, min_len, min_diff, tol):
        if x.shape[0] < 2:
            return np.zeros((0, 3), dtype=np.int64)
        return _progression_scan_nb(x, int(min_len), float(min_diff), float(tol))

else:  # pragma: no cover
    eval_terms_numba = eval_terms_numpy
    series_recursion_numba = series_recursion_numpy
    progression_scan_numba = progression_scan_numpy


if USE_NUMBA:
    eval_terms = eval_terms_numba
    series_recursion = series_recursion_numba
    progression_scan = progression_scan_numba
else:
    eval_terms = eval_terms_numpy
    series_recursion = series_recursion_numpy
    progression_scan = progression_scan_numpy


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


def warmup() -> None:
    """Trigger JIT compilation so later timings exclude it."""
    if not USE_NUMBA:
        return
    a = np.array([-0.5, 0.5])
    c = np.array([0.5j, -0.5j])
    eval_terms(a, c, np.array([0.1 + 0.1j, 0.2 - 0.1j]))
    series_recursion(np.array([0.0, 1.0]), np.array([[-1], [0]], dtype=np.int64), np.array([1.0 + 0j]), 1.0)
    progression_scan(np.array([0.0, 1.0, 2.0]), 3, 0.5, 1e-9)
