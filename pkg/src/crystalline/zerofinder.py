"""Zeros of exponential polynomials in a window of their zero strip.

Counting uses the argument principle: the image of a rectangle boundary is
sampled adaptively until consecutive samples differ by less than half their
modulus (so each step turns the phase by well under pi/2), and the unwrapped
phase increments are summed.  Regions are bisected until each holds one zero,
which Newton's method then polishes.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import BoundaryTooClose, DerivativeUnderflow, NewtonDivergence, NonSimpleZero, SingleTerm
from .exppoly import ExpPoly, StripBounds, derivative, eval_error_bound, evaluate, strip_bounds

BOUNDARY_CLEARANCE_FACTOR = 10.0
MAX_PERTURBATIONS = 8
MIN_BOX_SIZE = 1e-6
STRIP_PAD = 0.1
NEWTON_MAX_STEPS = 50
ZERO_TOL_REL = 1e-11
DERIV_UNDERFLOW = 1e-14
DEFAULT_SEED = 20200917
WINDOW_SLACK_REL = 1e-12
_MIN_SEGMENT = 1e-13
_MAX_REFINE_ROUNDS = 60


def default_seed() -> int:
    return int(os.environ.get("CRYSTALLINE_SEED", DEFAULT_SEED))


@dataclass(frozen=True)
class Rect:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"degenerate rectangle {self}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        return (
            self.x_min - slack <= z.real <= self.x_max + slack
            and self.y_min - slack <= z.imag <= self.y_max + slack
        )

    def inflate(self, factor: float) -> "Rect":
        c = self.center
        hw = 0.5 * self.width * (1 + factor)
        hh = 0.5 * self.height * (1 + factor)
        return Rect(c.real - hw, c.real + hw, c.imag - hh, c.imag + hh)

    def split(self, frac: float) -> tuple["Rect", "Rect"]:
        """Cut across the longer side at fraction ``frac``."""
        if self.width >= self.height:
            x = self.x_min + frac * self.width
            return Rect(self.x_min, x, self.y_min, self.y_max), Rect(x, self.x_max, self.y_min, self.y_max)
        y = self.y_min + frac * self.height
        return Rect(self.x_min, self.x_max, self.y_min, y), Rect(self.x_min, self.x_max, y, self.y_max)


@dataclass
class ZeroSet:
    poly: ExpPoly
    window: tuple[float, float]
    zeros: np.ndarray
    strip: StripBounds
    #: certified argument-principle count over ``count_rect``
    count: int
    count_rect: Rect | None = None
    min_separation: float = math.inf
    min_abs_derivative: float = math.inf
    newton_residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    abs_derivatives: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __len__(self) -> int:
        return len(self.zeros)

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.abs(self.zeros.imag) <= 1e-9))


def zero_tol(p: ExpPoly, z) -> float:
    return ZERO_TOL_REL * p.max_coeff * math.exp(2 * math.pi * p.max_abs_freq * abs(complex(z).imag))


def _boundary_points(r: Rect, h: float) -> np.ndarray:
    """Counter-clockwise closed boundary polyline with spacing at most ``h``."""
    def edge(a: complex, b: complex) -> np.ndarray:
        n = max(4, int(math.ceil(abs(b - a) / h)))
        return a + (b - a) * np.arange(n) / n

    c0 = complex(r.x_min, r.y_min)
    c1 = complex(r.x_max, r.y_min)
    c2 = complex(r.x_max, r.y_max)
    c3 = complex(r.x_min, r.y_max)
    pts = np.concatenate([edge(c0, c1), edge(c1, c2), edge(c2, c3), edge(c3, c0), [c0]])
    return pts


def _initial_spacing(p: ExpPoly, r: Rect) -> float:
    h = 1.0 / (16.0 * max(p.max_abs_freq, 1e-3))
    return min(h, 0.05, r.width / 4, r.height / 4)


def _winding(p: ExpPoly, r: Rect) -> int | None:
    """Winding number of ``p`` around ``r``, or None if the boundary is not certified."""
    z = _boundary_points(r, _initial_spacing(p, r))
    w = evaluate(p, z)
    for _ in range(_MAX_REFINE_ROUNDS):
        a = np.abs(w)
        if np.any(a[:-1] < BOUNDARY_CLEARANCE_FACTOR * eval_error_bound(p, z[:-1])):
            return None
        bad = np.abs(np.diff(w)) > 0.5 * np.minimum(a[:-1], a[1:])
        if not bad.any():
            break
        seg = np.flatnonzero(bad)
        if np.min(np.abs(z[seg + 1] - z[seg])) < _MIN_SEGMENT:
            return None
        mid = 0.5 * (z[seg] + z[seg + 1])
        wm = evaluate(p, mid)
        z = np.insert(z, seg + 1, mid)
        w = np.insert(w, seg + 1, wm)
    else:
        return None
    turns = np.angle(w[1:] / w[:-1]).sum() / (2 * math.pi)
    n = int(round(turns))
    if abs(turns - n) > 1e-6:
        return None
    return n


def count_zeros_rect(
    p: ExpPoly,
    r: Rect,
    *,
    seed: int | None = None,
    max_perturbations: int = MAX_PERTURBATIONS,
) -> int:
    """Number of zeros of ``p`` inside ``r`` (with multiplicity).

    If sampled ``|p|`` on the boundary falls below ten times the evaluation
    error bound, the rectangle is inflated by a seeded pseudo-random factor in
    [1%, 5%] and the count retried.
    """
    rng = np.random.default_rng(default_seed() if seed is None else seed)
    rect = r
    for _ in range(max_perturbations + 1):
        n = _winding(p, rect)
        if n is not None:
            return n
        rect = r.inflate(rng.uniform(0.01, 0.05))
    raise BoundaryTooClose(f"no certified boundary near {r}")


def refine_zero(p: ExpPoly, z0: complex, dp: ExpPoly | None = None, box: Rect | None = None) -> complex:
    """Newton iteration from ``z0`` until ``|p| <= zero_tol``, then one polishing step."""
    dp = derivative(p) if dp is None else dp
    z = complex(z0)
    floor = DERIV_UNDERFLOW * p.max_coeff
    for _ in range(NEWTON_MAX_STEPS):
        f = evaluate(p, z)
        if abs(f) <= zero_tol(p, z):
            df = evaluate(dp, z)
            if abs(df) >= floor:
                z_pol = z - f / df
                if abs(evaluate(p, z_pol)) <= abs(f):
                    z = z_pol
            return z
        df = evaluate(dp, z)
        if abs(df) < floor:
            raise DerivativeUnderflow(f"|p'({z})| = {abs(df):.3g}")
        z = z - f / df
        if box is not None and not box.contains(z, slack=1e-12):
            raise NewtonDivergence(f"iterate {z} left {box}")
        if not math.isfinite(z.real) or not math.isfinite(z.imag):
            raise NewtonDivergence("non-finite iterate")
    raise NewtonDivergence(f"no convergence from {z0} in {NEWTON_MAX_STEPS} steps")


def _isolate(p, dp, rect, count, rng, out):
    stack = [(rect, count)]
    while stack:
        r, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            try:
                out.append(refine_zero(p, r.center, dp, box=r))
                continue
            except (NewtonDivergence, DerivativeUnderflow):
                if max(r.width, r.height) < MIN_BOX_SIZE:
                    raise NewtonDivergence(f"Newton fails in isolating box {r}")
        elif max(r.width, r.height) < MIN_BOX_SIZE:
            raise NonSimpleZero(f"{n} zeros unresolved in {r}")
        for attempt in range(MAX_PERTURBATIONS + 1):
            frac = 0.5 if attempt == 0 else rng.uniform(0.35, 0.65)
            a, b = r.split(frac)
            na = _winding(p, a)
            nb = None if na is None else _winding(p, b)
            if na is not None and nb is not None and na + nb == n:
                break
        else:
            raise BoundaryTooClose(f"cannot split {r} away from zeros")
        stack.append((b, nb))
        stack.append((a, na))


def find_zeros(
    p: ExpPoly,
    window: tuple[float, float],
    *,
    seed: int | None = None,
    pad: float = STRIP_PAD,
) -> ZeroSet:
    """All zeros with real part in the closed ``window``, certified by winding counts."""
    if len(p) < 2:
        raise SingleTerm("a single exponential term has no zeros")
    lo, hi = float(window[0]), float(window[1])
    strip = strip_bounds(p)
    base = Rect(lo, hi, -strip.r_minus - pad, strip.r_plus + pad)
    rng = np.random.default_rng(default_seed() if seed is None else seed)
    rect = base
    n = _winding(p, rect)
    tries = 0
    while n is None:
        tries += 1
        if tries > MAX_PERTURBATIONS:
            raise BoundaryTooClose(f"no certified boundary near {base}")
        rect = base.inflate(rng.uniform(0.01, 0.05))
        n = _winding(p, rect)
    dp = derivative(p)
    found: list[complex] = []
    _isolate(p, dp, rect, n, rng, found)
    zs = np.array(found, dtype=np.complex128)
    # closed window; a zero on an edge may polish to a few ulps outside it
    slack = WINDOW_SLACK_REL * max(1.0, abs(lo), abs(hi))
    zs = zs[(zs.real >= lo - slack) & (zs.real <= hi + slack)]
    zs = zs[np.lexsort((zs.imag, zs.real))]
    zset = ZeroSet(poly=p, window=(lo, hi), zeros=zs, strip=strip, count=n, count_rect=rect)
    zset.newton_residuals = np.abs(evaluate(p, zs))
    zset.abs_derivatives = np.abs(evaluate(dp, zs))
    zset.min_separation = separation(zset)
    zset.min_abs_derivative = min_abs_derivative(p, zset)
    return zset


def min_abs_derivative(p: ExpPoly, zs: ZeroSet) -> float:
    if len(zs.zeros) == 0:
        return math.inf
    vals = np.abs(evaluate(derivative(p), zs.zeros))
    zs.abs_derivatives = vals
    zs.min_abs_derivative = float(vals.min())
    return zs.min_abs_derivative


def separation(zs) -> float:
    """Minimum pairwise distance; ``inf`` for fewer than two points."""
    pts = np.asarray(zs.zeros if isinstance(zs, ZeroSet) else zs, dtype=np.complex128)
    if pts.size < 2:
        return math.inf
    if np.all(np.abs(pts.imag) <= 1e-9):
        x = np.sort(pts.real)
        return float(np.min(np.diff(x)))
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    d, _ = tree.query(tree.data, k=2)
    return float(d[:, 1].min())
