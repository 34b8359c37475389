"""Exponential polynomials ``sum_j b_j exp(2 pi i alpha_j z)`` with real frequencies.

Frequencies are measured in cycles: a term with frequency ``alpha`` has
exponent ``2*pi*i*alpha*z``.  Trigonometric shorthands convert angular rates
by dividing by ``2*pi``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import EmptyPolynomial, EvaluationOverflow, SingleTerm

TAU_FREQ = 1e-9
COEFF_ZERO_REL = 1e-14
EXP_OVERFLOW = 700.0
DEFAULT_MARGIN = 0.5

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ExpPoly:
    """Canonical exponential polynomial: sorted distinct frequencies, nonzero coefficients.

    Build instances through :func:`make_exp_poly` (or the helpers below), which
    enforces the canonical form.
    """

    alphas: tuple[float, ...]
    coeffs: tuple[complex, ...]

    @property
    def terms(self) -> list[tuple[float, complex]]:
        return list(zip(self.alphas, self.coeffs))

    def __len__(self) -> int:
        return len(self.alphas)

    @cached_property
    def alpha_array(self) -> np.ndarray:
        return np.array(self.alphas, dtype=np.float64)

    @cached_property
    def coeff_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.complex128)

    @property
    def max_coeff(self) -> float:
        return max(abs(b) for b in self.coeffs)

    @property
    def max_abs_freq(self) -> float:
        return max(abs(a) for a in self.alphas)

    def __call__(self, z):
        return evaluate(self, z)

    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        return add(self, other)

    def __neg__(self) -> "ExpPoly":
        return scale(self, -1.0)

    def __sub__(self, other: "ExpPoly") -> "ExpPoly":
        return add(self, scale(other, -1.0))

    def __mul__(self, other) -> "ExpPoly":
        if isinstance(other, ExpPoly):
            return multiply(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def to_dict(self) -> dict:
        return {
            "terms": [
                {"alpha": float(a), "b_re": float(b.real), "b_im": float(b.imag)}
                for a, b in zip(self.alphas, self.coeffs)
            ]
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ExpPoly":
        return make_exp_poly(
            (float(t["alpha"]), complex(float(t["b_re"]), float(t["b_im"]))) for t in doc["terms"]
        )


@dataclass(frozen=True)
class StripBounds:
    """Heights beyond which one exponential term of a polynomial dominates.

    For ``Im z >= r_plus`` the lowest-frequency term dominates the rest with
    ratio at most ``margin``; for ``Im z <= -r_minus`` the highest-frequency term
    does.  All zeros therefore lie in ``-r_minus < Im z < r_plus``.
    """

    r_plus: float
    r_minus: float
    margin: float


def make_exp_poly(terms: Iterable[tuple[float, complex]]) -> ExpPoly:
    """Canonicalize a term list: merge frequencies within ``TAU_FREQ``, drop zeros, sort."""
    items = [(float(a), complex(b)) for a, b in terms]
    if not items:
        raise EmptyPolynomial("no terms given")
    scale_ref = max(abs(b) for _, b in items)
    items.sort(key=lambda t: t[0])
    merged: list[list] = []
    for a, b in items:
        if merged and a - merged[-1][0] <= TAU_FREQ:
            merged[-1][1] += b
        else:
            merged.append([a, b])
    cut = COEFF_ZERO_REL * scale_ref
    kept = [(a, b) for a, b in merged if abs(b) > cut]
    if not kept:
        raise EmptyPolynomial("all coefficients cancel")
    return ExpPoly(tuple(a for a, _ in kept), tuple(b for _, b in kept))


def constant(c: complex) -> ExpPoly:
    return make_exp_poly([(0.0, c)])


def exp_term(alpha: float, c: complex = 1.0) -> ExpPoly:
    return make_exp_poly([(alpha, c)])


def from_trig(kind: str, angular_rate: float, scale: complex = 1.0) -> ExpPoly:
    """``scale * sin(rate z)`` or ``scale * cos(rate z)`` as an exponential polynomial."""
    if angular_rate <= 0:
        raise ValueError("angular_rate must be positive")
    f = angular_rate / TWO_PI
    scale = complex(scale)
    if kind == "sin":
        return make_exp_poly([(-f, 0.5j * scale), (f, -0.5j * scale)])
    if kind == "cos":
        return make_exp_poly([(-f, 0.5 * scale), (f, 0.5 * scale)])
    raise ValueError(f"unknown trig kind {kind!r}")


def _check_overflow(p: ExpPoly, y) -> None:
    worst = TWO_PI * p.max_abs_freq * np.max(np.abs(y))
    if worst > EXP_OVERFLOW:
        raise EvaluationOverflow(f"exponent {worst:.1f} exceeds {EXP_OVERFLOW}")


def evaluate(p: ExpPoly, z):
    """Evaluate ``p`` at a scalar or an array of complex points."""
    if np.ndim(z) == 0:
        z = complex(z)
        _check_overflow(p, z.imag)
        order = range(len(p) - 1, -1, -1) if z.imag >= 0 else range(len(p))
        acc = 0j
        for k in order:
            acc += p.coeffs[k] * cmath.exp(2j * math.pi * p.alphas[k] * z)
        return acc
    arr = np.asarray(z, dtype=np.complex128)
    if arr.size == 0:
        return np.zeros(arr.shape, dtype=np.complex128)
    _check_overflow(p, arr.imag)
    flat = np.ascontiguousarray(arr.ravel())
    return _kernels.eval_terms(p.alpha_array, p.coeff_array, flat).reshape(arr.shape)


def term_moduli_sum(p: ExpPoly, z):
    """``sum_j |b_j exp(2 pi i alpha_j z)|``; the natural scale of ``|p(z)|``."""
    y = np.asarray(z, dtype=np.complex128).imag
    _check_overflow(p, y)
    mods = np.abs(p.coeff_array)[:, None] * np.exp(-TWO_PI * p.alpha_array[:, None] * np.ravel(y)[None, :])
    out = mods.sum(axis=0)
    return float(out[0]) if np.ndim(z) == 0 else out.reshape(np.shape(z))


def eval_error_bound(p: ExpPoly, z):
    """Rough floating-point error bound for :func:`evaluate` at ``z``.

    Accounts for rounding in each term and for the phase error of
    ``exp(2 pi i alpha x)`` at large ``|x|``.
    """
    z = np.asarray(z, dtype=np.complex128)
    eps = np.finfo(float).eps
    flat = np.ravel(z)
    _check_overflow(p, flat.imag)
    a = p.alpha_array[:, None]
    mods = np.abs(p.coeff_array)[:, None] * np.exp(-TWO_PI * a * flat.imag[None, :])
    phase = 1.0 + TWO_PI * np.abs(a) * np.abs(flat)[None, :]
    out = 8.0 * len(p) * eps * (mods * phase).sum(axis=0)
    return float(out[0]) if z.ndim == 0 else out.reshape(z.shape)


def derivative(p: ExpPoly) -> ExpPoly:
    """Termwise derivative; the constant term (alpha = 0) disappears."""
    terms = [(a, 2j * math.pi * a * b) for a, b in p.terms if a != 0.0]
    if not terms:
        raise EmptyPolynomial("derivative of a constant")
    return make_exp_poly(terms)


def add(p: ExpPoly, q: ExpPoly) -> ExpPoly:
    return make_exp_poly(p.terms + q.terms)


def scale(p: ExpPoly, c: complex) -> ExpPoly:
    if c == 0:
        raise EmptyPolynomial("scaling by zero")
    return make_exp_poly((a, c * b) for a, b in p.terms)


def multiply(p: ExpPoly, q: ExpPoly) -> ExpPoly:
    return make_exp_poly((a1 + a2, b1 * b2) for a1, b1 in p.terms for a2, b2 in q.terms)


def mirror(p: ExpPoly) -> ExpPoly:
    """``z -> p(-z)``: every frequency changes sign."""
    return make_exp_poly((-a, b) for a, b in p.terms)


def is_conjugate_symmetric(p: ExpPoly, tol: float = 1e-12) -> bool:
    """True when ``p(conj z) == conj(p(z))``, i.e. ``b(-alpha) == conj(b(alpha))``."""
    lookup = dict(zip(p.alphas, p.coeffs))
    for a, b in p.terms:
        partner = next((bb for aa, bb in lookup.items() if abs(aa + a) <= TAU_FREQ), None)
        if partner is None or abs(partner - b.conjugate()) > tol * p.max_coeff:
            return False
    return True


def _dominance_ratio(mods: np.ndarray, gaps: np.ndarray, y: float) -> float:
    return float(np.sum(mods * np.exp(-TWO_PI * gaps * y)))


def _smallest_height(mods: np.ndarray, gaps: np.ndarray, margin: float) -> float:
    if _dominance_ratio(mods, gaps, 0.0) <= margin:
        return 0.0
    lo, hi = 0.0, 1.0
    while _dominance_ratio(mods, gaps, hi) > margin:
        lo, hi = hi, 2.0 * hi
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if _dominance_ratio(mods, gaps, mid) > margin:
            lo = mid
        else:
            hi = mid
    return hi


def dominance_ratio_upper(p: ExpPoly, z) -> np.ndarray:
    """``sum_{j>=2} |b_j e_j(z)| / |b_1 e_1(z)|`` with ``e_j(z) = exp(2 pi i alpha_j z)``."""
    a, b = p.alpha_array, np.abs(p.coeff_array)
    y = np.asarray(z, dtype=np.complex128).imag
    return ((b[1:, None] / b[0]) * np.exp(-TWO_PI * (a[1:, None] - a[0]) * np.ravel(y)[None, :])).sum(axis=0)


def dominance_ratio_lower(p: ExpPoly, z) -> np.ndarray:
    a, b = p.alpha_array, np.abs(p.coeff_array)
    y = np.asarray(z, dtype=np.complex128).imag
    return ((b[:-1, None] / b[-1]) * np.exp(TWO_PI * (a[-1] - a[:-1, None]) * np.ravel(y)[None, :])).sum(axis=0)


def strip_bounds(p: ExpPoly, margin: float = DEFAULT_MARGIN) -> StripBounds:
    """Smallest heights at which the extreme terms dominate with ratio ``<= margin``.

    Bisection stops once the bracket is narrower than ``1e-12`` and returns the
    upper end, so the dominance inequality holds at the returned height.
    """
    if len(p) < 2:
        raise SingleTerm("a single exponential term has no zeros")
    if not 0.0 < margin < 1.0:
        raise ValueError("margin must lie in (0, 1)")
    a = p.alpha_array
    b = np.abs(p.coeff_array)
    r_plus = _smallest_height(b[1:] / b[0], a[1:] - a[0], margin)
    r_minus = _smallest_height(b[:-1] / b[-1], a[-1] - a[:-1], margin)
    return StripBounds(r_plus=r_plus, r_minus=r_minus, margin=margin)


def sine_family(deltas: Sequence[float], rates: Sequence[float]) -> ExpPoly:
    """``sin(pi z) + sum_j d_j sin(rate_j z)``."""
    p = from_trig("sin", math.pi)
    for d, r in zip(deltas, rates):
        p = add(p, from_trig("sin", r, d))
    return p


def example1_phi(delta: float) -> ExpPoly:
    """``sin(pi z) + delta * sin(z)``."""
    return sine_family([delta], [1.0])
