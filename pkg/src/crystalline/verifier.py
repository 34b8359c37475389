"""Numerical check of ``sum c_lambda f(lambda) = sum a_s fhat(s)`` with Gaussian test functions.

Fourier convention: ``fhat(s) = integral f(x) exp(-2 pi i s x) dx``, under which
the Dirac comb is its own transform.

Gaussians ``exp(-pi a (z - x0)^2)`` are entire and decay rapidly along every
horizontal line, which is what the residue argument needs when the zeros sit
off the real axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import erfc

from .errors import EvaluationOverflow, TailDominates
from .exppoly import EXP_OVERFLOW, ExpPoly
from .measure import atom_coefficients
from .spectrum import Spectrum, coefficient_envelope, compute_spectrum
from .zerofinder import ZeroSet, find_zeros


@dataclass(frozen=True)
class GaussianTest:
    a: float = 1.0
    x0: float = 0.0

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("decay rate a must be positive")

    def __call__(self, z):
        return eval_test(self, z)

    def transform(self, s):
        return transform_test(self, s)


def eval_test(f: GaussianTest, z):
    z = np.asarray(z, dtype=np.complex128)
    expo = -math.pi * f.a * (z - f.x0) ** 2
    if np.any(expo.real > EXP_OVERFLOW):
        raise EvaluationOverflow("Gaussian test function overflows off the real axis")
    out = np.exp(expo)
    return complex(out) if out.ndim == 0 else out


def transform_test(f: GaussianTest, s):
    s = np.asarray(s, dtype=np.float64)
    out = np.exp(-2j * math.pi * s * f.x0) * np.exp(-math.pi * s**2 / f.a) / math.sqrt(f.a)
    return complex(out) if out.ndim == 0 else out


@dataclass
class VerificationReport:
    lhs: complex
    rhs: complex
    residual: float
    lhs_tail_bound: float
    rhs_tail_bound: float
    atom_count: int
    spectral_count: int
    window: tuple[float, float]
    cutoff: float
    tolerance: float
    test: GaussianTest
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and self.residual <= self.tolerance + self.lhs_tail_bound + self.rhs_tail_bound

    def as_dict(self) -> dict:
        return {
            "a": self.test.a,
            "x0": self.test.x0,
            "lhs_re": self.lhs.real,
            "lhs_im": self.lhs.imag,
            "rhs_re": self.rhs.real,
            "rhs_im": self.rhs.imag,
            "residual": self.residual,
            "lhs_tail": self.lhs_tail_bound,
            "rhs_tail": self.rhs_tail_bound,
            "atom_count": self.atom_count,
            "spectral_count": self.spectral_count,
            "window": list(self.window),
            "cutoff": self.cutoff,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "error": self.error,
        }


def _max_unit_density(x: np.ndarray) -> float:
    if x.size == 0:
        return 0.0
    x = np.sort(x)
    right = np.searchsorted(x, x + 1.0, side="right")
    return float(np.max(right - np.arange(x.size)))


def lhs_tail(f: GaussianTest, zs: ZeroSet, weights: np.ndarray) -> float:
    """Proxy bound for the atoms outside the window.

    ``max|c| * rho * (2 e^{-pi a X^2} + erfc(X sqrt(pi a)) / sqrt(a)) * e^{pi a y^2}``
    with ``rho`` the largest atom count in a unit interval, ``X`` the distance
    from ``x0`` to the nearer window edge and ``y`` the largest ``|Im lambda|``.
    """
    if weights.size == 0:
        return 0.0
    lo, hi = zs.window
    X = max(min(f.x0 - lo, hi - f.x0), 0.0)
    rho = _max_unit_density(zs.zeros.real)
    ymax = float(np.max(np.abs(zs.zeros.imag)))
    gauss = 2 * math.exp(-math.pi * f.a * X * X) + erfc(X * math.sqrt(math.pi * f.a)) / math.sqrt(f.a)
    return float(np.max(np.abs(weights)) * rho * gauss * math.exp(math.pi * f.a * ymax * ymax))


def rhs_tail(f: GaussianTest, sp: Spectrum, bounded: bool) -> float:
    """Proxy bound for spectral atoms beyond the cutoff.

    Uses the envelope ``|a_s| <= A e^{kappa |s|}`` fitted on the computed atoms
    and the spectral density near the cutoff, integrated against ``|fhat|``.
    """
    if sp.a.size == 0:
        return 0.0
    A, kappa = coefficient_envelope(sp, bounded)
    F = sp.cutoff
    mags = np.abs(sp.s)
    rho = max(float(np.count_nonzero(mags >= F - 1.0)) / 2.0, 1.0)
    a = f.a
    shift = a * kappa / (2 * math.pi)
    head = 2 * math.exp(kappa * F - math.pi * F * F / a) / math.sqrt(a)
    integral = math.exp(a * kappa * kappa / (4 * math.pi)) * erfc((F - shift) * math.sqrt(math.pi / a))
    return float(rho * A * (head + integral))


def verify_formula(
    psi: ExpPoly,
    phi: ExpPoly,
    f: GaussianTest,
    window: tuple[float, float],
    F: float,
    tolerance: float = 1e-6,
    *,
    zeros: ZeroSet | None = None,
    spectrum: Spectrum | None = None,
    seed: int | None = None,
) -> VerificationReport:
    """Both sides of the summation formula for one Gaussian, with tail bounds.

    ``zeros`` and ``spectrum`` may be passed to reuse a previous computation.
    Raises :class:`TailDominates` (carrying the report) when either tail bound
    exceeds ``tolerance``.
    """
    zs = find_zeros(phi, window, seed=seed) if zeros is None else zeros
    sp = compute_spectrum(psi, phi, F) if spectrum is None else spectrum
    c = atom_coefficients(psi, phi, zs)
    lhs = complex(np.sum(c * eval_test(f, zs.zeros)))
    rhs = complex(np.sum(sp.a * transform_test(f, sp.s)))
    report = VerificationReport(
        lhs=lhs,
        rhs=rhs,
        residual=abs(lhs - rhs),
        lhs_tail_bound=lhs_tail(f, zs, c),
        rhs_tail_bound=rhs_tail(f, sp, bounded=zs.is_real),
        atom_count=len(zs.zeros),
        spectral_count=len(sp.s),
        window=zs.window,
        cutoff=sp.cutoff,
        tolerance=tolerance,
        test=f,
    )
    if report.lhs_tail_bound > tolerance or report.rhs_tail_bound > tolerance:
        report.error = "TailDominates"
        raise TailDominates(
            f"tail bounds (lhs {report.lhs_tail_bound:.3g}, rhs {report.rhs_tail_bound:.3g}) exceed {tolerance:g}",
            report,
        )
    return report


def verify_suite(
    psi: ExpPoly,
    phi: ExpPoly,
    params: Sequence[GaussianTest],
    window: tuple[float, float],
    F: float,
    tolerance: float = 1e-6,
    *,
    seed: int | None = None,
) -> list[VerificationReport]:
    """Run :func:`verify_formula` for each test function, sharing zeros and spectrum.

    A :class:`TailDominates` outcome is recorded on its report without aborting
    the remaining entries.
    """
    if not params:
        return []
    zs = find_zeros(phi, window, seed=seed)
    sp = compute_spectrum(psi, phi, F)
    out = []
    for f in params:
        try:
            out.append(verify_formula(psi, phi, f, window, F, tolerance, zeros=zs, spectrum=sp))
        except TailDominates as exc:
            out.append(exc.report)
    return out


def report_dicts(reports: Sequence[VerificationReport]) -> list[dict]:
    return [r.as_dict() for r in reports]

