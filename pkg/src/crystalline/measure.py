"""The crystalline measure pair built from (psi, phi), and the sine-perturbation example."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ComplexZeros, DerivativeUnderflow, SubsViolated
from .exppoly import ExpPoly, derivative, evaluate, example1_phi, term_moduli_sum
from .spectrum import Spectrum, compute_spectrum
from .zerofinder import DERIV_UNDERFLOW, ZeroSet, find_zeros

SUBS_TOL = 1e-8
DISTINCT_TOL = 1e-6


def check_subs(psi: ExpPoly, phi: ExpPoly, zs: ZeroSet) -> bool:
    """True if some listed zero of phi is not a zero of psi (relative to psi's local scale).

    Only the window is examined: True certifies that the zero set of phi is not
    contained in that of psi, False means no witness was found in the window.
    """
    if len(zs.zeros) == 0:
        return False
    vals = np.abs(evaluate(psi, zs.zeros))
    return bool(np.any(vals > SUBS_TOL * term_moduli_sum(psi, zs.zeros)))


def atom_coefficients(psi: ExpPoly, phi: ExpPoly, zs: ZeroSet) -> np.ndarray:
    """Residues ``psi(lambda) / phi'(lambda)`` in the order of ``zs.zeros``."""
    if not check_subs(psi, phi, zs):
        raise SubsViolated("psi vanishes at every zero of phi in the window")
    dphi = evaluate(derivative(phi), zs.zeros)
    if np.min(np.abs(dphi)) < DERIV_UNDERFLOW * phi.max_coeff:
        raise DerivativeUnderflow("phi' vanishes at a listed zero")
    return evaluate(psi, zs.zeros) / dphi


@dataclass
class CrystallineMeasurePair:
    positions: np.ndarray
    weights: np.ndarray
    spectrum: Spectrum
    window: tuple[float, float]
    cutoff: float
    psi: ExpPoly
    phi: ExpPoly
    zeros: ZeroSet | None = None

    @property
    def atoms(self) -> list[tuple[complex, complex]]:
        return list(zip(self.positions.tolist(), self.weights.tolist()))

    @property
    def spectral_atoms(self) -> list[tuple[float, complex]]:
        return self.spectrum.entries()

    def as_dict(self) -> dict:
        return {
            "phi": self.phi.to_dict(),
            "psi": self.psi.to_dict(),
            "window": list(self.window),
            "cutoff": self.cutoff,
            "atoms": [
                {"re": float(z.real), "im": float(z.imag), "c_re": float(c.real), "c_im": float(c.imag)}
                for z, c in zip(self.positions, self.weights)
            ],
            "spectral_atoms": [
                {"s": float(s), "a_re": float(a.real), "a_im": float(a.imag)}
                for s, a in zip(self.spectrum.s, self.spectrum.a)
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CrystallineMeasurePair":
        psi = ExpPoly.from_dict(doc["psi"])
        phi = ExpPoly.from_dict(doc["phi"])
        pos = np.array([complex(a["re"], a["im"]) for a in doc["atoms"]], dtype=np.complex128)
        w = np.array([complex(a["c_re"], a["c_im"]) for a in doc["atoms"]], dtype=np.complex128)
        s = np.array([e["s"] for e in doc["spectral_atoms"]], dtype=np.float64)
        a = np.array([complex(e["a_re"], e["a_im"]) for e in doc["spectral_atoms"]], dtype=np.complex128)
        sup = float(np.abs(a).max()) if a.size else 0.0
        sp = Spectrum(s=s, a=a, cutoff=float(doc["cutoff"]), sup_coeff=sup, support=s)
        return cls(pos, w, sp, tuple(doc["window"]), float(doc["cutoff"]), psi, phi)


def build_measure_pair(
    psi: ExpPoly,
    phi: ExpPoly,
    window: tuple[float, float],
    F: float,
    *,
    seed: int | None = None,
) -> CrystallineMeasurePair:
    zs = find_zeros(phi, window, seed=seed)
    weights = atom_coefficients(psi, phi, zs)
    sp = compute_spectrum(psi, phi, F)
    return CrystallineMeasurePair(zs.zeros, weights, sp, zs.window, float(F), psi, phi, zs)


@dataclass
class Progression:
    start: float
    step: float
    length: int

    def terms(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.length)

    def as_dict(self) -> dict:
        return {"start": self.start, "step": self.step, "length": self.length}


def progression_scan(zs, min_len: int = 5, min_diff: float = 0.5, tol: float = 1e-6) -> list[Progression]:
    """All maximal arithmetic progressions of length ``>= min_len`` among real zeros.

    Every pair ``(x_i, x_j)`` with ``x_j - x_i >= min_diff`` seeds a candidate,
    which is extended while the next predicted term matches a zero within
    ``tol``.  Candidates that extend backwards are skipped, so each progression
    is reported once, from its first term in the window.
    """
    pts = np.asarray(zs.zeros if isinstance(zs, ZeroSet) else zs, dtype=np.complex128)
    if min_len < 3:
        raise ValueError("min_len must be at least 3")
    if pts.size and np.max(np.abs(pts.imag)) > tol:
        raise ComplexZeros("progression scan needs real zeros")
    x = np.sort(pts.real)
    hits = _kernels.progression_scan(np.ascontiguousarray(x), int(min_len), float(min_diff), float(tol))
    return [Progression(float(x[i]), float(x[j] - x[i]), int(n)) for i, j, n in hits]


@dataclass
class Example1Report:
    delta: float
    gamma: float
    window: tuple[float, float]
    ks: np.ndarray
    delta_k: np.ndarray
    sin_pi_delta_k: np.ndarray
    projection: np.ndarray
    distinct_projection_count: int
    ap_findings: list[Progression] = field(default_factory=list)
    zeros: ZeroSet | None = None

    @property
    def max_abs_delta_k(self) -> float:
        return float(np.max(np.abs(self.delta_k)))

    def as_dict(self) -> dict:
        return {
            "delta": self.delta,
            "gamma": self.gamma,
            "window": list(self.window),
            "zero_count": int(self.ks.size),
            "max_abs_delta_k": self.max_abs_delta_k,
            "max_abs_im": float(np.max(np.abs(self.zeros.zeros.imag))) if self.zeros is not None else None,
            "min_separation": self.zeros.min_separation if self.zeros is not None else None,
            "per_k": [
                {"k": int(k), "delta_k": float(d), "abs_sin_pi_delta_k": float(s)}
                for k, d, s in zip(self.ks, self.delta_k, self.sin_pi_delta_k)
            ],
            "projection": self.projection.tolist(),
            "distinct_projection_count": self.distinct_projection_count,
            "ap_findings": [p.as_dict() for p in self.ap_findings],
        }


def example1_analysis(delta: float, window: tuple[float, float] = (-100.5, 100.5), *, seed: int | None = None) -> Example1Report:
    """Zeros of ``sin(pi z) + delta sin z`` as perturbed integers ``k + delta_k``."""
    if not 0 < delta <= 0.5:
        raise ValueError("delta must lie in (0, 1/2]")
    phi = example1_phi(delta)
    zs = find_zeros(phi, window, seed=seed)
    x = zs.zeros.real
    ks = np.rint(x).astype(np.int64)
    dk = x - ks
    proj = np.mod(x + 0.5, 1.0) - 0.5
    srt = np.sort(proj)
    distinct = int(1 + np.count_nonzero(np.diff(srt) > DISTINCT_TOL)) if srt.size else 0
    aps = progression_scan(zs, 5, 0.5, 1e-6)
    return Example1Report(
        delta=delta,
        gamma=math.asin(delta) / math.pi,
        window=zs.window,
        ks=ks,
        delta_k=dk,
        sin_pi_delta_k=np.abs(np.sin(np.pi * dk)),
        projection=proj,
        distinct_projection_count=distinct,
        ap_findings=aps,
        zeros=zs,
    )
