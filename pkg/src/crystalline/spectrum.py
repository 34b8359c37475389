"""Fourier-side data of a pair (psi, phi): half-plane expansions of psi/phi.

Above the zero strip ``1/phi`` is a convergent series in ``exp(2 pi i s z)``
with frequencies in the additive semigroup generated by the gaps
``alpha_j - alpha_1``.  Its coefficients are obtained by formal division,
``C = 1 / (1 + h)`` with ``h = sum_{j>=2} (d_j/d_1) w^{gap_j}``, solving
``C + h*C = 1`` frequency by frequency.  This equals the geometric series
``sum_k (-h)^k`` in exact arithmetic without forming the large intermediate
powers ``h^k``.  The lower half-plane is handled by mirroring ``z -> -z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import BlowupGuard, CutoffMismatch, CutoffTooSmall, SingleTerm
from .exppoly import DEFAULT_MARGIN, TAU_FREQ, ExpPoly, evaluate, mirror, strip_bounds, term_moduli_sum

PRUNE_REL = 1e-14
BLOWUP = 1e300
TWO_PI_I = 2j * math.pi


def cluster_merge(freqs: np.ndarray, coeffs: np.ndarray | None = None, tol: float = TAU_FREQ):
    """Merge frequencies closer than ``tol``; keep the smallest value, sum coefficients."""
    freqs = np.asarray(freqs, dtype=np.float64)
    if freqs.size == 0:
        return freqs, (np.zeros(0, np.complex128) if coeffs is not None else None)
    order = np.argsort(freqs, kind="stable")
    f = freqs[order]
    starts = np.concatenate([[0], np.flatnonzero(np.diff(f) > tol) + 1])
    rep = f[starts]
    if coeffs is None:
        return rep, None
    c = np.asarray(coeffs, dtype=np.complex128)[order]
    return rep, np.add.reduceat(c, starts)


def semigroup_support(gaps: np.ndarray, limit: float, tol: float = TAU_FREQ) -> np.ndarray:
    """Sorted distinct sums ``sum n_j gaps_j <= limit`` (including 0), merged within ``tol``."""
    support = np.zeros(1)
    frontier = np.zeros(1)
    while frontier.size:
        cand = (frontier[:, None] + gaps[None, :]).ravel()
        cand = cand[cand <= limit + tol]
        if cand.size == 0:
            break
        cand, _ = cluster_merge(cand, tol=tol)
        k = np.searchsorted(support, cand)
        lo = np.abs(cand - support[np.clip(k - 1, 0, support.size - 1)]) <= tol
        hi = np.abs(cand - support[np.clip(k, 0, support.size - 1)]) <= tol
        frontier = cand[~(lo | hi)]
        support, _ = cluster_merge(np.concatenate([support, frontier]), tol=tol)
    return support


def _locate(support: np.ndarray, targets: np.ndarray, tol: float) -> np.ndarray:
    k = np.searchsorted(support, targets)
    lo = np.clip(k - 1, 0, support.size - 1)
    hi = np.clip(k, 0, support.size - 1)
    pick = np.where(np.abs(support[lo] - targets) <= np.abs(support[hi] - targets), lo, hi)
    ok = np.abs(support[pick] - targets) <= tol
    return np.where(ok, pick, -1)


def inverse_series(alphas: np.ndarray, coeffs: np.ndarray, limit: float):
    """Frequencies ``t`` and coefficients ``c_t`` with ``1/phi = e^{-2 pi i alpha_1 z}/d_1 * sum c_t w^t``."""
    gaps = alphas[1:] - alphas[0]
    ratios = coeffs[1:] / coeffs[0]
    support = semigroup_support(gaps, limit)
    pred = np.stack([_locate(support, support - g, 10 * TAU_FREQ) for g in gaps], axis=1)
    pred[0, :] = -1
    c = _kernels.series_recursion(support, pred.astype(np.int64), ratios.astype(np.complex128), float(gaps.min()))
    if not np.all(np.isfinite(c)) or np.max(np.abs(c)) > BLOWUP:
        raise BlowupGuard("series coefficients exceed 1e300")
    return support, c


@dataclass
class SpectrumSide:
    """One half-plane expansion ``psi/phi = sum_s coeff_s exp(+-2 pi i s z)``.

    ``side == "upper"``: valid for ``Im z >= threshold`` with ``exp(+2 pi i s z)``.
    ``side == "lower"``: valid for ``Im z <= -threshold`` with ``exp(-2 pi i s z)``.
    """

    side: str
    threshold: float
    cutoff: float
    s: np.ndarray
    coeffs: np.ndarray
    expansion_order: int
    lower_bound: float
    margin: float = DEFAULT_MARGIN

    def __len__(self) -> int:
        return len(self.s)

    def partial_sum(self, z):
        z = np.asarray(z, dtype=np.complex128)
        sign = 1.0 if self.side == "upper" else -1.0
        return (self.coeffs[:, None] * np.exp(sign * TWO_PI_I * self.s[:, None] * np.ravel(z)[None, :])).sum(axis=0).reshape(z.shape)

    def as_dict(self) -> dict:
        return {
            "side": self.side,
            "threshold": self.threshold,
            "cutoff": self.cutoff,
            "expansion_order": self.expansion_order,
            "entries": [
                {"s": float(s), "c_re": float(c.real), "c_im": float(c.imag)} for s, c in zip(self.s, self.coeffs)
            ],
        }


def expand_upper(psi: ExpPoly, phi: ExpPoly, F: float, margin: float = DEFAULT_MARGIN) -> SpectrumSide:
    """Expansion of ``psi/phi`` above the zero strip, truncated to frequencies ``s <= F``."""
    if len(phi) < 2:
        raise SingleTerm("phi needs at least two terms")
    a, d = phi.alpha_array, phi.coeff_array
    beta, b = psi.alpha_array, psi.coeff_array
    lower_bound = beta[0] - a[0]
    if F < lower_bound - TAU_FREQ:
        raise CutoffTooSmall(f"cutoff {F} below the smallest frequency {lower_bound}")
    limit = F + a[0] - beta[0]
    t, c = inverse_series(a, d, limit)
    gmin = a[1] - a[0]
    order = int(math.ceil(limit / gmin)) + 1
    s = ((beta - a[0])[:, None] + t[None, :]).ravel()
    coef = ((b / d[0])[:, None] * c[None, :]).ravel()
    keep = s <= F + TAU_FREQ
    s, coef = cluster_merge(s[keep], coef[keep])
    nz = coef != 0
    s, coef = s[nz], coef[nz]
    thr = strip_bounds(phi, margin).r_plus
    return SpectrumSide("upper", thr, float(F), s, coef, order, float(lower_bound), margin)


def expand_lower(psi: ExpPoly, phi: ExpPoly, F: float, margin: float = DEFAULT_MARGIN) -> SpectrumSide:
    """Expansion below the strip: ``psi/phi = sum_s q_s exp(-2 pi i s z)``, ``s <= F``."""
    up = expand_upper(mirror(psi), mirror(phi), F, margin)
    return SpectrumSide("lower", up.threshold, up.cutoff, up.s, up.coeffs, up.expansion_order, up.lower_bound, margin)


def tail_bound(side: SpectrumSide, psi: ExpPoly, phi: ExpPoly, z) -> np.ndarray:
    """Bound on ``|psi/phi - partial_sum|`` at points beyond the side's threshold.

    At the threshold height ``R`` the whole series is majorized by
    ``sum_j |b_j| e^{-2 pi (beta_j - alpha_1) R} / (|d_1| (1 - margin))``.  Every
    discarded frequency exceeds the cutoff ``F``, so at depth ``y - R`` beyond
    the threshold its share shrinks by at least ``e^{-2 pi F (y - R)}``.  A
    rounding floor proportional to the summed term moduli is added.
    """
    z = np.asarray(z, dtype=np.complex128)
    if side.side == "lower":
        psi_m, phi_m = mirror(psi), mirror(phi)
        zz = -z
    else:
        psi_m, phi_m = psi, phi
        zz = z
    a1 = phi_m.alphas[0]
    d1 = abs(phi_m.coeffs[0])
    R = side.threshold
    majorant = term_moduli_sum(psi_m, 1j * R) * math.exp(2 * math.pi * a1 * R) / (d1 * (1 - side.margin))
    depth = np.maximum(zz.imag - R, 0.0)
    trunc = majorant * np.exp(-2 * math.pi * max(side.cutoff, 0.0) * depth)
    sign = 1.0 if side.side == "upper" else -1.0
    mods = (np.abs(side.coeffs)[:, None] * np.abs(np.exp(sign * TWO_PI_I * side.s[:, None] * np.ravel(z)[None, :]))).sum(axis=0)
    rounding = 64 * np.finfo(float).eps * mods.reshape(z.shape)
    return trunc + rounding


def ratio(psi: ExpPoly, phi: ExpPoly, z):
    return evaluate(psi, z) / evaluate(phi, z)


@dataclass
class GrowthProfile:
    radii: np.ndarray
    counts: np.ndarray
    slope: float

    def as_dict(self) -> dict:
        return {"radii": self.radii.tolist(), "counts": self.counts.tolist(), "slope": self.slope}


@dataclass
class Spectrum:
    """Merged spectral atoms ``(s, a_s)`` truncated at ``|s| <= cutoff``.

    ``s``/``a`` omit coefficients below ``PRUNE_REL * sup_coeff``; ``support``
    keeps every frequency whose computed coefficient is nonzero and is what the
    growth profile counts.
    """

    s: np.ndarray
    a: np.ndarray
    cutoff: float
    sup_coeff: float
    support: np.ndarray = field(default_factory=lambda: np.zeros(0))
    upper: SpectrumSide | None = None
    lower: SpectrumSide | None = None
    growth: GrowthProfile | None = field(default=None)

    def __len__(self) -> int:
        return len(self.s)

    def entries(self) -> list[tuple[float, complex]]:
        return list(zip(self.s.tolist(), self.a.tolist()))

    def as_dict(self) -> dict:
        out = {
            "cutoff": self.cutoff,
            "sup_coeff": self.sup_coeff,
            "entries": [{"s": float(s), "a_re": float(a.real), "a_im": float(a.imag)} for s, a in zip(self.s, self.a)],
        }
        if self.growth is not None:
            out["growth"] = self.growth.as_dict()
        return out


def merge_spectrum(lower: SpectrumSide, upper: SpectrumSide) -> Spectrum:
    """``a_s = q_s/(2 pi i)`` at ``s`` and ``a_{-s} = -p_s/(2 pi i)``; coincident frequencies add."""
    if lower.side != "lower" or upper.side != "upper":
        raise ValueError("merge_spectrum expects (lower, upper)")
    if abs(lower.cutoff - upper.cutoff) > TAU_FREQ:
        raise CutoffMismatch(f"cutoffs {lower.cutoff} and {upper.cutoff} differ")
    s = np.concatenate([lower.s, -upper.s])
    a = np.concatenate([lower.coeffs / TWO_PI_I, -upper.coeffs / TWO_PI_I])
    s, a = cluster_merge(s, a)
    support = s[a != 0]
    sup = float(np.abs(a).max()) if a.size else 0.0
    if a.size:
        keep = np.abs(a) >= PRUNE_REL * sup
        s, a = s[keep], a[keep]
    sp = Spectrum(s=s, a=a, cutoff=lower.cutoff, sup_coeff=sup, support=support, upper=upper, lower=lower)
    if support.size:
        radii = np.geomspace(1.0, max(lower.cutoff, 1.0), 8)
        sp.growth = growth_profile(sp, radii)
    return sp


def compute_spectrum(psi: ExpPoly, phi: ExpPoly, F: float, margin: float = DEFAULT_MARGIN) -> Spectrum:
    return merge_spectrum(expand_lower(psi, phi, F, margin), expand_upper(psi, phi, F, margin))


def growth_profile(sp: Spectrum, radii: Sequence[float]) -> GrowthProfile:
    """Counts ``#{s in support : |s| < r}`` and the least-squares slope of log count on log r.

    A frequency within ``TAU_FREQ`` of ``r`` counts as on the boundary and is excluded.
    """
    radii = np.asarray(radii, dtype=np.float64)
    pts = sp.support if sp.support.size else sp.s
    mags = np.sort(np.abs(pts))
    counts = np.searchsorted(mags, radii - TAU_FREQ, side="left")
    ok = (counts > 0) & (radii > 0)
    if ok.sum() >= 2:
        slope = float(np.polyfit(np.log(radii[ok]), np.log(counts[ok]), 1)[0])
    else:
        slope = 0.0
    return GrowthProfile(radii=radii, counts=counts.astype(np.int64), slope=slope)


def coeff_sup_profile(psi: ExpPoly, phi: ExpPoly, cutoffs: Sequence[float]) -> list[tuple[float, float]]:
    return [(float(F), compute_spectrum(psi, phi, F).sup_coeff) for F in cutoffs]


def log_growth_rate(s: np.ndarray, coeffs: np.ndarray) -> float:
    """Least-squares slope of ``log|coeff|`` against ``|s|``."""
    mag = np.abs(coeffs)
    ok = mag > 0
    return float(np.polyfit(np.abs(s[ok]), np.log(mag[ok]), 1)[0])


def coefficient_envelope(sp: Spectrum, bounded: bool) -> tuple[float, float]:
    """``(A, kappa)`` with ``|a_s| <= A exp(kappa |s|)`` on the computed entries.

    For bounded spectra ``kappa = 0``; otherwise ``kappa`` is the fitted log-linear
    growth rate (never negative) and ``A`` the smallest constant that covers
    every entry.
    """
    if sp.a.size == 0:
        return 0.0, 0.0
    mag = np.abs(sp.a)
    kappa = 0.0 if bounded or sp.a.size < 2 else max(0.0, log_growth_rate(sp.s, sp.a))
    A = float(np.max(mag * np.exp(-kappa * np.abs(sp.s))))
    return A, kappa


def minkowski_superset(psi: ExpPoly, phi: ExpPoly, F: float) -> np.ndarray:
    """Brute-force enumeration of the frequency superset of the merged spectrum.

    Upper side: ``{beta_j - alpha_1} + {sum_k n_k (alpha_k - alpha_1)}``; lower
    side mirrored.  Enumerates nonnegative integer vectors directly, independent
    of :func:`semigroup_support`.
    """
    def one_side(beta, alpha):
        gaps = [g - alpha[0] for g in alpha[1:]]
        base = [bj - alpha[0] for bj in beta]
        vals = []

        def rec(k, acc):
            if k == len(gaps):
                for b0 in base:
                    if b0 + acc <= F + TAU_FREQ:
                        vals.append(b0 + acc)
                return
            n = 0
            while acc + n * gaps[k] + min(base) <= F + TAU_FREQ:
                rec(k + 1, acc + n * gaps[k])
                n += 1

        rec(0, 0.0)
        return np.array(vals)

    up = one_side(list(psi.alphas), list(phi.alphas))
    lo = one_side([-x for x in reversed(psi.alphas)], [-x for x in reversed(phi.alphas)])
    s, _ = cluster_merge(np.concatenate([lo, -up]))
    return s
