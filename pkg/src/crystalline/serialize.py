"""CSV and JSON serialization for zero sets, spectra, measure pairs and reports."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .exppoly import ExpPoly
from .zerofinder import ZeroSet


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_zeros_csv(zs: ZeroSet, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["re", "im", "abs_phi", "abs_dphi"])
    for z, r, d in zip(zs.zeros, zs.newton_residuals, zs.abs_derivatives):
        w.writerow([fmt(z.real), fmt(z.imag), fmt(r), fmt(d)])


def read_zeros_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([complex(float(r["re"]), float(r["im"])) for r in rows], dtype=np.complex128)


def write_spectrum_csv(sp, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["s", "a_re", "a_im", "side"])
    for s, a in zip(sp.s, sp.a):
        w.writerow([fmt(s), fmt(a.real), fmt(a.imag), "merged"])
    for side in (sp.upper, sp.lower):
        if side is None:
            continue
        for s, c in zip(side.s, side.coeffs):
            w.writerow([fmt(s), fmt(c.real), fmt(c.imag), side.side])


def spectrum_json(sp) -> dict:
    doc = sp.as_dict()
    for side in (sp.upper, sp.lower):
        if side is not None:
            doc[side.side] = side.as_dict()
    return doc


def write_atoms_csv(pair, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["re", "im", "c_re", "c_im"])
    for z, c in zip(pair.positions, pair.weights):
        w.writerow([fmt(z.real), fmt(z.imag), fmt(c.real), fmt(c.imag)])


def write_spectral_atoms_csv(pair, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["s", "a_re", "a_im"])
    for s, a in zip(pair.spectrum.s, pair.spectrum.a):
        w.writerow([fmt(s), fmt(a.real), fmt(a.imag)])


def emit_plot_data(pair, path) -> tuple[Path, Path]:
    """Write ``<path>_atoms.csv`` and ``<path>_spectral.csv`` for external plotting."""
    base = Path(path)
    atoms = base.with_name(base.name + "_atoms.csv")
    spectral = base.with_name(base.name + "_spectral.csv")
    with open(atoms, "w", newline="") as fh:
        write_atoms_csv(pair, fh)
    with open(spectral, "w", newline="") as fh:
        write_spectral_atoms_csv(pair, fh)
    return atoms, spectral


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_poly(path) -> ExpPoly:
    with open(path) as fh:
        return ExpPoly.from_dict(json.load(fh))
