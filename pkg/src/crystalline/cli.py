"""Command-line entry point: ``crystalline <command> ...``.

Exit status is 0 on success, 1 when a verification fails and 2 on bad input
or a pipeline error.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import serialize
from .dsl import parse_poly_dsl
from .errors import CrystallineError
from .exppoly import ExpPoly, derivative
from .measure import build_measure_pair, example1_analysis, progression_scan
from .spectrum import compute_spectrum
from .verifier import GaussianTest, report_dicts, verify_suite
from .zerofinder import find_zeros

DEFAULT_CUTOFF = 20.0
DEFAULT_WINDOW = (-50.5, 50.5)
DEFAULT_TOL = 1e-6


@dataclass
class RunConfig:
    command: str
    phi_spec: str | None = None
    psi_spec: str | None = None
    window: tuple[float, float] = DEFAULT_WINDOW
    cutoff: float = DEFAULT_CUTOFF
    tolerance: float = DEFAULT_TOL
    out: str | None = None
    fmt: str | None = None
    seed: int | None = None
    gaussians: list[GaussianTest] = field(default_factory=lambda: [GaussianTest(1.0, 0.0)])
    delta: float = 0.5
    zeros_path: str | None = None
    min_len: int = 5
    min_diff: float = 0.5
    plot_data: str | None = None

    def validate(self) -> None:
        if not self.window[0] < self.window[1]:
            raise ValueError("window must satisfy A < B")
        if self.cutoff <= 0:
            raise ValueError("cutoff must be positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.fmt not in (None, "csv", "json"):
            raise ValueError("format must be csv or json")


def load_poly_arg(spec: str) -> ExpPoly:
    """A DSL string, or a path to a JSON document in canonical term form."""
    if spec.endswith(".json") and Path(spec).exists():
        return serialize.load_poly(spec)
    return parse_poly_dsl(spec)


def parse_gaussians(text: str) -> list[GaussianTest]:
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        a, _, x0 = item.partition(":")
        out.append(GaussianTest(float(a), float(x0 or 0.0)))
    return out


def _resolve(cfg: RunConfig) -> tuple[ExpPoly, ExpPoly | None]:
    if cfg.phi_spec is None:
        raise ValueError("--phi is required")
    phi = load_poly_arg(cfg.phi_spec)
    psi = None
    if cfg.psi_spec is not None:
        psi = derivative(phi) if cfg.psi_spec == "dphi" else load_poly_arg(cfg.psi_spec)
    return phi, psi


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _format_for(cfg: RunConfig, default: str) -> str:
    if cfg.fmt:
        return cfg.fmt
    if cfg.out and cfg.out.endswith(".json"):
        return "json"
    if cfg.out and cfg.out.endswith(".csv"):
        return "csv"
    return default


def run(cfg: RunConfig) -> int:
    cfg.validate()
    cmd = cfg.command
    if cmd == "zeros":
        phi, _ = _resolve(cfg)
        zs = find_zeros(phi, cfg.window, seed=cfg.seed)
        if _format_for(cfg, "csv") == "json":
            doc = {
                "phi": phi.to_dict(),
                "window": list(zs.window),
                "count": zs.count,
                "min_separation": zs.min_separation,
                "min_abs_derivative": zs.min_abs_derivative,
                "zeros": [{"re": z.real, "im": z.imag} for z in zs.zeros.tolist()],
            }
            _emit(serialize.dumps(doc), cfg.out)
        else:
            buf = io.StringIO()
            serialize.write_zeros_csv(zs, buf)
            _emit(buf.getvalue(), cfg.out)
        return 0
    if cmd == "spectrum":
        phi, psi = _resolve(cfg)
        if psi is None:
            raise ValueError("--psi is required")
        sp = compute_spectrum(psi, phi, cfg.cutoff)
        if _format_for(cfg, "csv") == "json":
            _emit(serialize.dumps(serialize.spectrum_json(sp)), cfg.out)
        else:
            buf = io.StringIO()
            serialize.write_spectrum_csv(sp, buf)
            _emit(buf.getvalue(), cfg.out)
        return 0
    if cmd == "measure":
        phi, psi = _resolve(cfg)
        if psi is None:
            raise ValueError("--psi is required")
        pair = build_measure_pair(psi, phi, cfg.window, cfg.cutoff, seed=cfg.seed)
        _emit(serialize.dumps(pair.as_dict()), cfg.out)
        if cfg.plot_data:
            serialize.emit_plot_data(pair, cfg.plot_data)
        return 0
    if cmd == "verify":
        phi, psi = _resolve(cfg)
        if psi is None:
            raise ValueError("--psi is required")
        reports = verify_suite(psi, phi, cfg.gaussians, cfg.window, cfg.cutoff, cfg.tolerance, seed=cfg.seed)
        _emit(serialize.dumps(report_dicts(reports)), cfg.out)
        return 0 if all(r.passed for r in reports) else 1
    if cmd == "example1":
        rep = example1_analysis(cfg.delta, cfg.window, seed=cfg.seed)
        _emit(serialize.dumps(rep.as_dict()), cfg.out)
        return 0
    if cmd == "scan-ap":
        if cfg.zeros_path is None:
            raise ValueError("--zeros is required")
        zeros = serialize.read_zeros_csv(cfg.zeros_path)
        found = progression_scan(zeros, cfg.min_len, cfg.min_diff, cfg.tolerance)
        _emit(serialize.dumps([p.as_dict() for p in found]), cfg.out)
        return 0
    raise ValueError(f"unknown command {cmd!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crystalline", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=None, help="rectangle perturbation seed (env CRYSTALLINE_SEED)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, psi=False, window=False, cutoff=False, out_required=False):
        p.add_argument("--phi", required=True, help="DSL string or JSON term file")
        if psi:
            p.add_argument("--psi", required=True, help="DSL string, JSON term file, or 'dphi'")
        if window:
            p.add_argument("--window", nargs=2, type=float, metavar=("A", "B"), default=list(DEFAULT_WINDOW))
        if cutoff:
            p.add_argument("--cutoff", type=float, default=DEFAULT_CUTOFF)
        p.add_argument("--out", required=out_required)

    p = sub.add_parser("zeros", help="zeros of phi in a window")
    common(p, window=True)
    p.add_argument("--format", dest="fmt", choices=["csv", "json"])

    p = sub.add_parser("spectrum", help="merged Fourier-side atoms")
    common(p, psi=True, cutoff=True)
    p.add_argument("--format", dest="fmt", choices=["csv", "json"])

    p = sub.add_parser("measure", help="measure pair as JSON")
    common(p, psi=True, window=True, cutoff=True, out_required=True)
    p.add_argument("--plot-data", help="path prefix for atoms/spectral CSV files")

    p = sub.add_parser("verify", help="check the summation formula for Gaussians")
    common(p, psi=True, window=True, cutoff=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--gaussians", default="1:0", help='comma-separated "a:x0" pairs')

    p = sub.add_parser("example1", help="perturbed-integer analysis of sin(pi z) + delta sin z")
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--window", nargs=2, type=float, metavar=("A", "B"), default=[-100.5, 100.5])
    p.add_argument("--out")

    p = sub.add_parser("scan-ap", help="arithmetic progressions among zeros read from CSV")
    p.add_argument("--zeros", required=True)
    p.add_argument("--min-len", type=int, default=5)
    p.add_argument("--min-diff", type=float, default=0.5)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    seed = ns.seed
    if seed is None and os.environ.get("CRYSTALLINE_SEED"):
        seed = int(os.environ["CRYSTALLINE_SEED"])
    cfg = RunConfig(command=ns.command, seed=seed, out=getattr(ns, "out", None))
    cfg.phi_spec = getattr(ns, "phi", None)
    cfg.psi_spec = getattr(ns, "psi", None)
    if getattr(ns, "window", None) is not None:
        cfg.window = (float(ns.window[0]), float(ns.window[1]))
    if getattr(ns, "cutoff", None) is not None:
        cfg.cutoff = ns.cutoff
    if getattr(ns, "tol", None) is not None:
        cfg.tolerance = ns.tol
    cfg.fmt = getattr(ns, "fmt", None)
    if getattr(ns, "gaussians", None) is not None:
        cfg.gaussians = parse_gaussians(ns.gaussians)
    if getattr(ns, "delta", None) is not None:
        cfg.delta = ns.delta
    cfg.zeros_path = getattr(ns, "zeros", None)
    if getattr(ns, "min_len", None) is not None:
        cfg.min_len = ns.min_len
    if getattr(ns, "min_diff", None) is not None:
        cfg.min_diff = ns.min_diff
    cfg.plot_data = getattr(ns, "plot_data", None)
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return run(config_from_args(ns))
    except (CrystallineError, ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"crystalline {ns.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
