"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--cutoff 120] [--json out.json]
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from crystalline import _kernels, example1_phi, find_zeros
from crystalline.spectrum import TAU_FREQ, _locate, semigroup_support


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def recursion_inputs(phi, limit):
    a, d = phi.alpha_array, phi.coeff_array
    gaps = a[1:] - a[0]
    support = semigroup_support(gaps, limit)
    pred = np.stack([_locate(support, support - g, 10 * TAU_FREQ) for g in gaps], axis=1).astype(np.int64)
    pred[0, :] = -1
    return support, pred, (d[1:] / d[0]).astype(np.complex128), float(gaps.min())


def cases(args):
    phi = example1_phi(0.5)
    rng = np.random.default_rng(0)
    z = rng.uniform(-500, 500, args.points) + 1j * rng.uniform(-1, 1, args.points)
    rec = recursion_inputs(phi, args.cutoff)
    x = np.ascontiguousarray(np.sort(find_zeros(phi, (-args.window, args.window)).zeros.real))
    yield "eval_terms", f"{args.points} points", (phi.alpha_array, phi.coeff_array, z), (
        _kernels.eval_terms_numpy,
        _kernels.eval_terms_numba,
    )
    yield "series_recursion", f"F={args.cutoff:g}, {rec[0].size} freqs", rec, (
        _kernels.series_recursion_numpy,
        _kernels.series_recursion_numba,
    )
    yield "progression_scan", f"{x.size} zeros", (x, 5, 0.5, 1e-6), (
        _kernels.progression_scan_numpy,
        _kernels.progression_scan_numba,
    )


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--cutoff", type=float, default=120.0)
    ap.add_argument("--window", type=float, default=200.5)
    ap.add_argument("--json")
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable")

    rows = []
    print(f"{'kernel':<18} {'size':<26} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8}  agree")
    for name, size, inputs, (np_fn, nb_fn) in cases(args):
        nb_fn(*inputs)  # compile outside the timing
        t_np, r_np = best_of(lambda: np_fn(*inputs), args.repeat)
        t_nb, r_nb = best_of(lambda: nb_fn(*inputs), args.repeat)
        if name == "progression_scan":
            agree = sorted(map(tuple, r_np.tolist())) == sorted(map(tuple, r_nb.tolist()))
        else:
            agree = bool(np.allclose(r_np, r_nb, rtol=1e-12, atol=1e-12 * np.abs(r_nb).max()))
        rows.append({"kernel": name, "size": size, "numpy_s": t_np, "numba_s": t_nb, "speedup": t_np / t_nb, "agree": agree})
        print(f"{name:<18} {size:<26} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x  {agree}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
