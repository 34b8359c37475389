import math

import mpmath
import numpy as np
import pytest
from scipy.optimize import brentq

from crystalline import (
    Rect,
    count_zeros_rect,
    example1_phi,
    find_zeros,
    from_trig,
    min_abs_derivative,
    parse_poly_dsl,
    refine_zero,
    separation,
)
from crystalline.errors import BoundaryTooClose, DerivativeUnderflow, NewtonDivergence, SingleTerm
from crystalline.exppoly import evaluate, make_exp_poly, strip_bounds

SIN_PI = from_trig("sin", math.pi)
STRIP = parse_poly_dsl("2+e(1)")
LN2_2PI = math.log(2) / (2 * math.pi)


def bracketed_real_zeros(f, lo, hi, n=20000):
    """Oracle: sign changes on a fine grid, refined with brentq."""
    x = np.linspace(lo, hi, n)
    y = f(x)
    idx = np.flatnonzero(np.sign(y[:-1]) != np.sign(y[1:]))
    return np.array([brentq(f, x[i], x[i + 1], xtol=1e-15) for i in idx])


class TestRect:
    def test_geometry(self):
        r = Rect(-1, 3, -0.5, 0.5)
        assert r.width == 4 and r.height == 1 and r.center == 1 + 0j
        assert r.contains(0.5j) and not r.contains(0.6j)
        a, b = r.split(0.25)
        assert (a.x_max, b.x_min) == (0.0, 0.0)
        g = r.inflate(0.1)
        assert g.width == pytest.approx(4.4) and g.center == r.center

    def test_degenerate(self):
        with pytest.raises(ValueError):
            Rect(1, 1, 0, 1)


class TestCount:
    def test_gamma5_sine(self):
        assert count_zeros_rect(SIN_PI, Rect(-5.5, 5.5, -5.5, 5.5)) == 11

    def test_gamma5_example1(self):
        assert count_zeros_rect(example1_phi(0.5), Rect(-5.5, 5.5, -5.5, 5.5)) == 11

    def test_empty_rect(self):
        assert count_zeros_rect(SIN_PI, Rect(0.1, 0.4, -1, 1)) == 0

    def test_boundary_through_zero_is_perturbed(self):
        # the edge x=1 passes through a zero; the seeded inflation moves it
        n = count_zeros_rect(SIN_PI, Rect(-0.5, 1.0, -0.5, 0.5))
        assert n in (1, 2)

    def test_no_retries_raises(self):
        with pytest.raises(BoundaryTooClose):
            count_zeros_rect(SIN_PI, Rect(-0.5, 1.0, -0.5, 0.5), max_perturbations=0)

    def test_strip_rect(self):
        r = Rect(-3, 3, -1, 1)
        assert count_zeros_rect(STRIP, r) == 6


class TestRefine:
    def test_sine_nearest(self):
        assert abs(refine_zero(SIN_PI, 3.1) - 3.0) < 1e-12

    def test_example1_one(self):
        z = refine_zero(example1_phi(0.5), 1.0)
        dk = z.real - 1
        assert abs(math.sin(math.pi * dk)) <= 0.5
        assert abs(z.imag) < 1e-12

    def test_critical_point(self):
        with pytest.raises((DerivativeUnderflow, NewtonDivergence)):
            refine_zero(SIN_PI, 0.5)

    def test_box_escape(self):
        with pytest.raises(NewtonDivergence):
            refine_zero(SIN_PI, 0.45, box=Rect(0.4, 0.49, -0.05, 0.05))


class TestFindZeros:
    def test_sine(self):
        zs = find_zeros(SIN_PI, (-5.5, 5.5))
        assert np.allclose(zs.zeros, np.arange(-5, 6), atol=1e-13)
        assert zs.count == 11 and zs.is_real

    def test_example1_matches_bracketing(self):
        zs = find_zeros(example1_phi(0.5), (-30.5, 30.5))
        ref = bracketed_real_zeros(lambda x: np.sin(np.pi * x) + 0.5 * np.sin(x), -30.5, 30.5)
        assert len(zs) == len(ref) == 61
        assert np.max(np.abs(zs.zeros.real - ref)) < 1e-12
        assert np.max(np.abs(zs.zeros.imag)) < 1e-12

    def test_example1_full_window(self):
        zs = find_zeros(example1_phi(0.5), (-100.5, 100.5))
        dk = zs.zeros.real - np.rint(zs.zeros.real)
        assert len(zs) == 201 == zs.count
        assert np.all(np.abs(dk) <= 1 / 6 + 1e-9)

    def test_strip_closed_form(self):
        zs = find_zeros(STRIP, (-10, 10))
        expect = np.arange(-10, 10) + 0.5 - 1j * LN2_2PI
        assert len(zs) == 20
        assert np.max(np.abs(zs.zeros - expect)) < 1e-12
        assert not zs.is_real

    def test_mpmath_polish(self):
        p = parse_poly_dsl("3+e(1)+(0.5+0.5j)*e(1.4142135623730951)")
        zs = find_zeros(p, (-4.25, 4.25))
        mpmath.mp.dps = 30
        f = lambda z: 3 + mpmath.exp(2j * mpmath.pi * z) + mpmath.mpc(0.5, 0.5) * mpmath.exp(2j * mpmath.pi * mpmath.mpf("1.4142135623730951") * z)
        for z in zs.zeros:
            ref = complex(mpmath.findroot(f, mpmath.mpc(z)))
            assert abs(ref - z) < 1e-12

    def test_zeros_inside_strip(self, catalog_entry):
        _, p, window = catalog_entry
        zs = find_zeros(p, window)
        sb = strip_bounds(p)
        assert np.all(zs.zeros.imag < sb.r_plus + 1e-12)
        assert np.all(zs.zeros.imag > -sb.r_minus - 1e-12)
        assert np.all(zs.newton_residuals < 1e-10)

    def test_count_matches_listed(self, catalog_entry):
        _, p, window = catalog_entry
        zs = find_zeros(p, window)
        inside = [z for z in zs.zeros if zs.count_rect.contains(z)]
        assert zs.count >= len(inside) == len(zs)

    def test_window_consistency(self):
        p = example1_phi(0.5)
        small = find_zeros(p, (-20.5, 20.5)).zeros
        big = find_zeros(p, (-40.5, 40.5)).zeros
        k = np.searchsorted(big.real, small.real - 1e-9)
        assert np.max(np.abs(big[k] - small)) < 1e-12

    def test_seed_determinism(self):
        p = example1_phi(0.5)
        a = find_zeros(p, (-10.5, 10.5), seed=1).zeros
        b = find_zeros(p, (-10.5, 10.5), seed=1).zeros
        assert np.array_equal(a, b)

    def test_closed_window_edges(self):
        zs = find_zeros(SIN_PI, (-10, 10))
        assert len(zs) == 21 and zs.zeros[0].real == pytest.approx(-10) and zs.zeros[-1].real == pytest.approx(10)

    def test_single_term(self):
        with pytest.raises(SingleTerm):
            find_zeros(make_exp_poly([(1.0, 1.0)]), (-1, 1))


class TestDiagnostics:
    def test_min_derivative_sine(self):
        zs = find_zeros(SIN_PI, (-5.5, 5.5))
        assert min_abs_derivative(SIN_PI, zs) == pytest.approx(math.pi, rel=1e-12)

    def test_min_derivative_strip(self):
        zs = find_zeros(STRIP, (-10, 10))
        assert zs.min_abs_derivative == pytest.approx(4 * math.pi, rel=1e-12)

    def test_min_derivative_example1_stable(self):
        p = example1_phi(0.5)
        values = [find_zeros(p, (-w, w)).min_abs_derivative for w in (50.5, 100.5, 200.5)]
        assert min(values) > 0
        assert values[0] >= values[1] >= values[2]
        assert values[2] / values[0] > 0.9

    def test_min_derivative_direct(self):
        p = example1_phi(0.5)
        zs = find_zeros(p, (-100.5, 100.5))
        direct = np.abs(np.pi * np.cos(np.pi * zs.zeros) + 0.5 * np.cos(zs.zeros)).min()
        assert zs.min_abs_derivative == pytest.approx(direct, rel=1e-12)

    def test_separation_integers(self):
        assert separation(np.arange(-5, 6).astype(complex)) == pytest.approx(1.0)

    def test_separation_example1(self):
        zs = find_zeros(example1_phi(0.5), (-100.5, 100.5))
        x = np.sort(zs.zeros.real)
        brute = np.min(np.abs(x[:, None] - x[None, :]) + np.eye(x.size) * 1e9)
        assert zs.min_separation == pytest.approx(brute)
        assert zs.min_separation >= 2 / 3 - 1e-9

    def test_separation_complex(self):
        pts = np.array([0, 1 + 1j, 0.3 + 0.4j])
        assert separation(pts) == pytest.approx(0.5)

    def test_separation_sentinel(self):
        assert separation(np.array([1.0 + 0j])) == math.inf
