import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crystalline import parse_poly_dsl
from crystalline.errors import EmptyPolynomial, EvaluationOverflow, SingleTerm
from crystalline.exppoly import (
    ExpPoly,
    add,
    derivative,
    dominance_ratio_lower,
    dominance_ratio_upper,
    eval_error_bound,
    evaluate,
    example1_phi,
    from_trig,
    is_conjugate_symmetric,
    make_exp_poly,
    mirror,
    multiply,
    scale,
    strip_bounds,
    term_moduli_sum,
)

SIN_PI = from_trig("sin", math.pi)
STRIP = parse_poly_dsl("2+e(1)")


def naive(p, z):
    return sum(b * cmath.exp(2j * math.pi * a * z) for a, b in p.terms)


class TestConstruction:
    def test_euler_sine(self):
        p = make_exp_poly([(0.5, -0.5j), (-0.5, 0.5j)])
        assert p.alphas == (-0.5, 0.5)
        assert p.coeffs == (0.5j, -0.5j)
        assert p == SIN_PI

    def test_exact_cancellation(self):
        with pytest.raises(EmptyPolynomial):
            make_exp_poly([(0.3, 1), (0.3, -1)])

    def test_sorted(self):
        p = make_exp_poly([(1.0, 1), (0.0, 2)])
        assert p.terms == [(0.0, 2), (1.0, 1)]

    def test_near_duplicate_frequencies_merge(self):
        p = make_exp_poly([(0.25, 1), (0.25 + 5e-10, 2)])
        assert len(p) == 1 and p.coeffs[0] == 3

    def test_relative_zero_cut(self):
        p = make_exp_poly([(0.0, 1.0), (1.0, 1e-16)])
        assert len(p) == 1

    def test_empty(self):
        with pytest.raises(EmptyPolynomial):
            make_exp_poly([])

    @pytest.mark.parametrize(
        "kind,rate,sc,expected",
        [
            ("sin", math.pi, 1, [(-0.5, 0.5j), (0.5, -0.5j)]),
            ("cos", math.pi, 1, [(-0.5, 0.5), (0.5, 0.5)]),
        ],
    )
    def test_from_trig(self, kind, rate, sc, expected):
        assert from_trig(kind, rate, sc).terms == expected

    def test_from_trig_unit_rate(self):
        p = from_trig("sin", 1.0, 0.5)
        assert p.alphas[1] == pytest.approx(0.1591549431, abs=1e-10)
        assert p.alphas[0] == -p.alphas[1]
        assert p.coeffs == (0.25j, -0.25j)

    def test_from_trig_rejects(self):
        with pytest.raises(ValueError):
            from_trig("tan", 1.0)
        with pytest.raises(ValueError):
            from_trig("sin", -1.0)

    def test_dict_round_trip(self):
        p = example1_phi(0.5)
        assert ExpPoly.from_dict(json.loads(json.dumps(p.to_dict()))) == p


class TestEvaluate:
    def test_sine_half(self):
        assert evaluate(SIN_PI, 0.5) == pytest.approx(1.0, abs=1e-15)

    def test_example1_at_zero(self):
        assert abs(evaluate(example1_phi(0.5), 0.0)) < 1e-15

    def test_strip_closed_form_root(self):
        z = 0.5 - 1j * math.log(2) / (2 * math.pi)
        assert abs(evaluate(STRIP, z)) < 1e-14

    def test_array_matches_scalar(self, rng):
        p = example1_phi(0.5)
        z = rng.uniform(-30, 30, 50) + 1j * rng.uniform(-2, 2, 50)
        arr = evaluate(p, z)
        ref = np.array([naive(p, w) for w in z])
        assert np.allclose(arr, ref, rtol=0, atol=1e-12)
        assert arr.shape == z.shape

    def test_matches_numpy_sin(self, rng):
        z = rng.uniform(-5, 5, 20) + 1j * rng.uniform(-1, 1, 20)
        assert np.allclose(evaluate(example1_phi(0.3), z), np.sin(np.pi * z) + 0.3 * np.sin(z), atol=1e-13)

    def test_overflow_guard(self):
        with pytest.raises(EvaluationOverflow):
            evaluate(SIN_PI, 300j)
        with pytest.raises(OverflowError):
            evaluate(SIN_PI, np.array([0, 300j]))

    def test_empty_array(self):
        assert evaluate(SIN_PI, np.zeros(0)).shape == (0,)

    def test_error_bound_covers_rounding(self, rng):
        p = example1_phi(0.5)
        z = rng.uniform(-50, 50, 40) + 1j * rng.uniform(-1, 1, 40)
        exact = np.sin(np.pi * z.astype(np.clongdouble)) + 0.5 * np.sin(z.astype(np.clongdouble))
        err = np.abs(evaluate(p, z) - exact.astype(np.complex128))
        assert np.all(err <= eval_error_bound(p, z) + 1e-300)

    def test_term_moduli_sum(self):
        assert term_moduli_sum(SIN_PI, 1j) == pytest.approx(math.cosh(math.pi), rel=1e-14)


class TestAlgebra:
    def test_derivative_sine(self):
        d = derivative(SIN_PI)
        assert d.coeffs[1] == pytest.approx(math.pi / 2)
        assert np.allclose(evaluate(d, np.array([0.0, 1.0, 0.25])), math.pi * np.cos(math.pi * np.array([0, 1, 0.25])))

    def test_derivative_drops_constant(self):
        d = derivative(STRIP)
        assert d.terms == [(1.0, 2j * math.pi)]

    def test_second_derivative(self):
        dd = derivative(derivative(SIN_PI))
        ref = scale(SIN_PI, -math.pi**2)
        assert np.allclose(dd.coeff_array, ref.coeff_array, rtol=1e-15)

    def test_derivative_of_constant(self):
        with pytest.raises(EmptyPolynomial):
            derivative(make_exp_poly([(0.0, 3.0)]))

    def test_add_cancel(self):
        with pytest.raises(EmptyPolynomial):
            add(SIN_PI, scale(SIN_PI, -1))

    def test_add_example1(self):
        p = add(SIN_PI, from_trig("sin", 1.0, 0.5))
        assert len(p) == 4
        assert p == example1_phi(0.5)

    def test_operators(self):
        p, q = SIN_PI, STRIP
        z = 0.3 + 0.2j
        assert (p + q)(z) == pytest.approx(naive(p, z) + naive(q, z))
        assert (p - q)(z) == pytest.approx(naive(p, z) - naive(q, z))
        assert (p * q)(z) == pytest.approx(naive(p, z) * naive(q, z))
        assert (p * 2j)(z) == pytest.approx(2j * naive(p, z))
        assert multiply(p, q) == p * q

    def test_mirror(self):
        z = 0.37 + 0.11j
        assert evaluate(mirror(STRIP), z) == pytest.approx(evaluate(STRIP, -z))

    def test_conjugate_symmetry(self):
        assert is_conjugate_symmetric(example1_phi(0.5))
        assert is_conjugate_symmetric(from_trig("cos", math.pi))
        assert not is_conjugate_symmetric(scale(SIN_PI, 1j))
        assert not is_conjugate_symmetric(STRIP)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(st.floats(-2, 2), st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)),
        min_size=1,
        max_size=5,
    ),
    st.floats(-4, 4),
    st.floats(-0.5, 0.5),
)
def test_derivative_matches_finite_difference(terms, x, y):
    terms = [(a, b) for a, b in terms if abs(b) > 1e-3]
    try:
        p = make_exp_poly(terms)
        dp = derivative(p)
    except EmptyPolynomial:
        return
    z = complex(x, y)
    h = 1e-5
    fd = (evaluate(p, z + h) - evaluate(p, z - h)) / (2 * h)
    scale_ = max(term_moduli_sum(derivative(p), z), 1.0)
    assert abs(evaluate(dp, z) - fd) <= 1e-6 * scale_


class TestStripBounds:
    def test_sine(self):
        sb = strip_bounds(SIN_PI, 0.5)
        assert sb.r_plus == pytest.approx(math.log(2) / (2 * math.pi), abs=1e-11)
        assert sb.r_minus == pytest.approx(sb.r_plus, abs=1e-12)

    def test_strip_dominance(self):
        sb = strip_bounds(STRIP, 0.5)
        # lowest term 2 dominates e^{2 pi i z} everywhere Im z >= 0 with ratio <= 1/2
        assert sb.r_plus == 0.0
        assert sb.r_minus == pytest.approx(math.log(4) / (2 * math.pi), abs=1e-11)
        ys = np.linspace(sb.r_plus, sb.r_plus + 3, 50)
        assert np.all(dominance_ratio_upper(STRIP, 1j * ys) <= 0.5 + 1e-12)
        ys = np.linspace(sb.r_minus, sb.r_minus + 3, 50)
        assert np.all(dominance_ratio_lower(STRIP, -1j * ys) <= 0.5 + 1e-12)

    def test_dominance_holds_at_returned_height(self, catalog_entry):
        _, p, _ = catalog_entry
        sb = strip_bounds(p)
        assert dominance_ratio_upper(p, 1j * sb.r_plus)[0] <= 0.5
        assert dominance_ratio_lower(p, -1j * sb.r_minus)[0] <= 0.5
        if sb.r_plus > 1e-9:
            assert dominance_ratio_upper(p, 1j * (sb.r_plus - 1e-9))[0] > 0.5

    def test_single_term(self):
        with pytest.raises(SingleTerm):
            strip_bounds(make_exp_poly([(1.0, 1.0)]))

    def test_bad_margin(self):
        with pytest.raises(ValueError):
            strip_bounds(SIN_PI, 1.5)
