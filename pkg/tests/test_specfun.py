import math

import numpy as np
import pytest
from scipy.special import jn

import oracles
from spinmap.specfun import (
    QuadratureConvergenceError,
    QuadratureResult,
    bessel_i0e,
    bessel_i1e,
    bessel_j0,
    bessel_j1,
    integrate_adaptive,
)

# frozen from the independent series oracles in oracles.py
J0_AT_10 = -0.24593576445134835
J1_AT_5 = -0.32757913759146523
I0E_AT_1 = 0.46575960759364043
I0E_PLUS_I1E_AT_60 = 0.10279117936263857
J0_FIRST_ROOT = 2.404825557695773
I0E_PLUS_I1E_AT_HALF = 0.8014560736340218


class TestBesselJ:
    def test_j0_origin(self):
        assert bessel_j0(0.0) == 1.0

    def test_j1_origin(self):
        assert bessel_j1(0.0) == 0.0

    def test_j1_leading_series(self):
        # J1(x)/x -> 1/2 as x -> 0+
        x = 1e-8
        assert bessel_j1(x) / x == pytest.approx(0.5, rel=1e-12)

    def test_j0_at_10_frozen(self):
        assert bessel_j0(10.0) == pytest.approx(J0_AT_10, rel=1e-12)

    def test_j1_at_5_frozen(self):
        assert bessel_j1(5.0) == pytest.approx(J1_AT_5, rel=1e-12)

    def test_j0_matches_series_oracle(self):
        for x in (0.3, 1.7, 4.0, 12.5, 30.0):
            assert bessel_j0(x) == pytest.approx(oracles.j0_series(x), abs=1e-13)
            assert bessel_j1(x) == pytest.approx(oracles.j1_series(x), abs=1e-13)

    def test_first_root_located_by_oracle_bisection(self):
        root = oracles.bisect_root(oracles.j0_series, 2.0, 3.0)
        assert root == pytest.approx(J0_FIRST_ROOT, abs=1e-14)
        assert abs(bessel_j0(root)) < 1e-12

    def test_recurrence(self):
        # J0(x) + J2(x) = 2 J1(x)/x
        for x in np.linspace(0.1, 100.0, 97):
            lhs = bessel_j0(x) + jn(2, x)
            rhs = 2.0 * bessel_j1(x) / x
            assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_nonfinite_rejected(self):
        for bad in (math.inf, -math.inf, math.nan):
            with pytest.raises(ValueError):
                bessel_j0(bad)
            with pytest.raises(ValueError):
                bessel_j1(bad)


class TestScaledBesselI:
    def test_origin(self):
        assert bessel_i0e(0.0) == 1.0
        assert bessel_i1e(0.0) == 0.0

    def test_i0e_at_1_frozen(self):
        assert bessel_i0e(1.0) == pytest.approx(I0E_AT_1, rel=1e-13)

    def test_sum_at_60_frozen(self):
        # equals 1 - eta at optical depth 60
        total = bessel_i0e(60.0) + bessel_i1e(60.0)
        assert total == pytest.approx(I0E_PLUS_I1E_AT_60, rel=1e-12)
        assert total == pytest.approx(0.1028, abs=5e-5)

    def test_matches_series_oracle(self):
        for x in (0.25, 1.0, 7.0, 33.0, 60.0):
            assert bessel_i0e(x) == pytest.approx(oracles.i0e_series(x), rel=1e-12)
            assert bessel_i1e(x) == pytest.approx(oracles.i1e_series(x), rel=1e-12)

    def test_positive_and_ordered(self):
        for x in np.geomspace(1e-3, 1e6, 40):
            i0, i1 = bessel_i0e(x), bessel_i1e(x)
            assert i0 > 0 and i1 > 0
            assert i1 < i0

    def test_monotone_decreasing_no_overflow(self):
        xs = np.geomspace(1e-2, 1e6, 60)
        vals = [bessel_i0e(x) for x in xs]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert all(math.isfinite(v) for v in vals)

    def test_large_argument_asymptote(self):
        # i0e + i1e ~ sqrt(2/(pi x)) with < 1% deviation beyond x = 500
        for x in (600.0, 5e3, 1e5):
            total = bessel_i0e(x) + bessel_i1e(x)
            assert total == pytest.approx(math.sqrt(2.0 / (math.pi * x)), rel=1e-2)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            bessel_i0e(-1e-9)
        with pytest.raises(ValueError):
            bessel_i1e(-2.0)


class TestIntegrateAdaptive:
    def test_polynomials_exact(self):
        for coeffs in ((1.0,), (0.0, 3.0), (2.0, -1.0, 0.5, 4.0, 0.25, -3.0)):
            exact = sum(c / (k + 1) * (2.0 ** (k + 1) - (-1.0) ** (k + 1))
                        for k, c in enumerate(coeffs))
            res = integrate_adaptive(
                lambda x: sum(c * x**k for k, c in enumerate(coeffs)), -1.0, 2.0, tol=1e-12
            )
            assert res.value == pytest.approx(exact, abs=1e-12)

    def test_gaussian_half_line(self):
        res = integrate_adaptive(lambda x: math.exp(-x * x), 0.0, math.inf, tol=1e-10)
        assert res.value == pytest.approx(math.sqrt(math.pi) / 2.0, abs=1e-10)
        assert res.error_estimate >= 0
        assert res.evaluations >= 1

    def test_lorentzian_full_line(self):
        res = integrate_adaptive(lambda x: 1.0 / (1.0 + x * x), -math.inf, math.inf, tol=1e-10)
        assert res.value == pytest.approx(math.pi, abs=1e-9)

    def test_transmission_integral_matches_bessel_route(self):
        # integral of 1 - exp(-alpha/(1+x^2)) over the line equals
        # pi alpha e^{-alpha/2} (I0 + I1)(alpha/2); checked at alpha = 1
        alpha = 1.0
        res = integrate_adaptive(
            lambda x: -math.expm1(-alpha / (1.0 + x * x)), -math.inf, math.inf, tol=1e-10
        )
        closed = math.pi * alpha * I0E_PLUS_I1E_AT_HALF
        assert res.value == pytest.approx(closed, abs=1e-8)

    def test_non_convergence_carries_best_estimate(self):
        with pytest.raises(QuadratureConvergenceError) as err:
            integrate_adaptive(lambda x: math.sin(1.0 / x), 1e-12, 1.0, tol=1e-14, limit=3)
        assert isinstance(err.value.best, QuadratureResult)
        assert math.isfinite(err.value.best.value)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            integrate_adaptive(lambda x: x, 0.0, 1.0, tol=0.0)
        with pytest.raises(ValueError):
            integrate_adaptive(lambda x: x, 2.0, 1.0)

    def test_result_invariants(self):
        with pytest.raises(ValueError):
            QuadratureResult(value=1.0, error_estimate=-1e-3, evaluations=5)
        with pytest.raises(ValueError):
            QuadratureResult(value=1.0, error_estimate=0.0, evaluations=0)
