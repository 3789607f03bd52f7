"""Special-function accuracy and property tests.

Expected values come from independent oracles: a 60-term Maclaurin series
for erfi, mpmath's arbitrary-precision functions, and central finite
differences for the potential's derivatives.
"""

import math

import mpmath
import numpy as np
import pytest

import oracles
from regretlab import specfun


class TestErfi:
    def test_zero(self):
        assert specfun.erfi(0.0) == 0.0

    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
    def test_odd_symmetry(self, x):
        assert specfun.erfi(-x) == -specfun.erfi(x)

    def test_series_oracle_at_one(self):
        expected = oracles.erfi_series(1.0)
        assert abs(specfun.erfi(1.0) - expected) <= 1e-12 * abs(expected)

    def test_accuracy_against_mpmath(self):
        # relative error <= 1e-12 across |x| <= 8, both evaluation regimes
        xs = np.concatenate([np.linspace(-8, 8, 401), [-1.5, 1.5, -1.5001, 1.5001]])
        for x in xs:
            if x == 0.0:
                continue
            ref = float(mpmath.erfi(mpmath.mpf(float(x))))
            assert abs(specfun.erfi(float(x)) - ref) <= 1e-12 * abs(ref), x

    def test_large_argument_no_premature_overflow(self):
        assert np.isfinite(specfun.erfi(26.0))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            specfun.erfi(float("nan"))
        with pytest.raises(ValueError):
            specfun.erfi(np.array([1.0, np.inf]))

    def test_vectorized_matches_scalar(self):
        xs = np.array([-3.0, -0.25, 0.0, 0.7, 4.0])
        vec = specfun.erfi(xs)
        np.testing.assert_array_equal(vec, [specfun.erfi(float(x)) for x in xs])


class TestDawson:
    def test_against_mpmath(self):
        for x in np.linspace(-6, 6, 121):
            ref = float(mpmath.exp(-mpmath.mpf(float(x)) ** 2)
                        * mpmath.sqrt(mpmath.pi) / 2 * mpmath.erfi(mpmath.mpf(float(x))))
            assert abs(specfun.dawson(float(x)) - ref) <= 1e-13 * max(1.0, abs(ref))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            specfun.dawson(float("inf"))


class TestM0:
    def test_at_zero(self):
        assert specfun.m0(0.0) == 1.0

    def test_root_matches_lambda_zero(self):
        lam0 = specfun.lambda_inv(0.0)
        assert abs(specfun.m0(lam0 * lam0 / 2.0)) <= 1e-9

    def test_half_against_series_oracle(self):
        expected = oracles.m0_reference(0.5)
        assert abs(specfun.m0(0.5) - expected) <= 1e-10

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            specfun.m0(-1.0)

    def test_strictly_decreasing(self):
        grid = np.linspace(0.0, 50.0, 10_000)
        vals = specfun.m0(grid)
        assert np.all(np.diff(vals) < 0.0)

    def test_signed_log_matches_direct(self):
        alphas = np.array([0.0, 0.1, 0.5, 2.0, 30.0, 200.0])
        sign, logabs = specfun.m0_signed_log(alphas)
        direct = specfun.m0(alphas)
        np.testing.assert_allclose(sign * np.exp(logabs), direct, rtol=1e-12)

    def test_signed_log_deep_tail(self):
        sign, logabs = specfun.m0_signed_log(1e7)
        assert sign == -1.0
        # M0(a) ~ -e^a / (2a): log|M0| = a - log(2a) + o(1)
        assert abs(logabs - (1e7 - math.log(2e7))) < 1e-4 * 1e7


class TestPhi:
    def test_at_origin(self):
        assert specfun.phi(1.0, 0.0) == 1.0

    def test_truncated_region(self):
        assert specfun.phi(4.0, -3.0) == 2.0

    def test_composition_with_m0(self):
        assert specfun.phi(1.0, 1.0) == specfun.m0(0.5)

    def test_rejects_non_positive_t(self):
        with pytest.raises(ValueError):
            specfun.phi(0.0, 1.0)
        with pytest.raises(ValueError):
            specfun.phi(-1.0, 1.0)

    def test_bounded_by_sqrt_t(self):
        for t in (0.5, 1.0, 10.0, 100.0):
            x = np.linspace(-5 * math.sqrt(t), 5 * math.sqrt(t), 2001)
            assert np.all(specfun.phi(t, x) <= math.sqrt(t) + 1e-15)

    def test_concave_in_x(self):
        # second central difference of a concave function is non-positive
        for t in (0.5, 1.0, 10.0, 100.0):
            x = np.linspace(-5 * math.sqrt(t), 5 * math.sqrt(t), 2001)
            h = x[1] - x[0]
            second = specfun.phi(t, x[2:]) + specfun.phi(t, x[:-2]) - 2.0 * specfun.phi(t, x[1:-1])
            assert np.all(second <= 1e-9 * max(1.0, h * h))

    def test_decreasing_on_positive_axis(self):
        x = np.linspace(0.0, 20.0, 4001)
        vals = specfun.phi(4.0, x)
        assert np.all(np.diff(vals) < 0.0)


class TestPhiDerivatives:
    def test_flat_left_of_kink(self):
        assert specfun.phi_dx(1.0, -2.0) == 0.0
        assert specfun.phi_dxx(1.0, -2.0) == 0.0

    def test_time_derivative_at_origin(self):
        assert specfun.phi_dt(1.0, 0.0) == 0.5

    def test_second_derivative_right_limit_at_kink(self):
        for t in (0.5, 1.0, 4.0):
            assert specfun.phi_dxx(t, 0.0) == -1.0 / math.sqrt(t)
            eps_val = specfun.phi_dxx(t, 1e-12)
            assert abs(eps_val - specfun.phi_dxx(t, 0.0)) < 1e-10

    def test_dx_matches_finite_difference_example(self):
        fd = oracles.fd_dx(lambda x: specfun.phi(2.0, x), 1.0)
        assert abs(specfun.phi_dx(2.0, 1.0) - fd) <= 1e-6

    @pytest.mark.parametrize("t", [0.5, 1.0, 10.0])
    def test_derivatives_match_finite_differences(self, t):
        xs = np.concatenate([
            -np.geomspace(1e-2, 4 * math.sqrt(t), 25),
            np.geomspace(1e-2, 4 * math.sqrt(t), 25),
        ])
        for x in xs:
            x = float(x)
            scale = max(1.0, abs(specfun.phi_dt(t, x)))
            fd_x = oracles.fd_dx(lambda u: specfun.phi(t, u), x)
            assert abs(specfun.phi_dx(t, x) - fd_x) <= 1e-6 * scale
            fd_t = oracles.fd_dx(lambda u: specfun.phi(u, x), t)
            assert abs(specfun.phi_dt(t, x) - fd_t) <= 1e-6 * scale
            if abs(x) > 1e-3 + 1e-3:  # keep the stencil off the kink
                fd_xx = oracles.fd_dxx(lambda u: specfun.phi(t, u), x)
                assert abs(specfun.phi_dxx(t, x) - fd_xx) <= 1e-6 * max(
                    1.0, abs(specfun.phi_dxx(t, x)))


class TestLambdaInv:
    def test_at_zero(self):
        assert abs(specfun.lambda_inv(0.0) - 1.3069) <= 1e-3

    def test_upper_bound_example(self):
        assert specfun.lambda_inv(3.0) <= 3.0 + math.sqrt(2.0 * math.log(4.0))

    @pytest.mark.parametrize("lam_star", [1.5, 3.0])
    def test_round_trip(self, lam_star):
        # only meaningful where -M0 is non-negative, i.e. lam >= lambda(0)
        alpha = -specfun.m0(lam_star * lam_star / 2.0)
        assert alpha >= 0.0
        assert abs(specfun.lambda_inv(alpha) - lam_star) <= 1e-8

    def test_strictly_increasing(self):
        alphas = np.concatenate([[0.0], np.geomspace(1e-3, 1e5, 200)])
        lams = specfun.lambda_inv(alphas)
        assert np.all(np.diff(lams) > 0.0)

    def test_query_validation(self):
        with pytest.raises(ValueError):
            specfun.LambdaQuery(-1.0)
        with pytest.raises(ValueError):
            specfun.LambdaQuery(1.0, tolerance=0.0)
        with pytest.raises(ValueError):
            specfun.lambda_inv(-0.5)

    def test_query_object_accepted(self):
        q = specfun.LambdaQuery(2.0, tolerance=1e-9)
        lam = specfun.lambda_inv(q)
        assert abs(-specfun.m0(lam * lam / 2.0) - 2.0) <= 1e-8
