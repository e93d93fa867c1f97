"""Tests for the spectral representation of periodic functions."""

import numpy as np
import pytest

from perspline import (
    AllZero,
    BernoulliKernel,
    PeriodicFunction,
    SpectralGrid,
    convolve,
    count_sign_changes,
    derivative,
    evaluate,
    sup_norm,
)

SIN = PeriodicFunction.from_harmonics([(1, 0.0, 1.0)])
COS = PeriodicFunction.from_harmonics([(1, 1.0, 0.0)])


def random_trig(rng, degree):
    terms = [(j, rng.uniform(-1, 1), rng.uniform(-1, 1))
             for j in range(degree + 1)]
    return PeriodicFunction.from_harmonics(terms)


class TestGrid:
    def test_points_and_weight(self):
        g = SpectralGrid(8)
        assert g.points[0] == 0.0
        assert np.allclose(np.diff(g.points), 2 * np.pi / 8)
        assert g.weight == pytest.approx(2 * np.pi / 8)

    def test_rejects_odd_or_tiny(self):
        with pytest.raises(ValueError):
            SpectralGrid(7)
        with pytest.raises(ValueError):
            SpectralGrid(2)


class TestEvaluate:
    def test_cos_at_zero(self):
        assert evaluate(COS, 0.0) == pytest.approx(1.0, abs=1e-14)

    def test_sin3x_at_pi_over_6(self):
        f = PeriodicFunction.from_harmonics([(3, 0.0, 1.0)])
        assert evaluate(f, np.pi / 6) == pytest.approx(1.0, abs=1e-14)

    def test_sin_plus_cos_at_pi_over_4(self):
        f = SIN + COS
        assert evaluate(f, np.pi / 4) == pytest.approx(np.sqrt(2.0), abs=1e-12)

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(0)
        f = random_trig(rng, 6)
        xs = rng.uniform(-10, 10, 37)
        vec = f.evaluate(xs)
        assert np.allclose(vec, [f.evaluate(x) for x in xs], atol=1e-13)

    def test_period_reduction(self):
        rng = np.random.default_rng(1)
        f = random_trig(rng, 5)
        x = 1.234
        assert f.evaluate(x) == pytest.approx(f.evaluate(x + 6 * np.pi),
                                              abs=1e-10)


class TestSampleAndFit:
    def test_sample_matches_pointwise(self):
        rng = np.random.default_rng(2)
        f = random_trig(rng, 8)
        g = SpectralGrid(64)
        assert np.allclose(f.sample(64), f.evaluate(g.points), atol=1e-12)

    def test_fit_round_trip(self):
        # sampling a degree-J trig polynomial on N >= 2J+2 points and
        # refitting must reproduce the coefficients
        rng = np.random.default_rng(3)
        f = random_trig(rng, 10)
        values = f.sample(32)
        g = PeriodicFunction.fit_from_samples(values, 10)
        assert np.max(np.abs(f.coeffs - g.coeffs)) < 1e-12


class TestConvolve:
    def test_unit_mass_preserves_constants(self):
        one = PeriodicFunction.constant(1.0)
        # kernel with unit integral over the period: coeff(0) = 1/(2 pi)
        kernel = PeriodicFunction.from_harmonics(
            [(0, 1.0 / (2 * np.pi), 0.0), (1, 0.3, -0.2), (2, 0.1, 0.0)])
        h = convolve(one, kernel)
        xs = np.linspace(0, 2 * np.pi, 17)
        assert np.allclose(h.evaluate(xs), 1.0, atol=1e-12)

    def test_sin_with_antiderivative_kernel(self):
        b1 = BernoulliKernel(1).as_function(8)
        h = convolve(SIN, b1)
        xs = np.linspace(0, 2 * np.pi, 33)
        assert np.allclose(h.evaluate(xs), -np.cos(xs), atol=1e-12)

    def test_cos_with_cos(self):
        h = convolve(COS, COS)
        xs = np.linspace(0, 2 * np.pi, 33)
        assert np.allclose(h.evaluate(xs), np.pi * np.cos(xs), atol=1e-12)

    def test_commutative_and_bilinear(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            f, g, h = (random_trig(rng, 8) for _ in range(3))
            a = rng.uniform(-2, 2)
            lhs = convolve(f, g)
            rhs = convolve(g, f)
            assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) < 1e-12
            lin = convolve(f + h * a, g)
            split = convolve(f, g) + convolve(h, g) * a
            assert np.max(np.abs(lin.coeffs - split.coeffs)) < 1e-12


class TestDerivative:
    def test_sin_prime_is_cos(self):
        d = derivative(SIN, 1)
        assert np.max(np.abs(d.coeffs - COS.coeffs)) < 1e-15

    def test_cos2x_second_derivative(self):
        f = PeriodicFunction.from_harmonics([(2, 1.0, 0.0)])
        d = derivative(f, 2)
        target = PeriodicFunction.from_harmonics([(2, -4.0, 0.0)])
        assert np.max(np.abs(d.coeffs - target.coeffs)) < 1e-14

    def test_constant_derivative_vanishes(self):
        d = derivative(PeriodicFunction.constant(5.0), 1)
        assert np.max(np.abs(d.coeffs)) == 0.0

    def test_antiderivative_inverts_derivative(self):
        # convolving with the order-r antiderivative kernel and then
        # differentiating r times recovers the mean-zero part
        rng = np.random.default_rng(5)
        for r in (1, 2, 3):
            f = random_trig(rng, 8)
            mean_zero = f + PeriodicFunction.constant(-float(np.real(f.coeff(0))))
            h = convolve(mean_zero, BernoulliKernel(r).as_function(8))
            back = derivative(h, r)
            assert np.max(np.abs(back.coeffs - mean_zero.coeffs)) < 1e-10


class TestSupNorm:
    def test_pure_harmonic(self):
        f = PeriodicFunction.from_harmonics([(2, 0.0, 3.0)])
        assert sup_norm(f) == pytest.approx(3.0, rel=1e-10)

    def test_negative_constant(self):
        assert sup_norm(PeriodicFunction.constant(-2.0)) == pytest.approx(2.0)

    def test_sin_plus_cos(self):
        assert sup_norm(SIN + COS) == pytest.approx(np.sqrt(2.0), rel=1e-10)

    def test_off_grid_maximum_refined(self):
        # maximum of cos(x - 0.1) sits between grid points
        f = PeriodicFunction.from_harmonics([(1, np.cos(0.1), np.sin(0.1))])
        assert sup_norm(f, SpectralGrid(64)) == pytest.approx(1.0, rel=1e-10)


class TestSignChanges:
    def test_sin3x(self):
        f = PeriodicFunction.from_harmonics([(3, 0.0, 1.0)])
        assert count_sign_changes(f) == 6

    def test_strictly_positive(self):
        f = COS + PeriodicFunction.constant(2.0)
        assert count_sign_changes(f) == 0

    def test_shifted_sin(self):
        f = SIN + PeriodicFunction.constant(0.5)
        assert count_sign_changes(f) == 2

    def test_count_is_even(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            f = random_trig(rng, 6)
            assert count_sign_changes(f) % 2 == 0

    def test_all_zero_raises(self):
        with pytest.raises(AllZero):
            count_sign_changes(PeriodicFunction.zero(4))
