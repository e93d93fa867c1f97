"""Tests for the constrained L1 problem and certificate recovery."""

import numpy as np
import pytest

from perspline import (
    InfeasibleTargets,
    LagrangeCertificate,
    MeanInterpolationProblem,
    NullMultiplier,
    PeriodicFunction,
    TooManySignChanges,
    WeightFunction,
    assemble_basis,
    build_candidate,
    compute_targets,
    count_sign_changes,
    extract_knots,
    recover_certificate,
    solve_l1,
)
from perspline.extremal import sign_balance

SIN = PeriodicFunction.from_harmonics([(1, 0.0, 1.0)])
COS = PeriodicFunction.from_harmonics([(1, 1.0, 0.0)])
TWO_PI = 2 * np.pi


def canonical_problem(smoothing=1e-3):
    nodes = tuple((x, WeightFunction("box", 0.1))
                  for x in (np.pi / 2, np.pi, 3 * np.pi / 2))
    targets = compute_targets(SIN, nodes)
    return MeanInterpolationProblem(r=2, m=1, nodes=nodes, targets=targets,
                                    smoothing=smoothing, grid_n=2048,
                                    bandwidth=4096)


class TestProblemValidation:
    def test_node_count(self):
        nodes = ((1.0, WeightFunction("box", 0.1)),
                 (2.0, WeightFunction("box", 0.1)))
        with pytest.raises(ValueError):
            MeanInterpolationProblem(r=1, m=1, nodes=nodes,
                                     targets=np.zeros(2), smoothing=0.0,
                                     grid_n=256, bandwidth=256)

    def test_overlapping_supports(self):
        nodes = ((1.0, WeightFunction("box", 0.3)),
                 (1.4, WeightFunction("box", 0.3)),
                 (3.0, WeightFunction("box", 0.3)))
        with pytest.raises(ValueError):
            MeanInterpolationProblem(r=1, m=1, nodes=nodes,
                                     targets=np.zeros(3), smoothing=0.0,
                                     grid_n=256, bandwidth=256)


class TestTargets:
    def test_constant_function(self):
        nodes = ((1.0, WeightFunction("box", 0.2)),
                 (3.0, WeightFunction("triangle", 0.2)),
                 (5.0, WeightFunction("delta", 0.0)))
        c = compute_targets(PeriodicFunction.constant(3.7), nodes)
        assert np.allclose(c, 3.7, atol=1e-14)

    def test_delta_is_point_value(self):
        nodes = ((np.pi / 2, WeightFunction("delta", 0.0)),)
        c = compute_targets(SIN, nodes)
        assert c[0] == pytest.approx(1.0, abs=1e-14)

    def test_box_closed_form(self):
        # (1/2 eps) int_{x-eps}^{x+eps} sin = sin(x) sin(eps) / eps
        nodes = ((1.0, WeightFunction("box", 0.3)),)
        c = compute_targets(SIN, nodes)
        assert c[0] == pytest.approx(np.sin(1.0) * np.sin(0.3) / 0.3,
                                     abs=1e-13)


class TestBasis:
    def test_zero_mean(self):
        p = canonical_problem()
        for psi in assemble_basis(p):
            assert psi.coeff(0) == 0.0

    def test_delta_basis_is_shifted_kernel(self):
        # with delta weights and no smoothing, psi_k is the order-r
        # antiderivative kernel translated to x_k
        x_k = 1.3
        nodes = ((x_k, WeightFunction("delta", 0.0)),
                 (3.0, WeightFunction("delta", 0.0)),
                 (5.0, WeightFunction("delta", 0.0)))
        p = MeanInterpolationProblem(r=2, m=1, nodes=nodes,
                                     targets=np.array([0.0, 0.5, 1.0]),
                                     smoothing=0.0, grid_n=512, bandwidth=64)
        psi = assemble_basis(p)[0]
        js = np.arange(1, 10)
        expected = (1j * js.astype(float)) ** (-2.0) * np.exp(-1j * js * x_k)
        got = np.array([psi.coeff(j) for j in js])
        assert np.max(np.abs(got - expected)) < 1e-14

    def test_reference_coefficient(self):
        # box half-width pi/2, smoothing 1, order 2, j = 1:
        # sech(1) * (i)^{-2} * (2/pi) * exp(-i x_k)
        x_k = 2.0
        nodes = ((x_k, WeightFunction("box", np.pi / 2)),
                 (5.0, WeightFunction("delta", 0.0)),
                 (6.0, WeightFunction("delta", 0.0)))
        p = MeanInterpolationProblem(r=2, m=1, nodes=nodes,
                                     targets=np.array([0.0, 0.5, 1.0]),
                                     smoothing=1.0, grid_n=512, bandwidth=64)
        psi = assemble_basis(p)[0]
        expected = (1.0 / np.cosh(1.0)) * (1j ** -2) * (2 / np.pi) \
            * np.exp(-1j * x_k)
        assert psi.coeff(1) == pytest.approx(expected, abs=1e-14)


class TestSolveL1:
    def test_constraints_and_positivity(self):
        p = canonical_problem()
        sol = solve_l1(p)
        assert np.dot(sol.coeffs, p.targets) == pytest.approx(1.0, abs=1e-10)
        assert np.sum(sol.coeffs) == pytest.approx(0.0, abs=1e-10)
        assert sol.objective > 0.0
        assert count_sign_changes(sol.g, p.grid) <= 2 * p.m

    def test_local_optimality(self):
        # perturbing the optimizer along random feasible directions never
        # improves the discretized objective
        p = canonical_problem()
        sol = solve_l1(p)
        xs = p.grid.points
        psi = np.column_stack([b.evaluate(xs) for b in assemble_basis(p)])
        w = p.grid.weight

        def objective(c, ck):
            return w * np.sum(np.abs(c + psi @ ck))

        base = objective(sol.c, sol.coeffs)
        rng = np.random.default_rng(0)
        null = np.linalg.svd(np.vstack([p.targets, np.ones(3)]))[2][2:]
        for _ in range(20):
            d_ck = null.T @ rng.normal(size=null.shape[0])
            d_c = rng.normal()
            scale = 1e-6 / max(np.abs(d_c), np.max(np.abs(d_ck)))
            for sgn in (+1, -1):
                val = objective(sol.c + sgn * scale * d_c,
                                sol.coeffs + sgn * scale * d_ck)
                assert val >= base - 1e-12

    def test_all_equal_targets_rejected(self):
        p = canonical_problem()
        flat = MeanInterpolationProblem(
            r=p.r, m=p.m, nodes=p.nodes, targets=np.full(3, 2.5),
            smoothing=p.smoothing, grid_n=p.grid_n, bandwidth=p.bandwidth)
        with pytest.raises(InfeasibleTargets):
            solve_l1(flat)


class TestCertificate:
    def test_unit_sphere_required(self):
        with pytest.raises(ValueError):
            LagrangeCertificate(1.0, 1.0, 0.0)
        with pytest.raises(NullMultiplier):
            LagrangeCertificate(1.0, 0.0, 0.0)

    def test_recovered_certificate(self):
        p = canonical_problem()
        sol = solve_l1(p)
        cert = recover_certificate(sol, p)
        assert cert.eta ** 2 + cert.lam ** 2 + cert.mu ** 2 == pytest.approx(
            1.0, abs=1e-12)
        assert abs(cert.eta) > 1e-8 and abs(cert.lam) > 1e-8
        # stationarity in the constant term: sgn g averages to zero up to
        # the grid granularity of +-1 counts
        assert abs(sign_balance(sol, p)) <= 16.0 / p.grid_n


class TestExtractKnots:
    def test_sin2x_roots(self):
        f = PeriodicFunction.from_harmonics([(2, 0.0, 1.0)])
        knots = extract_knots(f)
        assert np.allclose(np.sort(knots % TWO_PI),
                           [0.0, np.pi / 2, np.pi, 3 * np.pi / 2], atol=1e-10)

    def test_positive_function_has_none(self):
        f = COS + PeriodicFunction.constant(2.0)
        assert extract_knots(f).size == 0

    def test_shifted_sin_roots(self):
        f = SIN + PeriodicFunction.constant(0.5)
        knots = extract_knots(f)
        assert np.allclose(knots, [7 * np.pi / 6, 11 * np.pi / 6], atol=1e-10)

    def test_budget_enforced(self):
        f = PeriodicFunction.from_harmonics([(3, 0.0, 1.0)])
        with pytest.raises(TooManySignChanges):
            extract_knots(f, max_changes=4)


class TestBuildCandidate:
    def _problem(self, r):
        nodes = tuple((x, WeightFunction("box", 0.1))
                      for x in (np.pi / 2, np.pi, 3 * np.pi / 2))
        return MeanInterpolationProblem(r=r, m=1, nodes=nodes,
                                        targets=np.array([0.0, 0.5, 1.0]),
                                        smoothing=0.0, grid_n=512,
                                        bandwidth=512)

    def test_even_order_formula(self):
        cert = LagrangeCertificate(1 / np.sqrt(2), 1 / np.sqrt(2), 0.0)
        g = PeriodicFunction.from_harmonics([(1, 0.0, 1.0)])
        s = build_candidate(np.array([0.0, np.pi]), cert, g, self._problem(2))
        assert s.xi == pytest.approx(-1.0)
        assert s.offset == 0.0
        assert s.lead_sign == 1  # g = sin > 0 on (0, pi)

    def test_odd_order_formula(self):
        cert = LagrangeCertificate(1 / np.sqrt(2), 1 / np.sqrt(2), 0.0)
        g = PeriodicFunction.from_harmonics([(1, 0.0, 1.0)])
        s = build_candidate(np.array([0.0, np.pi]), cert, g, self._problem(1))
        assert s.xi == pytest.approx(1.0)

    def test_offset_formula(self):
        v = np.array([1.0, 2.0, 1.0])
        v /= np.linalg.norm(v)
        cert = LagrangeCertificate(*v)
        g = PeriodicFunction.from_harmonics([(1, 0.0, 1.0)])
        s = build_candidate(np.array([0.0, np.pi]), cert, g, self._problem(2))
        assert s.offset == pytest.approx(-0.5)


class TestSmoothingRobustness:
    def test_candidate_knots_stable_in_smoothing(self):
        knot_sets = []
        for eps in (1e-3, 0.0):
            p = canonical_problem(smoothing=eps)
            sol = solve_l1(p)
            knot_sets.append(extract_knots(sol.g, p.grid, max_changes=2))
        assert knot_sets[0].size == knot_sets[1].size == 2
        assert np.max(np.abs(knot_sets[0] - knot_sets[1])) <= 1e-3
