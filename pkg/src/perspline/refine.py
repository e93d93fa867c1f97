"""Damped Gauss-Newton polish of the candidate spline.

Unknowns are theta = (t_0..t_{2n-1}, xi, a).  Residuals are the weighted
interpolation equations plus the alternating knot-length sum that encodes
periodicity of s^(r-1):

    R_0(theta) = sum_i (-1)^i (t_{i+1} - t_i)
    R_k(theta) = int phi_k(x - x_k) s_theta(x) dx - C_k

The weighted means and their knot derivatives are evaluated through the
step spectrum, so the Jacobian is closed-form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    KnotOrderViolation,
    NoConvergence,
    StalledLineSearch,
)
from .extremal import MeanInterpolationProblem
from .spectral import TWO_PI
from .spline import PerfectSpline, alternating_knot_sum

_COLLISION_GAP = 1e-9


@dataclass
class KnotSystem:
    """Residual/Jacobian evaluator for a fixed problem and leading sign.

    Precomputes D[k, j] = (i j)^-r what_k(j) e^{i j x_k} for j = 1..J so a
    residual evaluation is one complex matrix-vector product.
    """

    problem: MeanInterpolationProblem
    lead_sign: int

    def __post_init__(self):
        p = self.problem
        js = np.arange(1, p.bandwidth + 1, dtype=float)
        bern = (1j * js) ** (-float(p.r))
        rows = []
        for x_k, w in p.nodes:
            rows.append(bern * w.transfer(js) * np.exp(1j * js * x_k))
        self._design = np.array(rows)          # (K, J)
        self._js = js

    def _sigma_pos(self, knots: np.ndarray) -> np.ndarray:
        alt = self.lead_sign * (-1.0) ** np.arange(knots.size)
        phases = np.exp(-1j * np.outer(self._js, knots))
        return (phases @ alt) / (np.pi * 1j * self._js)

    def _check_knots(self, knots: np.ndarray) -> None:
        if knots.size % 2 != 0 or knots.size == 0:
            raise KnotOrderViolation("need a positive even number of knots")
        if np.any(np.diff(knots) <= 0) or knots[-1] - knots[0] >= TWO_PI:
            raise KnotOrderViolation(
                "knots must be strictly increasing within one period"
            )

    def residuals(self, theta: np.ndarray) -> np.ndarray:
        p = self.problem
        knots, xi, a = theta[:-2], theta[-2], theta[-1]
        self._check_knots(knots)
        sigma = self._sigma_pos(knots)
        means = xi * 2.0 * np.real(self._design @ sigma) + a
        return np.concatenate(
            [[alternating_knot_sum(knots)], means - p.targets]
        )

    def jacobian(self, theta: np.ndarray) -> np.ndarray:
        p = self.problem
        knots, xi, _ = theta[:-2], theta[-2], theta[-1]
        self._check_knots(knots)
        n_knots = knots.size
        k = p.node_count
        jac = np.zeros((k + 1, n_knots + 2))
        alt = (-1.0) ** np.arange(n_knots)
        jac[0, :n_knots] = -2.0 * alt
        # d sigmahat(j) / d t_i = -(lead/pi) (-1)^i e^{-i j t_i}
        phases = np.exp(-1j * np.outer(self._js, knots))  # (J, 2n)
        dmeans = -xi * (self.lead_sign / np.pi) * alt * \
            2.0 * np.real(self._design @ phases)          # (K, 2n)
        jac[1:, :n_knots] = dmeans
        sigma = self._sigma_pos(knots)
        jac[1:, n_knots] = 2.0 * np.real(self._design @ sigma)
        jac[1:, n_knots + 1] = 1.0
        return jac


def _cyclic_gaps(knots: np.ndarray) -> np.ndarray:
    gaps = np.diff(knots)
    return np.append(gaps, knots[0] + TWO_PI - knots[-1])


def _delete_collided_pair(knots: np.ndarray, lead_sign: int):
    """Drop the closest adjacent pair (cyclically), preserving sign parity."""
    gaps = _cyclic_gaps(knots)
    i = int(np.argmin(gaps))
    if i < knots.size - 1:
        kept = np.delete(knots, [i, i + 1])
        new_lead = lead_sign
    else:
        kept = knots[1:-1]
        new_lead = -lead_sign
    return kept, new_lead


def _canonical(knots: np.ndarray, lead_sign: int):
    """Wrap knots into [0, 2*pi) sorted; the leading sign follows the
    cyclic rotation parity."""
    wrapped = knots % TWO_PI
    shift = int(np.argmin(wrapped))
    return np.sort(wrapped), lead_sign * (-1) ** shift


def gauss_newton(theta0: np.ndarray, p: MeanInterpolationProblem,
                 lead_sign: int, tol: float = 1e-11, max_iter: int = 50
                 ) -> PerfectSpline:
    """Refine (knots, xi, a) by damped Gauss-Newton until ||R||_inf <= tol.

    Steps are halved until the 2-norm of the residual strictly decreases.
    Knots closing within 1e-9 of each other are deleted in pairs; the
    system then continues overdetermined in the least-squares sense.
    """
    theta = np.asarray(theta0, dtype=float).copy()
    lead = lead_sign
    system = KnotSystem(p, lead)
    res = system.residuals(theta)
    norm2 = float(np.linalg.norm(res))
    for _ in range(max_iter):
        # collision handling before the step
        knots = theta[:-2]
        if np.min(_cyclic_gaps(knots)) < _COLLISION_GAP:
            new_knots, lead = _delete_collided_pair(knots, lead)
            if new_knots.size == 0:
                raise NoConvergence("all knots collided away")
            theta = np.concatenate([new_knots, theta[-2:]])
            system = KnotSystem(p, lead)
            res = system.residuals(theta)
            norm2 = float(np.linalg.norm(res))
        if np.max(np.abs(res)) <= tol:
            break
        jac = system.jacobian(theta)
        accepted = False
        # plain Gauss-Newton step first; if halving cannot find descent,
        # retry with increasing Levenberg-Marquardt damping (the Jacobian
        # can be near-singular when two knots approach each other)
        for damping in (0.0, 1e-10, 1e-6, 1e-3, 1e-1, 1e1):
            if damping == 0.0:
                step, _, _, _ = np.linalg.lstsq(jac, -res, rcond=None)
            else:
                jtj = jac.T @ jac
                reg = jtj + damping * np.diag(np.maximum(np.diag(jtj), 1e-12))
                step = np.linalg.solve(reg, -jac.T @ res)
            alpha = 1.0
            while alpha >= 1e-12:
                cand = theta + alpha * step
                try:
                    cand_res = system.residuals(cand)
                    cand_norm = float(np.linalg.norm(cand_res))
                except KnotOrderViolation:
                    cand_norm = np.inf
                if cand_norm < norm2:
                    theta, res, norm2 = cand, cand_res, cand_norm
                    accepted = True
                    break
                alpha *= 0.5
            if accepted:
                break
        if not accepted:
            if np.max(np.abs(res)) <= tol:
                break
            raise StalledLineSearch(
                f"no descent direction at ||R||_inf = {np.max(np.abs(res)):.3e}"
            )
        if np.max(np.abs(res)) <= tol:
            break
    else:
        if np.max(np.abs(res)) > tol:
            raise NoConvergence(
                f"||R||_inf = {np.max(np.abs(res)):.3e} after {max_iter} iterations"
            )
    knots, lead = _canonical(theta[:-2], lead)
    return PerfectSpline(r=p.r, knots=knots, lead_sign=lead,
                         xi=float(theta[-2]), offset=float(theta[-1]),
                         mean_zero_tol=max(10 * tol, 1e-9))
